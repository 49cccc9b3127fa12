import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whichway import qmath
from whichway.qmath import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z

angles = st.floats(0, 2 * np.pi, allow_nan=False)
unit = st.floats(0, 1, allow_nan=False)


@st.composite
def bloch_vectors(draw):
    theta = draw(st.floats(0, np.pi))
    phi = draw(angles)
    r = draw(unit)
    return r * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


@st.composite
def unitaries(draw):
    a, b, c, d = (draw(angles) for _ in range(4))
    return np.exp(1j * a) * qmath.rz(b) @ qmath.ry(c) @ qmath.rz(d)


def random_density(rng):
    return qmath.bloch_to_density(qmath.random_bloch(rng))


def random_hermitian(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return 0.5 * (a + a.conj().T)


class TestBlochDensity:
    def test_plus_z(self):
        np.testing.assert_allclose(qmath.bloch_to_density([0, 0, 1]), np.diag([1, 0]))

    def test_origin_is_maximally_mixed(self):
        np.testing.assert_allclose(qmath.bloch_to_density([0, 0, 0]), 0.5 * IDENTITY2)

    def test_unit_vector_eigenvalues(self):
        rho = qmath.bloch_to_density([0.6, 0, 0.8])
        np.testing.assert_allclose(np.linalg.eigvalsh(rho), [0, 1], atol=1e-15)

    def test_rejects_long_vector(self):
        with pytest.raises(qmath.UnphysicalStateError):
            qmath.bloch_to_density([0, 0.8, 0.8])

    def test_inverse_examples(self):
        np.testing.assert_allclose(qmath.density_to_bloch(0.5 * IDENTITY2), [0, 0, 0])
        np.testing.assert_allclose(qmath.density_to_bloch(np.diag([1, 0])), [0, 0, 1])

    def test_random_pure_has_unit_norm(self, rng):
        for _ in range(100):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v /= np.linalg.norm(v)
            s = qmath.density_to_bloch(np.outer(v, v.conj()))
            assert abs(np.linalg.norm(s) - 1) < 1e-12

    def test_rejects_non_density(self):
        with pytest.raises(qmath.UnphysicalStateError):
            qmath.density_to_bloch(np.diag([1.1, 0]))
        with pytest.raises(qmath.UnphysicalStateError):
            qmath.density_to_bloch(np.diag([1.5, -0.5]))

    def test_round_trip_batch(self, rng):
        worst = 0.0
        for _ in range(10_000):
            s = qmath.random_bloch(rng)
            worst = max(worst, np.max(np.abs(qmath.density_to_bloch(qmath.bloch_to_density(s)) - s)))
        assert worst < 1e-13

    @given(bloch_vectors())
    def test_valid_density_properties(self, s):
        rho = qmath.bloch_to_density(s)
        assert abs(np.trace(rho) - 1) < 1e-13
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-12
        assert qmath.is_density(rho)


class TestTensorAndPartialTrace:
    def test_identity(self):
        np.testing.assert_allclose(qmath.tensor(IDENTITY2, IDENTITY2), np.eye(4))

    def test_ordering(self):
        np.testing.assert_allclose(qmath.tensor(np.diag([1, 0]), np.diag([0, 1])),
                                   np.diag([0, 1, 0, 0]))

    def test_trace_multiplies(self, rng):
        rho = qmath.tensor(random_density(rng), random_density(rng))
        assert abs(np.trace(rho) - 1) < 1e-14

    @given(bloch_vectors(), bloch_vectors())
    def test_product_state_factors(self, a, b):
        ra, rb = qmath.bloch_to_density(a), qmath.bloch_to_density(b)
        rho = qmath.tensor(ra, rb)
        np.testing.assert_allclose(qmath.partial_trace(rho, keep="quanton"), ra, atol=1e-13)
        np.testing.assert_allclose(qmath.partial_trace(rho, keep="detector"), rb, atol=1e-13)

    def test_bell_state_reduces_to_mixed(self):
        psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        bell = np.outer(psi, psi)
        for keep in ("quanton", "detector"):
            np.testing.assert_allclose(qmath.partial_trace(bell, keep), 0.5 * IDENTITY2, atol=1e-15)

    def test_matches_explicit_sum(self, rng):
        # tr_D rho = sum_j (1 x <j|) rho (1 x |j>)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        basis = np.eye(2)
        tr_d = sum(np.kron(IDENTITY2, basis[j][None, :]) @ rho @ np.kron(IDENTITY2, basis[j][:, None])
                   for j in range(2))
        np.testing.assert_allclose(qmath.partial_trace(rho, keep="quanton"), tr_d, atol=1e-14)

    def test_rejects_bad_subsystem_and_input(self):
        with pytest.raises(ValueError):
            qmath.partial_trace(np.eye(4) / 4, "both")
        with pytest.raises(qmath.UnphysicalStateError):
            qmath.partial_trace(np.eye(4), "quanton")


class TestEigenvaluesAndTraceNorm:
    def test_diagonal(self):
        assert qmath.hermitian_eigenvalues(np.diag([3, -1])) == pytest.approx((3, -1))

    def test_half_sigma_x(self):
        assert qmath.hermitian_eigenvalues(0.5 * SIGMA_X) == pytest.approx((0.5, -0.5))

    def test_characteristic_polynomial(self, rng):
        for _ in range(1000):
            m = random_hermitian(rng)
            t, det = np.trace(m).real, np.linalg.det(m).real
            for lam in qmath.hermitian_eigenvalues(m):
                assert abs(lam**2 - t * lam + det) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            qmath.hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
        with pytest.raises(ValueError):
            qmath.trace_norm(np.array([[0, 1j], [1j, 0]]))

    def test_trace_norm_examples(self):
        assert qmath.trace_norm(np.zeros((2, 2))) == 0
        assert qmath.trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1)

    def test_trace_norm_vs_eigh(self, rng):
        for _ in range(1000):
            w = rng.uniform()
            m = w * random_density(rng) - (1 - w) * random_density(rng)
            expected = np.sum(np.abs(np.linalg.eigvalsh(m)))
            assert abs(qmath.trace_norm(m) - expected) < 1e-12

    @given(bloch_vectors(), bloch_vectors(), bloch_vectors())
    def test_triangle_inequality(self, a, b, c):
        ra, rb, rc = (qmath.bloch_to_density(s) for s in (a, b, c))
        assert qmath.trace_norm(ra - rc) <= qmath.trace_norm(ra - rb) + qmath.trace_norm(rb - rc) + 1e-12

    @given(bloch_vectors(), bloch_vectors(), unitaries())
    def test_unitary_invariance(self, a, b, u):
        m = qmath.bloch_to_density(a) - qmath.bloch_to_density(b)
        assert abs(qmath.trace_norm(u.conj().T @ m @ u) - qmath.trace_norm(m)) < 1e-12

    def test_trace_norm_of_bloch_difference(self, rng):
        # trace distance of two qubits is half the Bloch distance
        for _ in range(100):
            a, b = qmath.random_bloch(rng), qmath.random_bloch(rng)
            m = qmath.bloch_to_density(a) - qmath.bloch_to_density(b)
            assert abs(qmath.trace_norm(m) - np.linalg.norm(a - b)) < 1e-12


class TestLinearEntropy:
    def test_extremes(self):
        assert qmath.linear_entropy(np.diag([1, 0])) == 0
        assert qmath.linear_entropy(0.5 * IDENTITY2) == pytest.approx(0.5)

    @given(bloch_vectors())
    def test_bloch_form(self, s):
        assert abs(qmath.linear_entropy(qmath.bloch_to_density(s)) - 0.5 * (1 - s @ s)) < 1e-13


class TestRandomGenerators:
    def test_unitary(self, rng):
        for _ in range(1000):
            u = qmath.random_unitary(rng)
            np.testing.assert_allclose(u.conj().T @ u, IDENTITY2, atol=1e-12)

    def test_pure_bloch_on_sphere(self, rng):
        for _ in range(1000):
            assert abs(np.linalg.norm(qmath.random_bloch(rng, pure=True)) - 1) < 1e-12

    def test_sz_mean_vanishes(self, rng):
        sz = [qmath.random_bloch(rng)[2] for _ in range(100_000)]
        assert abs(np.mean(sz)) < 0.01

    def test_ball_radius_distribution(self, rng):
        # uniform in the ball: |s|^3 is uniform on [0, 1]
        r3 = np.array([np.linalg.norm(qmath.random_bloch(rng)) ** 3 for _ in range(20_000)])
        assert abs(np.mean(r3) - 0.5) < 0.01

    def test_haar_first_column(self, rng):
        # Haar on U(2): |U_00|^2 is uniform on [0, 1]
        from scipy import stats
        x = np.array([abs(qmath.random_unitary(rng)[0, 0]) ** 2 for _ in range(20_000)])
        assert stats.kstest(x, "uniform").pvalue > 1e-3

    def test_deterministic(self):
        a = qmath.random_unitary(np.random.default_rng(5))
        b = qmath.random_unitary(np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)


def test_pauli_algebra():
    np.testing.assert_allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z)
    np.testing.assert_allclose(qmath.ry(np.pi), -1j * SIGMA_Y, atol=1e-15)
