"""Two-way interferometer with a quantum which-way detector.

The Quanton passes a beam splitter (BS), a split-beam stage in which each way
applies its own unitary to the detector and picks up a phase ``+-phi/2``, and
a beam merger (BM). Every duality quantity is computed here in closed form;
the 4x4 matrix pipeline in :func:`evolve_pipeline` is kept as an independent
route that the closed forms are checked against.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import qmath
from .qmath import (
    ATOL_IDENTITY,
    ATOL_PIPELINE,
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    UnphysicalStateError,
)

# exp(-i pi sigma_y / 4)
BEAM_SPLITTER = qmath.ry(np.pi / 2)
_PROJ_PLUS = 0.5 * (IDENTITY2 + SIGMA_Z)
_PROJ_MINUS = 0.5 * (IDENTITY2 - SIGMA_Z)

#: Below this a priori visibility the entropy bound is not evaluated.
ENTROPY_GUARD = 1e-8
#: Below this value of ``1 - P**2`` the pure-state Q/D relation is not evaluated.
PURE_RELATION_GUARD = 1e-10


class ConventionError(RuntimeError):
    """The matrix pipeline and the closed-form final state disagree."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class InterferometerConfig:
    """Initial Quanton Bloch vector, detector state, way unitaries and phase."""

    s_Q0: np.ndarray
    rho_D0: np.ndarray
    U_plus: np.ndarray
    U_minus: np.ndarray
    phi: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.s_Q0, dtype=float)
        qmath.bloch_to_density(s)  # validates |s| <= 1
        rho = qmath.check_density(self.rho_D0, 2)
        for name in ("U_plus", "U_minus"):
            u = qmath._as_matrix(getattr(self, name), 2)
            if not qmath.is_unitary(u, ATOL_IDENTITY):
                raise UnphysicalStateError(f"{name} is not unitary")
            object.__setattr__(self, name, _frozen(u))
        object.__setattr__(self, "s_Q0", _frozen(s))
        object.__setattr__(self, "rho_D0", _frozen(rho))
        object.__setattr__(self, "phi", float(self.phi))

    def with_phi(self, phi: float) -> "InterferometerConfig":
        return dataclasses.replace(self, phi=phi)

    @classmethod
    def random(cls, rng: np.random.Generator, pure: bool = False):
        """Random config: Quanton and detector states, Haar way unitaries."""
        return cls(
            s_Q0=qmath.random_bloch(rng, pure),
            rho_D0=qmath.bloch_to_density(qmath.random_bloch(rng, pure)),
            U_plus=qmath.random_unitary(rng),
            U_minus=qmath.random_unitary(rng),
            phi=rng.uniform(0, 2 * np.pi),
        )

    def to_dict(self) -> dict:
        return {
            "s_Q0": self.s_Q0.tolist(),
            "rho_D0": complex_matrix_to_json(self.rho_D0),
            "U_plus": complex_matrix_to_json(self.U_plus),
            "U_minus": complex_matrix_to_json(self.U_minus),
            "phi": self.phi,
        }


def complex_to_json(z: complex) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def complex_matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


@dataclass(frozen=True)
class DualityReport:
    """All duality scalars for one configuration.

    ``slacks`` holds ``RHS - LHS`` for each inequality, so a value ``>= 0``
    means the inequality holds. ``residuals`` holds signed errors of
    relations that should be equalities. Entries whose guard failed are
    absent from both and listed in ``skipped`` with the reason.
    """

    P: float
    V0: float
    V: float
    C: complex
    D: float
    Q: float
    w_plus: float
    w_minus: float
    G0: float
    Gf: float
    dG: float
    slacks: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    def all_slacks_hold(self, tol: float = ATOL_PIPELINE) -> bool:
        return all(v >= -tol for v in self.slacks.values())

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["C"] = complex_to_json(self.C)
        return d


def beam_split(rho) -> np.ndarray:
    """``exp(-i pi sigma_y/4) rho exp(+i pi sigma_y/4)`` on one qubit."""
    return BEAM_SPLITTER @ np.asarray(rho, dtype=complex) @ BEAM_SPLITTER.conj().T


def beam_merge(rho) -> np.ndarray:
    """Inverse of :func:`beam_split`."""
    return BEAM_SPLITTER.conj().T @ np.asarray(rho, dtype=complex) @ BEAM_SPLITTER


def split_beam_unitary(cfg: InterferometerConfig) -> np.ndarray:
    """``P+ e^{i phi/2} (x) U+  +  P- e^{-i phi/2} (x) U-`` on Quanton x Detector."""
    return (np.kron(_PROJ_PLUS * np.exp(0.5j * cfg.phi), cfg.U_plus)
            + np.kron(_PROJ_MINUS * np.exp(-0.5j * cfg.phi), cfg.U_minus))


def initial_state(cfg: InterferometerConfig) -> np.ndarray:
    return qmath.tensor(qmath.bloch_to_density(cfg.s_Q0), cfg.rho_D0)


def evolve_pipeline(cfg: InterferometerConfig) -> np.ndarray:
    """Final joint state from explicit BS, split-beam and BM matrices.

    The split-beam operator ``S`` acts as ``S^dag rho S`` so that the detector
    on each way transforms as ``U^dag rho U``.
    """
    bs = np.kron(BEAM_SPLITTER, IDENTITY2)
    s = split_beam_unitary(cfg)
    rho = bs @ initial_state(cfg) @ bs.conj().T
    rho = s.conj().T @ rho @ s
    return bs.conj().T @ rho @ bs


def evolve_closed_form(cfg: InterferometerConfig) -> np.ndarray:
    """Final joint state assembled term by term from the way-resolved pieces."""
    sx, sy, sz = cfg.s_Q0
    rho, up, um = cfg.rho_D0, cfg.U_plus, cfg.U_minus
    phase = np.exp(-1j * cfg.phi)
    return 0.25 * (
        (1 - sx) * np.kron(IDENTITY2 - SIGMA_X, up.conj().T @ rho @ up)
        + (1 + sx) * np.kron(IDENTITY2 + SIGMA_X, um.conj().T @ rho @ um)
        + (sz - 1j * sy) * phase * np.kron(SIGMA_Z + 1j * SIGMA_Y, up.conj().T @ rho @ um)
        + (sz + 1j * sy) * np.conj(phase) * np.kron(SIGMA_Z - 1j * SIGMA_Y, um.conj().T @ rho @ up)
    )


def evolve_full(cfg: InterferometerConfig) -> np.ndarray:
    """Final joint state, checked between the pipeline and the closed form.

    Raises:
        ConventionError: if the two routes differ by more than
            ``ATOL_PIPELINE`` in any entry.
    """
    rho = evolve_pipeline(cfg)
    err = np.max(np.abs(rho - evolve_closed_form(cfg)))
    if err > ATOL_PIPELINE:
        raise ConventionError(
            f"pipeline and closed-form final states differ by {err:.3e}; "
            "check beam-splitter / detector conjugation conventions")
    return rho


def final_quanton_bloch(cfg: InterferometerConfig) -> np.ndarray:
    """Reduced Quanton Bloch vector, from the brute-force joint state."""
    return qmath.density_to_bloch(
        qmath.partial_trace(evolve_pipeline(cfg), "quanton"))


def contrast(rho_D0, U_plus, U_minus) -> complex:
    """Contrast factor ``tr(U+^dag rho_D0 U-)``."""
    return complex(np.trace(np.asarray(U_plus).conj().T @ rho_D0 @ U_minus))


def fringe_amplitude(cfg: InterferometerConfig) -> complex:
    """``(s_z - i s_y) C e^{-i phi}``; its real part is ``s_z`` after the BM."""
    _, sy, sz = cfg.s_Q0
    c = contrast(cfg.rho_D0, cfg.U_plus, cfg.U_minus)
    return (sz - 1j * sy) * c * np.exp(-1j * cfg.phi)


def fringe_probability(cfg: InterferometerConfig, outcome: int) -> float:
    """Probability of measuring ``sigma_z = outcome`` at the output port."""
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    return 0.5 * (1 + outcome * fringe_amplitude(cfg).real)


def a_priori_visibility(s_Q0) -> float:
    _, sy, sz = s_Q0
    return float(np.hypot(sy, sz))


def predictability(s_Q0) -> float:
    return float(abs(s_Q0[0]))


def way_probabilities(cfg: InterferometerConfig) -> tuple[float, float]:
    """``(w+, w-) = ((1 - s_x)/2, (1 + s_x)/2)``."""
    sx = cfg.s_Q0[0]
    return 0.5 * (1 - sx), 0.5 * (1 + sx)


def visibility(cfg: InterferometerConfig) -> float:
    return abs(contrast(cfg.rho_D0, cfg.U_plus, cfg.U_minus)) * a_priori_visibility(cfg.s_Q0)


def _scan_probabilities(cfg: InterferometerConfig, phis) -> np.ndarray:
    """``p+`` at each phase, from the 4x4 pipeline evaluated for all phases at once."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    bs = np.kron(BEAM_SPLITTER, IDENTITY2)
    rho = bs @ initial_state(cfg) @ bs.conj().T
    half = np.exp(0.5j * phis)[:, None, None]
    s = (np.kron(_PROJ_PLUS, cfg.U_plus)[None] * half
         + np.kron(_PROJ_MINUS, cfg.U_minus)[None] * half.conj())
    rho = np.conj(np.swapaxes(s, 1, 2)) @ rho @ s
    rho = bs.conj().T @ rho @ bs
    proj = np.kron(_PROJ_PLUS, IDENTITY2)
    return np.einsum("ij,nji->n", proj, rho).real


def _scan_probability(cfg: InterferometerConfig, phi: float) -> float:
    return float(_scan_probabilities(cfg, phi)[0])


def measured_visibility_scan(cfg: InterferometerConfig, n_phi: int = 64) -> float:
    """Visibility read off a simulated fringe scan.

    ``p+`` is sampled at ``n_phi`` equally spaced phases from the brute-force
    joint state; the visibility is twice the modulus of the first discrete
    Fourier coefficient (the mean of ``p+`` is 1/2).
    """
    if n_phi < 8:
        raise ValueError("n_phi must be at least 8")
    p = _scan_probabilities(cfg, 2 * np.pi * np.arange(n_phi) / n_phi)
    first = np.fft.fft(p)[1]
    return float(4 * abs(first) / n_phi)


def michelson_visibility_scan(cfg: InterferometerConfig, n_phi: int = 64) -> float:
    """``(max - min) / (max + min)`` of ``p+(phi)``.

    The extremes are located on the ``n_phi`` grid and then polished with a
    bounded scalar search, so the estimate does not depend on the grid.
    """
    if n_phi < 8:
        raise ValueError("n_phi must be at least 8")
    step = 2 * np.pi / n_phi
    phis = step * np.arange(n_phi)
    p = _scan_probabilities(cfg, phis)

    def polish(sign: float, start: float) -> float:
        res = optimize.minimize_scalar(
            lambda x: -sign * _scan_probability(cfg, x),
            bounds=(start - step, start + step), method="bounded",
            options={"xatol": 1e-10})
        return -sign * res.fun

    p_max = max(p.max(), polish(1.0, phis[np.argmax(p)]))
    p_min = min(p.min(), polish(-1.0, phis[np.argmin(p)]))
    return float((p_max - p_min) / (p_max + p_min))


def detector_way_states(cfg: InterferometerConfig) -> tuple[np.ndarray, np.ndarray]:
    """``(U+^dag rho U+, U-^dag rho U-)``."""
    rho, up, um = cfg.rho_D0, cfg.U_plus, cfg.U_minus
    return up.conj().T @ rho @ up, um.conj().T @ rho @ um


def detector_final(cfg: InterferometerConfig) -> np.ndarray:
    w_plus, w_minus = way_probabilities(cfg)
    rho_plus, rho_minus = detector_way_states(cfg)
    return w_plus * rho_plus + w_minus * rho_minus


def distinguishability(cfg: InterferometerConfig) -> float:
    """``tr|w+ rho_D^+ - w- rho_D^-|``."""
    w_plus, w_minus = way_probabilities(cfg)
    rho_plus, rho_minus = detector_way_states(cfg)
    return qmath.trace_norm(w_plus * rho_plus - w_minus * rho_minus)


def quality(rho_plus, rho_minus) -> float:
    """Half the trace distance between the two way-conditioned detector states."""
    return 0.5 * qmath.trace_norm(np.asarray(rho_plus) - np.asarray(rho_minus))


def linear_entropy(rho) -> float:
    return qmath.linear_entropy(rho)


def entropy_increase(cfg: InterferometerConfig) -> float:
    """Growth of the Quanton's linear entropy, ``(V0**2 - V**2) / 2``."""
    return 0.5 * (a_priori_visibility(cfg.s_Q0) ** 2 - visibility(cfg) ** 2)


def _is_pure(cfg: InterferometerConfig) -> bool:
    return (np.linalg.norm(cfg.s_Q0) >= 1 - ATOL_IDENTITY
            and qmath.linear_entropy(cfg.rho_D0) <= ATOL_IDENTITY)


def duality_report(cfg: InterferometerConfig) -> DualityReport:
    P = predictability(cfg.s_Q0)
    V0 = a_priori_visibility(cfg.s_Q0)
    C = contrast(cfg.rho_D0, cfg.U_plus, cfg.U_minus)
    V = abs(C) * V0
    w_plus, w_minus = way_probabilities(cfg)
    D = distinguishability(cfg)
    Q = quality(*detector_way_states(cfg))
    s0_sq = float(np.dot(cfg.s_Q0, cfg.s_Q0))
    sf_sq = P**2 + V**2
    G0 = 0.5 * (1 - s0_sq)
    Gf = 0.5 * (1 - sf_sq)
    dG = 0.5 * (V0**2 - V**2)

    slacks = {
        "englert": 1 - D**2 - V**2,
        "bloch_norm": 1 - P**2 - V0**2,
        "q_contrast": 1 - Q**2 - abs(C) ** 2,
        "central": 1 - ((1 - P**2) * Q**2 + P**2 + V**2),
        "central_permuted": (1 - P**2) * (1 - Q**2) - V**2,
        "general_mixed": s0_sq - ((s0_sq - P**2) * Q**2 + sf_sq),
    }
    residuals = {}
    skipped = {}

    if V0 > ENTROPY_GUARD:
        ratio = 2 * dG / V0**2
        slacks["entropy_bound"] = min(ratio - Q**2, 1 - ratio)
    else:
        skipped["entropy_bound"] = f"a priori visibility V0={V0:.3g} <= {ENTROPY_GUARD:g}"

    if not _is_pure(cfg):
        skipped["q_vs_d_pure"] = "initial Quanton or detector state is mixed"
    elif 1 - P**2 <= PURE_RELATION_GUARD:
        skipped["q_vs_d_pure"] = f"1 - P^2 = {1 - P**2:.3g} <= {PURE_RELATION_GUARD:g}"
    else:
        q_sq_from_d = (D**2 - P**2) / (1 - P**2)
        slacks["q_vs_d_pure"] = min(D**2 - q_sq_from_d, 1 - D**2)
        residuals["q_vs_d_pure"] = Q**2 - q_sq_from_d
        residuals["duality_pure"] = D**2 + V**2 - 1

    return DualityReport(
        P=P, V0=V0, V=V, C=C, D=D, Q=Q, w_plus=w_plus, w_minus=w_minus,
        G0=G0, Gf=Gf, dG=dG, slacks=slacks, residuals=residuals, skipped=skipped)
