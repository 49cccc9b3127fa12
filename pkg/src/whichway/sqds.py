"""Symmetric Quanton-Detecton System.

Two two-way interferometers, each the which-way detector of the other,
coupled at their central stage by the conditional phase ``Phi``. Both Bloch
vectors live in the x-z plane: predictability is ``|s_x|`` and a priori
visibility ``|s_z|``.

All quantities here are closed forms. :func:`to_engine_config` maps a
configuration onto the generic interferometer so that each closed form can
be reproduced by the 4x4 route in :mod:`whichway.engine`, and
:func:`evolve_joint` runs both interferometers end to end.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import engine, qmath
from .engine import ConventionError
from .qmath import ATOL_IDENTITY, IDENTITY2

#: Threshold below which a visibility counts as zero for ratio relations.
VISIBILITY_GUARD = 1e-8
#: ``f_Q`` is undefined once ``D_Q`` is this close to 1.
FQ_GUARD = 1e-10
_CLOSED_FORM_TOL = 1e-13


class UndefinedQuantityError(ValueError):
    """A ratio was requested where its denominator vanishes."""


def _xz_bloch(s, name: str) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (3,):
        raise ValueError(f"{name} must have 3 components")
    if s[1] != 0.0:
        raise ValueError(f"{name} must have zero y-component, got {s[1]}")
    qmath.bloch_to_density(s)
    return s


@dataclass(frozen=True)
class SqdsConfig:
    s_Q0: np.ndarray
    s_D0: np.ndarray
    phi_Q: float = 0.0
    phi_D: float = 0.0
    Phi: float = 0.0

    def __post_init__(self):
        for name in ("s_Q0", "s_D0"):
            s = _xz_bloch(getattr(self, name), name)
            s.flags.writeable = False
            object.__setattr__(self, name, s)
        for name in ("phi_Q", "phi_D", "Phi"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_components(cls, q_x, q_z, d_x, d_z, phi_Q=0.0, phi_D=0.0, Phi=0.0):
        return cls(np.array([q_x, 0.0, q_z]), np.array([d_x, 0.0, d_z]),
                   phi_Q, phi_D, Phi)

    @classmethod
    def random(cls, rng: np.random.Generator, pure: bool = False,
               symmetric: bool = False) -> "SqdsConfig":
        """Random x-z plane states and phases.

        ``pure`` puts both Bloch vectors on the unit circle; ``symmetric``
        sets both predictabilities to zero.
        """
        def draw():
            r = 1.0 if pure else np.sqrt(rng.uniform())
            if symmetric:
                return np.array([0.0, 0.0, r * rng.choice([-1.0, 1.0])])
            theta = rng.uniform(0, 2 * np.pi)
            return np.array([r * np.cos(theta), 0.0, r * np.sin(theta)])

        s_Q0, s_D0 = draw(), draw()
        phi_Q, phi_D, Phi = rng.uniform(0, 2 * np.pi, size=3)
        return cls(s_Q0, s_D0, phi_Q, phi_D, Phi)

    def to_dict(self) -> dict:
        return {"s_Q0": self.s_Q0.tolist(), "s_D0": self.s_D0.tolist(),
                "phi_Q": self.phi_Q, "phi_D": self.phi_D, "Phi": self.Phi}


def swap_labels(cfg: SqdsConfig) -> SqdsConfig:
    """Exchange the roles of Quanton and Detecton."""
    return SqdsConfig(cfg.s_D0, cfg.s_Q0, cfg.phi_D, cfg.phi_Q, cfg.Phi)


def _p_and_v(s) -> tuple[float, float]:
    return abs(s[0]), abs(s[2])


def detecton_phase_unitaries(phi_D: float, Phi: float) -> tuple[np.ndarray, np.ndarray]:
    """``U+- = exp[(i/2)(phi_D +- Phi) sigma_z]``."""
    def u(angle):
        return np.diag([np.exp(0.5j * angle), np.exp(-0.5j * angle)])
    return u(phi_D + Phi), u(phi_D - Phi)


def detecton_after_bs(s_D0) -> np.ndarray:
    """Detecton density operator after its beam splitter, Bloch ``(s_z, 0, -s_x)``."""
    s = _xz_bloch(s_D0, "s_D0")
    return qmath.bloch_to_density([s[2], 0.0, -s[0]])


def detecton_way_bloch(cfg: SqdsConfig, way: int) -> np.ndarray:
    """Detecton Bloch vector after the central stage on the ``way`` branch."""
    if way not in (1, -1):
        raise ValueError("way must be +1 or -1")
    d_x, _, d_z = cfg.s_D0
    angle = cfg.phi_D + way * cfg.Phi
    return np.array([d_z * np.cos(angle), d_z * np.sin(angle), -d_x])


def quality_detecton(cfg: SqdsConfig) -> float:
    """``Q_D = V_D0 |sin Phi|``, checked against half the Bloch difference."""
    q = _p_and_v(cfg.s_D0)[1] * abs(np.sin(cfg.Phi))
    half_diff = 0.5 * np.linalg.norm(detecton_way_bloch(cfg, 1) - detecton_way_bloch(cfg, -1))
    if abs(q - half_diff) > _CLOSED_FORM_TOL:
        raise ConventionError(f"Q_D closed form {q} != half Bloch difference {half_diff}")
    return q


def quality_quanton(cfg: SqdsConfig) -> float:
    return quality_detecton(swap_labels(cfg))


def r_q(cfg: SqdsConfig) -> float:
    """Norm of ``w+ s_D^+ - w- s_D^-``, evaluated in both printed forms."""
    P_Q = _p_and_v(cfg.s_Q0)[0]
    P_D, V_D0 = _p_and_v(cfg.s_D0)
    s_D = np.linalg.norm(cfg.s_D0)
    Q_D = quality_detecton(cfg)
    sin2, cos2 = np.sin(cfg.Phi) ** 2, np.cos(cfg.Phi) ** 2
    r = np.sqrt(P_Q**2 * P_D**2 + V_D0**2 * (sin2 + P_Q**2 * cos2))
    r_rewritten = np.sqrt(P_Q**2 * s_D**2 + Q_D**2 * (1 - P_Q**2))
    if abs(r - r_rewritten) > _CLOSED_FORM_TOL:
        raise ConventionError(f"R_Q forms disagree: {r} vs {r_rewritten}")
    if r > s_D + ATOL_IDENTITY or r < Q_D - ATOL_IDENTITY:
        raise ConventionError(f"R_Q={r} outside [Q_D={Q_D}, |s_D0|={s_D}]")
    return float(r)


def r_d(cfg: SqdsConfig) -> float:
    return r_q(swap_labels(cfg))


def distinguishability_q(cfg: SqdsConfig) -> float:
    return max(_p_and_v(cfg.s_Q0)[0], r_q(cfg))


def distinguishability_d(cfg: SqdsConfig) -> float:
    return distinguishability_q(swap_labels(cfg))


def branch(cfg: SqdsConfig) -> str:
    """``"R"`` where ``R_Q > P_Q`` (so ``D_Q = R_Q``), else ``"P"``."""
    return "R" if r_q(cfg) > _p_and_v(cfg.s_Q0)[0] else "P"


def _f_q_exact(cfg: SqdsConfig) -> tuple[mpmath.mpf, mpmath.mpf]:
    # The direct ratio has condition number ~1/(1 - D_Q^2); evaluating from the
    # raw config at 40 digits keeps the two forms comparable near D_Q -> 1.
    with mpmath.workdps(40):
        q_x, _, _ = (mpmath.mpf(float(v)) for v in cfg.s_Q0)
        d_x, _, d_z = (mpmath.mpf(float(v)) for v in cfg.s_D0)
        sin_phi, cos_phi = mpmath.sin(cfg.Phi), mpmath.cos(cfg.Phi)
        s_D_sq = d_x**2 + d_z**2
        if s_D_sq > 1:
            # accepted within tolerance; put it back on the unit circle
            norm = mpmath.sqrt(s_D_sq)
            d_x, d_z, s_D_sq = d_x / norm, d_z / norm, mpmath.mpf(1)
        P_Q, P_D, V_D0 = min(abs(q_x), mpmath.mpf(1)), abs(d_x), abs(d_z)
        Q_D = V_D0 * abs(sin_phi)
        R_Q = mpmath.sqrt(P_Q**2 * P_D**2 + V_D0**2 * (sin_phi**2 + P_Q**2 * cos_phi**2))
        D_Q = max(P_Q, R_Q)
        if D_Q >= 1 - FQ_GUARD:
            raise UndefinedQuantityError("f_Q undefined at maximal distinguishability")
        direct = (1 - P_Q**2) * (1 - Q_D**2) / (1 - D_Q**2)
        xi = (1 - P_Q**2) * (1 - Q_D**2)
        g = P_Q**2 * (1 - s_D_sq)
        if R_Q > P_Q:
            return direct, xi / (g + xi)
        return direct, 1 - Q_D**2


def f_q_terms(cfg: SqdsConfig) -> tuple[float, float]:
    """``(xi, g)`` with ``xi = (1-P_Q^2)(1-Q_D^2)`` and ``g = P_Q^2 (1-|s_D0|^2)``.

    ``g`` is ``1 - R_Q^2 - xi`` expanded with the rewritten form of ``R_Q``;
    both terms are nonnegative.
    """
    P_Q = _p_and_v(cfg.s_Q0)[0]
    Q_D = quality_detecton(cfg)
    s_D = np.linalg.norm(cfg.s_D0)
    xi = (1 - P_Q) * (1 + P_Q) * (1 - Q_D) * (1 + Q_D)
    g = P_Q**2 * (1 - s_D) * (1 + s_D)
    return float(xi), float(g)


def f_q_forms(cfg: SqdsConfig) -> tuple[float, float]:
    """``f_Q`` by the direct ratio and by the branch form.

    The branch form is ``xi / (g + xi)`` where ``R_Q > P_Q`` and
    ``1 - Q_D^2`` otherwise.

    Raises:
        UndefinedQuantityError: if ``D_Q >= 1 - FQ_GUARD``.
    """
    direct, alt = _f_q_exact(cfg)
    return float(direct), float(alt)


def f_q(cfg: SqdsConfig) -> float:
    """Stringency ratio ``(1-P_Q^2)(1-Q_D^2) / (1-D_Q^2)``.

    Raises:
        UndefinedQuantityError: if ``D_Q >= 1 - FQ_GUARD``.
        ConventionError: if the direct and branch forms disagree.
    """
    direct, alt = f_q_forms(cfg)
    if abs(direct - alt) > ATOL_IDENTITY:
        raise ConventionError(f"f_Q direct {direct} != branch form {alt}")
    return direct


def contrast(cfg: SqdsConfig) -> complex:
    """``cos Phi + i s_Dx sin Phi``."""
    return complex(np.cos(cfg.Phi), cfg.s_D0[0] * np.sin(cfg.Phi))


def visibility_quanton(cfg: SqdsConfig) -> float:
    V_Q0 = _p_and_v(cfg.s_Q0)[1]
    P_D = _p_and_v(cfg.s_D0)[0]
    v = V_Q0 * np.sqrt(np.cos(cfg.Phi) ** 2 + P_D**2 * np.sin(cfg.Phi) ** 2)
    if abs(v - abs(contrast(cfg)) * V_Q0) > _CLOSED_FORM_TOL:
        raise ConventionError("V_Q closed form disagrees with |C| V_Q0")
    return float(v)


def visibility_detecton(cfg: SqdsConfig) -> float:
    return visibility_quanton(swap_labels(cfg))


def entropy_increase_q(cfg: SqdsConfig) -> float:
    V_Q0 = _p_and_v(cfg.s_Q0)[1]
    return 0.5 * (V_Q0**2 - visibility_quanton(cfg) ** 2)


def entropy_relations(cfg: SqdsConfig) -> tuple[dict, dict]:
    """Signed residuals of the linear-entropy relations, and skipped entries.

    ``entropy_ratio`` uses ``Q_D^2 + (1 - |s_D0|^2) sin^2 Phi`` on the right-hand
    side, which follows from the contrast-quality sum; it reduces to
    ``Q_D^2`` for a pure Detecton (``entropy_ratio_pure``).
    """
    V_Q0 = _p_and_v(cfg.s_Q0)[1]
    P_D = _p_and_v(cfg.s_D0)[0]
    s_D_sq = float(np.dot(cfg.s_D0, cfg.s_D0))
    Q_D = quality_detecton(cfg)
    sin2 = np.sin(cfg.Phi) ** 2
    dG = entropy_increase_q(cfg)
    res = {"entropy_increase": dG - 0.5 * V_Q0**2 * (1 - P_D**2) * sin2}
    skipped = {}
    if V_Q0 <= VISIBILITY_GUARD:
        skipped["entropy_ratio"] = skipped["entropy_ratio_pure"] = "V_Q0 below guard"
        return res, skipped
    ratio = 2 * dG / V_Q0**2
    res["entropy_ratio"] = ratio - (Q_D**2 + (1 - s_D_sq) * sin2)
    if s_D_sq >= 1 - ATOL_IDENTITY:
        res["entropy_ratio_pure"] = ratio - Q_D**2
    else:
        skipped["entropy_ratio_pure"] = "Detecton is mixed"
    return res, skipped


def reciprocity(cfg: SqdsConfig) -> tuple[dict, dict]:
    """Residuals of the Quanton/Detecton visibility-loss relations."""
    P_Q, V_Q0 = _p_and_v(cfg.s_Q0)
    P_D, V_D0 = _p_and_v(cfg.s_D0)
    V_Q, V_D = visibility_quanton(cfg), visibility_detecton(cfg)
    dVQ, dVD = V_Q**2 - V_Q0**2, V_D**2 - V_D0**2
    res, skipped = {}, {}
    visible = V_Q0 > VISIBILITY_GUARD and V_D0 > VISIBILITY_GUARD
    if visible:
        res["visibility_loss_balance"] = ((1 - P_Q**2) * dVQ / V_Q0**2
                                          - (1 - P_D**2) * dVD / V_D0**2)
    else:
        skipped["visibility_loss_balance"] = "a priori visibility below guard"

    both_pure = (np.linalg.norm(cfg.s_Q0) >= 1 - ATOL_IDENTITY
                 and np.linalg.norm(cfg.s_D0) >= 1 - ATOL_IDENTITY)
    if both_pure:
        res["equal_visibility_loss_pure"] = dVQ - dVD
    else:
        skipped["equal_visibility_loss_pure"] = "Quanton or Detecton is mixed"

    symmetric_keys = ("symmetric_sum_quanton", "symmetric_sum_detecton", "symmetric_sum_scaled")
    if P_Q > ATOL_IDENTITY or P_D > ATOL_IDENTITY:
        skipped.update(dict.fromkeys(symmetric_keys, "nonzero predictability"))
    elif not visible:
        skipped.update(dict.fromkeys(symmetric_keys, "a priori visibility below guard"))
    else:
        D_Q, D_D = distinguishability_q(cfg), distinguishability_d(cfg)
        res["symmetric_sum_quanton"] = D_Q**2 / V_D0**2 + V_Q**2 / V_Q0**2 - 1
        res["symmetric_sum_detecton"] = D_D**2 / V_Q0**2 + V_D**2 / V_D0**2 - 1
        res["symmetric_sum_scaled"] = D_Q**2 + V_D0**2 / V_Q0**2 * V_Q**2 - V_D0**2
    return res, skipped


def contrast_quality_sum(cfg: SqdsConfig) -> float:
    """``Q_D^2 + |C|^2``, equal to ``|s_D0|^2 sin^2 Phi + cos^2 Phi``."""
    total = quality_detecton(cfg) ** 2 + abs(contrast(cfg)) ** 2
    expected = float(np.dot(cfg.s_D0, cfg.s_D0)) * np.sin(cfg.Phi) ** 2 + np.cos(cfg.Phi) ** 2
    if abs(total - expected) > ATOL_IDENTITY:
        raise ConventionError(f"Q_D^2 + |C|^2 = {total}, expected {expected}")
    return total


def pure_state_identity(cfg: SqdsConfig) -> float:
    """``Q_D^2 + |C|^2 - 1``; zero for a pure Detecton."""
    return contrast_quality_sum(cfg) - 1


def mixed_state_bound(cfg: SqdsConfig) -> float:
    """Slack ``1 - (Q_D^2 + |C|^2)``, nonnegative for any Detecton."""
    return 1 - contrast_quality_sum(cfg)


def hierarchy(cfg: SqdsConfig, tol: float = ATOL_IDENTITY) -> dict:
    P_Q = _p_and_v(cfg.s_Q0)[0]
    Q_D, R_Q, D_Q = quality_detecton(cfg), r_q(cfg), distinguishability_q(cfg)
    V_Q = visibility_quanton(cfg)
    v2 = V_Q**2
    return {
        "D_Q>=R_Q": D_Q >= R_Q - tol,
        "R_Q>=Q_D": R_Q >= Q_D - tol,
        "D_Q>=P_Q": D_Q >= P_Q - tol,
        "Q_D^2+V_Q^2<=R_Q^2+V_Q^2": Q_D**2 + v2 <= R_Q**2 + v2 + tol,
        "R_Q^2+V_Q^2<=D_Q^2+V_Q^2": R_Q**2 + v2 <= D_Q**2 + v2 + tol,
        "D_Q^2+V_Q^2<=1": D_Q**2 + v2 <= 1 + tol,
        "P_Q^2+V_Q^2<=1": P_Q**2 + v2 <= 1 + tol,
    }


def to_engine_config(cfg: SqdsConfig) -> engine.InterferometerConfig:
    """The generic interferometer seen from the Quanton's side."""
    u_plus, u_minus = detecton_phase_unitaries(cfg.phi_D, cfg.Phi)
    return engine.InterferometerConfig(
        s_Q0=cfg.s_Q0, rho_D0=detecton_after_bs(cfg.s_D0),
        U_plus=u_plus, U_minus=u_minus, phi=cfg.phi_Q)


def coupling_unitary(cfg: SqdsConfig) -> np.ndarray:
    """Central-stage operator on both qubits, Quanton first."""
    u_plus, u_minus = detecton_phase_unitaries(cfg.phi_D, cfg.Phi)
    proj_plus = 0.5 * (IDENTITY2 + qmath.SIGMA_Z)
    proj_minus = 0.5 * (IDENTITY2 - qmath.SIGMA_Z)
    return (np.kron(proj_plus * np.exp(0.5j * cfg.phi_Q), u_plus)
            + np.kron(proj_minus * np.exp(-0.5j * cfg.phi_Q), u_minus))


def evolve_joint(cfg: SqdsConfig) -> np.ndarray:
    """Both interferometers end to end: BS on both, coupling, BM on both."""
    bs = np.kron(engine.BEAM_SPLITTER, engine.BEAM_SPLITTER)
    u = coupling_unitary(cfg)
    rho = qmath.tensor(qmath.bloch_to_density(cfg.s_Q0), qmath.bloch_to_density(cfg.s_D0))
    rho = bs @ rho @ bs.conj().T
    rho = u.conj().T @ rho @ u
    return bs.conj().T @ rho @ bs


def joint_visibilities(cfg: SqdsConfig) -> tuple[float, float]:
    """``(V_Q, V_D)`` read from the transverse Bloch components of the
    brute-force final reduced states."""
    rho = evolve_joint(cfg)
    out = []
    for keep in ("quanton", "detector"):
        s = qmath.density_to_bloch(qmath.partial_trace(rho, keep))
        out.append(float(np.hypot(s[1], s[2])))
    return out[0], out[1]


@dataclass(frozen=True)
class SqdsReport:
    P_Q: float
    P_D: float
    V_Q0: float
    V_D0: float
    Q_D: float
    Q_Q: float
    R_Q: float
    D_Q: float
    D_D: float
    V_Q: float
    V_D: float
    f_Q: float | None
    C: complex
    branch: str
    residuals: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["C"] = engine.complex_to_json(self.C)
        return d


def sqds_report(cfg: SqdsConfig) -> SqdsReport:
    P_Q, V_Q0 = _p_and_v(cfg.s_Q0)
    P_D, V_D0 = _p_and_v(cfg.s_D0)
    try:
        fq = f_q(cfg)
    except UndefinedQuantityError:
        fq = None
    ent, ent_skip = entropy_relations(cfg)
    rec, rec_skip = reciprocity(cfg)
    residuals = {**ent, **rec, "contrast_quality_sum":
                 contrast_quality_sum(cfg) - float(np.dot(cfg.s_D0, cfg.s_D0)) * np.sin(cfg.Phi) ** 2
                 - np.cos(cfg.Phi) ** 2}
    return SqdsReport(
        P_Q=P_Q, P_D=P_D, V_Q0=V_Q0, V_D0=V_D0,
        Q_D=quality_detecton(cfg), Q_Q=quality_quanton(cfg),
        R_Q=r_q(cfg), D_Q=distinguishability_q(cfg), D_D=distinguishability_d(cfg),
        V_Q=visibility_quanton(cfg), V_D=visibility_detecton(cfg),
        f_Q=fq, C=contrast(cfg), branch=branch(cfg),
        residuals=residuals, skipped={**ent_skip, **rec_skip})
