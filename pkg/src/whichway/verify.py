"""Seeded batch runner over the invariants of every module.

Each suite evaluates named checks on random (or replayed) configurations.
A check's value is a violation measure: it passes while the worst value
stays at or below its tolerance.
"""

from __future__ import annotations

import numpy as np

from . import channel, configio, engine, qmath, sqds
from .channel import ChannelConfig
from .engine import InterferometerConfig

MC_TRIALS = 100_000
MC_MAX_CONFIGS = 100
MAX_REPORTED_FAILURES = 20

TOLERANCES = {
    "engine": {
        "slacks": 1e-9,
        "dual_path": 1e-11,
        "fringe_probability": 1e-11,
        "detector_reduction": 1e-11,
        "entropy_brute_force": 1e-11,
        "bloch_norm_identity": 1e-10,
        "d_at_least_p": 1e-12,
        "duality_equality_pure": 1e-10,
        "quality_contrast_equality_pure": 1e-10,
        "extreme_cases": 0.0,
    },
    "channel": {
        "likelihood_identity": 1e-14,
        "posterior_at_least_prior": 1e-14,
        "relabel_symmetry": 1e-14,
        "monte_carlo_3sigma": 0.0,
    },
    "sqds": {
        "f_q_bounds": 1e-12,
        "f_q_terms_nonnegative": 1e-12,
        "f_q_dual_formula": 1e-12,
        "stringency": 1e-12,
        "engine_bridge": 1e-11,
        "joint_visibilities": 1e-11,
        "hierarchy": 0.0,
        "closed_form_residuals": 1e-12,
        "label_swap": 0.0,
    },
}


class _Suite:
    def __init__(self, name: str):
        self.name = name
        self.tol = TOLERANCES[name]
        self.worst = {k: 0.0 for k in self.tol}
        self.failures: list[dict] = []
        self.n_failures = 0

    def record(self, check: str, value: float, config: dict | None) -> None:
        value = float(value)
        self.worst[check] = max(self.worst[check], value)
        if value > self.tol[check]:
            self.n_failures += 1
            if len(self.failures) < MAX_REPORTED_FAILURES:
                self.failures.append({"check": check, "value": value, "config": config})

    def summary(self) -> dict:
        return {
            "checks": {k: {"worst": self.worst[k], "tol": self.tol[k],
                           "passed": self.worst[k] <= self.tol[k]} for k in self.tol},
            "passed": self.n_failures == 0,
            "n_failures": self.n_failures,
            "failures": self.failures,
        }


def extreme_case_violations(r: engine.DualityReport, eps: float = 1e-9,
                            small: float = 1e-4) -> int:
    """Number of violated implications among V=1, P=1, D=1, Q=1 extremes."""
    bad = 0
    if r.V > 1 - eps and max(r.D, r.P, r.Q) >= small:
        bad += 1
    for x in (r.P, r.D, r.Q):
        if x > 1 - eps and r.V >= small:
            bad += 1
    return bad


def check_engine_config(cfg: InterferometerConfig, suite: _Suite) -> None:
    blob = cfg.to_dict()
    r = engine.duality_report(cfg)
    suite.record("slacks", -min(r.slacks.values()), blob)

    rho_f = engine.evolve_pipeline(cfg)
    suite.record("dual_path", np.max(np.abs(rho_f - engine.evolve_closed_form(cfg))), blob)

    proj = np.kron(0.5 * (qmath.IDENTITY2 + qmath.SIGMA_Z), qmath.IDENTITY2)
    p_brute = np.trace(proj @ rho_f).real
    suite.record("fringe_probability", abs(p_brute - engine.fringe_probability(cfg, 1)), blob)

    rho_d = qmath.partial_trace(rho_f, "detector")
    suite.record("detector_reduction", np.max(np.abs(rho_d - engine.detector_final(cfg))), blob)

    rho_q = qmath.partial_trace(rho_f, "quanton")
    rho_q0 = qmath.bloch_to_density(cfg.s_Q0)
    dG_brute = qmath.linear_entropy(rho_q) - qmath.linear_entropy(rho_q0)
    suite.record("entropy_brute_force", abs(dG_brute - r.dG), blob)

    s_f = qmath.density_to_bloch(rho_q)
    norm_sq = float(np.dot(s_f, s_f))
    purity_form = 1 + 2 * np.trace(rho_q @ rho_q - rho_q).real
    suite.record("bloch_norm_identity",
                 max(abs(norm_sq - (r.P**2 + r.V**2)), abs(norm_sq - purity_form)), blob)

    suite.record("d_at_least_p", r.P - r.D, blob)
    if "duality_pure" in r.residuals:
        suite.record("duality_equality_pure", abs(r.residuals["duality_pure"]), blob)
        suite.record("quality_contrast_equality_pure", abs(r.Q**2 + abs(r.C) ** 2 - 1), blob)
    suite.record("extreme_cases", extreme_case_violations(r), blob)


def extreme_engine_configs(rng: np.random.Generator) -> list[InterferometerConfig]:
    """Configurations sitting exactly on the V=1, P=1 and Q=1 extremes."""
    u = qmath.random_unitary(rng)
    out = []
    # single way: P = 1
    out.append(InterferometerConfig(
        np.array([rng.choice([-1.0, 1.0]), 0, 0]),
        qmath.bloch_to_density(qmath.random_bloch(rng)),
        qmath.random_unitary(rng), qmath.random_unitary(rng), rng.uniform(0, 2 * np.pi)))
    # detector off, transverse pure Quanton: V = 1
    theta = rng.uniform(0, 2 * np.pi)
    out.append(InterferometerConfig(
        np.array([0, np.sin(theta), np.cos(theta)]),
        qmath.bloch_to_density(qmath.random_bloch(rng)), u, u, rng.uniform(0, 2 * np.pi)))
    # perfect detector: U- flips the pure detector state, Q = 1
    rho = qmath.bloch_to_density([0, 0, 1])
    out.append(InterferometerConfig(
        qmath.random_bloch(rng), rho, qmath.IDENTITY2, qmath.SIGMA_X, rng.uniform(0, 2 * np.pi)))
    return out


def check_channel_config(cfg: ChannelConfig, suite: _Suite) -> None:
    blob = cfg.to_dict()
    L = channel.posterior_likelihood(cfg)
    D = max(channel.predictability(cfg), channel.channel_quality(cfg))
    suite.record("likelihood_identity", abs(0.5 * (1 + D) - L), blob)
    suite.record("posterior_at_least_prior", channel.prior_likelihood(cfg) - L, blob)
    swaps = (ChannelConfig(1 - cfg.w_plus, cfg.epsilon), ChannelConfig(cfg.w_plus, 1 - cfg.epsilon))
    suite.record("relabel_symmetry",
                 max(abs(channel.posterior_likelihood(c) - L) for c in swaps), blob)


def check_sqds_config(cfg: sqds.SqdsConfig, suite: _Suite) -> None:
    blob = cfg.to_dict()
    rep = sqds.sqds_report(cfg)
    if rep.f_Q is not None:
        direct, alt = sqds.f_q_forms(cfg)
        suite.record("f_q_bounds", max(-rep.f_Q, rep.f_Q - 1), blob)
        suite.record("f_q_dual_formula", abs(direct - alt), blob)
        suite.record("stringency",
                     (1 - rep.P_Q**2) * (1 - rep.Q_D**2) - (1 - rep.D_Q**2), blob)
    xi, g = sqds.f_q_terms(cfg)
    suite.record("f_q_terms_nonnegative", max(-xi, -g), blob)

    ecfg = sqds.to_engine_config(cfg)
    er = engine.duality_report(ecfg)
    suite.record("engine_bridge", max(
        abs(er.P - rep.P_Q), abs(er.Q - rep.Q_D), abs(er.D - rep.D_Q),
        abs(er.C - rep.C), abs(er.V - rep.V_Q)), blob)
    v_q, v_d = sqds.joint_visibilities(cfg)
    suite.record("joint_visibilities", max(abs(v_q - rep.V_Q), abs(v_d - rep.V_D)), blob)

    suite.record("hierarchy", sum(not ok for ok in sqds.hierarchy(cfg).values()), blob)
    suite.record("closed_form_residuals",
                 max((abs(v) for v in rep.residuals.values()), default=0.0), blob)

    swapped = sqds.sqds_report(sqds.swap_labels(cfg))
    suite.record("label_swap", max(
        abs(swapped.Q_D - rep.Q_Q), abs(swapped.Q_Q - rep.Q_D),
        abs(swapped.V_Q - rep.V_D), abs(swapped.V_D - rep.V_Q),
        abs(swapped.R_Q - sqds.r_d(cfg))), blob)


def run_monte_carlo(configs: list[ChannelConfig], seed: int, suite: _Suite) -> None:
    outside = []
    for k, cfg in enumerate(configs):
        L = channel.posterior_likelihood(cfg)
        emp = channel.monte_carlo_bet(cfg, MC_TRIALS, seed=(seed, k))
        if abs(emp - L) > channel.binomial_bound(L, MC_TRIALS):
            outside.append(cfg.to_dict())
    allowed = len(configs) // 100
    excess = len(outside) - allowed
    suite.record("monte_carlo_3sigma", max(excess, 0),
                 {"outside_3sigma": outside, "allowed": allowed} if excess > 0 else None)


def run_verify(samples: int, seed: int, replay: dict | None = None) -> dict:
    """Run all suites; with ``replay`` only the configurations it lists."""
    if samples < 1 and replay is None:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    suites = {name: _Suite(name) for name in TOLERANCES}

    if replay is not None:
        engine_cfgs = [configio.interferometer_from_dict(d) for d in replay.get("engine", [])]
        channel_cfgs = [configio.channel_from_dict(d) for d in replay.get("channel", [])]
        sqds_cfgs = [configio.sqds_from_dict(d) for d in replay.get("sqds", [])]
        mc_cfgs = []
    else:
        engine_cfgs = [InterferometerConfig.random(rng, pure=bool(k % 2)) for k in range(samples)]
        engine_cfgs += extreme_engine_configs(rng)
        grid = np.linspace(0, 1, 101)
        channel_cfgs = [ChannelConfig(w, e) for w in grid for e in grid]
        channel_cfgs += [ChannelConfig(*rng.uniform(size=2)) for _ in range(samples)]
        sqds_cfgs = [sqds.SqdsConfig.random(rng, pure=(k % 3 == 1), symmetric=(k % 3 == 2))
                     for k in range(samples)]
        mc_cfgs = [ChannelConfig(*rng.uniform(size=2)) for _ in range(min(samples, MC_MAX_CONFIGS))]

    for cfg in engine_cfgs:
        check_engine_config(cfg, suites["engine"])
    for cfg in channel_cfgs:
        check_channel_config(cfg, suites["channel"])
    for cfg in sqds_cfgs:
        check_sqds_config(cfg, suites["sqds"])
    if mc_cfgs:
        run_monte_carlo(mc_cfgs, seed, suites["channel"])

    summaries = {name: s.summary() for name, s in suites.items()}
    # failing configs in the layout accepted by ``replay``
    regressions = {
        name: [f["config"] for f in s.failures if f["check"] != "monte_carlo_3sigma"]
        for name, s in suites.items()
    }
    return {
        "seed": seed,
        "samples": samples,
        "replay": replay is not None,
        "suites": summaries,
        "regressions": {k: v for k, v in regressions.items() if v},
        "passed": all(s["passed"] for s in summaries.values()),
    }
