# Two interferometers that watch each other.
#
# A Quanton and a Detecton each pass their own interferometer; a conditional
# phase Phi couples them in the middle. Each is the other's which-way
# detector, so information and fringe loss flow both ways.

import numpy as np

from whichway import engine, sqds
from whichway.sqds import SqdsConfig

# %% Quanton with some predictability, pure Detecton, increasing coupling.
print(f"{'Phi':>6} {'Q_D':>6} {'R_Q':>6} {'D_Q':>6} {'V_Q':>6} {'V_D':>6} {'branch':>6}")
for Phi in np.linspace(0, np.pi / 2, 6):
    cfg = SqdsConfig.from_components(0.5, np.sqrt(0.75), 0.0, 1.0, Phi=Phi)
    r = sqds.sqds_report(cfg)
    print(f"{Phi:6.3f} {r.Q_D:6.3f} {r.R_Q:6.3f} {r.D_Q:6.3f} {r.V_Q:6.3f} {r.V_D:6.3f} {r.branch:>6}")

# %% The closed forms are checked against the generic engine: the Detecton
# after its beam splitter becomes the engine's detector state and the
# conditional phase supplies the two way unitaries.
rng = np.random.default_rng(3)
cfg = SqdsConfig.random(rng)
r = sqds.sqds_report(cfg)
e = engine.duality_report(sqds.to_engine_config(cfg))
print()
print(f"D_Q closed form {r.D_Q:.15f}  engine {e.D:.15f}")
print(f"V_Q closed form {r.V_Q:.15f}  engine {e.V:.15f}")
print("visibilities from the full two-interferometer simulation:", sqds.joint_visibilities(cfg))

# %% How much stronger is the inequality (1 - P^2) Q^2 + P^2 + V^2 <= 1 than
# D^2 + V^2 <= 1? f_Q = 1 means equally strong; smaller means stronger.
print()
for s_norm in (1.0, 0.882, 0.5):
    cfg = SqdsConfig.from_components(0.6, 0.8, 0.0, s_norm, Phi=0.7)
    print(f"|s_D0| = {s_norm:5.3f}: f_Q = {sqds.f_q(cfg):.6f}")

# %% Reciprocity: for pure states both interferometers lose the same squared
# visibility.
cfg = SqdsConfig.random(rng, pure=True)
res, _ = sqds.reciprocity(cfg)
print()
print(f"pure pair: dV_Q^2 - dV_D^2 = {res['equal_visibility_loss_pure']:.2e}")
