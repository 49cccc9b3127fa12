# Betting on a classical sender through a noisy channel.
#
# The sender emits q+ with probability w+; the receiver reads it through a
# channel that flips the symbol with probability epsilon. A bettor who reads
# the receiver wins with likelihood (1 + D) / 2, where D is the larger of the
# prior predictability P and the channel quality Q.

import numpy as np

from whichway import channel
from whichway.channel import ChannelConfig

print(f"{'w+':>5} {'eps':>5} {'P':>5} {'Q':>5} {'D':>5} {'L exact':>8} {'L sim':>8}")
for w_plus, eps in [(0.5, 0.0), (0.5, 0.5), (0.7, 0.1), (0.7, 0.2), (0.9, 0.3), (0.6, 0.85)]:
    cfg = ChannelConfig(w_plus, eps)
    L = channel.posterior_likelihood(cfg)
    sim = channel.monte_carlo_bet(cfg, 200_000, seed=1)
    print(f"{w_plus:5.2f} {eps:5.2f} {channel.predictability(cfg):5.2f} "
          f"{channel.channel_quality(cfg):5.2f} {channel.total_distinguishability(cfg):5.2f} "
          f"{L:8.4f} {sim:8.4f}")

# A reading only helps when the channel beats the prior: with w+ = 0.9 and
# epsilon = 0.3 the bettor ignores the receiver and always bets q+.
print()
print("MAP guesses (on d+, on d-) for w+=0.9, eps=0.3:", channel.map_guess(ChannelConfig(0.9, 0.3)))

# %% Across the whole (w+, epsilon) square the likelihood surface is the
# maximum of two planes.
grid = np.linspace(0, 1, 5)
print()
print("L(w+, eps)")
for w in grid:
    print("  " + " ".join(f"{channel.posterior_likelihood(ChannelConfig(w, e)):.3f}" for e in grid))
