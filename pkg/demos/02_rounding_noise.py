# %% [markdown]
# What the market shows you
#
# Three ways of turning a latent log price into an observed one: additive
# Gaussian noise, rounding to the cent, and noise followed by rounding.
# For the last one the conditional mean f(x) = E(Y | X = x) is a smoothed
# staircase; its slope f' and the conditional variance g drive everything
# the estimator does.

# %%
import numpy as np

from tsrvlab import AdditiveGaussian, NoiseThenRound, PureRounding, contaminate_series, f_bar, f_prime, g_var

x = np.log(np.array([0.995, 1.0, 1.003, 1.005, 1.0101]))
rng_seed = 3
for kernel in (AdditiveGaussian(5e-4), PureRounding(0.01), NoiseThenRound(5e-4, 0.01)):
    y = contaminate_series(kernel, x, seed=rng_seed).y
    print(f"{kernel!r:45s}", np.round(np.exp(y), 5))

# %% [markdown]
# The smoothed staircase. With gamma = 0.005 the staircase is washed out
# and f hugs x; with gamma = 0.001 f clings to the cent grid and its slope
# spikes at every half-cent edge.

# %%
grid = np.log(np.linspace(0.985, 1.015, 13))
for gamma in (0.005, 0.001):
    k = NoiseThenRound(gamma, 0.01)
    print(f"gamma={gamma}")
    print("   price    f(x)-x      f'(x)     sqrt(g)")
    for xi in grid:
        print("  %.4f  %+.2e  %9.3f  %.2e" % (np.exp(xi), f_bar(k, xi) - xi, f_prime(k, xi), np.sqrt(g_var(k, xi))))

# %% near a half-cent edge, gamma * f' approaches a Gaussian bump of height log(101/100)/sqrt(2 pi)
edge = np.log(1.005)
for gamma in (1e-3, 1e-4, 1e-5):
    print(gamma, gamma * f_prime(NoiseThenRound(gamma, 0.01), edge), np.log(101 / 100) / np.sqrt(2 * np.pi))
