# %% [markdown]
# Latent log prices on a master grid
#
# One trading day at one observation per second, sigma = 20% a year. The
# master grid is ten times finer than the observation grid; coarser grids
# are read off the same path, so every grid below shares its points.

# %%
import numpy as np

from tsrvlab import ProcessModel, SamplingGrid, generate_master_path, observation_values, subsample_nested

model = ProcessModel(mu=0.0, sigma=0.2, x0=np.log(1.00))
grid = SamplingGrid(n=23400, T=1 / 252)
path = generate_master_path(model, grid, refine=10, seed=12345)
print(path)
print("fine steps:", path.n_fine, " observation steps:", grid.n)

# %%
x = observation_values(path)
print("price range over the day: %.4f .. %.4f" % (np.exp(x.min()), np.exp(x.max())))
print("realized variance of the latent path: %.4e  (sigma^2 T = %.4e)" % (np.sum(np.diff(x) ** 2), 0.2**2 / 252))

# %% nested grids: every 10th second, every minute
ten = subsample_nested(path, 2340)
minute = subsample_nested(path, 390)
assert np.array_equal(ten[::6], minute)
print("10s grid:", ten.size, "points   1m grid:", minute.size, "points")

# %% same seed and stream, same path
again = generate_master_path(model, grid, refine=10, seed=12345)
print("bit-identical regeneration:", again.values.tobytes() == path.values.tobytes())

# %% volatility that steps up after lunch
stepped = ProcessModel(mu=0.0, sigma=(0.15, 0.30), x0=0.0)
p2 = generate_master_path(stepped, grid, refine=1, seed=7)
half = grid.n // 2
d = np.diff(observation_values(p2))
print("morning RV %.3e  afternoon RV %.3e" % (np.sum(d[:half] ** 2), np.sum(d[half:] ** 2)))
