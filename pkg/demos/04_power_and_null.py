"""A small power study and the null bias of each coefficient.

This is a reduced version of what ``copdep power`` and ``copdep independence``
run; expect about a minute on one core.
"""

from copdep import PermutationConfig, independence_study, noise_grid, power_curve
from copdep.experiments import summary_csv

grid = power_curve(["A1", "A6"], ["cdc", "ace", "rdc"], noise_grid(4), n=200, reps=40,
                   perm=PermutationConfig(B=99))
for model in ("A1", "A6"):
    for measure in ("cdc", "ace", "rdc"):
        variances, powers = grid.power(model, measure)
        print(model, f"{measure:<4}", " ".join(f"{p:.2f}" for p in powers))

# Mean and variance under independence (scalar normals, n=200).
print(summary_csv(independence_study(n=200, reps=200)), end="")
