"""Copula scores: what the dependence coefficient actually looks at.

Run with ``python demos/01_copula_transform.py``.
"""

# %% Each row of a multivariate sample is replaced by the fraction of rows it
# dominates coordinatewise.  The result lives in (0, 1] whatever the marginals.
import numpy as np

from copdep import copula_transform, ecdf_multivariate, split_stream

stream = split_stream(7)
x = stream.lognormal(size=(8, 2))
scores = copula_transform(x)
print("raw rows:\n", np.round(x, 3))
print("copula scores:", scores.values)

# %% The score of a row is just the joint ECDF evaluated at that row.
print("ECDF at row 0:", ecdf_multivariate(x, x[0]), "score:", scores.values[0])

# %% Increasing maps of any coordinate leave the scores untouched, which is
# why the final coefficient ignores marginal distributions entirely.
warped = x.copy()
warped[:, 0] = np.log(warped[:, 0]) ** 3
print("unchanged after warping:", np.array_equal(copula_transform(warped).values, scores.values))

# %% A huge outlier moves every other row's dominance count by at most one.
spoiled = x.copy()
spoiled[3] = 1e6
shift = np.abs(copula_transform(spoiled).values - scores.values) * len(x)
print("largest count change among the other rows:", np.delete(shift, 3).max())
