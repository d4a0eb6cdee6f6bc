"""Eight scalar relationships, four measures.

Linear, quadratic, cubic, two sines, fourth root, circle and step pairs are drawn
at a modest noise level and scored by CDC, ACE on raw data, RDC and |Pearson|.
Pearson misses every symmetric shape; the copula-based coefficient does not.
"""

from copdep import NoiseSpec, ace_baseline, cdc, gen_2d_suite, pearson, rdc
from copdep.data import substream
from copdep.synthetic import B_MODELS, B_NAMES

print(f"{'type':<12}{'cdc':>8}{'ace':>8}{'rdc':>8}{'pearson':>9}")
for type_id in B_MODELS:
    x, y = gen_2d_suite(type_id, 300, NoiseSpec(0.1), substream(3, type_id))
    row = [m(x, y).statistic for m in (cdc, ace_baseline, rdc, pearson)]
    print(f"{B_NAMES[type_id]:<12}" + "".join(f"{v:8.3f}" for v in row))
