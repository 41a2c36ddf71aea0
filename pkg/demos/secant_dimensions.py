"""Walk through a few secant dimension computations.

Quadrics come with a closed form for their defect, so the rank computation
and the formula are shown side by side.  Cubics and quartics are then
checked by rank over GF(32003).
"""

from splitsecant import RunConfig, SecantQuery, d2_defect, secant_dim
from splitsecant.secant import d2_affine_dim, rank_dim

cfg = RunConfig(workers=1)

print("quadrics: rank vs closed form")
for n in range(2, 7):
    row = []
    for s in range(1, 5):
        q = SecantQuery(n, 2, s)
        row.append(f"s={s}: {rank_dim(q, cfg):3d}/{d2_affine_dim(n, s):3d} (defect {d2_defect(n, s)})")
    print(f"  n={n}  " + "  ".join(row))

print()
for n, d, s in [(5, 3, 2), (3, 4, 3), (4, 4, 2), (2, 4, 5)]:
    r = secant_dim(SecantQuery(n, d, s), cfg)
    print(f"sigma_{s} of degree-{d} forms in P^{n}: dim {r.achieved} "
          f"(expected {r.expected}) {r.verdict} via {r.provenance}")
