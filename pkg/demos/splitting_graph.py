"""Build the splitting graph for (n, d, s) = (5, 17, 24) and verify it.

Each vertex is an A-statement; children come from splitting off a
hyperplane.  The sinks are threefold statements, checked here by rank.
"""

import sys
from pathlib import Path

from splitsecant import RunConfig, exp_bound, splitting_graph, verify_by_splitting

cfg = RunConfig(workers=1)

bound = exp_bound(5, 17)
print(f"exp_bound(5, 17): c={bound.c}, s <= {bound.bound}")

graph = splitting_graph(5, 17, bound.c)
print(f"{len(graph.vertices)} vertices, {len(graph.edges)} edges")
for parent, child, k in graph.edges:
    print(f"  {parent.label} -> {child.label}  phi{k}")

report = verify_by_splitting(5, 17, 24, cfg, "direct")
for case in report.cases:
    print(f"  {case.descriptor}: {case.verdict}")
print("overall:", report.verdict.value)

if len(sys.argv) > 1:
    Path(sys.argv[1]).write_text(graph.to_dot())
    print("wrote", sys.argv[1])
