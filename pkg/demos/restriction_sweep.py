"""Run the fixed-dimension restriction driver for cubic threefold functions.

Usage: python3 demos/restriction_sweep.py [max_d]
"""

import sys
import time

from splitsecant import RunConfig, restriction_fixed_dimension

max_d = int(sys.argv[1]) if len(sys.argv) > 1 else 12
cfg = RunConfig(workers=1)

for name, l, funcs in [("s1", 9, ["builtin:s1", 0, 0, 0]),
                       ("s2pp", 9, ["builtin:s2pp", 0, 0, 0]),
                       ("stilde", 6, ["builtin:stilde"] * 4)]:
    start = time.perf_counter()
    rep = restriction_fixed_dimension(3, l, *funcs, cfg=cfg, max_d=max_d)
    secs = time.perf_counter() - start
    print(f"{name:7s} l={l} d<={max_d}: {rep.verdict.value} ({len(rep.cases)} cases, {secs:.1f}s)")
