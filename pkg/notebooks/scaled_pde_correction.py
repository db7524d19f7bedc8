"""Why the limiting two-jump PDE residual decays so slowly.

At the soft edge d sigma/ds grows like n^(1/6), so the n^(-1/6) correction
term of the pre-limit equation is of the same size as the terms kept in the
limit.  The plain residual therefore creeps down, while the residual of the
equation with the correction retained falls off clearly.

Run: python3 notebooks/scaled_pde_correction.py   (about a minute)
"""

from __future__ import annotations

import mpmath as mp

from hpk.identities import edge_point, scaled_pde_residual
from hpk.ladder import cached_aux
from hpk.moments import WeightSpec
from hpk.numerics import PrecisionContext

spec = WeightSpec.three_level("0.3", "-0.5", "0.7")
ctx = PrecisionContext(256)
s1, s2 = -1, 1

print(f"{'n':>5} {'|d sigma/ds|':>14} {'limit PDE':>12} {'with n^-1/6 term':>18}")
for n in (16, 64, 256, 1024):
    plain = scaled_pde_residual(spec, n, s1, s2, ctx)
    corr = scaled_pde_residual(spec, n, s1, s2, ctx, corrected=True)
    with mp.workprec(ctx.bits + 64):
        moved = spec.at(t1=edge_point(n, s1), t2=edge_point(n, s2))
    sys, aux = cached_aux(moved, n + 1, ctx, "ladder", True)
    with mp.workprec(sys.work_bits):
        dsds = abs(2 * (aux.r1[n] + aux.r2[n])) / (mp.sqrt(2) * mp.root(mp.mpf(n), 6))
    print(f"{n:>5} {mp.nstr(dsds, 5):>14} {mp.nstr(plain, 5):>12} {mp.nstr(corr, 5):>18}")
