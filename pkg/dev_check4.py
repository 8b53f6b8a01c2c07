"""Empirical calibration of the MB/ED tests against known table cells."""
import sys
import time
import numpy as np
from gevr import GevParams, RLargestSample, sample_gevr
from gevr.gof import mb_score_test, ed_test
from gevr.exceptions import GevrError
from gevr.rng import substream

def mixture_sample(n, xi, p, rng):
    """Top-6 from the 6-largest model; 5th replaced by Bernoulli(p) mix of 5th/6th; top-5 tested."""
    base = sample_gevr(n, 6, GevParams(0, 1, xi), rng)
    v = base.values.copy()
    keep = rng.uniform(size=n) < p
    v[:, 4] = np.where(keep, v[:, 4], v[:, 5])
    return RLargestSample(v[:, :5])

which = sys.argv[1] if len(sys.argv) > 1 else "all"

if which in ("all", "mbsize"):
    t0 = time.perf_counter()
    rej = 0; fails = 0
    REPS, L = 1000, 1000
    for k in range(REPS):
        s = sample_gevr(100, 5, GevParams(0, 1, 0.0), substream(10, k))
        try:
            t = mb_score_test(s, L, substream(11, k))
        except GevrError:
            fails += 1; continue
        rej += t.p_value <= 0.05
    print(f"MB size n=100 r=5 xi=0: {100*rej/(REPS-fails):.1f}% (want ~6.5) fails={fails} [{time.perf_counter()-t0:.0f}s]")

if which in ("all", "mbr1"):
    t0 = time.perf_counter()
    rej = 0; fails = 0
    REPS, L = 500, 1000
    for k in range(REPS):
        s = sample_gevr(100, 1, GevParams(0, 1, -0.25), substream(20, k))
        try:
            t = mb_score_test(s, L, substream(21, k))
        except GevrError:
            fails += 1; continue
        rej += t.p_value <= 0.05
    print(f"MB size n=100 r=1 xi=-0.25: {100*rej/(REPS-fails):.1f}% (want ~11.4, need >=9) fails={fails} [{time.perf_counter()-t0:.0f}s]")

if which in ("all", "edsize"):
    t0 = time.perf_counter()
    for r, target in ((2, 5.3), (5, 5.7), (10, 5.9)):
        rej = 0; fails = 0
        REPS = 1000
        for k in range(REPS):
            s = sample_gevr(100, r, GevParams(0, 1, 0.0), substream(30, r, k))
            try:
                t = ed_test(s)
            except GevrError:
                fails += 1; continue
            rej += t.p_value <= 0.05
        print(f"ED size n=100 r={r} xi=0: {100*rej/(REPS-fails):.1f}% (want ~{target}) fails={fails}")
    print(f"[{time.perf_counter()-t0:.0f}s]")

if which in ("all", "power"):
    t0 = time.perf_counter()
    for p_mix, mb_want, ed_want in ((0.5, 72.4, 96.0), (0.75, 22.7, 47.6), (1.0, 6.8, 5.6)):
        rej_mb = 0; rej_ed = 0; fail_mb = 0; fail_ed = 0
        REPS, L = 500, 1000
        for k in range(REPS):
            s = mixture_sample(100, 0.0, p_mix, substream(40, int(p_mix*100), k))
            try:
                t = mb_score_test(s, L, substream(41, int(p_mix*100), k))
                rej_mb += t.p_value <= 0.05
            except GevrError:
                fail_mb += 1
            try:
                t2 = ed_test(s)
                rej_ed += t2.p_value <= 0.05
            except GevrError:
                fail_ed += 1
        print(f"scheme2 p={p_mix}: MB {100*rej_mb/(REPS-fail_mb):.1f}% (want ~{mb_want}) "
              f"ED {100*rej_ed/(REPS-fail_ed):.1f}% (want ~{ed_want}) fails=({fail_mb},{fail_ed})")
    print(f"[{time.perf_counter()-t0:.0f}s]")
