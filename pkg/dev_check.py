"""Dev scratch: validate score, information, moments before freezing tests."""
import numpy as np
import time
from gevr import (
    GevParams, sample_gevr, gevr_log_likelihood, fit_gevr,
    expected_information, information, expected_moment_h, block_score,
)
from gevr.inference import total_score, _score_matrix
from gevr.rng import substream

# 1. score vs FD
print("=== score vs finite differences ===")
rng = substream(42)
for r in (1, 3, 5, 10):
    for xi in (-0.25, 0.0, 0.25):
        th = GevParams(0.3, 1.3, xi)
        s = sample_gevr(1, r, th, substream(7, r, int(xi*100) + 50))
        block = s.values[0]
        sc = block_score(block, th)
        fd = np.empty(3)
        base = th.as_array()
        for k in range(3):
            h = 1e-6 * max(1.0, abs(base[k]))
            tp, tm = base.copy(), base.copy()
            tp[k] += h; tm[k] -= h
            fd[k] = (gevr_log_likelihood(block, GevParams.from_array(tp))
                     - gevr_log_likelihood(block, GevParams.from_array(tm))) / (2*h)
        rel = np.abs(sc - fd) / np.maximum(1e-8, np.abs(fd))
        print(f"r={r:2d} xi={xi:+.2f} max rel err {rel.max():.2e}")

# 2. observed vs expected information at true theta, n large
print("=== observed vs expected information ===")
for xi in (-0.25, 0.25, 0.0):
    th = GevParams(0.0, 1.0, xi)
    for r in (1, 2, 5):
        s = sample_gevr(20000, r, th, substream(123, r))
        io = information(s, th, kind="observed")
        ie = information(s, th, kind="expected")
        rel = np.abs(io - ie) / np.abs(ie)
        print(f"xi={xi:+.2f} r={r} max entrywise rel diff {rel.max():.3f}")
        if rel.max() > 0.1:
            print("  observed:\n", io, "\n  expected:\n", ie)

# 3. expected info MC check via score outer product E[S S^T]
print("=== expected info vs E[S S^T] MC ===")
for xi, r in ((-0.25, 2), (0.25, 5)):
    th = GevParams(0.5, 2.0, xi)
    s = sample_gevr(200000, r, th, substream(99, r))
    sm = _score_matrix(s.values, th)
    mc = sm.T @ sm / s.n
    ie = expected_information(r, th)
    rel = np.abs(mc - ie) / np.abs(ie)
    print(f"xi={xi:+.2f} r={r} max rel diff {rel.max():.3f}")
    if rel.max() > 0.1:
        print("  MC:\n", mc, "\n  expected:\n", ie)

# 4. moment checks
print("=== moment h checks ===")
th = GevParams(0.0, 1.0, 0.25)
for j in (1, 2, 5):
    print(f"h({j}|0,0,0) = {expected_moment_h(j, th, 0, 0, 0):.6f} (want {j})")
# E[log(1+xi Z_j)] = -xi psi(j)
from scipy.special import digamma
for j in (1, 3):
    v = expected_moment_h(j, th, 0, -1/th.xi, 1)
    print(f"E[log u_{j}] = {v:.6f} want {-th.xi*digamma(j):.6f}")

# 5. fit speed + consistency
print("=== fit speed ===")
th = GevParams(0.0, 1.0, 0.25)
s = sample_gevr(5000, 5, th, substream(1))
t0 = time.perf_counter()
f = fit_gevr(s)
print(f"n=5000 r=5 fit: {time.perf_counter()-t0:.3f}s conv={f.converged} theta={f.theta_hat} se={f.se}")

s100 = sample_gevr(100, 5, th, substream(2))
t0 = time.perf_counter()
REPS = 200
ok = 0
for k in range(REPS):
    sk = sample_gevr(100, 5, th, substream(3, k))
    fk = fit_gevr(sk, start=th)
    ok += fk.converged
dt = time.perf_counter() - t0
print(f"{REPS} warm fits n=100 r=5: {dt:.2f}s ({1000*dt/REPS:.2f} ms/fit), {ok} converged")

t0 = time.perf_counter()
ok = 0
for k in range(REPS):
    sk = sample_gevr(100, 5, th, substream(4, k))
    fk = fit_gevr(sk)
    ok += fk.converged
dt = time.perf_counter() - t0
print(f"{REPS} cold fits n=100 r=5: {dt:.2f}s ({1000*dt/REPS:.2f} ms/fit), {ok} converged")
