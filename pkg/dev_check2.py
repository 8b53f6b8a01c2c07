"""Is E[-Hessian]/n == E[S S^T]? Average observed info over many datasets."""
import numpy as np
from gevr import GevParams, sample_gevr, information, expected_information
from gevr.rng import substream

for xi, r in ((0.25, 2), (0.0, 2), (-0.25, 2), (-0.25, 1), (0.25, 1)):
    th = GevParams(0.0, 1.0, xi)
    acc = np.zeros((3, 3))
    K = 60
    for k in range(K):
        s = sample_gevr(20000, r, th, substream(1000 + k, r))
        acc += information(s, th, kind="observed")
    mean_obs = acc / K
    ie = expected_information(r, th)
    rel = np.abs(mean_obs - ie) / np.abs(ie)
    print(f"xi={xi:+.2f} r={r}: max rel diff of MEAN observed vs expected: {rel.max():.4f}")
    if rel.max() > 0.03:
        print("  mean observed:\n", mean_obs, "\n  expected:\n", ie)
