"""Cross-check expected information against the reference closed form."""
import numpy as np
from scipy.special import gamma, digamma, polygamma
from gevr import GevParams
from gevr.inference import expected_information

def trigamma(x):
    return polygamma(1, x)

def eva_fisher_info(R, scale, shape):
    """Per-observation expected information (eva's A..F entries, total/N)."""
    gr1 = gamma(R + shape + 1) / gamma(R)
    gr2 = gamma(R + 2 * shape + 1) / gamma(R)
    A = (((1 + shape) ** 2) * gr2) / ((scale ** 2) * (1 + 2 * shape))
    B = (-1 / ((scale ** 2) * shape * (1 + 2 * shape))) * (((1 + shape) ** 2) * gr2 - (1 + 2 * shape) * gr1)
    C = (1 / (scale * (shape ** 2) * (1 + 2 * shape))) * (((1 + 2 * shape) * gr1) * (shape * digamma(R + shape + 1) + (shape ** 2 + shape + 1) / (1 + shape)) - ((1 + shape) ** 2) * gr2)
    D = (1 / ((scale ** 2) * (shape ** 2) * (1 + 2 * shape))) * (R * (1 + 2 * shape) - 2 * (1 + 2 * shape) * gr1 + ((1 + shape) ** 2) * gr2)
    E = (1 / (scale * ((-shape) ** 3) * (1 + 2 * shape))) * (R * (-shape) * (1 + 2 * shape) * digamma(R + 1) + (1 + 2 * shape) * gr1 * (shape * digamma(R + shape + 1) + (1 + (1 + shape) ** 2) / (1 + shape)) - ((1 + shape) ** 2) * gr2 - R * (1 + 2 * shape))
    F = (1 / (((-shape) ** 4) * (1 + 2 * shape))) * ((2 * (1 + 2 * shape) * gr1) * ((-shape) * digamma(R + shape + 1) - (shape ** 2 + shape + 1) / (1 + shape)) + ((1 + shape) ** 2) * gr2 + (R * (1 + 2 * shape)) * (1 + 2 * shape * digamma(R + 1) + (shape ** 2) * (1 + trigamma(R + 1) + (digamma(R + 1)) ** 2)))
    return np.array([[A, B, C], [B, D, E], [C, E, F]])

print("mine vs eva closed form (max abs rel diff):")
for R in (1, 2, 5, 10):
    for xi in (-0.4, -0.25, -0.1, 0.1, 0.25, 0.5):
        for sigma in (1.0, 2.5):
            mine = expected_information(R, GevParams(3.0, sigma, xi))
            ref = eva_fisher_info(R, sigma, xi)
            rel = np.abs(mine - ref) / np.maximum(np.abs(ref), 1e-12)
            flag = "" if rel.max() < 1e-8 else "  <-- MISMATCH"
            print(f"R={R:2d} xi={xi:+.2f} sig={sigma}: {rel.max():.2e}{flag}")
