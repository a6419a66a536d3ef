"""Statistical comparison helpers shared by the simulator and acceptance tests."""
from __future__ import annotations

import numpy as np
from scipy.stats import binom

P_BEYOND_3SIGMA = 0.0027


def z_scores(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Two-sample z scores of the column means of bool tables ``a`` and ``b``.

    A pooled frequency floor of one count keeps columns that never fire finite.
    """
    na, nb = len(a), len(b)
    fa, fb = a.mean(axis=0), b.mean(axis=0)
    pool = np.maximum((fa * na + fb * nb) / (na + nb), 1.0 / (na + nb))
    se = np.sqrt(pool * (1 - pool) * (1 / na + 1 / nb))
    return (fa - fb) / se


def z_against(freq: np.ndarray, p: np.ndarray, shots: int) -> np.ndarray:
    """z scores of sampled frequencies against exact probabilities."""
    se = np.sqrt(np.maximum(p * (1 - p), 1.0 / shots) / shots)
    return (freq - p) / se


def sigma_budget(num_tests: int) -> int:
    """Largest count of 3-sigma exceedances consistent with chance.

    The 99.73% quantile of the exceedance count when every one of
    ``num_tests`` comparisons independently exceeds 3 sigma with
    probability 0.27%.
    """
    return int(binom.ppf(1 - P_BEYOND_3SIGMA, num_tests, P_BEYOND_3SIGMA))


def within_3sigma(z: np.ndarray) -> bool:
    z = np.asarray(z).ravel()
    return int(np.sum(np.abs(z) > 3)) <= sigma_budget(len(z))


VERDICTS = []


def verdict(criterion: str, ok: bool, detail: str = "") -> bool:
    """Record and print one acceptance line; returns ``ok`` so callers can assert on it."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    VERDICTS.append(line)
    print(line)
    return ok
