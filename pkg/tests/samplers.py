"""Random inputs for the sumset and Cauchy-fit checks; library-free."""

import numpy as np


def random_symmetric_mask(rng: np.random.Generator, half: int, min_count: int) -> np.ndarray:
    """Symmetric mask on ``[-half, half]`` containing 0: mirrored intervals plus isolated points."""
    side = np.zeros(half + 1, dtype=bool)
    side[0] = True
    for _ in range(int(rng.integers(0, 6))):
        side[int(rng.integers(1, half + 1))] = True
    while 2 * int(side[1:].sum()) + 1 < min_count:
        lo = int(rng.integers(0, half + 1))
        length = int(rng.integers(1, max(2, half // 4)))
        side[lo : lo + length] = True
    return np.concatenate([side[:0:-1], side])


def near_additive(rng: np.random.Generator, half: int, step: float) -> tuple[np.ndarray, float]:
    """``c * alpha`` plus noise of random shape and size; returns values and the noise amplitude."""
    alphas = np.arange(-half, half + 1) * step
    c = float(rng.normal(scale=3.0))
    eta = float(rng.choice([0.0, 1e-6, 1e-3, 0.1, 1.0])) * float(rng.random())
    kind = int(rng.integers(0, 3))
    if kind == 0:
        noise = rng.uniform(-eta, eta, alphas.size)
    elif kind == 1:
        noise = eta * np.sin(float(rng.uniform(0.5, 50.0)) * alphas)
    else:
        noise = eta * np.sign(np.sin(float(rng.uniform(1.0, 30.0)) * alphas))
    return c * alphas + noise, eta
