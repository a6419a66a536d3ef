"""Counter-based random streams.

Every randomness consumer is addressed by ``(seed, stream)`` where the
stream is an instruction index, and inside a stream shot ``s`` owns a fixed
slice of the Philox counter space.  Sampling shots ``[a, b)`` therefore
gives the same numbers no matter how the shots are split into batches.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def uniforms(seed: int, stream: int, shot_start: int, num_shots: int, per_shot: int) -> np.ndarray:
    """``(num_shots, per_shot)`` uniform doubles for the given address."""
    if per_shot <= 0 or num_shots <= 0:
        return np.zeros((max(num_shots, 0), max(per_shot, 0)))
    stride = (per_shot + 3) // 4  # Philox4x64 yields four words per counter step
    seed = int(seed)
    key = [seed & _MASK64, ((seed >> 64) ^ (int(stream) * 0x9E3779B97F4A7C15)) & _MASK64]
    counter = [(shot_start * stride) & _MASK64, int(stream) & _MASK64, 0, 0]
    gen = np.random.Generator(np.random.Philox(counter=counter, key=key))
    u = gen.random(num_shots * stride * 4)
    return u.reshape(num_shots, stride * 4)[:, :per_shot]
