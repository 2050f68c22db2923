"""Counter-based random streams keyed by (master seed, trial index).

Every trial owns an independent Philox stream whose key is the pair
``(seed, trial)``; draws depend only on that key and on how many values
were consumed before, never on which worker ran the trial.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * np.pi


class SeedStream:
    """Reproducible stream of uniforms and Box-Muller normals.

    Parameters
    ----------
    seed:
        Master seed, reduced modulo 2**64.
    trial:
        Trial index; distinct trials give statistically independent streams.
    """

    def __init__(self, seed: int, trial: int = 0):
        if trial < 0:
            raise ValueError("trial index must be nonnegative")
        self.seed = int(seed) & _MASK64
        self.trial = int(trial)
        self._bitgen = np.random.Philox(key=np.array([self.seed, self.trial], dtype=np.uint64))
        self.counter = 0  # number of 64-bit words consumed

    def __repr__(self) -> str:
        return f"SeedStream(seed={self.seed}, trial={self.trial}, counter={self.counter})"

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles in the open interval (0, 1)."""
        raw = self._bitgen.random_raw(n)
        self.counter += n
        # 53 high bits, offset by half an ulp so 0 is never produced
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)

    def normals(self, n: int) -> np.ndarray:
        """``n`` standard normals, generated pairwise by Box-Muller.

        The output interleaves the cosine and sine branches, so consecutive
        values come from the same uniform pair. An odd request still burns a
        whole pair.
        """
        pairs = (n + 1) // 2
        u = self.uniforms(2 * pairs)
        rad = np.sqrt(-2.0 * np.log(u[0::2]))
        ang = _TWO_PI * u[1::2]
        out = np.empty(2 * pairs)
        out[0::2] = rad * np.cos(ang)
        out[1::2] = rad * np.sin(ang)
        return out[:n]

    def complex_normals(self, n: int, variance: float = 1.0) -> np.ndarray:
        """``n`` circular complex Gaussians with ``E|z|^2 = variance``.

        Real part first: value ``i`` uses normals ``2i`` and ``2i+1``.
        """
        g = self.normals(2 * n)
        scale = np.sqrt(variance / 2.0)
        return scale * (g[0::2] + 1j * g[1::2])
