"""Run parameters for the covering pipeline, offline and online profiles.

The block length w1, superblock length w2 and 1/theta are kept at powers
of two; the pattern is logically truncated to the largest multiple of w2
and the text is split into a prefix and a suffix segment whose lengths the
part size divides.  Sampling levels form the ladder eps_j = 2^-j for
j = ceil(log2(1/theta)) down to 0.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field, replace

__all__ = [
    "EpsLevel",
    "CoverParams",
    "normalize_params",
    "rng_stream",
]

_PROFILES = {
    # exponents for (w1, w2, d, 1/theta) as powers of the pattern length
    "offline": (1 / 4, 1 / 2, 1 / 4, 1 / 4),
    "online": (11 / 18, 20 / 27, 7 / 54, 1 / 9),
}


def _snap(x: float) -> float:
    r = round(x)
    if abs(x - r) < 1e-6 * max(1.0, abs(r)):
        return float(r)
    return x


def _pow2_floor(x: float) -> int:
    x = _snap(x)
    if x < 1:
        raise ValueError(f"cannot round {x} down to a power of two")
    return 1 << (int(x).bit_length() - 1)


def _pow2_ceil(x: float) -> int:
    x = _snap(x)
    if x <= 1:
        return 1
    i = int(x)
    if i == x and i & (i - 1) == 0:
        return i
    return 1 << i.bit_length()


def _is_pow2(x: int) -> bool:
    return x >= 1 and x & (x - 1) == 0


def rng_stream(seed: int, *key) -> random.Random:
    """Deterministic RNG keyed by (seed, *key), independent of call order."""
    payload = repr((seed,) + key).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


@dataclass(frozen=True)
class EpsLevel:
    """One sampling level: eps = 2^-j, with its distance threshold and
    alignment step for length-w1 pattern windows."""

    j: int
    w1: int

    @property
    def eps(self) -> float:
        return 2.0 ** -self.j

    @property
    def thresh(self) -> int:
        """eps * w1, exact because both are powers of two."""
        return self.w1 >> self.j

    @property
    def aligned_step(self) -> int:
        return max(self.thresh // 8, 1)


@dataclass(frozen=True)
class CoverParams:
    """Everything a covering run needs; governs offline and online runs."""

    n: int
    w: int
    w_trunc: int
    w1: int
    w2: int
    d: float
    theta: float
    c0: float = 2.0
    c1: float = 1.0
    seed: int = 0
    ext_box_enlarge: bool = False
    seg_prefix: int = 0
    seg_suffix: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("text length hint must be at least 2")
        if not (_is_pow2(self.w1) and _is_pow2(self.w2)):
            raise ValueError("w1 and w2 must be powers of two")
        inv = self.inv_theta
        if not _is_pow2(inv) or abs(self.theta * inv - 1.0) > 1e-9:
            raise ValueError("1/theta must be a power of two")
        if self.theta * self.w1 < 1:
            raise ValueError("need theta * w1 >= 1")
        if self.w1 > self.theta * self.w2 + 1e-9:
            raise ValueError("need w1 <= theta * w2")
        if self.w2 % self.w1:
            raise ValueError("need w1 | w2")
        if self.w_trunc % self.w2 or not 0 < self.w_trunc <= self.w:
            raise ValueError("need w2 | w_trunc <= w")
        if self.d <= 0 or self.c0 <= 0 or self.c1 <= 0:
            raise ValueError("d, c0, c1 must be positive")

    @property
    def inv_theta(self) -> int:
        return int(round(1.0 / self.theta))

    @property
    def level_max(self) -> int:
        return self.inv_theta.bit_length() - 1  # ceil(log2(1/theta)), exact

    def levels(self) -> tuple[EpsLevel, ...]:
        """Sampling levels, finest (largest j) first."""
        return tuple(EpsLevel(j, self.w1) for j in range(self.level_max, -1, -1))

    def ext_ab_values(self) -> list[int]:
        """Powers of two in [theta * w_trunc, w_trunc] for extension bounds."""
        lo = self.w_trunc / self.inv_theta
        p = 1
        while p < lo:
            p *= 2
        out = []
        while p <= self.w_trunc:
            out.append(p)
            p *= 2
        return out

    def with_seed(self, seed: int) -> "CoverParams":
        return replace(self, seed=seed)


def normalize_params(
    w: int,
    n: int,
    overrides: dict | None = None,
    profile: str = "offline",
) -> CoverParams:
    """Derive rounded parameters for a pattern of length w and text of length n.

    w1 and w2 round down to powers of two, 1/theta rounds up; when the
    rounded values conflict with theta*w1 >= 1 or w1 <= theta*w2 they are
    repaired downward.  Overrides pin individual fields and are validated
    as given.  Raises when w is too small to produce nondegenerate
    parameters; callers should fall back to an exact scan in that case.
    """
    overrides = dict(overrides or {})
    if w < 16:
        raise ValueError(
            f"pattern length {w} too small for approximate matching; use an exact scan"
        )
    if n < w:
        raise ValueError(f"text length {n} shorter than pattern length {w}")
    e1, e2, ed, et = _PROFILES[profile]
    w1_pin = overrides.pop("w1", None)
    theta_pin = overrides.pop("theta", None)
    w1 = int(w1_pin) if w1_pin is not None else _pow2_floor(w**e1)
    w2 = int(overrides.pop("w2", 0)) or _pow2_floor(w**e2)
    d = float(overrides.pop("d", 0)) or w**ed
    inv = int(round(1.0 / float(theta_pin))) if theta_pin is not None else _pow2_ceil(w**et)
    # repair rounding drift (theta*w1 >= 1 and w1 <= theta*w2) by lowering
    # whichever of 1/theta and w1 was not pinned; pinned values that still
    # conflict fail validation below
    while True:
        if inv > w1 and theta_pin is None:
            inv = w1
        if w1 <= w2 // inv or w1_pin is not None:
            break
        w1 = w2 // inv
        if w1 < 1:
            raise ValueError(f"pattern length {w} yields degenerate parameters")
    w_trunc = w2 * (w // w2)
    if w_trunc == 0:
        raise ValueError(f"pattern length {w} shorter than superblock length {w2}")
    seg = w_trunc * (n // w_trunc)
    return CoverParams(
        n=n,
        w=w,
        w_trunc=w_trunc,
        w1=w1,
        w2=w2,
        d=d,
        theta=1.0 / inv,
        seg_prefix=seg,
        seg_suffix=0 if seg == n else seg,
        **overrides,
    )
