"""Constraint directions of the aggregate model.

A direction is a nonempty interval subset ``S'`` of ``{1..T}``; the model
bounds ``sum_{tau in S'} P(tau)`` with ``P(tau) = E(tau) - E(tau-1)``.  It is
stored as a bit mask (bit ``tau-1`` set iff ``tau`` is in ``S'``).

Each subset also carries its elimination-path description.  An elimination
path at depth ``q`` (interval ``t = T - q`` still to go) is a 0/1 vector
``u`` of length ``q`` whose entry ``theta`` refers to interval
``T - theta + 1``.  Among the paths that express the same functional, the one
with the largest ``t`` is canonical:

* ``1 in S'`` : ``S'`` starts with a run ``{1..k}``; then ``t = k - 1`` and
  ``u(q) = 1`` (interval ``t+1 = k`` is selected).  The functional is
  ``u.P(q) + E(t)``.
* ``1 not in S'`` : ``t = min(S') - 2`` and ``u(q) = 0``.  The functional is
  ``u.P(q)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property


def gray(k: int) -> int:
    return k ^ (k >> 1)


def mask_of(subset) -> int:
    m = 0
    for tau in subset:
        m |= 1 << (tau - 1)
    return m


def subset_of(mask: int) -> tuple[int, ...]:
    out = []
    tau = 1
    while mask:
        if mask & 1:
            out.append(tau)
        mask >>= 1
        tau += 1
    return tuple(out)


@dataclass(frozen=True)
class DirectionIndex:
    T: int
    mask: int

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be positive")
        if not 0 < self.mask < (1 << self.T):
            raise ValueError(f"mask {self.mask} is not a nonempty subset of 1..{self.T}")

    @classmethod
    def from_subset(cls, T: int, subset) -> "DirectionIndex":
        return cls(T, mask_of(subset))

    @classmethod
    def from_path(cls, T: int, u) -> "DirectionIndex":
        """Direction for an arbitrary path vector ``u`` of length ``q``.

        Non-canonical paths map to the subset of the functional they
        describe (``u.P(q)`` plus ``E(t)`` when ``u(q) = 1``).
        """
        q = len(u)
        if not 1 <= q <= T or not any(u):
            raise ValueError("path must be nonzero with 1 <= q <= T")
        t = T - q
        subset = {T - theta + 1 for theta in range(1, q + 1) if u[theta - 1]}
        if u[-1]:
            subset |= set(range(1, t + 1))
        return cls.from_subset(T, subset)

    @cached_property
    def subset(self) -> tuple[int, ...]:
        return subset_of(self.mask)

    @property
    def contains_first(self) -> bool:
        return bool(self.mask & 1)

    @cached_property
    def t(self) -> int:
        if self.contains_first:
            k = 0
            m = self.mask
            while m & 1:
                k += 1
                m >>= 1
            return k - 1
        return self.subset[0] - 2

    @property
    def q(self) -> int:
        return self.T - self.t

    @cached_property
    def window(self) -> tuple[int, ...]:
        """Intervals of ``S'`` at or after ``t + 1`` (the path's selection)."""
        return tuple(tau for tau in self.subset if tau > self.t)

    @cached_property
    def u(self) -> tuple[int, ...]:
        sel = set(self.window)
        return tuple(1 if self.T - theta + 1 in sel else 0 for theta in range(1, self.q + 1))

    @cached_property
    def v(self) -> tuple[int, ...]:
        prev = 0
        out = []
        for x in self.u:
            out.append(x - prev)
            prev = x
        return tuple(out)

    @property
    def g(self) -> int:
        return self.u.index(1) + 1

    @property
    def s(self) -> int:
        """Start marker ``T - g``."""
        return self.T - self.g

    @property
    def b(self) -> int:
        """Latest selected interval ``max(S') = T - g + 1``."""
        return self.subset[-1]

    @property
    def I(self) -> int:
        """+1 iff ``u(q) = 1``."""
        return 1 if self.u[-1] == 1 else -1

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.subset)) + "}"


def gray_masks(T: int) -> list[int]:
    """All nonzero masks over ``T`` bits; consecutive ones differ in one bit."""
    return [gray(k) for k in range(1, 1 << T)]


def enumerate_directions(T: int) -> list[DirectionIndex]:
    if T < 1:
        raise ValueError("T must be positive")
    return [DirectionIndex(T, m) for m in gray_masks(T)]
