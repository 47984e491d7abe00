"""Numerical-equivalence lattices of the blow-up and their pairing.

Divisor classes are integer vectors over (pullback hyperplanes pi*(H_1..H_r),
exceptional divisors E_p); curve classes over (strict line transforms
lt_1..lt_r, exceptional lines e_p).  The marked points are ordered by
(axis, orbit, torsion), and all coefficients are exact Python integers.

Pairing rules, extended bilinearly:

    lt_i . pi*(H_j) = delta_ij          lt_i . E_p = 1 iff p on axis i
    e_p  . pi*(H_j) = 0                 e_p  . E_q = -delta_pq
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import AxisOutOfRange, ConfigMismatch, SameAxis
from .fieldgeom import Config, DeltaPoint, build_delta


@dataclass(frozen=True)
class DivisorClass:
    """h: coefficients over pi*(H_i); m: coefficients over E_p."""

    h: tuple[int, ...]
    m: tuple[int, ...]
    lattice: "BlowupLattice" = field(compare=False, repr=False)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self.lattice.check_same(other.lattice)
        return DivisorClass(
            tuple(a + b for a, b in zip(self.h, other.h)),
            tuple(a + b for a, b in zip(self.m, other.m)),
            self.lattice,
        )

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __neg__(self) -> "DivisorClass":
        return self.scale(-1)

    def scale(self, k: int) -> "DivisorClass":
        return DivisorClass(
            tuple(k * a for a in self.h), tuple(k * a for a in self.m), self.lattice
        )

    def to_array(self) -> list[int]:
        return list(self.h) + list(self.m)

    def __repr__(self):
        return f"D(h={list(self.h)}, m={list(self.m)})"


@dataclass(frozen=True)
class CurveClass:
    """l: coefficients over strict lines; e: coefficients over exceptional lines."""

    l: tuple[int, ...]
    e: tuple[int, ...]
    lattice: "BlowupLattice" = field(compare=False, repr=False)

    def __add__(self, other: "CurveClass") -> "CurveClass":
        self.lattice.check_same(other.lattice)
        return CurveClass(
            tuple(a + b for a, b in zip(self.l, other.l)),
            tuple(a + b for a, b in zip(self.e, other.e)),
            self.lattice,
        )

    def __sub__(self, other: "CurveClass") -> "CurveClass":
        return self + (-other)

    def __neg__(self) -> "CurveClass":
        return self.scale(-1)

    def scale(self, k: int) -> "CurveClass":
        return CurveClass(
            tuple(k * a for a in self.l), tuple(k * a for a in self.e), self.lattice
        )

    def is_zero(self) -> bool:
        return not any(self.l) and not any(self.e)

    def to_array(self) -> list[int]:
        return list(self.l) + list(self.e)

    def __repr__(self):
        return f"C(l={list(self.l)}, e={list(self.e)})"


class BlowupLattice:
    """Both lattices of one configuration, with the intersection pairing."""

    def __init__(self, config: Config, delta: tuple[DeltaPoint, ...] | None = None):
        self.config = config
        self.points = delta if delta is not None else build_delta(config)
        self.point_index = {p: i for i, p in enumerate(self.points)}
        self.axis_of = tuple(p.axis for p in self.points)
        self.size = len(self.points)
        self._exc_divisor_cache: dict[int, DivisorClass] = {}
        self._pullback_cache: dict[int, DivisorClass] = {}

    def check_same(self, other: "BlowupLattice") -> None:
        if other is self:
            return
        if other.config != self.config:
            raise ConfigMismatch("classes over different configurations")

    def _check_axis(self, i: int) -> None:
        if not 1 <= i <= self.config.r:
            raise AxisOutOfRange(f"axis {i} outside 1..{self.config.r}")

    def _unit(self, length: int, idx: int) -> tuple[int, ...]:
        return tuple(1 if j == idx else 0 for j in range(length))

    def _zeros(self, length: int) -> tuple[int, ...]:
        return (0,) * length

    # divisor side -----------------------------------------------------

    def pullback_h(self, i: int) -> DivisorClass:
        """pi*(H_i)."""
        self._check_axis(i)
        if i not in self._pullback_cache:
            self._pullback_cache[i] = DivisorClass(
                self._unit(self.config.r, i - 1), self._zeros(self.size), self
            )
        return self._pullback_cache[i]

    def exc_divisor(self, p: DeltaPoint) -> DivisorClass:
        """E_p."""
        idx = self.point_index[p]
        if idx not in self._exc_divisor_cache:
            self._exc_divisor_cache[idx] = DivisorClass(
                self._zeros(self.config.r), self._unit(self.size, idx), self
            )
        return self._exc_divisor_cache[idx]

    def strict_h(self, i: int) -> DivisorClass:
        """Strict transform of the axis-i hyperplane:
        pi*(H_i) - sum of E_p over every p marked off axis i."""
        self._check_axis(i)
        m = tuple(-1 if axis != i else 0 for axis in self.axis_of)
        return DivisorClass(self._unit(self.config.r, i - 1), m, self)

    def zero_divisor(self) -> DivisorClass:
        return DivisorClass(self._zeros(self.config.r), self._zeros(self.size), self)

    def ambient_canonical_pullback(self) -> DivisorClass:
        """pi*(-2 H_1 - ... - 2 H_r)."""
        return DivisorClass((-2,) * self.config.r, self._zeros(self.size), self)

    def blowup_canonical(self) -> DivisorClass:
        """Canonical class of the blow-up, by the standard blow-up formula
        (derived convenience value, not part of the verified identity set):
        pullback of the ambient canonical class plus (r-1) * sum E_p."""
        return DivisorClass(
            (-2,) * self.config.r, (self.config.r - 1,) * self.size, self
        )

    # curve side -------------------------------------------------------

    def line(self, i: int) -> CurveClass:
        """Strict transform of the axis-i coordinate line."""
        self._check_axis(i)
        return CurveClass(self._unit(self.config.r, i - 1), self._zeros(self.size), self)

    def exc_curve(self, p: DeltaPoint) -> CurveClass:
        """A line e_p inside the exceptional divisor over p."""
        return CurveClass(
            self._zeros(self.config.r), self._unit(self.size, self.point_index[p]), self
        )

    def gamma(self, p: DeltaPoint, i: int) -> CurveClass:
        """Strict transform of the line through p in direction i:
        lt_i + sum of e_q over q marked on axis i, minus e_p."""
        self._check_axis(i)
        if p.axis == i:
            raise SameAxis(f"point {p.key} lies on axis {i}")
        e = [1 if axis == i else 0 for axis in self.axis_of]
        e[self.point_index[p]] -= 1
        return CurveClass(self._unit(self.config.r, i - 1), tuple(e), self)

    def zero_curve(self) -> CurveClass:
        return CurveClass(self._zeros(self.config.r), self._zeros(self.size), self)

    # pairing ----------------------------------------------------------

    def intersect(self, c: CurveClass, d: DivisorClass) -> int:
        if c.lattice is not self:
            self.check_same(c.lattice)
        if d.lattice is not self:
            self.check_same(d.lattice)
        total = sum(li * hi for li, hi in zip(c.l, d.h))
        for mp, ep, axis in zip(d.m, c.e, self.axis_of):
            if mp:
                total += mp * (c.l[axis - 1] - ep)
        return total

    def pushforward(self, c: CurveClass) -> tuple[int, ...]:
        """Multidegree: pairings with every pullback hyperplane."""
        return tuple(self.intersect(c, self.pullback_h(i)) for i in range(1, self.config.r + 1))

    def expand_in_basis(
        self, a: tuple[int, ...], eps: tuple[int, ...]
    ) -> CurveClass:
        """The class sum_i a_i lt_i + sum_p (a_{axis(p)} - eps_p) e_p.

        Postcondition (asserted): pairing with E_p recovers eps_p and the
        multidegree recovers a.
        """
        if len(a) != self.config.r or len(eps) != self.size:
            raise ValueError("vector lengths do not match the bases")
        e = tuple(a[axis - 1] - ep for ep, axis in zip(eps, self.axis_of))
        result = CurveClass(tuple(a), e, self)
        for p in self.points:
            assert self.intersect(result, self.exc_divisor(p)) == eps[self.point_index[p]]
        assert self.pushforward(result) == tuple(a)
        return result

    def canonical_pullback_check(self, i: int) -> int:
        """Pairing of the strict line on axis i with the pulled-back ambient
        canonical class; contract: -2."""
        self._check_axis(i)
        return self.intersect(self.line(i), self.ambient_canonical_pullback())

    # serialization ------------------------------------------------------

    def curve_labels(self) -> list[str]:
        return [f"lt{i}" for i in range(1, self.config.r + 1)] + [
            f"e[{p.key}]" for p in self.points
        ]

    def divisor_labels(self) -> list[str]:
        return [f"piH{i}" for i in range(1, self.config.r + 1)] + [
            f"E[{p.key}]" for p in self.points
        ]

    def curve_from_array(self, arr: list[int]) -> CurveClass:
        r = self.config.r
        if len(arr) != r + self.size:
            raise ValueError(f"expected length {r + self.size}, got {len(arr)}")
        return CurveClass(tuple(arr[:r]), tuple(arr[r:]), self)

    def divisor_from_array(self, arr: list[int]) -> DivisorClass:
        r = self.config.r
        if len(arr) != r + self.size:
            raise ValueError(f"expected length {r + self.size}, got {len(arr)}")
        return DivisorClass(tuple(arr[:r]), tuple(arr[r:]), self)

    def divisor_basis(self) -> list[DivisorClass]:
        return [self.pullback_h(i) for i in range(1, self.config.r + 1)] + [
            self.exc_divisor(p) for p in self.points
        ]

    def curve_basis(self) -> list[CurveClass]:
        return [self.line(i) for i in range(1, self.config.r + 1)] + [
            self.exc_curve(p) for p in self.points
        ]

    def write_pairing_table(self, fileobj) -> None:
        """CSV: rows are curve basis elements, columns divisor basis elements."""
        writer = csv.writer(fileobj)
        writer.writerow(["curve/divisor"] + self.divisor_labels())
        for label, c in zip(self.curve_labels(), self.curve_basis()):
            writer.writerow([label] + [self.intersect(c, d) for d in self.divisor_basis()])
