"""The effective-curve semigroup: generators, decomposition, extremality.

Generators are the strict line transforms, the through-point line transforms,
and the exceptional lines.  The degree functional phi (pairing with
N * sum pi*(H_i) - sum E_p, N = 1 + |Delta|) is additive and >= 1 on every
generator, so decompositions of a fixed class form a finite set and the
bounded depth-first search below is exhaustive.

Canonical generator order: strict lines by axis, then through-point curves
grouped by free axis and then by point, then exceptional lines by point.
The search branches in this order, taking larger multiplicities first, so
`member` returns the first decomposition in that order; every emitted
decomposition is re-summed against its target before it is returned.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import CapExceeded, NotEffective
from .fieldgeom import DeltaPoint
from .lattice import BlowupLattice, CurveClass


@dataclass(frozen=True)
class Generator:
    label: str
    kind: str  # "line" | "gamma" | "exc"
    cls: CurveClass
    phi: int


class GeneratorSet:
    """The generators in canonical order, with label lookup."""

    def __init__(self, lattice: BlowupLattice):
        self.lattice = lattice
        cfg = lattice.config
        self.N = 1 + lattice.size
        gens: list[Generator] = []
        for i in range(1, cfg.r + 1):
            c = lattice.line(i)
            gens.append(Generator(f"lt{i}", "line", c, self.phi(c)))
        for i in range(1, cfg.r + 1):
            for p in lattice.points:
                if p.axis != i:
                    c = lattice.gamma(p, i)
                    gens.append(Generator(f"gt[{p.key};{i}]", "gamma", c, self.phi(c)))
        for p in lattice.points:
            c = lattice.exc_curve(p)
            gens.append(Generator(f"e[{p.key}]", "exc", c, self.phi(c)))
        self.generators = tuple(gens)
        self.by_label = {g.label: g for g in gens}
        assert len(self.by_label) == len(gens)
        assert len({(g.cls.l, g.cls.e) for g in gens}) == len(gens)

    def phi(self, c: CurveClass) -> int:
        """Degree against N * sum pi*(H_i) - sum E_p with N = 1 + |Delta|."""
        lat = self.lattice
        total = self.N * sum(c.l)
        for ep, axis in zip(c.e, lat.axis_of):
            total -= c.l[axis - 1] - ep
        return total

    @property
    def expected_count(self) -> int:
        cfg = self.lattice.config
        d = self.lattice.size
        return cfg.r + d + sum(d - cfg.n * si for si in cfg.s)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def to_json(self) -> str:
        return json.dumps(
            [
                {"label": g.label, "kind": g.kind, "phi": g.phi,
                 "class": g.cls.to_array()}
                for g in self.generators
            ],
            sort_keys=True,
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class Decomposition:
    """A multiset of generator labels with positive multiplicities."""

    parts: tuple[tuple[str, int], ...]

    @property
    def size(self) -> int:
        return sum(m for _, m in self.parts)

    def resum(self, genset: GeneratorSet) -> CurveClass:
        total = genset.lattice.zero_curve()
        for label, mult in self.parts:
            total = total + genset.by_label[label].cls.scale(mult)
        return total

    def __repr__(self):
        return " + ".join(
            label if m == 1 else f"{m}*{label}" for label, m in self.parts
        ) or "0"


def generators(lattice: BlowupLattice) -> GeneratorSet:
    return GeneratorSet(lattice)


class EffectiveCone:
    """Membership, decomposition, and extremality over the generator semigroup."""

    def __init__(self, lattice: BlowupLattice, cap: int | None = None):
        self.lattice = lattice
        self.genset = GeneratorSet(lattice)
        self.cap = cap if cap is not None else 10 * self.genset.N
        r = lattice.config.r
        gens = self.genset.generators
        self._lines = [g for g in gens if g.kind == "line"]
        self._gamma_blocks = [
            [g for g in gens if g.kind == "gamma" and g.cls.l[i] == 1]
            for i in range(r)
        ]
        self._exc = [g for g in gens if g.kind == "exc"]

    def phi(self, c: CurveClass) -> int:
        return self.genset.phi(c)

    def _search(self, target: CurveClass, first_only: bool) -> list[Decomposition]:
        phi_t = self.phi(target)
        if phi_t > self.cap:
            raise CapExceeded(f"phi(target) = {phi_t} exceeds cap {self.cap}")
        solutions: list[Decomposition] = []
        if phi_t < 0:
            return solutions
        r = self.lattice.config.r

        def emit(parts: list[tuple[str, int]], rem_e: list[int]) -> bool:
            full = list(parts)
            for gen, needed in zip(self._exc, rem_e):
                if needed:
                    full.append((gen.label, needed))
            dec = Decomposition(tuple(full))
            check = dec.resum(self.genset)
            assert (check.l, check.e) == (target.l, target.e), "unsound decomposition"
            solutions.append(dec)
            return first_only

        def gamma_step(bi, gi, rem_l, rem_e, rem_phi, parts) -> bool:
            if bi == r:
                if any(x < 0 for x in rem_e):
                    return False
                return emit(parts, rem_e)
            block = self._gamma_blocks[bi]
            if gi == len(block):
                if rem_l[bi] != 0:
                    return False
                return gamma_step(bi + 1, 0, rem_l, rem_e, rem_phi, parts)
            gen = block[gi]
            maxm = min(rem_l[bi], rem_phi // gen.phi)
            for m in range(maxm, -1, -1):
                if m:
                    new_l = rem_l.copy()
                    new_l[bi] -= m
                    new_e = [x - m * ge for x, ge in zip(rem_e, gen.cls.e)]
                    if gamma_step(bi, gi + 1, new_l, new_e,
                                  rem_phi - m * gen.phi, parts + [(gen.label, m)]):
                        return True
                else:
                    if gamma_step(bi, gi + 1, rem_l, rem_e, rem_phi, parts):
                        return True
            return False

        def line_step(i, rem_l, rem_phi, parts) -> bool:
            if i == r:
                return gamma_step(0, 0, rem_l, list(target.e), rem_phi, parts)
            gen = self._lines[i]
            maxm = min(rem_l[i], rem_phi // gen.phi)
            for m in range(maxm, -1, -1):
                new_l = rem_l.copy()
                new_l[i] -= m
                new_parts = parts + [(gen.label, m)] if m else parts
                if line_step(i + 1, new_l, rem_phi - m * gen.phi, new_parts):
                    return True
            return False

        line_step(0, list(target.l), phi_t, [])
        return solutions

    def member(self, c: CurveClass) -> Decomposition | None:
        """First decomposition in canonical order, or None."""
        found = self._search(c, first_only=True)
        return found[0] if found else None

    def all_decompositions(self, c: CurveClass) -> list[Decomposition]:
        return self._search(c, first_only=False)

    def two_part_decompositions(
        self, c: CurveClass
    ) -> list[tuple[Decomposition, Decomposition]]:
        """All unordered pairs of nonzero effective classes summing to c,
        each witnessed by one decomposition per side; deduplicated at the
        class level."""
        decs = self.all_decompositions(c)
        if not decs:
            raise NotEffective(f"{c!r} is not in the effective semigroup")
        found: dict[tuple, tuple[Decomposition, Decomposition]] = {}
        for dec in decs:
            labels = [label for label, _ in dec.parts]
            mults = [m for _, m in dec.parts]
            for choice in itertools.product(*(range(m + 1) for m in mults)):
                total = sum(choice)
                if total == 0 or total == dec.size:
                    continue
                left = tuple(
                    (lab, m) for lab, m in zip(labels, choice) if m
                )
                right = tuple(
                    (lab, m - c_) for lab, m, c_ in zip(labels, mults, choice) if m - c_
                )
                d1, d2 = Decomposition(left), Decomposition(right)
                c1, c2 = d1.resum(self.genset), d2.resum(self.genset)
                v1 = (c1.l, c1.e)
                v2 = (c2.l, c2.e)
                key = (min(v1, v2), max(v1, v2))
                if key not in found:
                    found[key] = (d1, d2) if v1 <= v2 else (d2, d1)
        return [found[k] for k in sorted(found)]

    def is_extremal(self, c: CurveClass) -> bool:
        """True when c admits no splitting into two nonzero effective classes."""
        return not self.two_part_decompositions(c)

    def case3_identity(self, q0: DeltaPoint, a: tuple[int, ...], eps_q: int) -> bool:
        """Exact vector identity for a class with zero multidegree at q0's axis
        and prescribed excess at q0: the expansion equals
        (-eps_q + sum_{i != j} a_i) * e_{q0} + sum_{i != j} a_i * gamma(q0, i).
        """
        lat = self.lattice
        cfg = lat.config
        j = q0.axis
        if len(a) != cfg.r:
            raise ValueError("multidegree length mismatch")
        if a[j - 1] != 0:
            raise ValueError(f"a_{j} must be 0 for a point on axis {j}")
        if any(x < 0 for x in a):
            raise ValueError("multidegree must be nonnegative")
        eps = tuple(
            eps_q if p == q0 else 0 for p in lat.points
        )
        lhs = lat.expand_in_basis(tuple(a), eps)
        coeff = -eps_q + sum(a[i - 1] for i in range(1, cfg.r + 1) if i != j)
        rhs = lat.exc_curve(q0).scale(coeff)
        for i in range(1, cfg.r + 1):
            if i != j and a[i - 1]:
                rhs = rhs + lat.gamma(q0, i).scale(a[i - 1])
        return (lhs.l, lhs.e) == (rhs.l, rhs.e)
