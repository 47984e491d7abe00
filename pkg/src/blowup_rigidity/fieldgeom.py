"""Prime-field arithmetic, the marked point configuration, and its symmetries.

The geometric setup lives over a prime field F_q with q = 1 (mod n).  Each of
the r coordinate axes carries a set of marked coordinates: s_i disjoint orbits
of the order-n scaling z -> zeta*z, all avoiding 0.  A marked point of the
ambient product of projective lines has coordinate [1:z] at its own axis and
[0:1] everywhere else.
"""

from __future__ import annotations

import functools
import json
from dataclasses import InitVar, dataclass

from .errors import (
    ExhaustedRetries,
    InvalidConfig,
    NDoesNotDivide,
    NotPrime,
    OrbitCollision,
    TooFewPoints,
    TooSmallField,
    ZeroBase,
)


@functools.lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Trial-division primality test; the fields used here are small."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True, order=True)
class FieldElement:
    """A canonical residue in F_q, q prime."""

    value: int
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise NotPrime(f"modulus {self.q} is not prime")
        object.__setattr__(self, "value", self.value % self.q)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ValueError(f"mixed moduli {self.q} and {other.q}")
            return other
        return FieldElement(other, self.q)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value + other.value, self.q)

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value - other.value, self.q)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value * other.value, self.q)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.q)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __pow__(self, k: int):
        return FieldElement(pow(self.value, k, self.q), self.q)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(pow(self.value, -1, self.q), self.q)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.q})"


def multiplicative_order(z: FieldElement) -> int:
    if z.value == 0:
        raise ValueError("zero has no multiplicative order")
    k, acc = 1, z
    one = FieldElement(1, z.q)
    while acc != one:
        acc = acc * z
        k += 1
    return k


def primitive_nth_root(q: int, n: int) -> FieldElement:
    """Smallest-valued element of exact multiplicative order n in F_q^*."""
    if n < 2:
        raise ValueError(f"order n must be >= 2, got {n}")
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if (q - 1) % n != 0:
        raise NDoesNotDivide(f"{n} does not divide {q - 1}")
    for value in range(2, q):
        z = FieldElement(value, q)
        if multiplicative_order(z) == n:
            return z
    raise NDoesNotDivide(f"no element of order {n} in F_{q}^*")  # unreachable


@dataclass(frozen=True)
class ProjPoint:
    """A point of the projective line over F_q, stored in canonical form.

    The first nonzero coordinate of (u, v) is normalized to 1, so projective
    equality is plain field equality of the pair.
    """

    u: FieldElement
    v: FieldElement

    def __post_init__(self):
        if self.u.q != self.v.q:
            raise ValueError("coordinates over different fields")
        if not self.u and not self.v:
            raise ValueError("(0, 0) is not a projective point")
        scale = (self.u if self.u else self.v).inverse()
        object.__setattr__(self, "u", self.u * scale)
        object.__setattr__(self, "v", self.v * scale)

    @classmethod
    def of(cls, u: int, v: int, q: int) -> "ProjPoint":
        return cls(FieldElement(u, q), FieldElement(v, q))

    @classmethod
    def affine(cls, z: FieldElement) -> "ProjPoint":
        """The point [1:z]."""
        return cls(FieldElement(1, z.q), z)

    @classmethod
    def zero_one(cls, q: int) -> "ProjPoint":
        """The scaling-fixed point [0:1]."""
        return cls.of(0, 1, q)

    @classmethod
    def one_zero(cls, q: int) -> "ProjPoint":
        """The scaling-fixed point [1:0]."""
        return cls.of(1, 0, q)

    @property
    def q(self) -> int:
        return self.u.q

    def __repr__(self):
        return f"[{self.u.value}:{self.v.value}]"


@dataclass(frozen=True)
class MoebiusMap:
    """An automorphism of the projective line, as a 2x2 matrix mod scalars.

    Canonical form: the first nonzero entry of (a, b, c, d) is normalized
    to 1.  Acts by [u:v] -> [a*u + b*v : c*u + d*v].
    """

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det:
            raise ValueError("singular matrix is not a projective map")
        lead = next(x for x in (self.a, self.b, self.c, self.d) if x)
        scale = lead.inverse()
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) * scale)

    @classmethod
    def of(cls, a: int, b: int, c: int, d: int, q: int) -> "MoebiusMap":
        return cls(*(FieldElement(x, q) for x in (a, b, c, d)))

    @classmethod
    def identity(cls, q: int) -> "MoebiusMap":
        return cls.of(1, 0, 0, 1, q)

    @classmethod
    def scaling(cls, mu: FieldElement) -> "MoebiusMap":
        """[u:v] -> [u : mu*v]; fixes both [0:1] and [1:0]."""
        return cls.of(1, 0, 0, mu.value, mu.q)

    @classmethod
    def affine_on_v(cls, kappa: FieldElement, mu: FieldElement) -> "MoebiusMap":
        """[u:v] -> [u : kappa*u + mu*v], i.e. z -> kappa + mu*z on [1:z].

        These are exactly the maps fixing [0:1].
        """
        if kappa.q != mu.q:
            raise ValueError("mixed moduli")
        return cls.of(1, 0, kappa.value, mu.value, mu.q)

    @property
    def q(self) -> int:
        return self.a.q

    def apply(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.a * p.u + self.b * p.v, self.c * p.u + self.d * p.v)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self after other (matrix product self * other)."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def power(self, k: int) -> "MoebiusMap":
        acc = MoebiusMap.identity(self.q)
        base = self
        while k:
            if k & 1:
                acc = acc.compose(base)
            base = base.compose(base)
            k >>= 1
        return acc

    def fixes_zero_one(self) -> bool:
        return not self.b

    def is_identity(self) -> bool:
        return self == MoebiusMap.identity(self.q)

    def sort_key(self):
        return (self.a.value, self.b.value, self.c.value, self.d.value)

    def __repr__(self):
        return f"[[{self.a.value},{self.b.value}],[{self.c.value},{self.d.value}]]"


@dataclass(frozen=True)
class DeltaPoint:
    """A marked point: axis and orbit are 1-based, torsion runs 0..n-1.

    coord is the point's own-axis coordinate [1 : zeta^torsion * base]; at
    every other axis the point sits at [0:1].
    """

    axis: int
    orbit: int
    torsion: int
    coord: ProjPoint

    @property
    def key(self) -> str:
        return f"{self.axis}.{self.orbit}.{self.torsion}"

    def full_coords(self, r: int) -> tuple[ProjPoint, ...]:
        q = self.coord.q
        return tuple(
            self.coord if i == self.axis else ProjPoint.zero_one(q)
            for i in range(1, r + 1)
        )

    def __repr__(self):
        return f"p[{self.key}]={self.coord!r}"


def parameter_problems(n, r, s, q) -> list[str]:
    """Violated constraints on (n, r, s, q), ignoring zeta and base."""
    problems = []
    if n < 2:
        problems.append(f"n = {n} < 2")
    if r < 2:
        problems.append(f"r = {r} < 2")
    if len(s) != r:
        problems.append(f"len(s) = {len(s)} != r = {r}")
    if any(x < 1 for x in s):
        problems.append("s_i must be positive")
    if len(set(s)) != len(s):
        problems.append("s_i not distinct")
    if r == 2 and n >= 2:
        for i, si in enumerate(s, start=1):
            if si >= 1 and n * si < 3:
                problems.append(f"n*s_{i} = {n * si} < 3 (required when r = 2)")
    if not is_prime(q):
        problems.append(f"q = {q} is not prime")
    elif n >= 2 and (q - 1) % n != 0:
        problems.append(f"n = {n} does not divide q - 1 = {q - 1}")
    return problems


def structural_problems(n, r, s, q, zeta, base) -> list[str]:
    """All violated structural constraints, as human-readable reasons."""
    problems = parameter_problems(n, r, s, q)
    if n >= 2 and is_prime(q) and (q - 1) % n == 0:
        if zeta % q == 0 or multiplicative_order(FieldElement(zeta, q)) != n:
            problems.append(f"zeta = {zeta} does not have exact order {n} mod {q}")
    if len(base) != len(s):
        problems.append(f"base has {len(base)} axes, expected {len(s)}")
    else:
        for i, (bi, si) in enumerate(zip(base, s), start=1):
            if len(bi) != si:
                problems.append(f"base[{i}] has {len(bi)} entries, expected {si}")
    return problems


@dataclass(frozen=True)
class Config:
    """Construction parameters: torsion order n, dimension r, orbit counts s,
    prime q with q = 1 (mod n), canonical primitive root zeta, and per-axis
    orbit base coordinates.

    The default constructor enforces the structural constraints; degenerate
    test configurations are built with skip_checks=True.
    """

    n: int
    r: int
    s: tuple[int, ...]
    q: int
    zeta: int
    base: tuple[tuple[int, ...], ...]
    seed: int | None = None
    skip_checks: InitVar[bool] = False

    def __post_init__(self, skip_checks: bool):
        object.__setattr__(self, "s", tuple(self.s))
        object.__setattr__(self, "base", tuple(tuple(b) for b in self.base))
        if not skip_checks:
            problems = structural_problems(
                self.n, self.r, self.s, self.q, self.zeta, self.base
            )
            if problems:
                raise InvalidConfig("; ".join(problems))

    def fe(self, value: int) -> FieldElement:
        return FieldElement(value, self.q)

    @property
    def zeta_el(self) -> FieldElement:
        return self.fe(self.zeta)

    @property
    def delta_size(self) -> int:
        return self.n * sum(self.s)

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "r": self.r,
            "s": list(self.s),
            "q": self.q,
            "zeta": self.zeta,
            "base": [list(b) for b in self.base],
        }
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict, skip_checks: bool = False) -> "Config":
        zeta = d.get("zeta")
        if zeta is None:
            zeta = primitive_nth_root(d["q"], d["n"]).value
        return cls(
            n=d["n"],
            r=d["r"],
            s=tuple(d["s"]),
            q=d["q"],
            zeta=zeta,
            base=tuple(tuple(b) for b in d["base"]),
            seed=d.get("seed"),
            skip_checks=skip_checks,
        )


def mu_orbit(z: FieldElement, zeta: FieldElement, n: int) -> frozenset[int]:
    """The scaling orbit {z, zeta*z, ..., zeta^(n-1)*z} as residue values."""
    return frozenset((z * zeta**t).value for t in range(n))


def build_delta(config: Config) -> tuple[DeltaPoint, ...]:
    """All marked points in (axis, orbit, torsion) lexicographic order."""
    zeta = config.zeta_el
    points = []
    for axis in range(1, config.r + 1):
        seen_orbits: list[frozenset[int]] = []
        for orbit, b in enumerate(config.base[axis - 1], start=1):
            bel = config.fe(b)
            if not bel:
                raise ZeroBase(f"axis {axis} orbit {orbit}: base coordinate is 0")
            orb = mu_orbit(bel, zeta, config.n)
            for prev in seen_orbits:
                if orb & prev:
                    raise OrbitCollision(
                        f"axis {axis}: base {b} lies in an already-used orbit"
                    )
            seen_orbits.append(orb)
            for torsion in range(config.n):
                coord = ProjPoint.affine(bel * zeta**torsion)
                points.append(DeltaPoint(axis, orbit, torsion, coord))
    return tuple(points)


def g_action(config: Config, g: tuple[int, ...], p: DeltaPoint) -> DeltaPoint:
    """Apply the torsion tuple g: shift p's torsion by g at p's own axis."""
    if len(g) != config.r:
        raise ValueError(f"g has {len(g)} entries, expected {config.r}")
    shift = g[p.axis - 1] % config.n
    torsion = (p.torsion + shift) % config.n
    b = config.fe(config.base[p.axis - 1][p.orbit - 1])
    coord = ProjPoint.affine(b * config.zeta_el**torsion)
    return DeltaPoint(p.axis, p.orbit, torsion, coord)


def delta_permutation(
    config: Config, g: tuple[int, ...], delta: tuple[DeltaPoint, ...]
) -> dict[DeltaPoint, DeltaPoint]:
    return {p: g_action(config, g, p) for p in delta}


def affine_stabilizer_of(coords: list[FieldElement], q: int) -> list[MoebiusMap]:
    """All maps fixing [0:1] that permute the given affine coordinate set.

    Such a map is z -> kappa + mu*z on the [1:z] chart and is determined by
    the images of two distinct coordinates, so the candidates are the
    O(|coords|^2) ordered image pairs; each candidate is then filtered
    against the whole set.  Complete over F_q because the coordinates and
    [0:1] are rational and a projective-line map is fixed by three rational
    point images.
    """
    values = sorted({z.value for z in coords})
    if len(values) < 2:
        raise TooFewPoints(f"need at least 2 coordinates, got {len(values)}")
    vset = frozenset(values)
    z1, z2 = values[0], values[1]
    dz_inv = pow(z1 - z2, -1, q)
    found = []
    for w1 in values:
        for w2 in values:
            if w1 == w2:
                continue
            mu = (w1 - w2) * dz_inv % q
            kappa = (w1 - mu * z1) % q
            if all((kappa + mu * z) % q in vset for z in vset):
                found.append((kappa, mu))
    found.sort()
    return [
        MoebiusMap.affine_on_v(FieldElement(k, q), FieldElement(m, q))
        for k, m in found
    ]


def stabilizer_of_axis(
    config: Config, axis: int, delta: tuple[DeltaPoint, ...] | None = None
) -> list[MoebiusMap]:
    """Maps fixing [0:1] and stabilizing the axis's marked coordinate set."""
    if delta is None:
        delta = build_delta(config)
    coords = [p.coord.v for p in delta if p.axis == axis]
    if len(coords) < 2:
        raise TooFewPoints(f"axis {axis} has {len(coords)} marked coordinates")
    return affine_stabilizer_of(coords, config.q)


def scaling_group(config: Config) -> list[MoebiusMap]:
    """The order-n group of scalings [u:v] -> [u : zeta^k v], k ascending."""
    return [MoebiusMap.scaling(config.zeta_el**k) for k in range(config.n)]


class Lcg:
    """64-bit linear congruential generator, fixed constants.

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64;
    below(k) returns (state >> 33) % k.  Documented so that generated
    configurations are reproducible across implementations.
    """

    MULT = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & self.MASK
        self.next_u64()

    def next_u64(self) -> int:
        self.state = (self.MULT * self.state + self.INC) & self.MASK
        return self.state

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError("bound must be positive")
        return (self.next_u64() >> 33) % k


def generate_config(
    n: int,
    r: int,
    s: tuple[int, ...],
    q: int,
    seed: int = 0,
    max_retries: int = 1000,
) -> Config:
    """Deterministically sample base coordinates until the configuration is
    generic (per-axis stabilizer = scaling group), or the retry cap is hit.
    """
    s = tuple(s)
    problems = parameter_problems(n, r, s, q)
    if problems:
        raise InvalidConfig("; ".join(problems))
    orbit_count = (q - 1) // n
    if orbit_count < max(s):
        raise TooSmallField(
            f"F_{q} has {orbit_count} scaling orbits, axis needs {max(s)}"
        )
    zeta = primitive_nth_root(q, n)
    rng = Lcg(seed)
    for _ in range(max_retries):
        base = []
        ok = True
        for si in s:
            taken: list[frozenset[int]] = []
            axis_base = []
            guard = 0
            while len(axis_base) < si:
                guard += 1
                if guard > 50 * orbit_count:
                    ok = False
                    break
                z = FieldElement(1 + rng.below(q - 1), q)
                orb = mu_orbit(z, zeta, n)
                if any(orb & prev for prev in taken):
                    continue
                taken.append(orb)
                axis_base.append(z.value)
            if not ok:
                break
            base.append(tuple(axis_base))
        if not ok:
            continue
        cfg = Config(n=n, r=r, s=s, q=q, zeta=zeta.value, base=tuple(base), seed=seed)
        if config_is_generic(cfg):
            return cfg
    raise ExhaustedRetries(
        f"no generic configuration found for n={n}, r={r}, s={s}, q={q} "
        f"within {max_retries} attempts"
    )


def config_is_generic(config: Config) -> bool:
    """True when every axis stabilizer is exactly the scaling group."""
    delta = build_delta(config)
    expected = set(scaling_group(config))
    for axis in range(1, config.r + 1):
        if set(stabilizer_of_axis(config, axis, delta)) != expected:
            return False
    return True


def validate_config(config: Config) -> list["CheckRecord"]:
    """Structural checks, marked-set checks, action checks, and genericity.

    Failures are reported, not raised, so configurations built through the
    unchecked path still produce a meaningful record list.  When the
    structural check fails the remaining checks are skipped (their records
    are absent).
    """
    from .checks import FAIL, PASS, make_record

    records = []
    problems = structural_problems(
        config.n, config.r, config.s, config.q, config.zeta, config.base
    )
    records.append(
        make_record(
            "config.structure",
            PASS if not problems else FAIL,
            problems or "all constraints hold",
            "no violated constraints",
        )
    )
    if problems:
        return records

    try:
        delta = build_delta(config)
        delta_issue = ""
    except (ZeroBase, OrbitCollision) as exc:
        delta = None
        delta_issue = f"{type(exc).__name__}: {exc}"
    if delta is None:
        records.append(
            make_record("config.delta", FAIL, delta_issue, "buildable marked set")
        )
        return records

    sizes = [sum(1 for p in delta if p.axis == i) for i in range(1, config.r + 1)]
    zeta = config.zeta_el
    closed = all(
        any(
            other.axis == p.axis and other.coord == ProjPoint.affine(p.coord.v * zeta)
            for other in delta
        )
        for p in delta
    )
    off_fixed = all(
        p.coord not in (ProjPoint.zero_one(config.q), ProjPoint.one_zero(config.q))
        for p in delta
    )
    distinct = len({(p.axis, p.coord) for p in delta}) == len(delta)
    delta_ok = (
        len(delta) == config.delta_size
        and sizes == [config.n * si for si in config.s]
        and closed
        and off_fixed
        and distinct
    )
    records.append(
        make_record(
            "config.delta",
            PASS if delta_ok else FAIL,
            {"total": len(delta), "per_axis": sizes, "orbit_closed": closed,
             "off_fixed_points": off_fixed, "distinct": distinct},
            {"total": config.delta_size,
             "per_axis": [config.n * si for si in config.s],
             "orbit_closed": True, "off_fixed_points": True, "distinct": True},
        )
    )

    identity = tuple(0 for _ in range(config.r))
    id_ok = all(g_action(config, identity, p) == p for p in delta)
    rng = Lcg(0xACC)
    comp_ok = True
    for _ in range(20):
        g = tuple(rng.below(config.n) for _ in range(config.r))
        h = tuple(rng.below(config.n) for _ in range(config.r))
        gh = tuple((a + b) % config.n for a, b in zip(g, h))
        for p in delta:
            if g_action(config, gh, p) != g_action(config, g, g_action(config, h, p)):
                comp_ok = False
    orbit_ok = all(
        len({g_action(config, tuple(k if i == p.axis - 1 else 0 for i in range(config.r)), p)
             for k in range(config.n)})
        == config.n
        for p in delta
    )
    action_ok = id_ok and comp_ok and orbit_ok
    records.append(
        make_record(
            "config.action",
            PASS if action_ok else FAIL,
            {"identity_trivial": id_ok, "composition": comp_ok,
             "own_axis_orbit_size_n": orbit_ok},
            {"identity_trivial": True, "composition": True,
             "own_axis_orbit_size_n": True},
        )
    )

    expected_group = sorted(scaling_group(config), key=MoebiusMap.sort_key)
    orders = {}
    generic = True
    extra: list[str] = []
    for axis in range(1, config.r + 1):
        stab = stabilizer_of_axis(config, axis, delta)
        orders[f"axis_{axis}"] = len(stab)
        if sorted(stab, key=MoebiusMap.sort_key) != expected_group:
            generic = False
            extra.extend(
                repr(h) for h in stab if h not in expected_group
            )
    records.append(
        make_record(
            "config.genericity",
            PASS if generic else FAIL,
            orders,
            {f"axis_{i}": config.n for i in range(1, config.r + 1)},
            detail=(
                "scaling convention: the v-coordinate is multiplied, [0:1] is fixed"
                + (f"; extra stabilizer elements: {extra}" if extra else "")
            ),
        )
    )
    return records


def generate_config_smallest_q(
    n: int, r: int, s: tuple[int, ...], seed: int = 0, attempts_per_q: int = 50
) -> Config:
    """Scan primes q = 1 (mod n) upward until a generic configuration exists."""
    s = tuple(s)
    q = n + 1
    while True:
        if is_prime(q) and (q - 1) % n == 0 and (q - 1) // n >= max(s):
            try:
                return generate_config(n, r, s, q, seed=seed, max_retries=attempts_per_q)
            except (ExhaustedRetries, TooSmallField):
                pass
        q += 1
        if q > 10_000:
            raise ExhaustedRetries(f"no workable field found for n={n}, s={s}")
