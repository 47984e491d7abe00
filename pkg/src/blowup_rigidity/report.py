"""Deterministic verification reports and the sweep driver.

A report is the canonical-JSON record of one full verification run: the
exact configuration, one record per check in a fixed order, and the ids of
any checks skipped because validation failed.  Identical inputs produce
byte-identical JSON; per-stage timings are available but excluded from the
canonical form.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .checks import CLAIMS, FAIL, PASS, WARN, CheckRecord, make_record
from .cone import EffectiveCone
from .errors import BlowupError
from .fieldgeom import (
    Config,
    FieldElement,
    Lcg,
    build_delta,
    generate_config,
    generate_config_smallest_q,
    is_prime,
    mu_orbit,
    primitive_nth_root,
    validate_config,
)
from .lattice import BlowupLattice
from .rigidity import verify_rigidity
from .vectorfields import derivation_kernel, verify_vanishing

CHECK_ORDER = [
    "config.structure",
    "config.delta",
    "config.action",
    "config.genericity",
    "lattice.pairing_blocks",
    "lattice.strict_h_self",
    "lattice.strict_h_cross",
    "lattice.strict_h_exc",
    "lattice.gamma_pairings",
    "lattice.multidegree_expansion",
    "lattice.canonical_degree",
    "cone.generator_count",
    "cone.phi_positive",
    "cone.generators_extremal",
    "cone.sample_splits",
    "cone.case2_membership",
    "cone.case3_identity",
    "rigidity.components",
    "rigidity.census_divisors",
    "rigidity.census_gammas",
    "rigidity.census_lines",
    "rigidity.handshake",
    "rigidity.pinning",
    "rigidity.automorphisms",
    "vectorfields.directions",
    "vectorfields.kernel",
    "vectorfields.kernel_extra",
]
assert set(CHECK_ORDER) <= set(CLAIMS)


def config_seed(config: Config, salt: str) -> int:
    """Deterministic draw seed derived from the exact configuration."""
    digest = hashlib.sha256((config.canonical_json() + salt).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def lattice_checks(lattice: BlowupLattice, draws: int = 1000) -> list[CheckRecord]:
    cfg = lattice.config
    r = cfg.r
    records = []

    ok = True
    bad = []
    for i in range(1, r + 1):
        li = lattice.line(i)
        for j in range(1, r + 1):
            if lattice.intersect(li, lattice.pullback_h(j)) != (1 if i == j else 0):
                ok, bad = False, bad + [f"lt{i}.piH{j}"]
        for p in lattice.points:
            want = 1 if p.axis == i else 0
            if lattice.intersect(li, lattice.exc_divisor(p)) != want:
                ok, bad = False, bad + [f"lt{i}.E[{p.key}]"]
    for p in lattice.points:
        ep = lattice.exc_curve(p)
        for j in range(1, r + 1):
            if lattice.intersect(ep, lattice.pullback_h(j)) != 0:
                ok, bad = False, bad + [f"e[{p.key}].piH{j}"]
        for p2 in lattice.points:
            want = -1 if p2 == p else 0
            if lattice.intersect(ep, lattice.exc_divisor(p2)) != want:
                ok, bad = False, bad + [f"e[{p.key}].E[{p2.key}]"]
    records.append(
        make_record(
            "lattice.pairing_blocks",
            PASS if ok else FAIL,
            "all basis pairings as stated" if ok else bad,
            "identity / minus-identity diagonal blocks, membership rectangle",
        )
    )

    self_vals = {
        f"axis_{i}": lattice.intersect(lattice.line(i), lattice.strict_h(i))
        for i in range(1, r + 1)
    }
    records.append(
        make_record(
            "lattice.strict_h_self",
            PASS if all(v == 1 for v in self_vals.values()) else FAIL,
            self_vals,
            {f"axis_{i}": 1 for i in range(1, r + 1)},
        )
    )

    cross_vals = {}
    cross_want = {}
    for i in range(1, r + 1):
        for j in range(1, r + 1):
            if i != j:
                key = f"H{i}.l{j}"
                cross_vals[key] = lattice.intersect(lattice.line(j), lattice.strict_h(i))
                cross_want[key] = -cfg.n * cfg.s[j - 1]
    records.append(
        make_record(
            "lattice.strict_h_cross",
            PASS if cross_vals == cross_want else FAIL,
            cross_vals,
            cross_want,
        )
    )

    exc_ok = all(
        lattice.intersect(lattice.exc_curve(p), lattice.strict_h(i))
        == (0 if p.axis == i else 1)
        for p in lattice.points
        for i in range(1, r + 1)
    )
    records.append(
        make_record(
            "lattice.strict_h_exc",
            PASS if exc_ok else FAIL,
            "membership pattern holds at every (p, i)" if exc_ok else "mismatch",
            "1 off the axis, 0 on the axis",
        )
    )

    gamma_ok = True
    pairs = 0
    for i in range(1, r + 1):
        unit = tuple(1 if j == i else 0 for j in range(1, r + 1))
        for p in lattice.points:
            if p.axis == i:
                continue
            pairs += 1
            g = lattice.gamma(p, i)
            if lattice.intersect(g, lattice.exc_divisor(p)) != 1:
                gamma_ok = False
            for p2 in lattice.points:
                if p2 != p and lattice.intersect(g, lattice.exc_divisor(p2)) != 0:
                    gamma_ok = False
            if lattice.pushforward(g) != unit:
                gamma_ok = False
    records.append(
        make_record(
            "lattice.gamma_pairings",
            PASS if gamma_ok else FAIL,
            {"admissible_pairs": pairs, "all_identities_hold": gamma_ok},
            {"admissible_pairs": pairs, "all_identities_hold": True},
        )
    )

    rng = Lcg(config_seed(cfg, "expansion"))
    expansion_ok = True
    for _ in range(draws):
        a = tuple(rng.below(15) - 5 for _ in range(r))
        eps = tuple(rng.below(15) - 5 for _ in range(lattice.size))
        try:
            lattice.expand_in_basis(a, eps)
        except AssertionError:
            expansion_ok = False
            break
    records.append(
        make_record(
            "lattice.multidegree_expansion",
            PASS if expansion_ok else FAIL,
            {"draws": draws, "all_exact": expansion_ok},
            {"draws": draws, "all_exact": True},
        )
    )

    canon = {f"axis_{i}": lattice.canonical_pullback_check(i) for i in range(1, r + 1)}
    records.append(
        make_record(
            "lattice.canonical_degree",
            PASS if all(v == -2 for v in canon.values()) else FAIL,
            canon,
            {f"axis_{i}": -2 for i in range(1, r + 1)},
        )
    )
    return records


def cone_checks(cone: EffectiveCone, draws: int = 1000) -> list[CheckRecord]:
    lattice = cone.lattice
    cfg = lattice.config
    records = []

    records.append(
        make_record(
            "cone.generator_count",
            PASS if len(cone.genset) == cone.genset.expected_count else FAIL,
            len(cone.genset),
            cone.genset.expected_count,
        )
    )

    phis = [g.phi for g in cone.genset]
    records.append(
        make_record(
            "cone.phi_positive",
            PASS if all(x >= 1 for x in phis) else FAIL,
            {"min_phi": min(phis), "max_phi": max(phis)},
            {"min_phi": ">= 1"},
        )
    )

    non_extremal = [g.label for g in cone.genset if not cone.is_extremal(g.cls)]
    records.append(
        make_record(
            "cone.generators_extremal",
            PASS if not non_extremal else FAIL,
            {"generators": len(cone.genset), "non_extremal": non_extremal},
            {"generators": len(cone.genset), "non_extremal": []},
        )
    )

    p0 = lattice.points[0]
    samples = {
        "lt1+e": lattice.line(1) + lattice.exc_curve(p0),
        "2e": lattice.exc_curve(p0).scale(2),
        "lt1+lt2": lattice.line(1) + lattice.line(2),
    }
    split_counts = {
        name: len(cone.two_part_decompositions(c)) for name, c in samples.items()
    }
    records.append(
        make_record(
            "cone.sample_splits",
            PASS if all(v >= 1 for v in split_counts.values()) else FAIL,
            split_counts,
            "each >= 1 (so none of these classes is extremal)",
        )
    )

    rng = Lcg(config_seed(cfg, "case2"))
    case2_ok = True
    case2_draws = min(draws, 200)
    for _ in range(case2_draws):
        a = tuple(rng.below(3) for _ in range(cfg.r))
        eps = tuple(rng.below(a[axis - 1] + 1) for axis in lattice.axis_of)
        target = lattice.expand_in_basis(a, eps)
        dec = cone.member(target)
        if dec is None:
            case2_ok = False
            break
        resum = dec.resum(cone.genset)
        if (resum.l, resum.e) != (target.l, target.e):
            case2_ok = False
            break
    records.append(
        make_record(
            "cone.case2_membership",
            PASS if case2_ok else FAIL,
            {"draws": case2_draws, "all_members_resum": case2_ok},
            {"draws": case2_draws, "all_members_resum": True},
        )
    )

    rng = Lcg(config_seed(cfg, "case3"))
    case3_ok = True
    for _ in range(draws):
        q0 = lattice.points[rng.below(lattice.size)]
        a = tuple(
            0 if axis == q0.axis else rng.below(4)
            for axis in range(1, cfg.r + 1)
        )
        eps_q = rng.below(4)
        if not cone.case3_identity(q0, a, eps_q):
            case3_ok = False
            break
    records.append(
        make_record(
            "cone.case3_identity",
            PASS if case3_ok else FAIL,
            {"draws": draws, "all_exact": case3_ok},
            {"draws": draws, "all_exact": True},
        )
    )
    return records


def next_valid_q(n: int, s: tuple[int, ...], after: int) -> int:
    """Smallest prime q > after with q = 1 (mod n) and enough scaling orbits."""
    q = after + 1
    while True:
        if is_prime(q) and (q - 1) % n == 0 and (q - 1) // n >= max(s):
            return q
        q += 1


def extra_q_vanishing(config: Config, q2: int) -> CheckRecord:
    """Re-run the kernel computation over a second field with the same
    (n, r, s).  Genericity is not needed for this check, so the base table
    is resampled with orbit-disjointness only."""
    if not is_prime(q2) or (q2 - 1) % config.n != 0:
        raise ValueError(f"q2 = {q2} is not prime with q2 = 1 (mod {config.n})")
    if (q2 - 1) // config.n < max(config.s):
        raise ValueError(f"q2 = {q2} has too few scaling orbits")
    zeta2 = primitive_nth_root(q2, config.n).value
    rng = Lcg(config_seed(config, f"extra_q={q2}"))
    base = []
    for si in config.s:
        taken = []
        axis_base = []
        while len(axis_base) < si:
            z = FieldElement(1 + rng.below(q2 - 1), q2)
            orb = mu_orbit(z, FieldElement(zeta2, q2), config.n)
            if any(orb & prev for prev in taken):
                continue
            taken.append(orb)
            axis_base.append(z.value)
        base.append(tuple(axis_base))
    cfg2 = Config(
        n=config.n, r=config.r, s=config.s, q=q2, zeta=zeta2, base=tuple(base)
    )
    result = derivation_kernel(cfg2)
    ok = result.dimension == cfg2.r and result.basis_is_scalar()
    return make_record(
        "vectorfields.kernel_extra",
        PASS if ok else FAIL,
        {"q": q2, "rank": result.rank, "dimension": result.dimension,
         "scalar_basis": result.basis_is_scalar()},
        {"q": q2, "rank": 3 * cfg2.r, "dimension": cfg2.r, "scalar_basis": True},
    )


@dataclass
class VerificationReport:
    config: dict
    records: list[CheckRecord] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def __post_init__(self):
        ids = [rec.check_id for rec in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate check ids in report: {ids}")

    @property
    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, WARN: 0}
        for rec in self.records:
            out[rec.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if self.counts[FAIL] else 0

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "config": self.config,
            "checks": [rec.to_dict(timings=timings) for rec in self.records],
            "skipped": list(self.skipped),
            "summary": self.counts,
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(
            self.to_dict(timings=timings),
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
        )

    def to_markdown(self, timings: bool = True) -> str:
        lines = ["# Verification report", "", "## Configuration", "",
                 "```json", json.dumps(self.config, sort_keys=True, indent=2), "```",
                 "", "## Checks", ""]
        header = "| check | status | computed | expected |"
        sep = "|---|---|---|---|"
        if timings:
            header += " ms |"
            sep += "---|"
        lines += [header, sep]
        for rec in self.records:
            row = (
                f"| {rec.check_id} | {rec.status} "
                f"| {json.dumps(rec.computed, sort_keys=True, default=str)} "
                f"| {json.dumps(rec.expected, sort_keys=True, default=str)} |"
            )
            if timings:
                ms = f"{rec.elapsed_ms:.1f}" if rec.elapsed_ms is not None else ""
                row += f" {ms} |"
            lines.append(row)
        for rec in self.records:
            if rec.detail:
                lines += ["", f"- `{rec.check_id}`: {rec.detail}"]
        if self.skipped:
            lines += ["", f"Skipped (validation failed): {', '.join(self.skipped)}"]
        c = self.counts
        lines += ["", f"**{c[PASS]} PASS, {c[FAIL]} FAIL, {c[WARN]} WARN**", ""]
        return "\n".join(lines)


def run_all(
    config: Config,
    draws: int = 1000,
    cap: int | None = None,
    extra_q: int | None = None,
) -> VerificationReport:
    """The full check suite in deterministic order.

    Validation failures stop the run; the remaining check ids are listed as
    skipped and the report carries exit code 1.
    """
    records: list[CheckRecord] = []

    def staged(fn):
        t0 = time.perf_counter()
        recs = fn()
        dt = (time.perf_counter() - t0) * 1000.0
        recs = recs if isinstance(recs, list) else [recs]
        for rec in recs:
            rec.elapsed_ms = dt / len(recs)
        records.extend(recs)
        return recs

    validation = staged(lambda: validate_config(config))
    if any(rec.status == FAIL for rec in validation):
        emitted = {rec.check_id for rec in records}
        skipped = [cid for cid in CHECK_ORDER if cid not in emitted]
        return VerificationReport(config.to_dict(), records, skipped)

    delta = build_delta(config)
    lattice = BlowupLattice(config, delta)
    staged(lambda: lattice_checks(lattice, draws=draws))
    cone = EffectiveCone(lattice, cap=cap)
    staged(lambda: cone_checks(cone, draws=draws))
    staged(lambda: verify_rigidity(config))
    staged(lambda: verify_vanishing(config, delta))
    if extra_q is not None:
        staged(lambda: extra_q_vanishing(config, extra_q))
        skipped = []
    else:
        skipped = ["vectorfields.kernel_extra"]
    return VerificationReport(config.to_dict(), records, skipped)


# ----------------------------------------------------------------------
# sweeps

ENV_JOBS = "BLOWUP_RIGIDITY_JOBS"


def default_s(n: int, r: int) -> tuple[int, ...]:
    """Canonical distinct orbit counts: 1..r, bumped to (2,3) when n = r = 2
    so that n*s_i >= 3 holds."""
    if n == 2 and r == 2:
        return (2, 3)
    return tuple(range(1, r + 1))


@dataclass(frozen=True)
class SweepCase:
    n: int
    r: int
    s: tuple[int, ...]
    q: int | None = None  # None: smallest workable prime
    seed: int = 0

    @property
    def key(self) -> str:
        qtxt = str(self.q) if self.q is not None else "auto"
        stxt = ",".join(str(x) for x in self.s)
        return f"n={self.n} r={self.r} s=({stxt}) q={qtxt} seed={self.seed}"


def resolve_case(case: SweepCase) -> Config:
    if case.q is None:
        return generate_config_smallest_q(case.n, case.r, case.s, seed=case.seed)
    return generate_config(case.n, case.r, case.s, case.q, seed=case.seed)


def _sweep_worker(args) -> tuple[str, dict]:
    case, draws, extra = args
    try:
        config = resolve_case(case)
        extra_q = next_valid_q(config.n, config.s, config.q) if extra else None
        report = run_all(config, draws=draws, extra_q=extra_q)
        return case.key, report.to_dict()
    except (BlowupError, ValueError) as exc:
        return case.key, {"error": f"{type(exc).__name__}: {exc}"}


@dataclass
class SweepResult:
    rows: list[tuple[str, dict]]

    @property
    def aggregate(self) -> dict:
        per_check: dict[str, dict[str, int]] = {}
        errors = 0
        for _, payload in self.rows:
            if "error" in payload:
                errors += 1
                continue
            for rec in payload["checks"]:
                bucket = per_check.setdefault(
                    rec["check_id"], {PASS: 0, FAIL: 0, WARN: 0}
                )
                bucket[rec["status"]] += 1
        return {"cases": len(self.rows), "errors": errors, "per_check": per_check}

    @property
    def exit_code(self) -> int:
        for _, payload in self.rows:
            if "error" in payload:
                return 1
            if payload["summary"][FAIL]:
                return 1
        return 0

    def to_dict(self) -> dict:
        return {"rows": dict(self.rows), "aggregate": self.aggregate}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def default_jobs() -> int:
    env = os.environ.get(ENV_JOBS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def sweep(
    cases: list[SweepCase],
    jobs: int | None = None,
    draws: int = 200,
    extra_q: bool = False,
) -> SweepResult:
    """One report per case; failures in one case do not stop the others.
    Results are keyed and sorted, so the output is order-stable regardless
    of worker completion order."""
    jobs = jobs if jobs is not None else default_jobs()
    work = [(case, draws, extra_q) for case in cases]
    if jobs <= 1 or len(work) <= 1:
        rows = [_sweep_worker(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_worker, work))
    rows.sort(key=lambda kv: kv[0])
    return SweepResult(rows)


def product_cases(
    ns: list[int], rs: list[int], seed: int = 0, variants: int = 1
) -> list[SweepCase]:
    """The (n, r) grid with canonical s, plus optional shifted-s variants."""
    cases = []
    for n in ns:
        for r in rs:
            s0 = default_s(n, r)
            for v in range(variants):
                s = tuple(x + v for x in s0)
                cases.append(SweepCase(n=n, r=r, s=s, q=None, seed=seed))
    return cases
