"""Command-line surface.

Exit codes: 0 for pass (warnings allowed), 1 when any check fails, 2 for
usage or I/O problems.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from .cone import EffectiveCone
from .errors import BlowupError, InvalidConfig
from .fieldgeom import Config, generate_config, primitive_nth_root
from .lattice import BlowupLattice
from .report import SweepCase, product_cases, run_all, sweep
from .rigidity import build_graph, geometric_automorphisms, verify_rigidity
from .vectorfields import assemble_system, derivation_kernel, verify_vanishing


class UsageError(Exception):
    pass


def load_config(path: str) -> Config:
    """Read a config file: keys n, r, s, q, and optionally seed and base.

    zeta is always the canonical (smallest) primitive root and base is
    generated from the seed when absent.  The config is *not* validated
    here; `verify` reports validation results instead of crashing.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for key in ("n", "r", "s", "q"):
        if key not in raw:
            raise UsageError(f"config {path} is missing key {key!r}")
    if "base" not in raw:
        try:
            return generate_config(
                raw["n"], raw["r"], tuple(raw["s"]), raw["q"], seed=raw.get("seed", 0)
            )
        except BlowupError as exc:
            raise UsageError(f"cannot generate base coordinates: {exc}") from exc
    if "zeta" not in raw:
        try:
            raw = {**raw, "zeta": primitive_nth_root(raw["q"], raw["n"]).value}
        except BlowupError as exc:
            raise UsageError(str(exc)) from exc
    return Config.from_dict(raw, skip_checks=True)


def _write(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen_config(args) -> int:
    s = tuple(int(x) for x in args.s.split(","))
    config = generate_config(args.n, args.r, s, args.q, seed=args.seed)
    _write(config.canonical_json() + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    config = load_config(args.config)
    report = run_all(
        config, draws=args.draws, cap=args.cap, extra_q=args.q_extra
    )
    if args.format == "md":
        _write(report.to_markdown(timings=True), args.out)
    else:
        _write(report.to_json(timings=args.timings) + "\n", args.out)
    return report.exit_code


def cmd_pairing_table(args) -> int:
    config = load_config(args.config)
    lattice = BlowupLattice(config)
    buf = io.StringIO()
    lattice.write_pairing_table(buf)
    _write(buf.getvalue(), args.out)
    return 0


def cmd_extremal(args) -> int:
    config = load_config(args.config)
    lattice = BlowupLattice(config)
    cone = EffectiveCone(lattice, cap=args.cap)
    if args.json:
        _write(cone.genset.to_json() + "\n", args.out)
        return 0
    lines = [f"{'label':<16} {'phi':>4} {'extremal':>9} {'splits':>7}  class"]
    for gen in cone.genset:
        splits = cone.two_part_decompositions(gen.cls)
        lines.append(
            f"{gen.label:<16} {gen.phi:>4} "
            f"{'yes' if not splits else 'no':>9} {len(splits):>7}  "
            f"{gen.cls.to_array()}"
        )
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_graph(args) -> int:
    config = load_config(args.config)
    graph = build_graph(config)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(graph.to_dot())
    _write(graph.to_json() + "\n", args.out)
    return 0


def cmd_rigidity(args) -> int:
    config = load_config(args.config)
    records = verify_rigidity(config)
    payload = {
        "config": config.to_dict(),
        "checks": [rec.to_dict() for rec in records],
    }
    try:
        group = geometric_automorphisms(config)
        payload["group"] = [g.matrices() for g in group]
    except BlowupError:
        payload["group"] = None
    _write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n", args.out)
    return 1 if any(rec.status == "FAIL" for rec in records) else 0


def cmd_vector_fields(args) -> int:
    config = load_config(args.config)
    records = verify_vanishing(config)
    kernel = derivation_kernel(config)
    payload = {
        "config": config.to_dict(),
        "checks": [rec.to_dict() for rec in records],
        "system": {
            "rows": kernel.n_rows,
            "rank": kernel.rank,
            "dimension": kernel.dimension,
            "kernel_basis": [kernel.blocks(vec) for vec in kernel.basis],
        },
    }
    if args.matrix:
        rows = assemble_system(config)
        with open(args.matrix, "w", encoding="utf-8") as fh:
            json.dump(
                {"q": config.q, "columns": 4 * config.r,
                 "rows": [{"tag": row.tag, "coeffs": list(row.coeffs)}
                          for row in rows]},
                fh, sort_keys=True, separators=(",", ":"),
            )
    _write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n", args.out)
    return 1 if any(rec.status == "FAIL" for rec in records) else 0


def _cases_from_spec(raw: dict) -> list[SweepCase]:
    if "cases" in raw:
        out = []
        for case in raw["cases"]:
            out.append(
                SweepCase(
                    n=case["n"],
                    r=case["r"],
                    s=tuple(case["s"]),
                    q=case.get("q"),
                    seed=case.get("seed", raw.get("seed", 0)),
                )
            )
        return out
    if "n" in raw and "r" in raw:
        return product_cases(
            list(raw["n"]), list(raw["r"]),
            seed=raw.get("seed", 0), variants=raw.get("variants", 1),
        )
    raise UsageError("sweep spec needs either 'cases' or 'n' and 'r' lists")


def cmd_sweep(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sweep spec {args.spec}: {exc}") from exc
    cases = _cases_from_spec(raw)
    result = sweep(cases, jobs=args.jobs, draws=args.draws, extra_q=args.extra_q)
    _write(result.to_json() + "\n", args.out)
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowup-rigidity",
        description=(
            "Exact verification of automorphism rigidity for blow-ups of a "
            "product of projective lines at a torsion-stable configuration"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-config", help="generate a generic configuration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=str, required=True, help="comma-separated, e.g. 2,3")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_gen_config)

    p = sub.add_parser("verify", help="run the full check suite")
    p.add_argument("--config", required=True)
    p.add_argument("--q-extra", type=int, default=None,
                   help="second field size for the vector-field check")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--timings", action="store_true",
                   help="include stage timings (non-canonical output)")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("pairing-table", help="CSV of all basis pairings")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_pairing_table)

    p = sub.add_parser("extremal", help="generator table with extremality")
    p.add_argument("--config", required=True)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit the generator set as JSON")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_extremal)

    p = sub.add_parser("graph", help="incidence graph as adjacency JSON / DOT")
    p.add_argument("--config", required=True)
    p.add_argument("--dot", default=None, help="also write DOT format here")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("rigidity", help="census, pinning, automorphism group")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_rigidity)

    p = sub.add_parser("vector-fields", help="eigenvector-constraint kernel")
    p.add_argument("--config", required=True)
    p.add_argument("--matrix", default=None,
                   help="write the full constraint matrix as JSON here")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_vector_fields)

    p = sub.add_parser("sweep", help="run many configurations")
    p.add_argument("--spec", required=True)
    p.add_argument("--jobs", type=int, default=None,
                   help="workers (default: BLOWUP_RIGIDITY_JOBS or 1)")
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--extra-q", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvalidConfig as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
