"""Command-line front end.

Exit codes: 0 success, 1 verification or accuracy failure, 2 usage error.
Settings resolve as built-in defaults < ``--config`` file < command-line flags.
"""
import argparse
import json
import sys
from pathlib import Path

from airylab import matelem, spectra, stark, sumrules
from airylab.errors import AccuracyError, AiryLabError, ArgumentError
from airylab.spectra import Parity, SystemId, ZeroKind

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "explicit_terms": 20000,
    "refine_upto": 200,
    "format": "table",
    "output": None,
}


class UsageError(Exception):
    pass


def parse_n_range(text):
    """``"5"`` -> [5]; ``"1..5"`` -> [1, 2, 3, 4, 5]."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return [int(lo)]
        a, b = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad n range {text!r}; expected N or A..B") from None
    if b < a:
        raise UsageError(f"empty n range {text!r}")
    return list(range(a, b + 1))


def load_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        settings[key.strip()] = value.strip()
    return settings


def _run_config(args):
    cfg = dict(DEFAULTS)
    overrides = {}
    file_settings = load_config(args.config) if getattr(args, "config", None) else {}
    known_ids = set(sumrules.identity_ids())
    for key, value in file_settings.items():
        if key.startswith("tolerance."):
            ident = key.split(".", 1)[1]
            if ident.partition(":")[0] not in known_ids:
                raise UsageError(f"tolerance override for unknown identity {ident!r}")
            overrides[ident] = float(value)
        elif key == "tolerance":
            overrides["*"] = float(value)
        elif key in ("explicit_terms", "refine_upto"):
            cfg[key] = int(value)
        elif key in ("format", "output"):
            cfg[key] = value
        else:
            raise UsageError(f"unknown config key {key!r}")
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if getattr(args, "tolerance", None) is not None:
        overrides["*"] = args.tolerance
    if cfg["explicit_terms"] < 100 or cfg["refine_upto"] < 1:
        raise UsageError("explicit_terms must be >= 100 and refine_upto >= 1")
    cfg["tolerances"] = overrides
    return cfg


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(v):
    return f"{v:.16e}" if isinstance(v, float) else str(v)


def _table(headers, rows):
    cells = [[str(h) for h in headers]] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) + "\n" for r in cells)


# --- subcommands ---------------------------------------------------------------


def cmd_zeros(args):
    if args.count < 1:
        raise UsageError("--count must be positive")
    refine = min(args.refine_upto or 200, args.count)
    table = spectra.zero_table(ZeroKind(args.kind), args.count, refine)
    if args.format == "csv":
        text = table.to_csv()
    elif args.format == "json":
        text = "".join(
            json.dumps({"kind": table.kind.value, "k": k, "value": table[k], "refined": k <= refine}) + "\n"
            for k in range(1, table.count + 1)
        )
    else:
        text = _table(["k", "value"], [(k, table[k]) for k in range(1, table.count + 1)])
    _emit(text, args.output)
    return EXIT_OK


def _selected_records(args):
    if args.all:
        return sumrules.registry()
    if not args.id:
        raise UsageError("give --id ID or --all")
    try:
        return sumrules.records_for(args.id)
    except ArgumentError as exc:
        raise UsageError(str(exc)) from None


def run_verification(records, ns, cfg):
    summation = sumrules.SummationConfig(
        explicit_terms=cfg["explicit_terms"], refine_upto=cfg["refine_upto"]
    )
    tolerances = cfg["tolerances"]
    reports = []
    for rec in records:
        tol = tolerances.get(rec.key, tolerances.get(rec.id, tolerances.get("*")))
        for n in ns:
            if n < rec.first_n:
                continue
            reports.append(sumrules.verify_record(rec, n, summation, tol))
    return reports


def _format_reports(reports, fmt):
    if fmt == "csv":
        return sumrules.reports_to_csv(reports)
    if fmt == "json":
        return sumrules.reports_to_jsonl(reports)
    rows = [[r.as_row()[k] for k in sumrules.REPORT_FIELDS] for r in reports]
    return _table(sumrules.REPORT_FIELDS, rows)


def cmd_verify(args):
    cfg = _run_config(args)
    records = _selected_records(args)
    reports = run_verification(records, parse_n_range(args.n), cfg)
    _emit(_format_reports(reports, cfg["format"]), cfg["output"])
    failing = [r for r in reports if not r.passed]
    for r in failing:
        print(f"FAIL {r.id} n={r.n} rel_res={r.rel_res:.3e} abs_res={r.abs_res:.3e}", file=sys.stderr)
    return EXIT_FAIL if failing else EXIT_OK


def cmd_moments(args):
    if args.max_p < 1:
        raise UsageError("--max-p must be >= 1")
    parity = Parity(args.parity)
    kind = ZeroKind.AI if parity is Parity.ODD else ZeroKind.AI_PRIME
    lam = spectra.airy_zero(kind, args.n)
    exprs = matelem.moment_recursion_airy(parity, args.max_p)
    if args.format == "json":
        text = "".join(
            json.dumps(dict(e.to_json(), n=args.n, value=e.evaluate(lam))) + "\n" for e in exprs
        )
    else:
        text = _table(["p", "expression", f"value(n={args.n})"], [(e.p, str(e), e.evaluate(lam)) for e in exprs])
    _emit(text, args.output)
    return EXIT_OK


def cmd_stark(args):
    system = SystemId(args.system)
    rows = []
    if system is SystemId.SYMMETRIC_LINEAR:
        for parity in (Parity.ODD, Parity.EVEN):
            exact = stark.stark_linear_closed_form(parity, args.n)
            pt = stark.pt2_shift(system, parity, args.n)
            wkb = stark.stark_linear_wkb(parity, args.n)
            rows.append((parity.value, args.n, exact.coefficient, pt.coefficient, wkb.coefficient))
        headers = ["parity", "n", "exact_coef", "pt2_coef", "wkb_coef"]
    elif system is SystemId.HALF_SHO:
        pt = stark.pt2_shift(system, Parity.NONE, args.n)
        rows.append(
            (args.n, stark.pt1_half_sho(args.n), stark.wkb_half_sho(args.n, 1).value,
             pt.value, stark.wkb_half_sho(args.n, 2).value)
        )
        headers = ["n", "pt1", "wkb1", "pt2", "wkb2"]
    else:
        raise UsageError("stark supports --system symmetric_linear or half_sho")
    if args.format == "json":
        text = "".join(json.dumps(dict(zip(headers, r))) + "\n" for r in rows)
    elif args.format == "csv":
        text = ",".join(headers) + "\n" + "".join(",".join(_fmt(v) for v in r) + "\n" for r in rows)
    else:
        text = _table(headers, rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_fig1(args):
    if args.n_max < 4:
        raise UsageError("--n-max must be >= 4")
    rows = stark.fig1_series(args.n_max)
    if args.format == "json":
        text = "".join(json.dumps(r.__dict__) + "\n" for r in rows)
    elif args.format == "table":
        text = _table(["n", "r1", "r2", "pt2_terms", "pt2_tail"],
                      [(r.n, r.r1, r.r2, r.pt2_terms, r.pt2_tail) for r in rows])
    else:
        text = stark.fig1_csv(rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_report(args):
    """Full run: every identity over the n range plus the WKB/PT series."""
    cfg = _run_config(args)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_verification(sumrules.registry(), parse_n_range(args.n), cfg)
    (out / "verify.csv").write_text(sumrules.reports_to_csv(reports))
    (out / "verify.jsonl").write_text(sumrules.reports_to_jsonl(reports))
    rows = stark.fig1_series(args.n_max)
    (out / "fig1.csv").write_text(stark.fig1_csv(rows))
    moments = [e.to_json() for par in ("odd", "even") for e in matelem.moment_recursion_airy(par, 8)]
    (out / "moments.json").write_text(json.dumps(moments, indent=1) + "\n")
    failing = [r for r in reports if not r.passed]
    worst = max((r.rel_res for r in reports if r.rhs != 0), default=0.0)
    print(f"identities: {len(reports) - len(failing)}/{len(reports)} rows pass; worst rel_res {worst:.3e}")
    print(f"fig1: |r2({args.n_max})|/|r2(0)| = {abs(rows[-1].r2) / abs(rows[0].r2):.3e}")
    for r in failing:
        print(f"FAIL {r.id} n={r.n} rel_res={r.rel_res:.3e}", file=sys.stderr)
    return EXIT_FAIL if failing else EXIT_OK


# --- parser --------------------------------------------------------------------


def _add_run_options(p):
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--explicit-terms", dest="explicit_terms", type=int)
    p.add_argument("--refine-upto", dest="refine_upto", type=int)
    p.add_argument("--tolerance", type=float, help="override every identity's tolerance")


def build_parser():
    parser = argparse.ArgumentParser(prog="airylab", description="Airy-zero sum rules and related checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="tabulate zeros of Ai or Ai'")
    p.add_argument("--kind", choices=["ai", "aiprime"], required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--refine-upto", dest="refine_upto", type=int)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.add_argument("--output")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("verify", help="verify sum-rule identities")
    who = p.add_mutually_exclusive_group()
    who.add_argument("--id", help="identity id, optionally with :part (e.g. linear.trk:T5)")
    who.add_argument("--all", action="store_true")
    p.add_argument("--n", default="1..10", help="state index or range A..B")
    p.add_argument("--format", choices=["table", "csv", "json"])
    p.add_argument("--output")
    _add_run_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("moments", help="exact <y^p> expressions")
    p.add_argument("--parity", choices=["odd", "even"], required=True)
    p.add_argument("--max-p", dest="max_p", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--output")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("stark", help="Stark shifts: exact, WKB and perturbation sums")
    p.add_argument("--system", choices=["symmetric_linear", "half_sho"], default="symmetric_linear")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.add_argument("--output")
    p.set_defaults(func=cmd_stark)

    p = sub.add_parser("fig1", help="WKB/PT ratios for the half oscillator")
    p.add_argument("--n-max", dest="n_max", type=int, default=64)
    p.add_argument("--format", choices=["csv", "json", "table"], default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("report", help="write the full verification bundle to a directory")
    p.add_argument("--output-dir", dest="output_dir", default="airylab-report")
    p.add_argument("--n", default="1..10")
    p.add_argument("--n-max", dest="n_max", type=int, default=64)
    _add_run_options(p)
    p.set_defaults(func=cmd_report, format=None, output=None)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ArgumentError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except AiryLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
