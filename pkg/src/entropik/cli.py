"""Command line front end: ``entropik <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile

from . import report
from .patterns import Kind, build_pattern

EXIT_OK, EXIT_PRECONDITION, EXIT_MISMATCH, EXIT_RESOURCE = 0, 2, 3, 4

log = logging.getLogger("entropik")


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


def default_seed() -> int:
    raw = os.environ.get("ENTROPIK_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(EXIT_PRECONDITION, "invalid_seed", f"ENTROPIK_SEED={raw!r} is not an integer")


def _big(x):
    """Exact integers as decimal strings once they leave the double range."""
    if isinstance(x, int) and not isinstance(x, bool) and abs(x) >= 2 ** 53:
        return str(x)
    return x


def _deep_big(obj):
    if isinstance(obj, dict):
        return {k: _deep_big(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_deep_big(v) for v in obj]
    return _big(obj)


# -- output ---------------------------------------------------------------------------------

def render(payload: dict, fmt: str, rows: list[list] | None = None, header: list[str] | None = None,
           pretty: str | None = None) -> str:
    if fmt == "json":
        return json.dumps(_deep_big(payload), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows is None:
            header, rows = ["key", "value"], [[k, json.dumps(_deep_big(v), sort_keys=True)]
                                              for k, v in sorted(payload.items())]
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    if pretty is not None:
        return pretty
    return "\n".join(f"{k}: {v}" for k, v in sorted(payload.items())) + "\n"


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".entropik-")
    except OSError as exc:
        raise CliError(EXIT_PRECONDITION, "unwritable_path", str(exc))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise CliError(EXIT_PRECONDITION, "unwritable_path", str(exc))


def _table(header: list[str], rows: list[list]) -> str:
    cols = [header] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cols]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------------------

def _pattern(args):
    try:
        return build_pattern(args.q, Kind.parse(args.pattern))
    except ValueError as exc:
        raise CliError(EXIT_PRECONDITION, "invalid_pattern", str(exc))


def cmd_degrees(args):
    pat = _pattern(args)
    if args.method == "surface":
        from .surface_flow import propagate

        if pat.kind is not Kind.CYCLIC_SYMMETRIC:
            raise CliError(EXIT_PRECONDITION, "precondition", "surface method needs --pattern cs")
        half = 2 * args.nmax if args.granularity == "full" else args.nmax
        rec = propagate(pat, half, seed=args.seed).degrees
        rec = rec.full_step() if args.granularity == "full" else rec
    else:
        from .degree_line import line_degrees

        rec = line_degrees(pat, args.nmax, trials=args.trials, seed=args.seed,
                           granularity=args.granularity, backend=args.backend,
                           time_limit=args.time_limit)
    payload = rec.to_dict()
    payload.update({"schema": report.SCHEMA, "seed": args.seed})
    rows = [[n, d, int(n in rec.flags)] for n, d in enumerate(rec.values)]
    pretty = _table(["n", "degree", "flag"], rows)
    return payload, rows, ["n", "degree", "flag"], pretty


def cmd_surface(args):
    from .surface_flow import check_relations, propagate, verify_multiplicity_relations

    pat = _pattern(args)
    if pat.kind is not Kind.CYCLIC_SYMMETRIC:
        raise CliError(EXIT_PRECONDITION, "precondition", "surface needs a cyclic symmetric pattern")
    res = propagate(pat, args.nmax, seed=args.seed, engine=args.engine)
    d, rec = res.degrees.values, res.exponents
    checks = check_relations(d, rec, rec.p)
    mult = verify_multiplicity_relations(rec)
    payload = {
        "schema": report.SCHEMA, "seed": args.seed, "q": args.q, "pattern": "CS", "d": d,
        "u": {lab: rec.column(i, "u") for i, lab in enumerate(rec.labels)},
        "v": {lab: rec.column(i, "v") for i, lab in enumerate(rec.labels)},
        "engines": res.engines,
        "checks": {k: (not v) for k, v in checks.items()}
        | {"multiplicity_relations": mult.ok,
           "class_equality_failures": mult.class_equality},
    }
    header = ["n", "d"] + [f"u_{l}" for l in rec.labels] + [f"v_{l}" for l in rec.labels]
    rows = [[n, d[n]] + list(rec.u[n]) + ["" if x is None else x for x in rec.v[n]]
            for n in range(len(d))]
    return payload, rows, header, _table(header, rows)


def _load_degrees(path: str):
    from .records import DegreeRecord

    try:
        fh = sys.stdin if path == "-" else open(path)
        with fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PRECONDITION, "bad_input", str(exc))
    degs = data.get("degrees") or data.get("d")
    if not degs:
        raise CliError(EXIT_PRECONDITION, "bad_input", "no 'degrees' array in input")
    return DegreeRecord(str(data.get("pattern", "CS")), int(data.get("q", 0)),
                        data.get("granularity", "full"), [int(x) for x in degs],
                        data.get("method", "line"))


def cmd_genfun(args):
    from .genfun import TooFewTerms, fit_generating_function, lambda_from_gf, splits_used

    rec = _load_degrees(args.source)
    try:
        gf, table = fit_generating_function(rec, min_run=args.min_run, n_terms=args.terms)
    except TooFewTerms as exc:
        raise CliError(EXIT_PRECONDITION, "too_few_terms", str(exc))
    payload = {"schema": report.SCHEMA, "q": rec.q, "granularity": rec.granularity,
               "terms": len(table.terms)}
    if not gf:
        payload.update({"status": "unstable", "reason": gf.reason, "diagnostics": gf.diagnostics})
        return payload, None, None, f"unstable: {gf.reason}\n"
    used = [list(s) for s in splits_used(table, gf)]
    fitted = gf
    if rec.granularity == "half":
        payload["half_step"] = gf.to_dict()
        gf = gf.even_part()
    est = lambda_from_gf(gf)
    payload.update({"status": "stable", "numerator": list(gf.numerator),
                    "denominator": list(gf.denominator), "lambda": est.lam,
                    "growth_order": est.growth_order, "splits_used": used, "fraction": str(gf)})
    pretty = f"f(u) = {gf}\nlambda = {est.lam:.6f}\nsplits = {used}\n"
    if fitted is not gf:
        pretty = f"half-step fit: {fitted}\n" + pretty
    return payload, None, None, pretty


def cmd_recurrence(args):
    from .recurrence import IncompleteSystem, cs_prime_complexity, cs_prime_sequence, q9_sequence

    try:
        if args.q == 9:
            deg, rec = q9_sequence(args.nmax)
            lam = None
        else:
            deg, rec = cs_prime_sequence(args.q, args.nmax)
            lam = cs_prime_complexity(args.q)
    except IncompleteSystem as exc:
        raise CliError(EXIT_PRECONDITION, "precondition", str(exc))
    payload = {"schema": report.SCHEMA, "q": args.q, "granularity": "half",
               "d": [str(x) for x in deg.values],
               "u": {lab: [str(x) for x in rec.column(i)] for i, lab in enumerate(rec.labels)},
               "full_step": [str(x) for x in deg.full_step().values]}
    if lam is not None:
        payload.update({"lambda": lam.lam, "growth_order": lam.growth_order})
    if deg.meta.get("closure"):
        payload["closure"] = "conjectural closure"
    header = ["n", "d"] + [f"u_{l}" for l in rec.labels]
    rows = [[n, deg.values[n]] + list(rec.u[n]) for n in range(len(deg.values))]
    return payload, rows, header, _table(header, rows)


def cmd_probe(args):
    from .probe import estimate_lambda, probe

    pat = _pattern(args)
    try:
        tr = probe(pat, args.iters, seed=args.seed, entry_bits=args.entry_bits, order=args.order,
                   max_bits=args.max_bits)
    except ValueError as exc:
        raise CliError(EXIT_PRECONDITION, "precondition", str(exc))
    payload = tr.to_dict()
    payload["schema"] = report.SCHEMA
    try:
        est = estimate_lambda(tr, burn_in=args.burn_in)
        payload.update({"lambda": est.lam, "stderr": est.uncertainty})
    except ValueError as exc:
        payload.update({"lambda": None, "stderr": None, "note": str(exc)})
    if tr.aborted and "cap" in tr.aborted:
        payload["resource_cap"] = True
    rows = [[n, b] for n, b in enumerate(tr.bits)]
    return payload, rows, ["n", "bits"], _table(["n", "bits"], rows) + f"lambda = {payload['lambda']}\n"


def cmd_conjecture(args):
    from .probe import conjecture_check

    rep = conjecture_check(args.q, iters=args.iters, seed=args.seed, entry_bits=args.entry_bits,
                           jobs=args.jobs)
    payload = rep.to_dict()
    payload["schema"] = report.SCHEMA
    payload["seed"] = args.seed
    rows = [[k, rep.estimates[k], rep.analytic, rep.deviations[k]] for k in ("C", "S", "G")]
    fmt = lambda x: "-" if x is None else f"{x:.6g}"
    pretty = _table(["pattern", "lambda_num", "conjecture", "rel.dev"],
                    [[r[0]] + [fmt(x) for x in r[1:]] for r in rows])
    return payload, rows, ["pattern", "lambda_num", "conjecture", "relative_deviation"], pretty


def cmd_verify(args):
    """Cross-method check for one cyclic symmetric q."""
    from .degree_line import line_degrees
    from .genfun import fit_generating_function, lambda_from_gf
    from .recurrence import IncompleteSystem, cs_prime_complexity, cs_prime_sequence
    from .surface_flow import check_relations, propagate

    pat = build_pattern(args.q, "CS")
    half = 2 * args.nmax
    line = line_degrees(pat, half, trials=args.trials, seed=args.seed, granularity="half")
    surf = propagate(pat, half, seed=args.seed)
    out = {"schema": report.SCHEMA, "q": args.q, "seed": args.seed, "nmax": args.nmax,
           "line": line.values, "surface": surf.degrees.values,
           "line_equals_surface": line.values == surf.degrees.values,
           "surface_relations": {k: not v for k, v in
                                 check_relations(surf.degrees.values, surf.exponents, surf.exponents.p).items()}}
    values = []
    gf, _ = fit_generating_function(line)
    if gf:
        full = gf.even_part()
        est = lambda_from_gf(full)
        out["genfun"] = str(full)
        values.append(report.MethodValue("genfun", est.lam, est.uncertainty))
    else:
        out["genfun"] = "unstable"
    try:
        rdeg, _ = cs_prime_sequence(args.q, half)
        out["recurrence_equals_line"] = rdeg.values == line.values
        lam = cs_prime_complexity(args.q)
        values.append(report.MethodValue("recurrence", lam.lam, 0.0))
    except IncompleteSystem:
        out["recurrence_equals_line"] = None
    out["lambda"] = [v.to_dict() for v in values]
    out["disagreements"] = report.flag_disagreements(values)
    failed = (not out["line_equals_surface"] or out["recurrence_equals_line"] is False
              or out["disagreements"] or not all(out["surface_relations"].values()))
    out["ok"] = not failed
    return out, None, None, None


def cmd_tables(args):
    scope = tuple(s.strip() for s in args.scope.split(","))
    budget = report.Budget(line_half_steps=args.half_steps, line_trials=args.trials,
                           table1_q=tuple(int(x) for x in args.table1_q.split(",") if x))
    if args.probe:
        budget.probe_cells = tuple((int(q), k.upper(), int(it)) for q, k, it in
                                   (c.split(":") for c in args.probe.split(",")))
    rep = report.reproduce_tables(scope, budget, seed=args.seed, jobs=args.jobs)
    payload = rep.to_dict()
    payload["seed"] = args.seed
    rows = [[c.table, c.key, c.golden, c.computed, c.status] for c in rep.sorted()]
    pretty = _table(["table", "cell", "golden", "computed", "status"], rows)
    return payload, rows, ["table", "cell", "golden", "computed", "status"], pretty


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entropik", description="Degree growth and complexity of K = I o J")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, pattern=True, q=True):
        if pattern:
            p.add_argument("--pattern", default="cs", help="g | s | c | cs")
        if q:
            p.add_argument("--q", type=int, required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", choices=("json", "csv", "pretty"), default="json")
        p.add_argument("--output", help="file to write (atomic); stdout when omitted")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("degrees", help="degree sequence from the image of a random line")
    common(p)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--granularity", choices=("full", "half"), default="full")
    p.add_argument("--method", choices=("line", "surface"), default="line")
    p.add_argument("--backend", choices=("flint", "python"), default="flint")
    p.add_argument("--time-limit", type=float, default=None)
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("surface", help="hyperplane images and their exponents (cyclic symmetric)")
    common(p)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--engine", choices=("auto", "exact", "germ"), default="auto")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("genfun", help="rational generating function of a degree sequence")
    common(p, pattern=False, q=False)
    p.add_argument("--from", dest="source", required=True, help="degrees JSON file, - for stdin")
    p.add_argument("--min-run", type=int, default=3)
    p.add_argument("--terms", type=int, default=None)
    p.set_defaults(func=cmd_genfun)

    p = sub.add_parser("recurrence", help="closed recurrences (prime q, and q = 9)")
    common(p, pattern=False)
    p.add_argument("--nmax", type=int, default=20)
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("probe", help="bit growth of K iterates on integer matrices")
    common(p)
    p.add_argument("--iters", type=int, default=5)
    p.add_argument("--entry-bits", type=int, default=16)
    p.add_argument("--burn-in", type=int, default=2)
    p.add_argument("--order", choices=("cofactor-first", "hadamard-first"), default="cofactor-first")
    p.add_argument("--max-bits", type=int, default=None)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("conjecture", help="probe G, S and C against the conjectured lambda")
    common(p, pattern=False)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--entry-bits", type=int, default=16)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("verify", help="line, surface, recurrence and genfun agreement for one q")
    common(p, pattern=False)
    p.add_argument("--nmax", type=int, default=5)
    p.add_argument("--trials", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tables", help="regenerate table cells and compare with golden values")
    common(p, pattern=False, q=False)
    p.add_argument("--scope", default="table1,table2,table3-analytic")
    p.add_argument("--table1-q", default="4,5,6,7")
    p.add_argument("--half-steps", type=int, default=16)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--probe", default="", help="report-only cells q:pattern:iters, comma separated")
    p.set_defaults(func=cmd_tables)
    return ap


def _emit_error(exc: CliError) -> int:
    sys.stderr.write(json.dumps({"schema": report.SCHEMA,
                                 "error": {"type": exc.kind, "message": str(exc)}}, sort_keys=True) + "\n")
    return exc.code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is None:
            args.seed = default_seed()
        if getattr(args, "q", None) is not None and args.q < 3:
            raise CliError(EXIT_PRECONDITION, "precondition", "q must be >= 3")
        payload, rows, header, pretty = args.func(args)
        text = render(payload, args.out, rows, header, pretty)
        if args.output:
            write_atomic(args.output, text)
        else:
            sys.stdout.write(text)
    except CliError as exc:
        return _emit_error(exc)
    except TimeoutError as exc:
        return _emit_error(CliError(EXIT_RESOURCE, "resource_cap", str(exc)))
    except MemoryError:
        return _emit_error(CliError(EXIT_RESOURCE, "resource_cap", "out of memory"))
    except (ValueError, ArithmeticError) as exc:
        return _emit_error(CliError(EXIT_PRECONDITION, "precondition", f"{type(exc).__name__}: {exc}"))
    if args.command == "tables" and payload.get("mismatches"):
        return EXIT_MISMATCH
    if args.command == "verify" and not payload.get("ok"):
        return EXIT_MISMATCH
    if args.command == "probe" and payload.get("resource_cap"):
        return EXIT_RESOURCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
