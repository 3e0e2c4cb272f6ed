"""Command-line interface: ``icis <subcommand> [options]``.

Exit codes: 0 ok, 1 usage error, 2 not an ICIS, 3 parse error,
4 witness needs a field extension, 5 budget or degree cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence

from .coeff import make_field
from .errors import (BudgetExceeded, CapExceeded, ICISError, InvalidParameters, NotApplicable,
                     ParseError, PrecisionLoss, WrongVariableCount)
from .poly import INF, WeightSystem, default_names, dw_order
from .singtype import PARAM_NAMES, SingularityType, from_label

EXIT_OK, EXIT_USAGE, EXIT_NOT_ICIS, EXIT_PARSE, EXIT_EXTENSION, EXIT_BUDGET = 0, 1, 2, 3, 4, 5
DEFAULT_KCAP = 64
FORMATS = ("table", "json", "csv")

log = logging.getLogger("icis")


@dataclass
class CliConfig:
    char: int = 0
    ext: int = 1
    precision: Optional[int] = None
    k_cap: int = DEFAULT_KCAP
    format: str = "table"
    verbose: int = 0
    seed: int = 0
    budgets: dict = dc_field(default_factory=dict)

    @property
    def field(self):
        return make_field(self.char, self.ext)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is the NotICIS code here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_germ(text: str, config: CliConfig, nvars: Optional[int] = None):
    """Parse ``"f1 ; f2"`` into a germ over the configured field."""
    from .parse import parse_germ as _parse

    g = _parse(text, config.field, nvars)
    if config.precision is not None:
        g = g.with_precision(config.precision)
    return g


# -- output helpers ----------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _table(rows: Sequence[Sequence]) -> str:
    rows = [[("" if v is None else str(v)) for v in r] for r in rows]
    if not rows:
        return ""
    width = [max(len(r[i]) for r in rows if i < len(r)) for i in range(max(map(len, rows)))]
    return "\n".join("  ".join(v.ljust(width[i]) for i, v in enumerate(r)).rstrip() for r in rows)


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue().rstrip("\n")


def _emit_record(rec: dict, fmt: str, out) -> None:
    """One flat record: key/value table, JSON object, or CSV with a header row."""
    if fmt == "json":
        print(_dump(rec), file=out)
        return
    flat = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in rec.items()}
    if fmt == "csv":
        print(_csv([list(flat), list(flat.values())]), file=out)
    else:
        print(_table([[k, v] for k, v in flat.items()]), file=out)


def _num(v):
    return None if v == INF else int(v)


# -- subcommands -------------------------------------------------------------------

def _witness_summary(w):
    if w is None or isinstance(w, str):
        return w
    return "complete" if w.complete else f"partial ({w.missing})"


def _classify_one(text: str, config: CliConfig):
    from .classify import classify_icis

    g = parse_germ(text, config)
    rep = classify_icis(g, k_cap=config.k_cap)
    names = default_names(g.nvars)
    rec = rep.to_json(names)
    if config.format != "json":
        rec["witness"] = _witness_summary(rep.witness)
        rec["type"] = rep.type.label()
    code = EXIT_OK
    if rep.type.tag == "NotICIS":
        code = EXIT_NOT_ICIS
    elif rep.witness == "needs-extension":
        code = EXIT_EXTENSION
    return rec, code


def cmd_classify(args, config, out):
    if args.corpus:
        return _classify_corpus(args, config, out)
    rec, code = _classify_one(args.poly, config)
    _emit_record(rec, config.format, out)
    return code


def _corpus_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def parse_corpus_line(line: str):
    """``p k ; f1 ; f2 ; expected_type`` -> (p, k, germ text, expected label)."""
    parts = [s.strip() for s in line.split(";")]
    if len(parts) < 3:
        raise ValueError(f"malformed corpus line: {line!r}")
    p, k = (int(v) for v in parts[0].split())
    return p, k, " ; ".join(parts[1:-1]), parts[-1]


def _corpus_job(item):
    lineno, line, kcap = item
    p, k, text, expected = parse_corpus_line(line)
    cfg = CliConfig(char=p, ext=k, k_cap=kcap, format="json")
    from .classify import classify_icis
    from .parse import parse_germ as _parse

    rep = classify_icis(_parse(text, cfg.field), k_cap=kcap, witness=False)
    return lineno, p, k, text, expected, rep.type.label()


def _classify_corpus(args, config, out):
    items = [(n, line, config.k_cap) for n, line in _corpus_lines(args.corpus)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_corpus_job, items))     # map keeps input order
    else:
        results = [_corpus_job(it) for it in items]
    header = ["line", "char", "ext", "germ", "expected", "got", "ok"]
    rows = [[n, p, k, t, e, g, e == g] for n, p, k, t, e, g in results]
    if config.format == "json":
        print(_dump([dict(zip(header, r)) for r in rows]), file=out)
    elif config.format == "csv":
        print(_csv([header] + rows), file=out)
    else:
        print(_table([header] + rows), file=out)
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_USAGE


def cmd_tjurina(args, config, out):
    from .jetalg import tjurina, tjurina_sec

    g = parse_germ(args.poly, config)
    tau = tjurina(g, config.k_cap)
    if tau == INF:
        from .jetalg import is_icis

        cert = is_icis(g, config.k_cap)
        if not cert.proven:
            raise CapExceeded(f"Tjurina number not certified: {cert.reason}", {})
    tau_sec = tjurina_sec(g, config.k_cap) if tau != INF else INF
    _emit_record({"tau": _num(tau), "tau_sec": _num(tau_sec)}, config.format, out)
    return EXIT_NOT_ICIS if tau == INF else EXIT_OK


def cmd_t1_basis(args, config, out):
    from .jetalg import format_monovec, t1_basis, t1sec_basis

    g = parse_germ(args.poly, config)
    basis = t1_basis(g, config.k_cap) if args.plain else t1sec_basis(g, config.k_cap)
    names = default_names(g.nvars)
    items = [format_monovec(mv, g.m, names) for mv in basis]
    if config.format == "json":
        print(_dump({"dim": len(items), "basis": items}), file=out)
    elif config.format == "csv":
        print(_csv([["element"]] + [[s] for s in items]), file=out)
    else:
        print("\n".join(items), file=out)
    return EXIT_OK


def cmd_is_icis(args, config, out):
    from .jetalg import is_icis

    g = parse_germ(args.poly, config)
    cert = is_icis(g, config.k_cap)
    if not cert.icis and not cert.proven:
        raise CapExceeded(f"ICIS test inconclusive: {cert.reason}", {})
    rec = {"icis": cert.icis, "reason": cert.reason, "certified_at": cert.k,
           "min_generators": cert.mng}
    _emit_record(rec, config.format, out)
    return EXIT_OK if cert.icis else EXIT_NOT_ICIS


def parse_type(tag: str, params: Optional[str]) -> SingularityType:
    """``--type F --params m=3,n=4`` (or ``3,4``); labels like ``F(3,4)`` also work."""
    if "(" in tag or not params:
        return from_label(tag)
    names = PARAM_NAMES.get(tag, ())
    vals = {}
    for i, item in enumerate(p for p in params.split(",") if p.strip()):
        if "=" in item:
            k, v = item.split("=", 1)
            vals[k.strip()] = int(v)
        elif i < len(names):
            vals[names[i]] = int(item)
        else:
            raise InvalidParameters(f"too many parameters for {tag}")
    if set(vals) != set(names):
        raise InvalidParameters(f"{tag} needs parameters {', '.join(names) or '(none)'}")
    return from_label(f"{tag}({','.join(str(vals[n]) for n in names)})" if names else tag)


def cmd_normal_form(args, config, out):
    from .classify import normal_form_of

    t = parse_type(args.type, args.params)
    g = normal_form_of(t, config.field)
    text = " ; ".join(c.to_str() for c in g.components)
    if config.format == "json":
        print(_dump({"type": t.tag, "params": t.param_dict(), "germ": text}), file=out)
    elif config.format == "csv":
        print(_csv([["type", "germ"], [t.label(), text]]), file=out)
    else:
        print(text, file=out)
    return EXIT_OK


def cmd_unfold(args, config, out):
    from .deform import enumerate_fibers, case_tree_unfolding

    t = parse_type(args.type, args.params)
    u = case_tree_unfolding(t, config.field)
    budget = config.budgets.get("fibers") or 10 ** 6
    hist = enumerate_fibers(u, mode=args.mode, samples=args.samples, seed=config.seed,
                            budget=budget, k_cap=config.k_cap)
    if config.format == "json":
        print(_dump({"base": t.label(), "directions": u.describe(), "fibers": hist.total,
                     "histogram": hist.to_json()}), file=out)
    elif config.format == "csv":
        print(hist.to_csv().rstrip("\n"), file=out)
    else:
        rows = [["type", "params", "count", "example_t"]] + [list(r) for r in hist.rows()]
        print(_table(rows), file=out)
    return EXIT_OK


def _ints(text: str) -> List[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def cmd_order(args, config, out):
    g = parse_germ(args.poly, config)
    ws = WeightSystem(tuple(_ints(args.degrees)), tuple(_ints(args.weights)))
    try:
        v = dw_order(g, ws)
    except ValueError as exc:
        raise InvalidParameters(str(exc)) from None
    _emit_record({"order": _num(v)}, config.format, out)
    return EXIT_OK


def cmd_repro_char2(args, config, out):
    from .groebner import format_cas, repro_char2_elimination

    b = {k: v for k, v in config.budgets.items() if k in ("max_pairs", "max_basis", "max_degree")}
    poly = repro_char2_elimination(**b)
    text = format_cas(poly)
    if config.format == "json":
        print(_dump({"char": 2, "polynomial": text}), file=out)
    elif config.format == "csv":
        print(_csv([["polynomial"], [text]]), file=out)
    else:
        print(text, file=out)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--char", type=int, default=0, help="characteristic (0 for the rationals)")
    common.add_argument("--ext", type=int, default=1, help="extension degree k of GF(p^k)")
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--kcap", type=int, default=None,
                        help=f"jet degree cap (default $ICIS_KCAP or {DEFAULT_KCAP})")
    common.add_argument("--precision", type=int, default=None,
                        help="treat the input as known only up to this degree")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--max-pairs", type=int, default=None)
    common.add_argument("--max-basis", type=int, default=None)
    common.add_argument("--max-degree", type=int, default=None)
    common.add_argument("--budget", type=int, default=None, help="fibre budget for unfold")

    p = _Parser(prog="icis", description="Simple ICIS classification in any characteristic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common], help="classify a germ")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--poly", help='components separated by ";"')
    grp.add_argument("--corpus", help="golden corpus file, one germ per line")
    s.add_argument("--jobs", type=int, default=1, help="parallel workers for --corpus")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("tjurina", parents=[common], help="tau and tau_sec")
    s.add_argument("--poly", required=True)
    s.set_defaults(func=cmd_tjurina)

    s = sub.add_parser("t1-basis", parents=[common], help="monomial basis of T1,sec (or T1)")
    s.add_argument("--poly", required=True)
    s.add_argument("--plain", action="store_true", help="basis of T1 instead of T1,sec")
    s.set_defaults(func=cmd_t1_basis)

    s = sub.add_parser("is-icis", parents=[common], help="ICIS certificate")
    s.add_argument("--poly", required=True)
    s.set_defaults(func=cmd_is_icis)

    s = sub.add_parser("normal-form", parents=[common], help="normal form of a type")
    s.add_argument("--type", required=True)
    s.add_argument("--params", default=None, help="e.g. m=3,n=4 or 3,4")
    s.set_defaults(func=cmd_normal_form)

    s = sub.add_parser("unfold", parents=[common], help="classify the fibres of an unfolding")
    s.add_argument("--type", required=True)
    s.add_argument("--params", default=None)
    s.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    s.add_argument("--samples", type=int, default=100)
    s.set_defaults(func=cmd_unfold)

    s = sub.add_parser("order", parents=[common], help="weighted order v_{d,a}")
    s.add_argument("--poly", required=True)
    s.add_argument("--weights", required=True, help="variable weights, e.g. 3,2")
    s.add_argument("--degrees", required=True, help="component degrees, e.g. 6,6")
    s.set_defaults(func=cmd_order)

    s = sub.add_parser("repro-char2", parents=[common], help="the characteristic-2 elimination")
    s.set_defaults(func=cmd_repro_char2)
    return p


def config_from_args(args) -> CliConfig:
    kcap = args.kcap
    if kcap is None:
        env = os.environ.get("ICIS_KCAP")
        kcap = int(env) if env else DEFAULT_KCAP
    budgets = {"max_pairs": args.max_pairs, "max_basis": args.max_basis,
               "max_degree": args.max_degree, "fibers": args.budget}
    return CliConfig(char=args.char, ext=args.ext, precision=args.precision, k_cap=kcap,
                     format=args.format, verbose=args.verbose, seed=args.seed,
                     budgets={k: v for k, v in budgets.items() if v is not None})


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        config.field  # validate --char/--ext early
        return args.func(args, config, out)
    except (ParseError, WrongVariableCount) as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_PARSE
    except (BudgetExceeded, CapExceeded, PrecisionLoss) as exc:
        print(f"limit exceeded: {exc}", file=err)
        return EXIT_BUDGET
    except (InvalidParameters, NotApplicable, ICISError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
