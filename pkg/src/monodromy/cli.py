"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .alexinv import alexander_for, fibration_data
from .curves import CatalogError, CurveCatalog, build_catalog, load_catalog, save_catalog
from .distinguish import (
    DISTINCT,
    CertificateFormatError,
    distinguish,
    family_report,
    parity_graph,
    recheck,
)
from .humphries import DEFAULT_SEED
from .verify import run_suite
from .words import TwistWord, eta, knot_monodromy_word, surgery_word

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_RECHECK_FAILED = 3
EXIT_USAGE = 4
EXIT_INTERNAL = 5

CATALOG_DIR_ENV = "MONODROMY_CATALOG_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _params(text: str, n: int) -> List[Tuple[int, int]]:
    vals = _ints(text)
    if len(vals) != 2 * n:
        raise UsageError(f"expected {2 * n} integers (p_i,q_i for {n} summands), got {len(vals)}")
    return [(vals[2 * i], vals[2 * i + 1]) for i in range(n)]


def get_catalog(n: int) -> CurveCatalog:
    """Build the catalog, reusing a validated cached copy when MONODROMY_CATALOG_DIR is set."""
    cache = os.environ.get(CATALOG_DIR_ENV)
    if not cache:
        return build_catalog(n)
    path = Path(cache) / f"catalog_n{n}.json"
    if path.exists():
        return load_catalog(path)
    cat = build_catalog(n)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_catalog(cat, path)
    return cat


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _word_text(word: TwistWord) -> str:
    lines = [f"genus {word.genus}, {len(word)} letters, order application"]
    for k, x in enumerate(word.letters, 1):
        lines.append(f"{k:3d}  {x.label:<28} {x.cls.bitstring()}  {x.cls.labeled()}  exp {x.exponent}")
    return "\n".join(lines) + "\n"


def cmd_catalog(args) -> int:
    cat = get_catalog(args.n)
    if args.format == "json":
        _emit(cat.to_json(), args.out)
    else:
        lines = [f"n={cat.summands} genus {cat.ambient_genus} sha256 {cat.fingerprint()}"]
        for label in sorted(cat.classes):
            cls = cat[label]
            lines.append(f"{label:<8} {cls.bitstring()}  {cls.labeled():<40} {cat.provenance[label]}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_word(args) -> int:
    cat = get_catalog(args.n)
    if args.kind == "eta":
        word = eta(2 * args.n, cat)
    else:
        if args.params is None:
            raise UsageError("--params is required for this word kind")
        params = _params(args.params, args.n)
        word = surgery_word(params, cat) if args.kind == "surgery" else knot_monodromy_word(params, cat)
    if args.format == "json":
        _emit(word.to_json(), args.out)
    else:
        _emit(_word_text(word), args.out)
    return EXIT_OK


def cmd_chi(args) -> int:
    cat = get_catalog(args.n)
    parity = [x & 1 for x in _ints(args.basis)]
    if len(parity) != 2 * args.n:
        raise UsageError(f"--basis needs {2 * args.n} parity bits")
    graph = parity_graph(parity, cat)
    items = [(lbl, cat[lbl]) for lbl in sorted(cat.classes)]
    if args.params is not None:
        word = surgery_word(_params(args.params, args.n), cat)
        items = [(x.label, x.cls) for x in word.letters]
    report = {"format_version": 1, "parity": parity, **graph.report(items)}
    if args.format == "json":
        _emit(_dump(report), args.out)
    else:
        lines = [f"basis for parity {tuple(parity)}:"]
        lines += [f"  {k:2d} {v['label']:<6} {v['class']}" for k, v in enumerate(report["vertices"])]
        lines.append("edges: " + " ".join(f"{i}-{j}" for i, j in report["edges"]))
        lines += [f"chi {x['chi']}  {x['label']}" for x in report["chi"]]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _certificate_text(data) -> str:
    lines = [
        f"left  {data['left']['params']} parity {data['left']['parity']}",
        f"right {data['right']['params']} parity {data['right']['parity']}",
        f"basis index {data['basis_index']}: " + " ".join(x["label"] for x in data["basis"]),
        f"left letters with chi = 1: {sum(x['chi'] for x in data['left_letters'])}/{len(data['left_letters'])}",
    ]
    w = data["witness"]
    if w:
        lines.append(
            f"witness letter {w['position']} {w['label']} class {w['class']} chi {w['chi']}, "
            f"partner {w['partner']} pairing {w['pairing']}, chi {w['partner_chi']} -> {w['image_chi']}"
        )
    lines.append(f"verdict {data['verdict']}")
    return "\n".join(lines) + "\n"


def cmd_distinguish(args) -> int:
    cat = get_catalog(args.n)
    cert = distinguish(_params(args.left, args.n), _params(args.right, args.n), cat, seed=args.seed)
    _emit(cert.to_json() if args.format == "json" else _certificate_text(cert.data), args.out)
    return EXIT_OK if cert.verdict == DISTINCT else EXIT_INCONCLUSIVE


def cmd_family(args) -> int:
    m = _ints(args.m)
    if not m:
        raise UsageError("--m needs at least one integer")
    report = family_report(m, get_catalog(len(m)))
    if args.format == "json":
        _emit(_dump({"format_version": 1, **report.to_dict()}), args.out)
    else:
        data = fibration_data(len(m))
        lines = [
            f"m = {tuple(m)}: fiber genus {data.fiber_genus}, {data.critical_points} critical points",
            *[f"  [{k}] {list(r)}" for k, r in enumerate(report.representatives)],
        ]
        lines += [f"  {i} vs {j}: {cert.verdict}" for i, j, cert in report.pairs]
        lines.append(f"distinct monodromy groups: {report.distinct_count} of {len(report.representatives)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_INTERNAL


def cmd_recheck(args) -> int:
    try:
        data = json.loads(Path(args.path).read_text(encoding="utf-8"))
        failures = recheck(data)
    except (OSError, json.JSONDecodeError, CertificateFormatError) as exc:
        print(f"malformed certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if failures:
        for f in failures:
            print(f"FAIL {f}")
        return EXIT_RECHECK_FAILED
    print(f"OK {data['verdict']}")
    return EXIT_OK


def cmd_alexander(args) -> int:
    m = _ints(args.m)
    if not m:
        raise UsageError("--m needs at least one integer")
    poly = alexander_for(m)
    if args.format == "json":
        _emit(_dump({"format_version": 1, "m": m, "alexander": poly.to_dict(), "text": str(poly)}), args.out)
    else:
        _emit(f"{poly}\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.seed)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monodromy", description="Mod-2 monodromy invariants of knot surgery fibrations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, n=True):
        if n:
            p.add_argument("--n", type=int, required=True, help="number of Stallings-knot summands")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write output to this file")

    p = sub.add_parser("catalog", help="curve catalog")
    common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("word", help="twist words")
    common(p)
    p.add_argument("--kind", choices=("surgery", "knot", "eta"), default="surgery")
    p.add_argument("--params", help="p1,q1,...,pn,qn")
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("chi", help="Humphries graph and chi values")
    common(p)
    p.add_argument("--basis", required=True, help="parity bits e1,...,e2n selecting the basis")
    p.add_argument("--params", help="tabulate the letters of this surgery word instead of catalog curves")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("distinguish", help="certificate comparing two factorizations")
    common(p)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("family", help="2^n representatives and all pairwise certificates")
    common(p, n=False)
    p.add_argument("--m", required=True, help="m_1,...,m_n")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("recheck", help="re-validate a certificate file")
    p.add_argument("path")
    p.set_defaults(func=cmd_recheck)

    p = sub.add_parser("alexander", help="Alexander polynomial of K_{m_1} # ... # K_{m_n}")
    common(p, n=False)
    p.add_argument("--m", required=True)
    p.set_defaults(func=cmd_alexander)

    p = sub.add_parser("verify", help="run the internal consistency suite")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required")
        if getattr(args, "n", 1) is not None and getattr(args, "n", 1) < 1:
            raise UsageError("--n must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CatalogError as exc:
        print(f"catalog error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
