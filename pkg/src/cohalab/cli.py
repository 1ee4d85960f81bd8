"""Command-line front end: every run emits one JSON (or CSV) record.

Records carry the command, its inputs, its outputs, the package version
and the wall time.  Exit codes: 0 success, 2 precondition error, 3 a
mathematical expectation failed, 4 the request is too large to enumerate.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import CohalabError, ExpectationFailure, InfeasibleError, PreconditionError

EXIT_OK, EXIT_PRECONDITION, EXIT_EXPECTATION, EXIT_INFEASIBLE = 0, 2, 3, 4


class CheckFailed(Exception):
    """Carries a complete output payload whose theorem check came out false."""

    def __init__(self, outputs: dict, message: str):
        super().__init__(message)
        self.outputs = outputs


def _frac(x: Fraction) -> dict:
    return {"numerator": x.numerator, "denominator": x.denominator}


# ----------------------------------------------------------------- commvar

def run_commvar_count(a) -> tuple[dict, list | None]:
    from .commvar import count_commuting, count_commuting_kernel

    if a.method == "kernel" and a.variety == "commuting" and a.threads > 1:
        count = count_commuting_kernel(a.n, a.p, workers=a.threads)
    else:
        count = count_commuting(a.variety, a.n, a.p, a.method)
    out = {"count": count}
    return out, [{"variety": a.variety, "n": a.n, "p": a.p, "count": count}]


def run_commvar_interpolate(a):
    from .commvar import interpolate_count_polynomial

    poly = interpolate_count_polynomial(a.variety, a.n, a.degree, a.method)
    rows = [{"power": k, "coefficient": c} for k, c in enumerate(poly.coefficients)]
    return poly.to_json(), rows


# ----------------------------------------------------------------- series

def run_series_feitfine(a):
    from .series import feit_fine_series, feit_fine_value

    s = feit_fine_series(a.N, a.K)
    out = {"series": s.to_json()}
    if a.eval_at is not None:
        out["values"] = [dict(n=n, **_frac(feit_fine_value(n, a.eval_at))) for n in range(a.N + 1)]
    return out, None


def run_series_pbw(a):
    from .series import BettiTable, pbw_series

    s = pbw_series(BettiTable.parse(a.betti), a.N, a.K)
    return {"series": s.to_json()}, None


def run_series_power_structure(a):
    from .factorization import power_structure_check

    rep = power_structure_check(a.q, a.N)
    out = rep.to_json()
    if not rep.equal:
        raise CheckFailed(out, "power structure identity failed")
    rows = [{"n": n, "lhs": str(l), "rhs": str(r)} for n, (l, r) in enumerate(zip(rep.lhs, rep.rhs))]
    return out, rows


# ----------------------------------------------------------------- hall

def _table(a, n_max: int):
    from .hallalg import enumerate_classes

    return enumerate_classes(n_max, a.p)


def run_hall_table(a):
    t = _table(a, a.nmax)
    rows = [{"sub": N, "quotient": L, "middle": M, "count": g}
            for (N, L), row in sorted(t.structure_constants.items()) for M, g in sorted(row.items())]
    return t.to_json(), rows


def _parse_element(text: str):
    """'n1-0' or 'n1-0:2,n1-1:-1/2' -> [(name, Fraction)]."""
    out = []
    for part in filter(None, (s.strip() for s in text.split(","))):
        name, _, coef = part.partition(":")
        try:
            out.append((name, Fraction(coef or 1)))
        except ValueError:
            raise PreconditionError(f"bad coefficient in {part!r}") from None
    return out


def _class_length(name: str) -> int:
    head, sep, _ = name.partition("-")
    if not (sep and head.startswith("n") and head[1:].isdigit()):
        raise PreconditionError(f"class names look like n{{length}}-{{index}}, got {name!r}")
    return int(head[1:])


def run_hall_product(a):
    from .hallalg import HallElement, hall_product

    lhs, rhs = _parse_element(a.lhs), _parse_element(a.rhs)
    need = max((_class_length(n) for n, _ in lhs), default=0) + max((_class_length(n) for n, _ in rhs), default=0)
    t = _table(a, a.nmax if a.nmax is not None else need)
    x = HallElement({t[n]: c for n, c in lhs})
    y = HallElement({t[n]: c for n, c in rhs})
    prod = hall_product(x, y, t)
    rows = [{"class": r["class"], "coefficient": f"{r['numerator']}/{r['denominator']}"} for r in prod.to_json()]
    return {"p": a.p, "product": prod.to_json()}, rows


def run_hall_assoc(a):
    from .hallalg import check_associativity

    rep = check_associativity(_table(a, a.lmax), a.lmax)
    out = rep.to_json()
    if not rep.passed:
        raise CheckFailed(out, f"{len(rep.violations)} associativity violations")
    return out, None


def run_hall_commutators(a):
    from .hallalg import commutator_table

    entries = commutator_table(_table(a, a.lmax), a.lmax)
    rows = [{"left": e.left, "right": e.right, "defect": str(e.defect)} for e in entries]
    out = {"p": a.p, "L_max": a.lmax,
           "defects": [dict(left=e.left, right=e.right, **_frac(e.defect)) for e in entries],
           "nonzero": sum(1 for e in entries if e.defect)}
    return out, rows


# ----------------------------------------------------------------- mc

def _catalog(a):
    from .mcgroupoid import load_catalog, parse_catalog

    if a.catalog:
        with open(a.catalog) as fh:
            return parse_catalog(json.load(fh))
    return load_catalog()


def run_mc_card(a):
    from .mcgroupoid import groupoid_card

    e = _catalog(a)[a.catalog_entry]
    card = groupoid_card(e.algebra)
    out = {"entry": e.id, "card": card.to_json(), "expected": e.expected.to_json(),
           "matches_expected": card == e.expected}
    if card != e.expected:
        raise CheckFailed(out, "groupoid data differ from the frozen catalog values")
    return out, None


def run_mc_compare(a):
    from .mcgroupoid import quasi_iso_compare

    cat = _catalog(a)
    pair = cat.pair(a.lhs, a.rhs)
    rep = quasi_iso_compare(cat[a.lhs].algebra, cat[a.rhs].algebra, pair.phi)
    out = rep.to_json()
    if not rep.passed:
        raise CheckFailed(out, "quasi-isomorphic algebras gave different groupoids")
    return out, None


def run_mc_fibration(a):
    from .mcgroupoid import fibration_count

    e = _catalog(a)[a.catalog_entry]
    if e.h_dims is None:
        raise PreconditionError(f"catalog entry {e.id!r} has no split-extension data (h_dims)")
    rep = fibration_count(e.algebra, e.h_dims)
    out = dict(entry=e.id, h_dims=list(e.h_dims), **rep.to_json())
    if not rep.passed:
        raise CheckFailed(out, "fibration identity did not hold under exactly the expected sign")
    return out, None


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--output", help="write the record here instead of stdout")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="cohalab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="group", required=True)

    def add(group, name, fn, flat=False):
        p = group.add_parser(name, parents=[common])
        p.set_defaults(func=fn, flat=flat)
        return p

    cv = top.add_parser("commvar").add_subparsers(dest="command", required=True)
    p = add(cv, "count", run_commvar_count, flat=True)
    p.add_argument("--variety", choices=["commuting", "nilcommuting"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--method", choices=["auto", "brute", "kernel", "classes"], default="auto")
    p = add(cv, "interpolate", run_commvar_interpolate, flat=True)
    p.add_argument("--variety", choices=["commuting", "nilcommuting"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--method", choices=["auto", "kernel", "classes"], default="auto")

    se = top.add_parser("series").add_subparsers(dest="command", required=True)
    p = add(se, "feitfine", run_series_feitfine)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=Fraction, required=True)
    p.add_argument("--eval-at", type=int, default=None)
    p = add(se, "pbw", run_series_pbw)
    p.add_argument("--betti", required=True, help="b0,b1,b2,b3,b4")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=Fraction, required=True)
    p = add(se, "power-structure", run_series_power_structure, flat=True)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--N", type=int, default=2)

    ha = top.add_parser("hall").add_subparsers(dest="command", required=True)
    p = add(ha, "table", run_hall_table, flat=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p = add(ha, "product", run_hall_product, flat=True)
    p.add_argument("--lhs", required=True, help="class[:coef],... e.g. n1-0 or n1-0:2,n1-1:-1")
    p.add_argument("--rhs", required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--nmax", type=int, default=None)
    p = add(ha, "assoc", run_hall_assoc)
    p.add_argument("--lmax", type=int, default=3)
    p.add_argument("--p", type=int, default=2)
    p = add(ha, "commutators", run_hall_commutators, flat=True)
    p.add_argument("--lmax", type=int, default=3)
    p.add_argument("--p", type=int, default=2)

    mc = top.add_parser("mc").add_subparsers(dest="command", required=True)
    for name, fn in (("card", run_mc_card), ("fibration", run_mc_fibration)):
        p = add(mc, name, fn)
        p.add_argument("--catalog-entry", required=True)
        p.add_argument("--catalog", default=None, help="catalog JSON (default: the shipped one)")
    p = add(mc, "compare", run_mc_compare)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--catalog", default=None)
    return parser


_SKIP = {"func", "flat", "format", "output", "group", "command"}


def _inputs(a) -> dict:
    out = {}
    for k, v in sorted(vars(a).items()):
        if k in _SKIP:
            continue
        out[k] = str(v) if isinstance(v, Fraction) else v
    return out


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    command = f"{a.group} {a.command}"
    record = {"command": command, "inputs": _inputs(a), "version": __version__}
    start = time.perf_counter()
    rows = None
    code = EXIT_OK
    try:
        if a.format == "csv" and not a.flat:
            raise PreconditionError(f"`{command}` produces a nested record; CSV is for flat tables only")
        if a.threads < 1:
            raise PreconditionError("--threads must be at least 1")
        outputs, rows = a.func(a)
        record["outputs"] = outputs
    except CheckFailed as e:
        record["outputs"] = e.outputs
        record["error"] = {"type": "ExpectationFailure", "message": str(e)}
        code = EXIT_EXPECTATION
    except InfeasibleError as e:
        record["error"] = {"type": "InfeasibleError", "message": str(e)}
        code = EXIT_INFEASIBLE
    except PreconditionError as e:
        record["error"] = {"type": "PreconditionError", "message": str(e)}
        code = EXIT_PRECONDITION
    except ExpectationFailure as e:
        record["error"] = {"type": "ExpectationFailure", "message": str(e)}
        code = EXIT_EXPECTATION
    except CohalabError as e:  # pragma: no cover - every subclass is handled above
        record["error"] = {"type": type(e).__name__, "message": str(e)}
        code = EXIT_PRECONDITION
    record["exit_code"] = code
    record["wall_time"] = round(time.perf_counter() - start, 6)
    if a.format == "csv" and code == EXIT_OK:
        _emit(_csv(rows or []), a.output)
    else:
        _emit(json.dumps(record, sort_keys=True, indent=1) + "\n", a.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
