"""Command line: validate | cohomology | oracle | cocycles | spectral.

Input is a JSON document (schema 1)::

    {"schema": 1, "g": 2,
     "lattice": [[...], ...],          # 2g generators, optional (standard lattice)
     "H": [[...], ...],                # optional (zero)
     "chi": ["0", "1/2", ...],         # 2g phases r_i, chi(lambda_i) = exp(i pi r_i)
     "poisson": [[...], ...],          # optional (zero)
     "l_series": {"1": [...], ...},
     "hbar_order": 5, "seed": 0}

A complex scalar is an integer, a rational string "p/q", or a pair [re, im]
of those.  Exit codes: 0 ok, 1 internal fault, 2 validation failure,
3 parse failure, 4 oracle disagreement.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from . import mainthm
from .exactalg import GaussianRational
from .groupcoh import ScopeError, build_basis_cocycles, cocycle_residuals, sample_tuples
from .moyal import PoissonBivector, compatibility
from .spectral import e_infinity, koszul_filtered
from .torus import (
    ClassicalAHData,
    HermitianNS,
    PeriodLattice,
    QuantumAHData,
    Semicharacter,
    SubtorusError,
    validate,
)

SCHEMA = 1
EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_PARSE, EXIT_DISAGREE = 0, 1, 2, 3, 4


class ParseError(ValueError):
    pass


class ValidationFailure(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(v["message"] for v in violations))
        self.violations = violations


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------

def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise ParseError(f"{where}: booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: malformed rational {x!r} ({exc})") from None
    raise ParseError(f"{where}: expected an integer or a rational string, got {x!r}")


def parse_scalar(x, where: str) -> GaussianRational:
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError(f"{where}: a complex scalar is a pair [re, im]")
        return GaussianRational(_rational(x[0], where + "[0]"), _rational(x[1], where + "[1]"))
    return GaussianRational(_rational(x, where))


def _vector(x, n: int, where: str) -> tuple:
    if not isinstance(x, list) or len(x) != n:
        raise ParseError(f"{where}: expected a list of {n} scalars")
    return tuple(parse_scalar(v, f"{where}[{i}]") for i, v in enumerate(x))


def _matrix(x, n: int, where: str) -> tuple:
    if not isinstance(x, list) or len(x) != n:
        raise ParseError(f"{where}: expected {n} rows")
    return tuple(_vector(r, n, f"{where}[{i}]") for i, r in enumerate(x))


@dataclass
class InputDescription:
    data: QuantumAHData
    hbar_order: int | None = None
    seed: int = 0
    raw: dict = field(default_factory=dict)


def parse_input(text: str) -> InputDescription:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level: expected a JSON object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"schema: unsupported version {doc.get('schema')!r}")
    g = doc.get("g")
    if not isinstance(g, int) or isinstance(g, bool) or g < 1:
        raise ParseError("g: expected a positive integer")
    if "lattice" in doc:
        gens = doc["lattice"]
        if not isinstance(gens, list) or len(gens) != 2 * g:
            raise ParseError(f"lattice: expected {2 * g} generators")
        lattice = PeriodLattice(g, tuple(_vector(v, g, f"lattice[{i}]") for i, v in enumerate(gens)))
    else:
        lattice = PeriodLattice.standard(g)
    H = HermitianNS(_matrix(doc["H"], g, "H")) if "H" in doc else HermitianNS.zero(g)
    if "chi" in doc:
        chi_raw = doc["chi"]
        if not isinstance(chi_raw, list) or len(chi_raw) != 2 * g:
            raise ParseError(f"chi: expected {2 * g} phases")
        chi = Semicharacter(tuple(_rational(r, f"chi[{i}]") for i, r in enumerate(chi_raw)))
    else:
        chi = Semicharacter.trivial(g)
    poisson = _matrix(doc["poisson"], g, "poisson") if "poisson" in doc else None
    series_raw = doc.get("l_series", {})
    if not isinstance(series_raw, dict):
        raise ParseError("l_series: expected an object mapping m to covectors")
    series = {}
    for key, vec in series_raw.items():
        try:
            m = int(key)
        except ValueError:
            raise ParseError(f"l_series: key {key!r} is not an integer") from None
        if m < 1 or str(m) != key.strip():
            raise ParseError(f"l_series: key {key!r} must be a positive integer")
        series[m] = _vector(vec, g, f"l_series[{key}]")
    order = doc.get("hbar_order")
    if order is not None and (not isinstance(order, int) or order < 1):
        raise ParseError("hbar_order: expected a positive integer")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ParseError("seed: expected an integer")
    data = QuantumAHData(lattice, ClassicalAHData(H, chi), series, poisson)
    return InputDescription(data, order, seed, doc)


def load(path: str) -> InputDescription:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return parse_input(text)


def check_input(inp: InputDescription) -> list[dict]:
    data = inp.data
    out = [v.to_json() for v in validate(data.ah, data.lattice)]
    try:
        P = PoissonBivector(data.poisson)
    except ValueError as exc:
        out.append({"kind": "poisson", "message": str(exc), "where": []})
        return out
    if not out:
        if not compatibility(data.H, P):
            out.append({"kind": "Poisson compatibility",
                        "message": "Poisson compatibility (H^T Π H = 0) fails", "where": []})
        try:
            mainthm.analyse(data)
        except SubtorusError as exc:
            out.append({"kind": "subtorus", "message": str(exc), "where": []})
    return out


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _inv(x):
    return "inf" if x == mainthm.INFINITY else x


@dataclass
class ReportDocument:
    command: str
    seed: int
    validation: dict
    version: str = __version__
    schema: int = SCHEMA
    case: str | None = None
    invariants: dict | None = None
    modules: list | None = None
    agreement: list | None = None
    cocycles: dict | None = None
    spectral: dict | None = None

    def to_json(self) -> dict:
        out = {"schema": self.schema, "version": self.version, "command": self.command,
               "seed": self.seed, "validation": self.validation}
        for key in ("case", "invariants", "modules", "agreement", "cocycles", "spectral"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, obj: dict) -> "ReportDocument":
        if obj.get("schema") != SCHEMA:
            raise ParseError("report schema mismatch")
        return cls(command=obj["command"], seed=obj["seed"], validation=obj["validation"],
                   version=obj["version"], schema=obj["schema"], case=obj.get("case"),
                   invariants=obj.get("invariants"), modules=obj.get("modules"),
                   agreement=obj.get("agreement"), cocycles=obj.get("cocycles"),
                   spectral=obj.get("spectral"))

    @classmethod
    def loads(cls, text: str) -> "ReportDocument":
        return cls.from_json(json.loads(text))


def _module_row(j: int, mod) -> dict:
    dim = mod.complex_dimension()
    return {"degree": j, "free_rank": mod.free_rank, "torsion": [list(p) for p in mod.torsion],
            "dim": "inf" if dim is None else dim, "structure": mod.structure()}


def _invariants(an) -> dict:
    return {"t": _inv(an.t), "t0": _inv(an.t0), "g0": an.g0, "k": an.k, "hbar_bar": an.hbar_bar}


def _seed(inp: InputDescription) -> int:
    env = os.environ.get("ABELIA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"ABELIA_SEED: {env!r} is not an integer") from None
    return inp.seed


def _order(args, inp: InputDescription, an) -> int:
    N = args.hbar_order if getattr(args, "hbar_order", None) is not None else inp.hbar_order
    if N is None:
        N = an.t0 + 3 if an.t0 != mainthm.INFINITY else 3
    if an.t0 != mainthm.INFINITY and N < an.t0 + 2:
        raise mainthm.TruncationTooSmall(f"hbar order {N} is below t0 + 2 = {an.t0 + 2}")
    return N


def _prepare(args):
    inp = load(args.path)
    violations = check_input(inp)
    if violations:
        raise ValidationFailure(violations)
    return inp, mainthm.analyse(inp.data)


def _table(rows, out) -> None:
    out.write(f"{'j':>3}  {'dim':>5}  structure\n")
    for r in rows:
        out.write(f"{r['degree']:>3}  {str(r['dim']):>5}  {r['structure']}\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_validate(args, out) -> int:
    inp = load(args.path)
    violations = check_input(inp)
    rep = ReportDocument("validate", _seed(inp), {"ok": not violations, "violations": violations})
    if args.json:
        out.write(rep.dumps() + "\n")
    else:
        if violations:
            for v in violations:
                out.write(f"INVALID [{v['kind']}] {v['message']}\n")
        else:
            out.write("valid\n")
    return EXIT_INVALID if violations else EXIT_OK


def cmd_cohomology(args, out) -> int:
    inp, an = _prepare(args)
    mods = mainthm.all_cohomology(inp.data, an)
    degrees = range(an.g + 1) if args.degree is None else [args.degree]
    rows = [_module_row(j, mods[j] if 0 <= j <= an.g else mainthm.CohomologyModule.zero())
            for j in degrees]
    rep = ReportDocument("cohomology", _seed(inp), {"ok": True, "violations": []}, case=an.case,
                         invariants=_invariants(an), modules=rows)
    if args.json:
        out.write(rep.dumps() + "\n")
    else:
        out.write(f"case: {an.case}\n")
        _table(rows, out)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    inp, an = _prepare(args)
    N = _order(args, inp, an)
    rep = mainthm.cross_check(inp.data, N)
    agreement = []
    for j in range(rep.g + 1):
        agreement.append({"degree": j, "formula": rep.formula[j].structure(),
                          "smith": rep.smith[j].structure(), "spectral": rep.spectral[j].structure(),
                          "agree": rep.formula[j] == rep.smith[j] == rep.spectral[j]})
    doc = ReportDocument("oracle", _seed(inp), {"ok": True, "violations": []}, case=rep.case,
                         invariants=_invariants(an),
                         modules=[_module_row(j, m) for j, m in enumerate(rep.formula)],
                         agreement=agreement,
                         spectral={"degeneration_page": rep.degeneration_page,
                                   "expected_degeneration_page": rep.expected_degeneration_page,
                                   "hbar_order": N, "spectral_order": rep.spectral_order,
                                   "discrepancies": rep.discrepancies})
    if args.json:
        out.write(doc.dumps() + "\n")
    else:
        out.write(f"case: {rep.case}   hbar order: {N}\n")
        out.write(f"{'j':>3}  {'formula':<18}{'smith':<18}{'spectral':<18}agree\n")
        for a in agreement:
            out.write(f"{a['degree']:>3}  {a['formula']:<18}{a['smith']:<18}{a['spectral']:<18}"
                      f"{'yes' if a['agree'] else 'NO'}\n")
        out.write(f"degeneration page: {rep.degeneration_page} (expected {rep.expected_degeneration_page})\n")
        for d in rep.discrepancies:
            out.write(f"DISAGREEMENT {json.dumps(d, ensure_ascii=False, sort_keys=True)}\n")
    return EXIT_OK if rep.agree else EXIT_DISAGREE


def cmd_cocycles(args, out) -> int:
    inp, an = _prepare(args)
    data = inp.data
    N = _order(args, inp, an) if an.t0 != mainthm.INFINITY else 3
    seed = _seed(inp)
    listing = build_basis_cocycles(data, args.degree, N)
    rng = random.Random(seed)
    samples = sample_tuples(rng, 2 * data.g, args.degree + 1, args.samples)
    verified = [c for c in listing.cocycles if c.cochain is not None]
    residuals = cocycle_residuals(data, listing, N, samples) if verified else []
    if listing.warning:
        sys.stderr.write(f"warning: {listing.warning}\n")
    entries = []
    res_iter = iter(residuals)
    for c in listing.cocycles:
        entry = {"c": c.c, "index_set": list(c.index_set), "expression": c.expression,
                 "verified": c.cochain is not None}
        if c.cochain is not None:
            entry["residual_zero"] = next(res_iter)
        entries.append(entry)
    doc = ReportDocument("cocycles", seed, {"ok": True, "violations": []}, case=an.case,
                         invariants=_invariants(an),
                         cocycles={"degree": args.degree, "hbar_order": N, "samples": args.samples,
                                   "expected_count": listing.expected_count,
                                   "warning": listing.warning, "cocycles": entries})
    if args.json:
        out.write(doc.dumps() + "\n")
    else:
        out.write(f"degree {args.degree}: {len(entries)} cocycle(s), expected {listing.expected_count}\n")
        for e in entries:
            status = ("residual 0" if e.get("residual_zero") else "residual NONZERO") if e["verified"] \
                else "emit-only"
            out.write(f"  {e['expression']}   [{status}]\n")
    bad = any(e["verified"] and not e["residual_zero"] for e in entries)
    return EXIT_DISAGREE if bad else EXIT_OK


def cmd_spectral(args, out) -> int:
    inp, an = _prepare(args)
    N = _order(args, inp, an)
    order, clean = mainthm.spectral_order(an, N)
    F = koszul_filtered(an.model(), order, degree_shift=an.k, flag_from=clean)
    res = e_infinity(F)
    r_max = len(res.pages) - 1 if args.dump_pages is None else args.dump_pages
    pages = []
    for r in range(min(r_max, len(res.pages) - 1) + 1):
        spots = [{"p": p, "q": q, "dim": d, "truncation_affected": p >= clean}
                 for (p, q), d in sorted(res.pages[r].items()) if d]
        pages.append({"r": r, "spots": spots})
    doc = ReportDocument("spectral", _seed(inp), {"ok": True, "violations": []}, case=an.case,
                         invariants=_invariants(an),
                         spectral={"degeneration_page": res.degeneration_page, "hbar_order": order,
                                   "truncation_affected_from": clean, "pages": pages,
                                   "graded": {str(n): v for n, v in sorted(res.graded.items())}})
    if args.json:
        out.write(doc.dumps() + "\n")
    else:
        out.write(f"model: g0={an.g0} multiplicity={an.hbar_bar if an.chi_trivial else 0} shift k={an.k} "
                  f"hbar order {order} (levels >= {clean} truncation-affected)\n")
        for pg in pages:
            cells = ", ".join(f"({s['p']},{s['q']}):{s['dim']}{'*' if s['truncation_affected'] else ''}"
                              for s in pg["spots"]) or "0"
            out.write(f"E_{pg['r']}: {cells}\n")
        out.write(f"degeneration page: {res.degeneration_page}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abelia", description="cohomology of deformed line bundles on complex tori")
    ap.add_argument("--version", action="version", version=f"abelia {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the input invariants")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cohomology", help="closed-form cohomology modules")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.add_argument("--degree", type=int)
    p.add_argument("--hbar-order", type=int)
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("oracle", help="formula vs Smith vs spectral sequence")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.add_argument("--hbar-order", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("cocycles", help="explicit basis cocycles and their residual check")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--hbar-order", type=int)
    p.set_defaults(func=cmd_cocycles)

    p = sub.add_parser("spectral", help="pages of the hbar-adic spectral sequence of the model")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-pages", type=int, metavar="R_MAX")
    p.add_argument("--hbar-order", type=int)
    p.set_defaults(func=cmd_spectral)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except ValidationFailure as exc:
        for v in exc.violations:
            sys.stderr.write(f"INVALID [{v['kind']}] {v['message']}\n")
        return EXIT_INVALID
    except (mainthm.TruncationTooSmall, ScopeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
