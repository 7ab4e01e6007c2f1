"""Spectral sequence of a decreasing filtration on a finite based cochain complex.

Pages are computed literally from

    A_p^r = {c in F_p : d c in F_{p+r}},
    E_p^r = A_p^r / (d A_{p-r+1}^{r-1} + A_{p+1}^{r-1}),

with d_r induced by d on representatives.  A second, independent route
(``page_dims_by_ranks``) gets the same dimensions from ranks of submatrices of
d via E = Z / B; the test-suite compares the two.

Bookkeeping: the spot (p, q) of page r holds E_r^{p,q}, total degree n = p + q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .exactalg import CohomologyModule, GaussianRational, ONE, ZERO, as_gr
from .exactalg.linalg import Echelon, _axpy
from .exterior import KoszulHbarComplex, basis, binom, wedge_matrix

SparseVec = dict


class InvalidComplex(ValueError):
    pass


class IllDefinedDifferential(AssertionError):
    pass


def _apply(columns: Sequence[SparseVec], vec: SparseVec) -> SparseVec:
    out: dict = {}
    for i, x in vec.items():
        col = columns[i]
        if col:
            _axpy(out, x, col)
    return out


@dataclass(frozen=True)
class FilteredComplex:
    """Based cochain complex over Q(i) with a filtration level per basis vector.

    ``d[n]`` lists, for each basis vector of degree n, its image as a sparse
    vector of degree n+1.  F_p C^n is spanned by the basis vectors of level >= p.
    ``flag_from`` marks levels p >= flag_from as affected by truncation.
    """

    dims: Mapping[int, int]
    d: Mapping[int, tuple]
    levels: Mapping[int, tuple]
    flag_from: int | None = None

    def __post_init__(self):
        dims = {int(n): int(m) for n, m in self.dims.items()}
        object.__setattr__(self, "dims", dims)
        d = {}
        for n in dims:
            cols = tuple(dict(c) for c in self.d.get(n, ())) or tuple({} for _ in range(dims[n]))
            if len(cols) != dims[n]:
                raise InvalidComplex(f"degree {n}: {len(cols)} columns for {dims[n]} basis vectors")
            d[n] = cols
        object.__setattr__(self, "d", d)
        levels = {n: tuple(self.levels[n]) for n in dims}
        object.__setattr__(self, "levels", levels)
        for n in dims:
            if len(levels[n]) != dims[n]:
                raise InvalidComplex(f"degree {n}: wrong number of filtration levels")

    # -- structure -------------------------------------------------------------
    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def level_range(self) -> tuple[int, int]:
        all_levels = [x for lv in self.levels.values() for x in lv]
        if not all_levels:
            return 0, 0
        return min(all_levels), max(all_levels)

    @property
    def width(self) -> int:
        lo, hi = self.level_range()
        return hi - lo

    def apply(self, n: int, vec: SparseVec) -> SparseVec:
        if n not in self.d:
            return {}
        return _apply(self.d[n], vec)

    def filtered_basis(self, n: int, p: int) -> list[int]:
        return [i for i, lv in enumerate(self.levels.get(n, ())) if lv >= p]

    def validate(self) -> None:
        for n in self.degrees:
            target = self.levels.get(n + 1, ())
            for i, col in enumerate(self.d[n]):
                if col and n + 1 not in self.dims:
                    raise InvalidComplex(f"degree {n} maps into a missing degree")
                for k in col:
                    if k >= len(target):
                        raise InvalidComplex(f"degree {n}: image index {k} out of range")
                    if target[k] < self.levels[n][i]:
                        raise InvalidComplex(f"d does not preserve the filtration at degree {n}, vector {i}")
                dd = self.apply(n + 1, col) if n + 1 in self.dims else {}
                if dd:
                    raise InvalidComplex(f"d o d != 0 at degree {n}, vector {i}")

    # -- constructions -------------------------------------------------------------
    def shift(self, a: int, b: int) -> "FilteredComplex":
        """Filtration levels + a, cohomological degrees + b."""
        return FilteredComplex({n + b: m for n, m in self.dims.items()},
                               {n + b: cols for n, cols in self.d.items()},
                               {n + b: tuple(x + a for x in lv) for n, lv in self.levels.items()},
                               None if self.flag_from is None else self.flag_from + a)

    def tensor_multiplicity(self, m: int) -> "FilteredComplex":
        """C (x) Q(i)^m with the identity on the second factor."""
        dims = {n: k * m for n, k in self.dims.items()}
        d = {}
        for n, cols in self.d.items():
            new = []
            for col in cols:
                for u in range(m):
                    new.append({k * m + u: x for k, x in col.items()})
            d[n] = tuple(new)
        levels = {n: tuple(x for x in lv for _ in range(m)) for n, lv in self.levels.items()}
        return FilteredComplex(dims, d, levels, self.flag_from)

    def cohomology_dim(self, n: int) -> int:
        """dim H^n of the total complex, by elimination."""
        if n not in self.dims:
            return 0
        ker = self.dims[n] - _rank(self.d[n])
        prev = _rank(self.d[n - 1]) if n - 1 in self.dims else 0
        return ker - prev


def _rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        if v:
            ech.add(v)
    return len(ech)


@dataclass
class SpectralPage:
    r: int
    dims: dict = field(default_factory=dict)          # (p, q) -> dim
    reps: dict = field(default_factory=dict)          # (p, q) -> list of sparse vectors in C^{p+q}
    differentials: dict = field(default_factory=dict)  # (p, q) -> matrix E_r^{p,q} -> E_r^{p+r, q-r+1}
    flagged: set = field(default_factory=set)

    def total_dims(self) -> dict:
        out: dict = {}
        for (p, q), d in self.dims.items():
            out[p + q] = out.get(p + q, 0) + d
        return out

    def nonzero(self) -> dict:
        return {k: v for k, v in self.dims.items() if v}


class _Quotient:
    """E_p^r(n): representatives and a tagged echelon for class coordinates."""

    def __init__(self, numerator: list, denominator: list):
        ech = Echelon()
        for v in denominator:
            if v:
                ech.add(v)
        self.denominator_rank = len(ech)
        self.denominator = list(denominator)
        reps = []
        for v in numerator:
            if not ech.contains(v):
                ech.add(v, {len(reps): ONE})
                reps.append(v)
        self.reps = reps
        self.ech = ech

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, vec: SparseVec) -> list:
        res, tag = self.ech.reduce(vec)
        if res:
            raise IllDefinedDifferential("vector does not lie in the numerator of the page")
        out = [ZERO] * self.dim
        for k, x in tag.items():
            out[k] = -x
        return out


class SpectralSequence:
    """Literal page computation with caching of A_p^r and E_p^r."""

    def __init__(self, C: FilteredComplex, check: bool = True):
        if check:
            C.validate()
        self.C = C
        self.lo, self.hi = C.level_range()
        self._A: dict = {}
        self._E: dict = {}

    # A_p^r(n) ------------------------------------------------------------------
    def A(self, n: int, p: int, r: int) -> list:
        key = (n, p, r)
        hit = self._A.get(key)
        if hit is not None:
            return hit
        C = self.C
        if n not in C.dims:
            out = []
        else:
            cols = C.filtered_basis(n, max(p, self.lo))
            if r <= 0:
                out = [{i: ONE} for i in cols]
            else:
                low = C.levels.get(n + 1, ())
                cut = p + r
                ech = Echelon()
                out = []
                for i in cols:
                    img = {k: x for k, x in C.d[n][i].items() if low[k] < cut}
                    v, t = ech.reduce(img, {i: ONE})
                    if v:
                        ech.add(v, t)
                    else:
                        out.append(t)
        self._A[key] = out
        return out

    def E(self, n: int, p: int, r: int) -> _Quotient:
        key = (n, p, r)
        hit = self._E.get(key)
        if hit is None:
            num = self.A(n, p, r)
            den = [self.C.apply(n - 1, x) for x in self.A(n - 1, p - r + 1, r - 1)]
            den += self.A(n, p + 1, r - 1)
            hit = _Quotient(num, den)
            self._E[key] = hit
        return hit

    def spots(self):
        for n in self.C.degrees:
            for p in range(self.lo, self.hi + 1):
                yield p, n - p

    def d_r_map(self, r: int, p: int, q: int, check: bool = True) -> list[list]:
        """Matrix of d_r: E_r^{p,q} -> E_r^{p+r, q-r+1} (columns = source representatives)."""
        n = p + q
        src = self.E(n, p, r)
        tgt = self.E(n + 1, p + r, r)
        cols = [tgt.coordinates(self.C.apply(n, x)) for x in src.reps]
        if check:
            # independence of the lift: every element of the denominator maps to zero
            for y in src.denominator:
                if any(tgt.coordinates(self.C.apply(n, y))):
                    raise IllDefinedDifferential(f"d_{r} depends on the lift at spot {(p, q)}")
        return [[cols[j][i] for j in range(len(cols))] for i in range(tgt.dim)]

    def page(self, r: int, with_differentials: bool = True, check: bool = True) -> SpectralPage:
        pg = SpectralPage(r)
        flag = self.C.flag_from
        for p, q in self.spots():
            E = self.E(p + q, p, r)
            pg.dims[(p, q)] = E.dim
            pg.reps[(p, q)] = E.reps
            if flag is not None and p >= flag:
                pg.flagged.add((p, q))
        if with_differentials:
            for p, q in self.spots():
                if pg.dims[(p, q)] and (p + q + 1) in self.C.dims:
                    pg.differentials[(p, q)] = self.d_r_map(r, p, q, check)
        return pg


def page(C: FilteredComplex, r: int) -> SpectralPage:
    return SpectralSequence(C).page(r)


def d_r_map(C: FilteredComplex, r: int, p: int, q: int) -> list[list]:
    return SpectralSequence(C).d_r_map(r, p, q)


def page_dims_by_ranks(C: FilteredComplex, r: int) -> dict:
    """dim E_r^{p,q} = dim Z - dim B from ranks of submatrices of d (no quotients)."""
    lo, hi = C.level_range()

    def rank_block(n, col_min, row_pred):
        if n not in C.dims:
            return 0
        lv = C.levels.get(n + 1, ())
        vecs = []
        for i in C.filtered_basis(n, col_min):
            vecs.append({k: x for k, x in C.d[n][i].items() if row_pred(lv[k])})
        return _rank(vecs)

    def dim_A(n, p, rr):
        if n not in C.dims:
            return 0
        size = len(C.filtered_basis(n, max(p, lo)))
        if rr <= 0:
            return size
        return size - rank_block(n, max(p, lo), lambda x: x < p + rr)

    out = {}
    for n in C.degrees:
        for p in range(lo, hi + 1):
            Z = dim_A(n, p, r) - dim_A(n, p + 1, r - 1)
            if r <= 0:
                B = 0
            else:
                qmin = p - r + 1
                B = rank_block(n - 1, qmin, lambda x: x <= p) - rank_block(n - 1, qmin, lambda x: x < p)
            out[(p, n - p)] = Z - B
    return out


@dataclass
class SpectralResult:
    pages: list                 # list of dicts (p, q) -> dim for r = 0..R
    degeneration_page: int
    e_infinity: SpectralPage
    graded: dict                # n -> [dim E_inf^{p, n-p} for p = lo..hi]
    level_range: tuple
    flagged: set


def e_infinity(C: FilteredComplex, with_differentials: bool = False) -> SpectralResult:
    """Run pages r = 0..width+1; report the stable page and the degeneration page.

    The degeneration page is the least r >= 1 from which every d_s vanishes,
    i.e. the least r >= 1 with E_r = E_infinity at every spot.
    """
    ss = SpectralSequence(C)
    R = C.width + 1
    pages = []
    last = None
    for r in range(R + 1):
        pg = ss.page(r, with_differentials=with_differentials)
        pages.append(dict(pg.dims))
        last = pg
    inf = pages[-1]
    degen = next(r for r in range(1, R + 1) if pages[r] == inf)
    lo, hi = C.level_range()
    graded = {n: [inf[(p, n - p)] for p in range(lo, hi + 1)] for n in C.degrees}
    return SpectralResult(pages, degen, last, graded, (lo, hi), set(last.flagged))


# ---------------------------------------------------------------------------
# the hbar-adic filtration of a truncated Koszul complex
# ---------------------------------------------------------------------------

def koszul_filtered(K: KoszulHbarComplex, order: int, degree_shift: int = 0,
                    flag_from: int | None = None) -> FilteredComplex:
    """wedge^* (x) C^mult (x) C[hbar]/hbar^order with F_p = hbar^p (everything).

    Basis vector (I, u, e) of degree j has index (idx(I) * mult + u) * order + e
    and filtration level e.
    """
    g, mult, N = K.g, K.mult, order
    dims, d, levels = {}, {}, {}
    wedges = {j: {m: wedge_matrix(l, j, g) for m, l in K.l_series.items()} for j in range(g)}
    for j in range(g + 1):
        nb = binom(g, j)
        dims[j + degree_shift] = nb * mult * N
        levels[j + degree_shift] = tuple(e for _ in range(nb * mult) for e in range(N))
        cols = []
        for c in range(nb):
            for u in range(mult):
                for e in range(N):
                    img: dict = {}
                    if j < g:
                        for m, W in wedges[j].items():
                            if e + m >= N:
                                continue
                            for r_ in range(len(W)):
                                x = W[r_][c]
                                if x:
                                    idx = (r_ * mult + u) * N + e + m
                                    img[idx] = img.get(idx, ZERO) + x
                    cols.append({k: x for k, x in img.items() if x})
        d[j + degree_shift] = tuple(cols)
    return FilteredComplex(dims, d, levels, flag_from)


def module_from_graded(graded: Sequence[int], clean_until: int) -> CohomologyModule:
    """Rebuild a C[[hbar]]-module from dims of hbar^p H / hbar^{p+1} H, p < clean_until.

    Requires the last two clean entries to agree (the free rank has stabilised).
    """
    g = list(graded[:clean_until])
    if not any(g):
        return CohomologyModule.zero()
    if len(g) < 2 or g[-1] != g[-2]:
        raise ValueError("graded dimensions have not stabilised inside the clean zone")
    free = g[-1]
    exps = []
    for a in range(1, len(g)):
        drop = g[a - 1] - g[a]
        if drop < 0:
            raise ValueError("graded dimensions are not monotone: not an hbar-adic filtration")
        exps += [a] * drop
    return CohomologyModule.from_exponents(free, exps)
