"""Exact linear algebra on finite multidegree slices and the E1 checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterator, Sequence, Union

from .core import AlgebraContext, Monomial, SuperForm
from .operators import (
    ComponentAtTopAuxdeg,
    NotExact,
    bv_delta,
    d,
    homotopy_L,
    invert_omega,
    omega_wedge,
    top_form,
)

__all__ = [
    "MismatchAgainstTheorem",
    "OperatorLeavesSlice",
    "Slice",
    "SparseMatrix",
    "SliceCohomology",
    "CohomologyReport",
    "D1Certificate",
    "D1Report",
    "compositions",
    "function_monomials",
    "monomials_up_to",
    "enumerate_basis",
    "operator_matrix",
    "rank_kernel",
    "slice_cohomology",
    "verify_e1",
    "verify_d1_zero",
    "manin_fiber_check",
]


class MismatchAgainstTheorem(AssertionError):
    """A computed quantity disagrees with the statement being checked."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class OperatorLeavesSlice(ValueError):
    pass


# -- enumeration -----------------------------------------------------------


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Exponent vectors of length ``parts`` summing to ``total``, lex-descending."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _monos(n: int, xdeg: int, pdeg: int, dxcount: int, dpcount: int) -> Iterator[Monomial]:
    if min(xdeg, pdeg, dxcount, dpcount) < 0 or pdeg > n or dxcount > n:
        return
    for xs in compositions(xdeg, n):
        for ps in itertools.combinations(range(n), pdeg):
            for dxs in itertools.combinations(range(n, 2 * n), dxcount):
                for dps in compositions(dpcount, n):
                    yield Monomial(xs, dps, ps + dxs)


def function_monomials(n: int, xdeg: int, pdeg: int) -> list[Monomial]:
    return list(_monos(n, xdeg, pdeg, 0, 0))


def monomials_up_to(n: int, total: int, functions_only: bool = False) -> list[Monomial]:
    """Every canonical monomial of total degree ``<= total``."""
    out = []
    for t in range(total + 1):
        for xdeg in range(t + 1):
            for pdeg in range(min(n, t - xdeg) + 1):
                if functions_only:
                    if xdeg + pdeg == t:
                        out.extend(_monos(n, xdeg, pdeg, 0, 0))
                    continue
                for dxc in range(min(n, t - xdeg - pdeg) + 1):
                    out.extend(_monos(n, xdeg, pdeg, dxc, t - xdeg - pdeg - dxc))
    return out


@dataclass(frozen=True)
class Slice:
    """Fixed (xdeg, pdeg, auxdeg); graded internally by dp-count ``m``."""

    n: int
    xdeg: int
    pdeg: int
    auxdeg: int

    def dp_counts(self) -> range:
        return range(max(0, -self.auxdeg), self.n - self.auxdeg + 1)

    def basis_at(self, m: int) -> list[Monomial]:
        return list(_monos(self.n, self.xdeg, self.pdeg, self.auxdeg + m, m))

    def to_dict(self) -> dict[str, int]:
        return {"xdeg": self.xdeg, "pdeg": self.pdeg, "auxdeg": self.auxdeg}


def enumerate_basis(s: Slice) -> list[Monomial]:
    return [mono for m in s.dp_counts() for mono in s.basis_at(m)]


# -- matrices --------------------------------------------------------------


@dataclass
class SparseMatrix:
    nrows: int
    ncols: int
    entries: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.entries = {k: Fraction(v) for k, v in self.entries.items() if v}

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> SparseMatrix:
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        return cls(nrows, ncols, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)})

    def dense(self) -> list[list[Fraction]]:
        rows = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def column(self, j: int) -> list[Fraction]:
        col = [Fraction(0)] * self.nrows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Row-reduce in place; first nonzero entry in each column is the pivot."""
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank_kernel(mat: SparseMatrix) -> tuple[int, list[list[Fraction]]]:
    """Exact rank and a kernel basis (one vector per free column)."""
    rows, pivots = _rref(mat.dense(), mat.ncols)
    pivset = set(pivots)
    kernel = []
    for free in range(mat.ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * mat.ncols
        v[free] = Fraction(1)
        for row, pc in zip(rows, pivots):
            v[pc] = -row[free]
        kernel.append(v)
    return len(pivots), kernel


def _rank(vectors: list[list[Fraction]], dim: int) -> int:
    if not vectors:
        return 0
    return len(_rref([list(v) for v in vectors], dim)[1])


_NAMED_OPS: dict[str, Callable[[SuperForm], SuperForm]] = {
    "omega": omega_wedge,
    "L": homotopy_L,
    "d": d,
    "delta": bv_delta,
}

Basis = Union[Slice, Sequence[Monomial], Sequence[Slice]]


def _basis(b: Basis) -> list[Monomial]:
    if isinstance(b, Slice):
        return enumerate_basis(b)
    b = list(b)
    if b and isinstance(b[0], Slice):
        return [m for s in b for m in enumerate_basis(s)]
    return b


def operator_matrix(op: str | Callable[[SuperForm], SuperForm], domain: Basis, codomain: Basis) -> SparseMatrix:
    """Matrix of a linear operator between enumerated bases (columns = domain)."""
    fn = _NAMED_OPS[op] if isinstance(op, str) else op
    dom, cod = _basis(domain), _basis(codomain)
    index = {m: i for i, m in enumerate(cod)}
    entries: dict[tuple[int, int], Fraction] = {}
    for j, m in enumerate(dom):
        image = fn(SuperForm.monomial(m))
        for mi, c in image.items():
            if mi not in index:
                raise OperatorLeavesSlice(f"{op} sends {m.to_str()} to {mi.to_str()}, outside the codomain")
            entries[index[mi], j] = c
    return SparseMatrix(len(cod), len(dom), entries)


# -- cohomology of omega^ --------------------------------------------------


@dataclass
class SliceCohomology:
    slice: Slice
    ker: int
    im: int
    witnesses: list[SuperForm]
    ranks: dict[int, int]
    sizes: dict[int, int]

    @property
    def H(self) -> int:
        return self.ker - self.im

    def to_dict(self) -> dict:
        return {
            "slice": self.slice.to_dict(),
            "dims": {"ker": self.ker, "im": self.im, "H": self.H},
            "witnesses": [str(w) for w in self.witnesses],
        }


@dataclass
class CohomologyReport:
    n: int
    slices: list[SliceCohomology]

    def to_dict(self) -> dict:
        return {"n": self.n, "slices": [s.to_dict() for s in self.slices]}

    def by_slice(self) -> dict[tuple[int, int, int], SliceCohomology]:
        return {(s.slice.xdeg, s.slice.pdeg, s.slice.auxdeg): s for s in self.slices}


def _vec_to_form(n: int, basis: list[Monomial], v: list[Fraction]) -> SuperForm:
    return SuperForm(n, {m: c for m, c in zip(basis, v) if c})


def slice_cohomology(s: Slice) -> SliceCohomology:
    """Cohomology of ``omega^`` on one slice, graded by dp-count."""
    ms = list(s.dp_counts())
    bases = {m: s.basis_at(m) for m in ms}
    bases[ms[0] - 1] = []
    bases[ms[-1] + 1] = []
    mats = {m: operator_matrix("omega", bases[m], bases[m + 1]) for m in [ms[0] - 1] + ms}
    ranks, kers = {}, {}
    for m in [ms[0] - 1] + ms:
        ranks[m], kers[m] = rank_kernel(mats[m])
    witnesses: list[SuperForm] = []
    ker_total = im_total = 0
    for m in ms:
        dim = len(bases[m])
        ker_total += len(kers[m])
        im_total += ranks[m - 1]
        if len(kers[m]) == ranks[m - 1]:
            continue
        chosen = [mats[m - 1].column(j) for j in range(mats[m - 1].ncols)]
        r = _rank(chosen, dim)
        for v in kers[m]:
            if _rank(chosen + [v], dim) > r:
                chosen.append(v)
                r += 1
                witnesses.append(_vec_to_form(s.n, bases[m], v))
    return SliceCohomology(
        s, ker_total, im_total, witnesses,
        ranks={m: ranks[m] for m in ms},
        sizes={m: len(bases[m]) for m in ms},
    )


def _is_top_shaped(w: SuperForm) -> bool:
    n = w.n
    return all(m.degrees().dxcount == n and m.degrees().dpcount == 0 for m in w.monomials())


def _check_slice(sc: SliceCohomology, expected: int) -> None:
    s = sc.slice
    if sc.H != expected:
        raise MismatchAgainstTheorem(f"slice {s}: dim H = {sc.H}, expected {expected}", s)
    if s.auxdeg == s.n:
        if not all(_is_top_shaped(w) for w in sc.witnesses):
            raise MismatchAgainstTheorem(f"slice {s}: witness not of shape f*dx^top", s)
    else:
        for m in s.dp_counts():
            if sc.ranks[m] + sc.ranks.get(m - 1, 0) != sc.sizes[m]:
                raise MismatchAgainstTheorem(f"slice {s}: rank sum mismatch at dp-count {m}", s)


def verify_e1(ctx: AlgebraContext, min_auxdeg: int | None = None) -> CohomologyReport:
    """H(omega^) vanishes off auxdeg n and is spanned by f*dx^top at auxdeg n."""
    n = ctx.n
    lo = -(n + 1) if min_auxdeg is None else min_auxdeg
    out = []
    for xdeg in range(ctx.max_xdeg + 1):
        for pdeg in range(ctx.max_pdeg + 1):
            for aux in range(lo, n + 1):
                sc = slice_cohomology(Slice(n, xdeg, pdeg, aux))
                expected = comb(xdeg + n - 1, n - 1) * comb(n, pdeg) if aux == n else 0
                _check_slice(sc, expected)
                out.append(sc)
    return CohomologyReport(n, out)


@dataclass
class D1Certificate:
    f: SuperForm
    beta: SuperForm
    alpha: SuperForm

    def to_dict(self) -> dict:
        return {"f": str(self.f), "d(f*dx^top)": str(self.beta), "alpha": str(self.alpha)}


@dataclass
class D1Report:
    n: int
    certificates: list[D1Certificate]

    def to_dict(self) -> dict:
        return {"n": self.n, "certificates": [c.to_dict() for c in self.certificates]}


def verify_d1_zero(ctx: AlgebraContext) -> D1Report:
    """Certify ``d(f*dx^top) = omega ^ alpha`` for every function monomial in caps."""
    n = ctx.n
    top = top_form(n)
    certs = []
    for xdeg in range(ctx.max_xdeg + 1):
        for pdeg in range(ctx.max_pdeg + 1):
            for m in function_monomials(n, xdeg, pdeg):
                f = SuperForm.monomial(m)
                beta = d(f * top)
                try:
                    alpha = invert_omega(beta)
                except (ComponentAtTopAuxdeg, NotExact) as exc:
                    raise MismatchAgainstTheorem(f"d({f}*dx^top) is not omega^-exact: {exc}", f) from exc
                certs.append(D1Certificate(f, beta, alpha))
    return D1Report(n, certs)


def manin_fiber_check(ctx: AlgebraContext, min_auxdeg: int | None = None) -> CohomologyReport:
    """Constant coefficients only: H(omega^) is the line spanned by [dx^top]."""
    n = ctx.n
    lo = -(n + 1) if min_auxdeg is None else min_auxdeg
    out = []
    for aux in range(lo, n + 1):
        sc = slice_cohomology(Slice(n, 0, 0, aux))
        _check_slice(sc, 1 if aux == n else 0)
        if aux == n and sc.witnesses[0].monomials() != top_form(n).monomials():
            raise MismatchAgainstTheorem("constant cohomology not spanned by dx^top", sc)
        out.append(sc)
    return CohomologyReport(n, out)
