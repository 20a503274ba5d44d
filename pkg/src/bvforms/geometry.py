"""Darboux coordinate changes, super-Jacobians and Berezinians.

A :class:`CoordinateChange` gives the primed coordinates as polynomials in
the unprimed ones.  Pulling back a form written in primed generators is
:func:`substitute`.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cohomology import MismatchAgainstTheorem, function_monomials
from .core import ContextMismatch, Gen, Kind, Monomial, SuperForm, mul, partial_left
from .core import substitute as substitute_generators
from .operators import bv_delta, canonical_rep, d, omega, top_form

__all__ = [
    "CoordinateChange",
    "SuperMatrix",
    "NonInvertibleD",
    "substitute",
    "is_symplectomorphism",
    "jacobian",
    "berezinian",
    "semidensity_factor",
    "verify_delta_invariance",
    "identity",
    "linear_symplectic",
    "point_transformation",
    "odd_shift",
    "hamiltonian_flow",
    "compose",
    "family_instances",
]


class NonInvertibleD(ValueError):
    pass


@dataclass(frozen=True)
class CoordinateChange:
    n: int
    xprime: tuple[SuperForm, ...]
    pprime: tuple[SuperForm, ...]
    tag: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "xprime", tuple(self.xprime))
        object.__setattr__(self, "pprime", tuple(self.pprime))
        if len(self.xprime) != self.n or len(self.pprime) != self.n:
            raise ContextMismatch(f"need {self.n} components for x' and p'")
        for i, (xs, ps) in enumerate(zip(self.xprime, self.pprime), start=1):
            for f, want, name in ((xs, 0, "x'"), (ps, 1, "p'")):
                if f.n != self.n:
                    raise ContextMismatch(f"{name}{i} lives over n={f.n}")
                if not f.is_function():
                    raise ValueError(f"{name}{i} must be a function of (x, p), got {f}")
                if f.parity() != want and f:
                    raise ValueError(f"{name}{i} = {f} has the wrong parity")

    def images(self) -> dict[Gen, SuperForm]:
        out: dict[Gen, SuperForm] = {}
        for i in range(1, self.n + 1):
            xs, ps = self.xprime[i - 1], self.pprime[i - 1]
            out[Gen(Kind.X, i)] = xs
            out[Gen(Kind.P, i)] = ps
            out[Gen(Kind.DX, i)] = d(xs)
            out[Gen(Kind.DP, i)] = d(ps)
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "xprime": [str(f) for f in self.xprime], "pprime": [str(f) for f in self.pprime]}

    @classmethod
    def from_json(cls, data: dict | str) -> CoordinateChange:
        from .expr import parse_form

        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        return cls(
            n,
            tuple(parse_form(s, n) for s in data["xprime"]),
            tuple(parse_form(s, n) for s in data["pprime"]),
        )


def substitute(f: SuperForm, c: CoordinateChange) -> SuperForm:
    """Pull back a form written in primed generators along ``c``."""
    if f.n != c.n:
        raise ContextMismatch(f"form over n={f.n}, change over n={c.n}")
    return substitute_generators(f, c.images())


def identity(n: int) -> CoordinateChange:
    return CoordinateChange(
        n,
        tuple(SuperForm.gen(n, Gen(Kind.X, i)) for i in range(1, n + 1)),
        tuple(SuperForm.gen(n, Gen(Kind.P, i)) for i in range(1, n + 1)),
        "identity",
    )


def compose(outer: CoordinateChange, inner: CoordinateChange) -> CoordinateChange:
    """Change whose primed coordinates are ``outer``'s, expressed via ``inner``."""
    if outer.n != inner.n:
        raise ContextMismatch("composing changes over different n")
    return CoordinateChange(
        outer.n,
        tuple(substitute(f, inner) for f in outer.xprime),
        tuple(substitute(f, inner) for f in outer.pprime),
        f"({outer.tag})o({inner.tag})",
    )


def is_symplectomorphism(c: CoordinateChange) -> tuple[bool, SuperForm]:
    """Whether ``c`` pulls ``omega`` back to ``omega``; returns the residual too."""
    residual = substitute(omega(c.n), c) - omega(c.n)
    return residual.is_zero(), residual


# -- matrices over the function algebra ------------------------------------


Matrix = list[list[SuperForm]]


def _mat_mul(a: Matrix, b: Matrix, n: int) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[SuperForm.zero(n) for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = SuperForm.zero(n)
            for k in range(inner):
                acc = acc + mul(a[i][k], b[k][j])
            out[i][j] = acc
    return out


def _perm_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inv & 1 else 1


def _det(a: Matrix, n: int) -> SuperForm:
    """Leibniz determinant; entries must be even (hence mutually commuting)."""
    k = len(a)
    out = SuperForm.zero(n)
    for perm in itertools.permutations(range(k)):
        term = SuperForm.const(n, _perm_sign(perm))
        for i, j in enumerate(perm):
            term = mul(term, a[i][j])
            if not term:
                break
        out = out + term
    return out


def _adjugate(a: Matrix, n: int) -> Matrix:
    k = len(a)
    if k == 1:
        return [[SuperForm.const(n, 1)]]
    adj = [[SuperForm.zero(n)] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            minor = [row[:j] + row[j + 1 :] for r, row in enumerate(a) if r != i]
            adj[j][i] = _det(minor, n).scale((-1) ** (i + j))
    return adj


def _inverse_scalar(u: SuperForm) -> SuperForm:
    """Inverse of ``c*(1 + nu)`` with ``c`` rational and ``nu`` nilpotent."""
    n = u.n
    c = u.scalar_part()
    if not c:
        raise NonInvertibleD(f"{u} has zero constant term")
    nu = u.scale(1 / c) - 1
    for m in nu.monomials():
        if not m.p_indices():
            raise NonInvertibleD(f"{u} is not a unit: {m.to_str()} is not nilpotent")
    inv = SuperForm.const(n, 1)
    power = SuperForm.const(n, 1)
    while True:
        power = mul(power, -nu)
        if not power:
            break
        inv = inv + power
    return inv.scale(1 / c)


@dataclass
class SuperMatrix:
    """Blocks ``A = dx'/dx, B = dx'/dp, C = dp'/dx, D = dp'/dp`` (row = primed)."""

    n: int
    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix


def jacobian(c: CoordinateChange, side: str = "left") -> SuperMatrix:
    """Super-Jacobian of ``c``.

    ``side`` selects left or right derivatives in ``p``; the two differ by a
    sign on the ``B`` block (``x'`` is even) and agree elsewhere.
    """
    n = c.n

    def der(f: SuperForm, g: Gen) -> SuperForm:
        left = partial_left(g, f)
        if side == "left" or g.kind != Kind.P:
            return left
        # right derivative of a homogeneous f: (-1)^{|f|+1} times the left one
        return left if f.parity() == 1 else -left

    def block(fs, kind):
        return [[der(f, Gen(kind, j)) for j in range(1, n + 1)] for f in fs]

    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    return SuperMatrix(n, block(c.xprime, Kind.X), block(c.xprime, Kind.P), block(c.pprime, Kind.X), block(c.pprime, Kind.P))


def berezinian(m: SuperMatrix) -> SuperForm:
    """``det(A - B D^-1 C) / det(D)``."""
    n = m.n
    det_d = _det(m.D, n)
    inv_det_d = _inverse_scalar(det_d)
    d_inv = [[mul(e, inv_det_d) for e in row] for row in _adjugate(m.D, n)]
    bdc = _mat_mul(_mat_mul(m.B, d_inv, n), m.C, n)
    schur = [[m.A[i][j] - bdc[i][j] for j in range(len(m.A))] for i in range(len(m.A))]
    return mul(_det(schur, n), inv_det_d)


def semidensity_factor(c: CoordinateChange) -> SuperForm:
    """Function ``r`` with ``[pullback of dx'^top] = [r * dx^top]``."""
    ok, residual = is_symplectomorphism(c)
    if not ok:
        raise ValueError(f"not a symplectomorphism; residual {residual}")
    return canonical_rep(substitute(top_form(c.n), c))


def verify_delta_invariance(c: CoordinateChange, max_degree: int = 3) -> list[tuple[SuperForm, SuperForm]]:
    """Transport-then-Delta equals Delta-then-transport on E1 classes.

    Returns the checked ``(f', Delta of transported f')`` pairs.
    """
    ok, residual = is_symplectomorphism(c)
    if not ok:
        raise ValueError(f"not a symplectomorphism; residual {residual}")
    n = c.n
    top = top_form(n)
    cases = []
    for total in range(max_degree + 1):
        for pdeg in range(min(n, total) + 1):
            for mono in function_monomials(n, total - pdeg, pdeg):
                fp = SuperForm.monomial(mono)
                moved = canonical_rep(substitute(fp * top, c))
                lhs = bv_delta(moved)
                rhs = canonical_rep(substitute(bv_delta(fp) * top, c))
                if lhs != rhs:
                    raise MismatchAgainstTheorem(
                        f"Delta does not commute with {c.tag} on f'={fp}: {lhs} vs {rhs}", fp
                    )
                cases.append((fp, lhs))
    return cases


# -- families --------------------------------------------------------------


def _invert_rational(a: list[list[Fraction]]) -> list[list[Fraction]]:
    k = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(a)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        s = aug[col][col]
        aug[col] = [v / s for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [u - f * v for u, v in zip(aug[r], aug[col])]
    return [row[k:] for row in aug]


def linear_symplectic(a: Sequence[Sequence]) -> CoordinateChange:
    """``x' = A x``, ``p' = A^{-T} p`` for an invertible rational matrix ``A``."""
    n = len(a)
    a = [[Fraction(v) for v in row] for row in a]
    ainv = _invert_rational(a)
    xs = [SuperForm.gen(n, Gen(Kind.X, j)) for j in range(1, n + 1)]
    ps = [SuperForm.gen(n, Gen(Kind.P, j)) for j in range(1, n + 1)]
    xprime = [sum((xs[j].scale(a[i][j]) for j in range(n)), SuperForm.zero(n)) for i in range(n)]
    pprime = [sum((ps[j].scale(ainv[j][i]) for j in range(n)), SuperForm.zero(n)) for i in range(n)]
    return CoordinateChange(n, tuple(xprime), tuple(pprime), "linear")


def point_transformation(shifts: Sequence[SuperForm]) -> CoordinateChange:
    """Cotangent lift of ``x'_i = x_i + g_i(x_1..x_{i-1})``.

    The Jacobian ``Dg`` is unipotent lower-triangular, so ``(Dg)^-1`` is
    polynomial and ``p'_i = sum_j p_j (Dg^-1)_{ji}``.
    """
    n = len(shifts)
    for i, g in enumerate(shifts):
        for m in g.monomials():
            if m.odd or any(m.dp) or any(m.x[i:]):
                raise ValueError(f"shift {i + 1} must depend only on x_1..x_{i}")
    xprime = [SuperForm.gen(n, Gen(Kind.X, i + 1)) + shifts[i] for i in range(n)]
    jac = [[partial_left(Gen(Kind.X, j + 1), xprime[i]) for j in range(n)] for i in range(n)]
    # unipotent: (I + N)^-1 = I - N + N^2 - ...
    ident = [[SuperForm.const(n, int(i == j)) for j in range(n)] for i in range(n)]
    nil = [[jac[i][j] - ident[i][j] for j in range(n)] for i in range(n)]
    inv, power = ident, ident
    for k in range(1, n):
        power = _mat_mul(power, nil, n)
        inv = [[inv[i][j] + power[i][j].scale((-1) ** k) for j in range(n)] for i in range(n)]
    ps = [SuperForm.gen(n, Gen(Kind.P, j)) for j in range(1, n + 1)]
    pprime = [sum((mul(ps[j], inv[j][i]) for j in range(n)), SuperForm.zero(n)) for i in range(n)]
    return CoordinateChange(n, tuple(xprime), tuple(pprime), "point")


def odd_shift(h: SuperForm) -> CoordinateChange:
    """``x'_i = x_i + dH/dp_i``, ``p' = p`` for an odd function ``H(p)``."""
    n = h.n
    for m in h.monomials():
        if any(m.x) or m.dx_indices() or any(m.dp):
            raise ValueError("H must be a function of p only")
    if h and h.parity() != 1:
        raise ValueError("H must be odd so that x' stays even")
    xprime = tuple(SuperForm.gen(n, Gen(Kind.X, i)) + partial_left(Gen(Kind.P, i), h) for i in range(1, n + 1))
    pprime = tuple(SuperForm.gen(n, Gen(Kind.P, i)) for i in range(1, n + 1))
    return CoordinateChange(n, xprime, pprime, "oddshift")


def hamiltonian_flow(h: SuperForm, max_order: int = 32) -> CoordinateChange:
    """Time-one flow of the even vector field of an odd Hamiltonian ``H(x, p)``.

    The field is ``sum_i dH/dp_i d/dx_i - dH/dx_i d/dp_i``; its exponential
    must terminate (nilpotent action on the coordinates).
    """
    n = h.n
    if not h.is_function() or (h and h.parity() != 1):
        raise ValueError("H must be an odd function of (x, p)")
    a = [partial_left(Gen(Kind.P, i), h) for i in range(1, n + 1)]
    b = [-partial_left(Gen(Kind.X, i), h) for i in range(1, n + 1)]

    def field(f: SuperForm) -> SuperForm:
        out = SuperForm.zero(n)
        for i in range(n):
            out = out + mul(a[i], partial_left(Gen(Kind.X, i + 1), f))
            out = out + mul(b[i], partial_left(Gen(Kind.P, i + 1), f))
        return out

    def exp_field(f: SuperForm) -> SuperForm:
        out, term = f, f
        for k in range(1, max_order + 1):
            term = field(term) / k
            if not term:
                return out
            out = out + term
        raise ValueError(f"flow of H = {h} does not terminate")

    return CoordinateChange(
        n,
        tuple(exp_field(SuperForm.gen(n, Gen(Kind.X, i))) for i in range(1, n + 1)),
        tuple(exp_field(SuperForm.gen(n, Gen(Kind.P, i))) for i in range(1, n + 1)),
        "flow",
    )


def _random_form(rng: random.Random, n: int, monos, lo=-3, hi=3) -> SuperForm:
    out = SuperForm.zero(n)
    for m in monos:
        c = rng.randint(lo, hi)
        if c:
            out = out + SuperForm.monomial(m, c)
    return out


def family_instances(n: int, seed: int = 0) -> list[CoordinateChange]:
    """Deterministic sample of each family plus pairwise composites."""
    rng = random.Random(seed)
    while True:
        a = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        try:
            _invert_rational(a)
            break
        except ValueError:
            continue
    lin = linear_symplectic(a)

    shifts = [SuperForm.zero(n)]
    for i in range(1, n):
        monos = [m for deg in (1, 2, 3) for m in function_monomials(n, deg, 0) if not any(m.x[i:])]
        shifts.append(_random_form(rng, n, monos))
    if n == 1:
        shifts = [SuperForm.const(n, rng.randint(1, 3))]
    point = point_transformation(shifts)

    odd_monos = [m for k in range(1, n + 1, 2) for m in function_monomials(n, 0, k)]
    h = _random_form(rng, n, odd_monos, 1, 3)
    shift = odd_shift(h)

    # odd Hamiltonians whose flows terminate; the quartic term makes Ber depend on p
    flow_monos = [Monomial.build(n, p=[1])]
    if n >= 2:
        flow_monos.append(Monomial.build(n, x={1: 2}, p=[2]))
    if n >= 3:
        flow_monos.append(Monomial.build(n, x={1: 1}, p=[1, 2, 3]))
    flow = hamiltonian_flow(_random_form(rng, n, flow_monos, 1, 3))

    base = [lin, point, shift, flow]
    composites = [compose(a_, b_) for a_, b_ in itertools.permutations(base, 2)]
    return base + composites
