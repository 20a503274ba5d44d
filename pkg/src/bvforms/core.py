"""Graded-commutative polynomial algebra on a Darboux patch.

Generators for ``n`` Darboux pairs::

    x_i   even   (coordinate)
    p_i   odd    (coordinate)
    dx_i  odd    (form generator)
    dp_i  even   (form generator)

Parity is total parity, i.e. function parity plus form degree mod 2.

A :class:`Monomial` stores exponents of the even generators and the sorted
occupancy of the odd generators.  Odd generators are encoded as integers,
``p_i -> i - 1`` and ``dx_i -> n + i - 1``, so the canonical order is all
``p`` before all ``dx``, each by index.  The monomial denotes the ordered
product ``x^a * p_S * dx_T * dp^b``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

__all__ = [
    "Kind",
    "Gen",
    "Monomial",
    "MultiDegree",
    "SuperForm",
    "AlgebraContext",
    "ContextMismatch",
    "mul",
    "partial_left",
    "contract",
    "substitute",
    "degrees",
    "as_scalar",
    "form_sum",
]

Scalar = Fraction
ScalarLike = Union[int, Fraction, str]


class ContextMismatch(ValueError):
    """Two operands live over different numbers of Darboux pairs."""


def as_scalar(c: ScalarLike) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class Kind(enum.IntEnum):
    X = 0
    P = 1
    DX = 2
    DP = 3

    @property
    def odd(self) -> bool:
        return self in (Kind.P, Kind.DX)

    @property
    def prefix(self) -> str:
        return ("x", "p", "dx", "dp")[self]


@dataclass(frozen=True, order=True)
class Gen:
    kind: Kind
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"generator index must be >= 1, got {self.index}")

    @property
    def parity(self) -> int:
        return int(self.kind.odd)

    @property
    def auxdeg(self) -> int:
        return {Kind.DX: 1, Kind.DP: -1}.get(self.kind, 0)

    def __str__(self) -> str:
        return f"{self.kind.prefix}{self.index}"


class MultiDegree(NamedTuple):
    xdeg: int
    pdeg: int
    dxcount: int
    dpcount: int

    @property
    def auxdeg(self) -> int:
        return self.dxcount - self.dpcount

    @property
    def formdeg(self) -> int:
        return self.dxcount + self.dpcount

    @property
    def parity(self) -> int:
        return (self.pdeg + self.dxcount) % 2

    @property
    def total(self) -> int:
        return self.xdeg + self.pdeg + self.dxcount + self.dpcount


class Monomial(NamedTuple):
    x: tuple[int, ...]
    dp: tuple[int, ...]
    odd: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def one(cls, n: int) -> Monomial:
        return _unit(n)

    @classmethod
    def build(
        cls,
        n: int,
        x: Mapping[int, int] | None = None,
        p: Iterable[int] = (),
        dx: Iterable[int] = (),
        dp: Mapping[int, int] | None = None,
    ) -> Monomial:
        """Canonical monomial from 1-based index data (already in canonical order)."""
        xs = [0] * n
        for i, e in (x or {}).items():
            xs[i - 1] = e
        dps = [0] * n
        for i, e in (dp or {}).items():
            dps[i - 1] = e
        odd = tuple(sorted([i - 1 for i in p] + [n + i - 1 for i in dx]))
        if len(set(odd)) != len(odd):
            raise ValueError("repeated odd generator")
        return cls(tuple(xs), tuple(dps), odd)

    def p_indices(self) -> tuple[int, ...]:
        n = self.n
        return tuple(c + 1 for c in self.odd if c < n)

    def dx_indices(self) -> tuple[int, ...]:
        n = self.n
        return tuple(c - n + 1 for c in self.odd if c >= n)

    def degrees(self) -> MultiDegree:
        n = self.n
        ndx = sum(1 for c in self.odd if c >= n)
        return MultiDegree(sum(self.x), len(self.odd) - ndx, ndx, sum(self.dp))

    def factors(self) -> list[tuple[Gen, int]]:
        """Generators with exponents, in the canonical product order."""
        out: list[tuple[Gen, int]] = []
        out += [(Gen(Kind.X, i + 1), e) for i, e in enumerate(self.x) if e]
        out += [(Gen(Kind.P, i), 1) for i in self.p_indices()]
        out += [(Gen(Kind.DX, i), 1) for i in self.dx_indices()]
        out += [(Gen(Kind.DP, i + 1), e) for i, e in enumerate(self.dp) if e]
        return out

    def to_str(self) -> str:
        parts = []
        for g, e in self.factors():
            parts.append(str(g) if e == 1 else f"{g}^{e}")
        return "*".join(parts) if parts else "1"


@lru_cache(maxsize=None)
def _unit(n: int) -> Monomial:
    return Monomial((0,) * n, (0,) * n, ())


def degrees(m: Monomial) -> MultiDegree:
    return m.degrees()


@lru_cache(maxsize=1 << 18)
def _mono_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
    """Sign and canonical product of two monomials (sign 0 if it vanishes)."""
    oa, ob = a.odd, b.odd
    if oa and ob:
        if not set(oa).isdisjoint(ob):
            return 0, None
        inversions = 0
        for v in ob:
            for u in oa:
                if u > v:
                    inversions += 1
        odd = tuple(sorted(oa + ob))
        sign = -1 if inversions & 1 else 1
    else:
        odd = oa or ob
        sign = 1
    x = tuple(i + j for i, j in zip(a.x, b.x))
    dp = tuple(i + j for i, j in zip(a.dp, b.dp))
    return sign, Monomial(x, dp, odd)


def _odd_code(n: int, g: Gen) -> int:
    return g.index - 1 if g.kind == Kind.P else n + g.index - 1


class SuperForm:
    """Exact rational combination of canonical monomials over ``n`` pairs.

    Values are immutable; arithmetic returns new forms.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, ScalarLike] | None = None):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = n
        clean: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            if len(m.x) != n:
                raise ContextMismatch(f"monomial over n={len(m.x)} in form over n={n}")
            c = as_scalar(c)
            if c:
                clean[m] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Monomial, Fraction]) -> SuperForm:
        # trusted constructor: terms already canonical and nonzero
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n: int) -> SuperForm:
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c: ScalarLike = 1) -> SuperForm:
        return cls(n, {_unit(n): c})

    @classmethod
    def monomial(cls, m: Monomial, c: ScalarLike = 1) -> SuperForm:
        return cls(m.n, {m: c})

    @classmethod
    def gen(cls, n: int, g: Gen) -> SuperForm:
        if g.index > n:
            raise ValueError(f"generator {g} out of range for n={n}")
        if g.kind == Kind.X:
            m = Monomial.build(n, x={g.index: 1})
        elif g.kind == Kind.DP:
            m = Monomial.build(n, dp={g.index: 1})
        elif g.kind == Kind.P:
            m = Monomial.build(n, p=[g.index])
        else:
            m = Monomial.build(n, dx=[g.index])
        return cls._raw(n, {m: Fraction(1)})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def monomials(self) -> list[Monomial]:
        return list(self._terms)

    def coeff(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_function(self) -> bool:
        """True when no dx or dp generator occurs (form degree 0)."""
        return all(m.degrees().formdeg == 0 for m in self._terms)

    def scalar_part(self) -> Fraction:
        return self._terms.get(_unit(self.n), Fraction(0))

    def parity(self) -> int | None:
        """Total parity, or None for an inhomogeneous form (0 counts as even)."""
        ps = {m.degrees().parity for m in self._terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def components(self, key=lambda d: d.auxdeg) -> dict[int, SuperForm]:
        """Split into homogeneous pieces by a function of the MultiDegree."""
        buckets: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            buckets.setdefault(key(m.degrees()), {})[m] = c
        return {k: SuperForm._raw(self.n, v) for k, v in buckets.items()}

    def auxdeg_components(self) -> dict[int, SuperForm]:
        return self.components(lambda d: d.auxdeg)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: SuperForm) -> None:
        if other.n != self.n:
            raise ContextMismatch(f"n={self.n} vs n={other.n}")

    def _coerce(self, other) -> SuperForm:
        if isinstance(other, SuperForm):
            self._check(other)
            return other
        return SuperForm.const(self.n, as_scalar(other))

    def __add__(self, other) -> SuperForm:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        _accumulate(out, other._terms)
        return SuperForm._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> SuperForm:
        return SuperForm._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> SuperForm:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> SuperForm:
        return (-self) + other

    def scale(self, c: ScalarLike) -> SuperForm:
        c = as_scalar(c)
        if not c:
            return SuperForm.zero(self.n)
        return SuperForm._raw(self.n, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other) -> SuperForm:
        if isinstance(other, SuperForm):
            return mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other) -> SuperForm:
        # scalars are even and central
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, c: ScalarLike) -> SuperForm:
        return self.scale(1 / as_scalar(c))

    def __pow__(self, k: int) -> SuperForm:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = SuperForm.const(self.n, 1)
        for _ in range(k):
            out = mul(out, self)
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperForm):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == SuperForm.const(self.n, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def sorted_items(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda mc: monomial_sort_key(mc[0]))

    def __str__(self) -> str:
        from .expr import format_form

        return format_form(self)

    def __repr__(self) -> str:
        return f"SuperForm(n={self.n}, {str(self)!r})"


def _accumulate(out: dict[Monomial, Fraction], terms: Mapping[Monomial, Fraction], scale: int = 1) -> None:
    for m, c in terms.items():
        v = out.get(m, 0) + (c if scale == 1 else scale * c)
        if v:
            out[m] = v
        else:
            del out[m]


def form_sum(forms: Iterable[SuperForm], n: int) -> SuperForm:
    out: dict[Monomial, Fraction] = {}
    for f in forms:
        if f.n != n:
            raise ContextMismatch(f"n={f.n} vs n={n}")
        _accumulate(out, f._terms)
    return SuperForm._raw(n, out)


def monomial_sort_key(m: Monomial) -> tuple:
    """Deterministic print order: by form degree, then total degree, then layout."""
    d = m.degrees()
    return (d.formdeg, d.total, d.dxcount, tuple(-e for e in m.x), m.odd, tuple(-e for e in m.dp))


def mul(a: SuperForm, b: SuperForm) -> SuperForm:
    """Graded-commutative product with Koszul signs."""
    if a.n != b.n:
        raise ContextMismatch(f"n={a.n} vs n={b.n}")
    out: dict[Monomial, Fraction] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            sign, m = _mono_mul(ma, mb)
            if not sign:
                continue
            c = out.get(m, 0) + (ca * cb if sign > 0 else -(ca * cb))
            if c:
                out[m] = c
            else:
                del out[m]
    return SuperForm._raw(a.n, out)


def _partial_mono(m: Monomial, g: Gen) -> tuple[int, Monomial | None]:
    n = m.n
    k = g.index - 1
    if g.kind == Kind.X:
        e = m.x[k]
        if not e:
            return 0, None
        x = m.x[:k] + (e - 1,) + m.x[k + 1 :]
        return e, Monomial(x, m.dp, m.odd)
    if g.kind == Kind.DP:
        e = m.dp[k]
        if not e:
            return 0, None
        dp = m.dp[:k] + (e - 1,) + m.dp[k + 1 :]
        return e, Monomial(m.x, dp, m.odd)
    code = _odd_code(n, g)
    try:
        pos = m.odd.index(code)
    except ValueError:
        return 0, None
    # left derivative: bring the generator to the front first
    sign = -1 if pos & 1 else 1
    return sign, Monomial(m.x, m.dp, m.odd[:pos] + m.odd[pos + 1 :])


def partial_left(g: Gen, f: SuperForm) -> SuperForm:
    """Left partial derivative with respect to any generator."""
    if g.index > f.n:
        raise ValueError(f"generator {g} out of range for n={f.n}")
    out: dict[Monomial, Fraction] = {}
    for m, c in f._terms.items():
        k, m2 = _partial_mono(m, g)
        if k:
            # distinct monomials stay distinct after removing the same generator
            out[m2] = k * c
    return SuperForm._raw(f.n, out)


def contract(g: Gen, f: SuperForm) -> SuperForm:
    """Interior product with the coordinate vector field of ``x_i`` or ``p_i``.

    ``contract(X_i)`` is the (odd) left derivative in ``dx_i``;
    ``contract(P_i)`` is the (even) derivative in ``dp_i``.
    """
    if g.kind == Kind.X:
        return partial_left(Gen(Kind.DX, g.index), f)
    if g.kind == Kind.P:
        return partial_left(Gen(Kind.DP, g.index), f)
    raise ValueError(f"contraction is defined for x/p vector fields, not {g}")


def substitute(f: SuperForm, images: Mapping[Gen, SuperForm]) -> SuperForm:
    """Algebra homomorphism sending each generator to the given image.

    Generators missing from ``images`` map to themselves.  Images must be
    parity-homogeneous with the generator's parity; the target context is
    taken from the images.
    """
    target_n = None
    for g, img in images.items():
        target_n = img.n if target_n is None else target_n
        if img.n != target_n:
            raise ContextMismatch("images over different contexts")
        par = img.parity()
        if img and par is not None and par != g.parity:
            raise ValueError(f"image of {g} has wrong parity")
        if par is None:
            raise ValueError(f"image of {g} is not parity-homogeneous")
    if target_n is None:
        target_n = f.n

    power_cache: dict[tuple[Gen, int], SuperForm] = {}

    def image(g: Gen) -> SuperForm:
        if g in images:
            return images[g]
        if target_n != f.n:
            raise ContextMismatch(f"no image for {g}")
        return SuperForm.gen(f.n, g)

    def power(g: Gen, e: int) -> SuperForm:
        key = (g, e)
        if key not in power_cache:
            power_cache[key] = image(g) if e == 1 else mul(power(g, e - 1), image(g))
        return power_cache[key]

    out: dict[Monomial, Fraction] = {}
    for m, c in f._terms.items():
        term = SuperForm.const(target_n, c)
        for g, e in m.factors():
            term = mul(term, power(g, e))
            if not term:
                break
        _accumulate(out, term._terms)
    return SuperForm._raw(target_n, out)


class AlgebraContext:
    """Generator factory for ``n`` Darboux pairs, plus enumeration caps."""

    def __init__(self, n: int, max_xdeg: int = 3, max_pdeg: int | None = None):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if max_xdeg < 0 or (max_pdeg is not None and max_pdeg < 0):
            raise ValueError("caps must be non-negative")
        self.n = n
        self.max_xdeg = max_xdeg
        self.max_pdeg = n if max_pdeg is None else min(max_pdeg, n)

    def __repr__(self) -> str:
        return f"AlgebraContext(n={self.n}, max_xdeg={self.max_xdeg}, max_pdeg={self.max_pdeg})"

    @property
    def zero(self) -> SuperForm:
        return SuperForm.zero(self.n)

    @property
    def one(self) -> SuperForm:
        return SuperForm.const(self.n, 1)

    def const(self, c: ScalarLike) -> SuperForm:
        return SuperForm.const(self.n, c)

    def x(self, i: int) -> SuperForm:
        return SuperForm.gen(self.n, Gen(Kind.X, i))

    def p(self, i: int) -> SuperForm:
        return SuperForm.gen(self.n, Gen(Kind.P, i))

    def dx(self, i: int) -> SuperForm:
        return SuperForm.gen(self.n, Gen(Kind.DX, i))

    def dp(self, i: int) -> SuperForm:
        return SuperForm.gen(self.n, Gen(Kind.DP, i))

    def generators(self) -> list[Gen]:
        return [Gen(k, i) for k in Kind for i in range(1, self.n + 1)]
