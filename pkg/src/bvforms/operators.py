"""The two differentials, the homotopy ``L``, and what is built from them.

Conventions: ``d = sum_i dx_i * d/dx_i + dp_i * d/dp_i`` with left
derivatives and the form generator multiplied on the left;
``omega = sum_i dp_i * dx_i`` (stored as ``dx_i*dp_i``, coefficient +1);
``L = sum_i contract(x_i) contract(p_i)``.  With these choices
``L(omega^a) + omega^(L a) = (n - auxdeg a) a`` holds on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .core import (
    ContextMismatch,
    Gen,
    Kind,
    Monomial,
    SuperForm,
    contract,
    form_sum,
    mul,
    partial_left,
)

__all__ = [
    "ComponentAtTopAuxdeg",
    "NotExact",
    "NotClosed",
    "FormDegreeError",
    "HbarForm",
    "d",
    "omega",
    "omega_wedge",
    "homotopy_L",
    "invert_omega",
    "bv_delta",
    "canonical_rep",
    "reduce_class",
    "top_form",
    "hbar_d",
]


class ComponentAtTopAuxdeg(ValueError):
    """``omega^`` cannot be inverted on a component of auxdeg ``n``."""

    def __init__(self, component: SuperForm):
        self.component = component
        super().__init__(f"component of auxdeg {component.n} is not in the image of omega^: {component}")


class NotExact(ValueError):
    def __init__(self, residual: SuperForm):
        self.residual = residual
        super().__init__(f"form is not omega^-exact; residual {residual}")


class NotClosed(ValueError):
    def __init__(self, image: SuperForm):
        self.image = image
        super().__init__(f"form is not omega^-closed; omega^ gives {image}")


class FormDegreeError(ValueError):
    pass


def _insert_odd(m: Monomial, code: int) -> tuple[int, Monomial | None]:
    """Left-multiply a monomial by the odd generator with the given code."""
    if code in m.odd:
        return 0, None
    k = 0
    for c in m.odd:
        if c < code:
            k += 1
        else:
            break
    odd = m.odd[:k] + (code,) + m.odd[k:]
    return (-1 if k & 1 else 1), Monomial(m.x, m.dp, odd)


def d(f: SuperForm) -> SuperForm:
    """De Rham differential."""
    n = f.n
    out: dict[Monomial, Fraction] = {}

    def acc(m: Monomial, c: Fraction) -> None:
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            del out[m]

    for m, c in f.items():
        for i, e in enumerate(m.x):
            if not e:
                continue
            # dx_i * (d/dx_i m)
            sign, m2 = _insert_odd(Monomial(m.x[:i] + (e - 1,) + m.x[i + 1 :], m.dp, m.odd), n + i)
            if sign:
                acc(m2, sign * e * c)
        for pos, code in enumerate(m.odd):
            if code >= n:
                break
            # dp_i * (d/dp_i m); dp_i is even so only the derivative sign survives
            i = code
            odd = m.odd[:pos] + m.odd[pos + 1 :]
            dp = m.dp[:i] + (m.dp[i] + 1,) + m.dp[i + 1 :]
            acc(Monomial(m.x, dp, odd), -c if pos & 1 else c)
    return SuperForm._raw(n, out)


@lru_cache(maxsize=None)
def omega(n: int) -> SuperForm:
    """The odd symplectic form ``sum_i dp_i ^ dx_i``."""
    out = SuperForm.zero(n)
    for i in range(1, n + 1):
        out = out + mul(SuperForm.gen(n, Gen(Kind.DP, i)), SuperForm.gen(n, Gen(Kind.DX, i)))
    return out


def omega_wedge(f: SuperForm) -> SuperForm:
    return mul(omega(f.n), f)


@lru_cache(maxsize=None)
def top_form(n: int) -> SuperForm:
    """``dx_1 ^ ... ^ dx_n``."""
    return SuperForm.monomial(Monomial.build(n, dx=range(1, n + 1)))


def homotopy_L(f: SuperForm) -> SuperForm:
    return form_sum(
        (contract(Gen(Kind.X, i), contract(Gen(Kind.P, i), f)) for i in range(1, f.n + 1)), f.n
    )


def invert_omega(beta: SuperForm) -> SuperForm:
    """Return ``alpha`` with ``omega ^ alpha == beta``.

    Works one auxdeg component at a time, dividing ``L(beta_k)`` by
    ``n - k``.  Raises :class:`ComponentAtTopAuxdeg` when ``beta`` has an
    auxdeg-``n`` part and :class:`NotExact` when the result does not wedge
    back to ``beta``.
    """
    n = beta.n
    comps = beta.auxdeg_components()
    if n in comps:
        raise ComponentAtTopAuxdeg(comps[n])
    alpha = form_sum((homotopy_L(comp) / (n - k) for k, comp in comps.items()), n)
    residual = omega_wedge(alpha) - beta
    if residual:
        raise NotExact(residual)
    return alpha


def _require_function(f: SuperForm, what: str) -> None:
    if not f.is_function():
        raise FormDegreeError(f"{what} expects a function (form degree 0), got {f}")


def bv_delta(f: SuperForm) -> SuperForm:
    """``sum_k d/dx_k d/dp_k f`` with left derivatives, applied right to left."""
    _require_function(f, "bv_delta")
    out = SuperForm.zero(f.n)
    for k in range(1, f.n + 1):
        out = out + partial_left(Gen(Kind.X, k), partial_left(Gen(Kind.P, k), f))
    return out


def reduce_class(gamma: SuperForm) -> tuple[SuperForm, SuperForm]:
    """Split an ``omega^``-closed form as ``f * dx^top + omega ^ alpha``.

    Returns ``(f, alpha)``; ``f`` is a function.
    """
    n = gamma.n
    image = omega_wedge(gamma)
    if image:
        raise NotClosed(image)
    comps = gamma.auxdeg_components()
    top = comps.pop(n, SuperForm.zero(n))
    rest = form_sum(comps.values(), n)
    alpha = invert_omega(rest)
    # auxdeg n with at most n dx factors means exactly dx_1..dx_n and no dp;
    # in canonical order those dx's sit at the end, so peeling them is sign-free.
    f: dict[Monomial, Fraction] = {}
    for m, c in top.items():
        assert m.dx_indices() == tuple(range(1, n + 1)) and not any(m.dp)
        f[Monomial(m.x, m.dp, m.odd[: len(m.odd) - n])] = c
    return SuperForm(n, f), alpha


def canonical_rep(gamma: SuperForm) -> SuperForm:
    """Function ``f`` with ``[gamma] = [f * dx_1 ^ ... ^ dx_n]``."""
    return reduce_class(gamma)[0]


@dataclass(frozen=True)
class HbarForm:
    """``sum_j hbar^j * coeffs[j]`` with ``hbar`` even and central."""

    n: int
    coeffs: tuple[SuperForm, ...]

    def __init__(self, coeffs: Sequence[SuperForm] | SuperForm, n: int | None = None):
        if isinstance(coeffs, SuperForm):
            coeffs = [coeffs]
        coeffs = list(coeffs)
        if n is None:
            if not coeffs:
                raise ValueError("need n for an empty HbarForm")
            n = coeffs[0].n
        for c in coeffs:
            if c.n != n:
                raise ContextMismatch(f"coefficient over n={c.n} in HbarForm over n={n}")
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __getitem__(self, j: int) -> SuperForm:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return SuperForm.zero(self.n)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: HbarForm) -> HbarForm:
        k = max(len(self), len(other))
        return HbarForm([self[j] + other[j] for j in range(k)], self.n)

    def __neg__(self) -> HbarForm:
        return HbarForm([-c for c in self.coeffs], self.n)

    def __sub__(self, other: HbarForm) -> HbarForm:
        return self + (-other)

    def __mul__(self, other: HbarForm) -> HbarForm:
        if self.n != other.n:
            raise ContextMismatch(f"n={self.n} vs n={other.n}")
        out = [SuperForm.zero(self.n) for _ in range(max(len(self) + len(other) - 1, 0))]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + mul(a, b)
        return HbarForm(out, self.n)

    def scale(self, c) -> HbarForm:
        return HbarForm([a.scale(c) for a in self.coeffs], self.n)


def hbar_d(z: HbarForm) -> HbarForm:
    """``(hbar d + omega^) z``, level by level."""
    n = z.n
    out = []
    for j in range(len(z) + 1):
        term = omega_wedge(z[j])
        if j > 0:
            term = term + d(z[j - 1])
        out.append(term)
    return HbarForm(out, n)
