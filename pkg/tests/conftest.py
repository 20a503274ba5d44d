from __future__ import annotations

from fractions import Fraction

import pytest

from bvforms.core import Gen, Kind, SuperForm
from bvforms.expr import parse


def word_form(n: int, word: list[Gen], coeff=1) -> SuperForm:
    """Oracle: normalize a product of generators by adjacent swaps.

    Independent of the library's inversion counting: bubble-sorts the word
    into canonical order, flipping the sign whenever two odd generators
    pass each other, and returns zero on a repeated odd generator.
    """
    order = {Kind.X: 0, Kind.P: 1, Kind.DX: 2, Kind.DP: 3}
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            a, b = w[j], w[j + 1]
            if (order[a.kind], a.index) > (order[b.kind], b.index):
                w[j], w[j + 1] = b, a
                if a.kind.odd and b.kind.odd:
                    sign = -sign
    for a, b in zip(w, w[1:]):
        if a == b and a.kind.odd:
            return SuperForm.zero(n)
    x, dp, p, dx = {}, {}, [], []
    for g in w:
        if g.kind == Kind.X:
            x[g.index] = x.get(g.index, 0) + 1
        elif g.kind == Kind.DP:
            dp[g.index] = dp.get(g.index, 0) + 1
        elif g.kind == Kind.P:
            p.append(g.index)
        else:
            dx.append(g.index)
    from bvforms.core import Monomial

    return SuperForm.monomial(Monomial.build(n, x=x, p=p, dx=dx, dp=dp), Fraction(coeff) * sign)


def all_gens(n: int) -> list[Gen]:
    return [Gen(k, i) for k in Kind for i in range(1, n + 1)]


@pytest.fixture
def P():
    return parse
