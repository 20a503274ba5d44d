"""Acceptance criteria, each checked by exact equality.

Run ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``
to see one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import random
import sys
import traceback

import pytest

from bvforms.cohomology import function_monomials, manin_fiber_check, monomials_up_to, verify_d1_zero, verify_e1
from bvforms.core import AlgebraContext, SuperForm, mul
from bvforms.expr import ParseError, format_form, parse
from bvforms.geometry import berezinian, family_instances, is_symplectomorphism, jacobian, semidensity_factor, verify_delta_invariance
from bvforms.operators import bv_delta, canonical_rep, d, hbar_d, homotopy_L, omega_wedge, top_form
from bvforms.spectral import extend_cocycle, negative_control, third_differential
from bvforms.suites import MALFORMED, delta_closed_basis, random_form


def report(number: int, title: str):
    def wrap(fn):
        def run():
            try:
                detail = fn()
            except BaseException:
                print(f"criterion {number:2d} FAIL  {title}")
                raise
            print(f"criterion {number:2d} PASS  {title}  [{detail}]")

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


@report(1, "bicomplex laws, n <= 3, total degree <= 5")
def test_bicomplex_laws():
    cases = 0
    for n in (1, 2, 3):
        for m in monomials_up_to(n, 5):
            a = SuperForm.monomial(m)
            assert d(d(a)).is_zero(), a
            assert omega_wedge(omega_wedge(a)).is_zero(), a
            assert (d(omega_wedge(a)) + omega_wedge(d(a))).is_zero(), a
            cases += 1
    return f"{cases} monomials"


@report(2, "homotopy identity, n <= 3, total degree <= 5")
def test_homotopy_identity():
    cases = 0
    for n in (1, 2, 3):
        for m in monomials_up_to(n, 5):
            a = SuperForm.monomial(m)
            lhs = homotopy_L(omega_wedge(a)) + omega_wedge(homotopy_L(a))
            assert lhs == a.scale(n - m.degrees().auxdeg), a
            cases += 1
    return f"{cases} monomials"


@report(3, "H(omega^) is f*dx^top at auxdeg n and zero elsewhere, n <= 2, xdeg <= 3")
def test_e1_page():
    slices = 0
    for n in (1, 2):
        rep = verify_e1(AlgebraContext(n, max_xdeg=3))
        for sc in rep.slices:
            s = sc.slice
            expected = len(function_monomials(n, s.xdeg, s.pdeg)) if s.auxdeg == n else 0
            assert sc.H == expected, s
            if s.auxdeg == n:
                for w in sc.witnesses:
                    assert all(m.dx_indices() == tuple(range(1, n + 1)) and not any(m.dp) for m in w.monomials())
            slices += 1
        assert {sc.slice.pdeg for sc in rep.slices} == set(range(n + 1))
    return f"{slices} slices"


@report(4, "d(f*dx^top) is omega^-exact with explicit certificates")
def test_d1_vanishes():
    certs = 0
    for n in (1, 2, 3):
        for cert in verify_d1_zero(AlgebraContext(n, max_xdeg=3)).certificates:
            assert omega_wedge(cert.alpha) == cert.beta == d(cert.f * top_form(n))
            certs += 1
    return f"{certs} certificates"


@report(5, "third differential equals Delta and Delta^2 = 0, n <= 3, degree <= 4")
def test_third_differential_is_delta():
    cases = 0
    for n in (1, 2, 3):
        for m in monomials_up_to(n, 4, functions_only=True):
            f = SuperForm.monomial(m)
            assert third_differential(f) == bv_delta(f), f
            assert bv_delta(bv_delta(f)).is_zero(), f
            cases += 1
    return f"{cases} function monomials"


@report(6, "Delta-closed f extend to total cocycles; obstruction residue is Delta f otherwise")
def test_degeneration():
    closed = obstructed = 0
    for n, xmax in ((1, 3), (2, 3), (3, 2)):
        for xdeg in range(xmax + 1):
            for pdeg in range(n + 1):
                for f in delta_closed_basis(n, xdeg, pdeg):
                    ext = extend_cocycle(f)
                    assert hbar_d(ext.z).is_zero() and ext.levels <= n + 1, f
                    closed += 1
                for m in function_monomials(n, xdeg, pdeg):
                    f = SuperForm.monomial(m)
                    if bv_delta(f):
                        assert negative_control(f) == bv_delta(f), f
                        obstructed += 1
    return f"{closed} closed, {obstructed} obstructed"


def _families():
    for n in (1, 2):
        for seed in (0, 1):
            yield n, family_instances(n, seed)


@report(7, "r^2 = Ber(J) for the families and pairwise composites, n <= 2")
def test_semidensity_law():
    cases = 0
    tags = set()
    for n, changes in _families():
        for c in changes:
            assert is_symplectomorphism(c)[0], c.tag
            r = semidensity_factor(c)
            assert mul(r, r) == berezinian(jacobian(c)), c.tag
            tags.add(c.tag)
            cases += 1
    assert {"linear", "point", "oddshift", "(linear)o(point)", "(point)o(oddshift)"} <= tags
    return f"{cases} changes"


@report(8, "Delta commutes with symplectic changes, all f of degree <= 3, n <= 2")
def test_delta_invariance():
    cases = 0
    for n, changes in _families():
        for c in changes:
            cases += len(verify_delta_invariance(c, 3))
    return f"{cases} (change, f) pairs"


@report(9, "constant-coefficient H(omega^) is one-dimensional at auxdeg n, n <= 3")
def test_manin_fiber():
    for n in (1, 2, 3):
        rep = manin_fiber_check(AlgebraContext(n, max_xdeg=0))
        dims = {sc.slice.auxdeg: sc.H for sc in rep.slices}
        assert dims[n] == 1 and sum(dims.values()) == 1
        top = [sc for sc in rep.slices if sc.slice.auxdeg == n][0]
        assert canonical_rep(top.witnesses[0]).is_function()
    return "n = 1, 2, 3"


@report(10, "parser round trip on 1000 forms and positioned errors")
def test_parser():
    rng = random.Random(10)
    for i in range(1000):
        n = 1 + i % 3
        f = random_form(rng, n, 5, terms=rng.randint(0, 6))
        text = format_form(f)
        assert parse(text, n) == f and format_form(parse(text, n)) == text, text
    for bad in MALFORMED + ["x3"]:
        with pytest.raises(ParseError) as info:
            parse(bad, 2)
        assert 0 <= info.value.position <= len(bad), bad
    return f"1000 round trips, {len(MALFORMED) + 1} malformed inputs"


CRITERIA = [
    test_bicomplex_laws,
    test_homotopy_identity,
    test_e1_page,
    test_d1_vanishes,
    test_third_differential_is_delta,
    test_degeneration,
    test_semidensity_law,
    test_delta_invariance,
    test_manin_fiber,
    test_parser,
]


if __name__ == "__main__":
    failed = 0
    for crit in CRITERIA:
        try:
            crit()
        except Exception:
            failed += 1
            traceback.print_exc(limit=2)
    sys.exit(1 if failed else 0)
