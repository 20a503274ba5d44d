import pytest

from bvforms.cohomology import MismatchAgainstTheorem, function_monomials
from bvforms.core import AlgebraContext, SuperForm
from bvforms.expr import parse
from bvforms.operators import bv_delta, hbar_d, top_form
from bvforms.spectral import (
    DeltaNotClosed,
    extend_cocycle,
    negative_control,
    third_differential,
    verify_d3_equals_delta,
)
from bvforms.suites import delta_closed_basis


def test_third_differential_examples():
    assert third_differential(parse("x1*p1")) == SuperForm.const(1, 1)
    assert third_differential(parse("x1^3 - 2*x1")).is_zero()
    assert third_differential(parse("x1^2*p1")) == parse("2*x1")
    assert third_differential(SuperForm.const(2, 1)).is_zero()


def test_third_differential_is_linear():
    f, g = parse("x1*p1*p2 + x2^2*p1*p2", 2), parse("x1*x2*p2 - 3/2*p1", 2)
    assert third_differential(f + g.scale(5)) == third_differential(f) + third_differential(g).scale(5)


@pytest.mark.parametrize("n,deg", [(1, 4), (2, 3), (3, 2)])
def test_verify_d3_equals_delta(n, deg):
    rep = verify_d3_equals_delta(AlgebraContext(n), max_degree=deg)
    assert len(rep.cases) == sum(len(function_monomials(n, a, b)) for a in range(deg + 1) for b in range(n + 1) if a + b <= deg)


def test_extend_cocycle_p1():
    ext = extend_cocycle(parse("p1"))
    assert ext.z.coeffs == (parse("p1*dx1"), SuperForm.const(1, -1))
    assert hbar_d(ext.z).is_zero()


def test_extend_cocycle_constant_needs_no_correction():
    ext = extend_cocycle(SuperForm.const(2, 7))
    assert ext.z.coeffs == (top_form(2).scale(7),)
    assert ext.steps == []


def test_extend_cocycle_p1p2():
    ext = extend_cocycle(parse("p1*p2", 2))
    assert ext.levels <= 3
    assert ext.replay()
    assert ext.z[0] == parse("p1*p2*dx1*dx2")


def test_extend_cocycle_json_replay():
    out = extend_cocycle(parse("p1*p2*p3", 3)).to_dict()
    assert out["replay"]["closed"] is True
    assert out["replay"]["hbar_d(z)"] == []


@pytest.mark.parametrize("n", [1, 2, 3])
def test_every_delta_closed_element_extends(n):
    for xdeg in range(3):
        for pdeg in range(n + 1):
            for f in delta_closed_basis(n, xdeg, pdeg):
                ext = extend_cocycle(f)
                assert ext.levels <= n + 1
                assert hbar_d(ext.z).is_zero()


def test_extend_cocycle_requires_closed():
    with pytest.raises(DeltaNotClosed):
        extend_cocycle(parse("x1*p1"))


def test_negative_control_examples():
    assert negative_control(parse("x1*p1")) == SuperForm.const(1, 1)
    assert negative_control(parse("x1^2*p1")) == parse("2*x1")
    with pytest.raises(DeltaNotClosed):
        negative_control(parse("p1"))


@pytest.mark.parametrize("n", [1, 2])
def test_obstruction_is_delta_everywhere(n):
    for xdeg in range(1, 4):
        for pdeg in range(1, n + 1):
            for m in function_monomials(n, xdeg, pdeg):
                f = SuperForm.monomial(m)
                if bv_delta(f):
                    assert negative_control(f) == bv_delta(f)


def test_constants_are_delta_exact_and_top_p_is_not():
    # the class surviving Delta-cohomology in the polynomial model is p1...pn
    assert bv_delta(parse("x1*p1", 2)) == SuperForm.const(2, 1)
    top_p = parse("p1*p2", 2)
    assert bv_delta(top_p).is_zero()
    preimage_slice = function_monomials(2, 1, 3)  # would need pdeg 3 > n
    assert preimage_slice == []


def test_broken_delta_is_detected(monkeypatch):
    import bvforms.spectral as sp

    monkeypatch.setattr(sp, "bv_delta", lambda f: f.scale(2))
    with pytest.raises(MismatchAgainstTheorem):
        sp.verify_d3_equals_delta(AlgebraContext(1), max_degree=2)
