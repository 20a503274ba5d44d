import random
from fractions import Fraction
from math import comb

import pytest
import sympy

from bvforms.cohomology import (
    MismatchAgainstTheorem,
    OperatorLeavesSlice,
    Slice,
    SparseMatrix,
    enumerate_basis,
    manin_fiber_check,
    operator_matrix,
    rank_kernel,
    slice_cohomology,
    verify_d1_zero,
    verify_e1,
)
from bvforms.core import AlgebraContext, SuperForm
from bvforms.expr import parse
from bvforms.operators import d, homotopy_L, omega, omega_wedge, top_form


def basis_strs(s):
    return [m.to_str() for m in enumerate_basis(s)]


def test_enumerate_basis_examples():
    assert basis_strs(Slice(1, 0, 0, 1)) == ["dx1"]
    assert basis_strs(Slice(1, 0, 0, 0)) == ["1", "dx1*dp1"]
    assert basis_strs(Slice(2, 0, 0, 2)) == ["dx1*dx2"]


def test_enumerate_basis_is_complete_and_deterministic():
    s = Slice(2, 1, 1, 0)
    b = enumerate_basis(s)
    assert b == enumerate_basis(s)
    assert len(set(b)) == len(b)
    # dp-count m in {0,1,2}: dx-count = m
    expected = sum(2 * 2 * comb(2, m) * comb(m + 1, 1) for m in range(3))
    assert len(b) == expected
    for m in b:
        md = m.degrees()
        assert (md.xdeg, md.pdeg, md.auxdeg) == (1, 1, 0)


def test_operator_matrix_examples():
    s = Slice(1, 0, 0, 0)
    mat = operator_matrix("omega", s.basis_at(0), s.basis_at(1))
    assert mat.dense() == [[1]]
    zero = operator_matrix(lambda f: SuperForm.zero(f.n), s, s)
    assert zero.entries == {}
    top = Slice(2, 1, 1, 2)
    cod = [Slice(2, 1, 0, 1), Slice(2, 0, 1, 3)]
    mat = operator_matrix("d", top, cod)
    assert mat.nrows == len(enumerate_basis(cod[0])) and mat.ncols == len(enumerate_basis(top))
    with pytest.raises(OperatorLeavesSlice):
        operator_matrix("d", top, [Slice(2, 1, 1, 2)])


def test_rank_kernel_examples():
    ident = SparseMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert rank_kernel(ident) == (3, [])
    r, ker = rank_kernel(SparseMatrix(2, 3))
    assert r == 0 and len(ker) == 3
    r, ker = rank_kernel(SparseMatrix.from_rows([[1, 2], [2, 4]]))
    assert r == 1 and len(ker) == 1
    v = ker[0]
    assert v[0] * -1 == 2 * v[1]  # proportional to (2, -1)


@pytest.mark.parametrize("seed", range(20))
def test_rank_kernel_against_sympy(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 6), rng.randint(1, 6)
    data = [[Fraction(rng.choice([0, 0, 1, -2, 3]), rng.randint(1, 3)) for _ in range(cols)] for _ in range(rows)]
    r, ker = rank_kernel(SparseMatrix.from_rows(data))
    sm = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in data])
    assert r == sm.rank()
    assert len(ker) == cols - r
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in data)


def test_slice_exactness_rank_sums():
    for aux in range(-3, 2):
        sc = slice_cohomology(Slice(2, 1, 1, aux))
        assert sc.H == 0
        for m in Slice(2, 1, 1, aux).dp_counts():
            assert sc.ranks[m] + sc.ranks.get(m - 1, 0) == sc.sizes[m]


def test_verify_e1_n1():
    rep = verify_e1(AlgebraContext(1, max_xdeg=2))
    for (xdeg, pdeg, aux), sc in rep.by_slice().items():
        assert sc.H == (1 if aux == 1 else 0)


def test_verify_e1_n2_example():
    rep = verify_e1(AlgebraContext(2, max_xdeg=0))
    sc = rep.by_slice()[(0, 2, 2)]
    assert sc.H == 1
    assert [str(w) for w in sc.witnesses] == ["p1*p2*dx1*dx2"]


def test_verify_e1_json_shape():
    rep = verify_e1(AlgebraContext(1, max_xdeg=0))
    d0 = rep.to_dict()["slices"][0]
    assert set(d0) == {"slice", "dims", "witnesses"}
    assert set(d0["dims"]) == {"ker", "im", "H"}


def test_verify_d1_zero_examples():
    rep = verify_d1_zero(AlgebraContext(1, max_xdeg=1))
    certs = {str(c.f): c for c in rep.certificates}
    assert certs["p1"].beta == omega(1) and certs["p1"].alpha == SuperForm.const(1, 1)
    assert certs["x1"].beta.is_zero()
    c = certs["x1*p1"]
    assert c.alpha == homotopy_L(d(parse("x1*p1") * top_form(1)))
    for c in rep.certificates:
        assert omega_wedge(c.alpha) == c.beta


@pytest.mark.parametrize("n", [1, 2, 3])
def test_manin_fiber(n):
    rep = manin_fiber_check(AlgebraContext(n))
    for sc in rep.slices:
        if sc.slice.auxdeg == n:
            assert sc.H == 1 and sc.witnesses == [top_form(n)]
        else:
            assert sc.H == 0
    assert rep.by_slice()[(0, 0, 0)].H == 0


def test_mismatch_is_raised_on_wrong_expectation(monkeypatch):
    import bvforms.cohomology as coh

    monkeypatch.setattr(coh, "comb", lambda a, b: 99)
    with pytest.raises(MismatchAgainstTheorem):
        verify_e1(AlgebraContext(1, max_xdeg=0))
