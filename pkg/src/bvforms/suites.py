"""Named verification suites and their reports."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .cohomology import (
    MismatchAgainstTheorem,
    function_monomials,
    manin_fiber_check,
    monomials_up_to,
    operator_matrix,
    rank_kernel,
    verify_d1_zero,
    verify_e1,
)
from .core import AlgebraContext, Monomial, SuperForm, mul
from .expr import ParseError, format_form, format_hbar, parse
from .geometry import berezinian, family_instances, jacobian, semidensity_factor, verify_delta_invariance
from .operators import HbarForm, bv_delta, d, hbar_d, homotopy_L, omega_wedge
from .spectral import extend_cocycle, negative_control, verify_d3_equals_delta

__all__ = ["CheckResult", "CheckReport", "SUITES", "run_suite", "delta_closed_basis", "random_form"]

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    counterexamples: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "cases": self.cases,
            "counterexamples": self.counterexamples,
        }


@dataclass
class CheckReport:
    suite: str
    params: dict
    checks: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "params": self.params,
            "status": "pass" if self.passed else "fail",
            "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)],
        }
        if timing:
            out["timing"] = {"seconds": round(self.elapsed, 3)}
        return out

    def to_text(self) -> str:
        p = self.params
        lines = [f"suite {self.suite} (n={p['n']}, max_xdeg={p['max_xdeg']}, seed={p['seed']})"]
        for c in sorted(self.checks, key=lambda c: c.name):
            lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}  [{c.cases} cases]")
            for ce in c.counterexamples[:5]:
                lines.append(f"        counterexample: {ce}")
        lines.append(f"{'PASS' if self.passed else 'FAIL'} in {self.elapsed:.2f}s")
        return "\n".join(lines)


class _Check:
    """Collects pass/fail per case for one named check."""

    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.bad: list[str] = []

    def record(self, ok: bool, label: Callable[[], str] | str = "") -> None:
        self.cases += 1
        if not ok:
            self.bad.append(label() if callable(label) else label)

    def result(self) -> CheckResult:
        return CheckResult(self.name, not self.bad, self.cases, self.bad)


def _forms(monos: list[Monomial]) -> list[SuperForm]:
    return [SuperForm.monomial(m) for m in monos]


def random_form(rng: random.Random, n: int, max_total: int, terms: int = 4) -> SuperForm:
    pool = monomials_up_to(n, max_total)
    out = SuperForm.zero(n)
    for m in rng.sample(pool, min(terms, len(pool))):
        num = rng.randint(-9, 9)
        den = rng.randint(1, 4)
        out = out + SuperForm.monomial(m, f"{num}/{den}")
    return out


def delta_closed_basis(n: int, xdeg: int, pdeg: int) -> list[SuperForm]:
    """Kernel basis of Delta on the function slice of bidegree (xdeg, pdeg)."""
    dom = function_monomials(n, xdeg, pdeg)
    if xdeg == 0 or pdeg == 0:
        return _forms(dom)
    cod = function_monomials(n, xdeg - 1, pdeg - 1)
    _, ker = rank_kernel(operator_matrix(bv_delta, dom, cod))
    return [SuperForm(n, {m: c for m, c in zip(dom, v) if c}) for v in ker]


# -- suites ----------------------------------------------------------------


def _bicomplex(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    dd, ww, anti = _Check("d^2 = 0"), _Check("(omega^)^2 = 0"), _Check("d omega^ + omega^ d = 0")
    for f in _forms(monomials_up_to(ctx.n, max_total)):
        dd.record(d(d(f)).is_zero(), str(f))
        ww.record(omega_wedge(omega_wedge(f)).is_zero(), str(f))
        anti.record((d(omega_wedge(f)) + omega_wedge(d(f))).is_zero(), str(f))
    return [dd.result(), ww.result(), anti.result()]


def _homotopy(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    chk = _Check("L omega^ + omega^ L = (n - auxdeg)")
    n = ctx.n
    for m in monomials_up_to(n, max_total):
        a = SuperForm.monomial(m)
        lhs = homotopy_L(omega_wedge(a)) + omega_wedge(homotopy_L(a))
        chk.record(lhs == a.scale(n - m.degrees().auxdeg), str(a))
    return [chk.result()]


def _guard(name: str, fn) -> CheckResult:
    try:
        cases = fn()
        return CheckResult(name, True, cases)
    except MismatchAgainstTheorem as exc:
        return CheckResult(name, False, 0, [str(exc)])


def _e1(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    return [_guard("H(omega^) = functions * dx^top", lambda: len(verify_e1(ctx).slices))]


def _d1(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    return [_guard("d(f dx^top) is omega^-exact", lambda: len(verify_d1_zero(ctx).certificates))]


def _d3(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    return [_guard("third differential = Delta", lambda: len(verify_d3_equals_delta(ctx, max_total).cases))]


def _delta_squared(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    chk = _Check("Delta^2 = 0")
    for f in _forms(monomials_up_to(ctx.n, max_total, functions_only=True)):
        chk.record(bv_delta(bv_delta(f)).is_zero(), str(f))
    return [chk.result()]


def _degeneration(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    n = ctx.n
    ext, neg, hh = _Check("Delta-closed f extends to a total cocycle"), _Check("obstruction residue = Delta f"), _Check("(hbar d + omega^)^2 = 0")
    for xdeg in range(ctx.max_xdeg + 1):
        for pdeg in range(ctx.max_pdeg + 1):
            for f in delta_closed_basis(n, xdeg, pdeg):
                try:
                    e = extend_cocycle(f)
                    ext.record(e.replay() and e.levels <= n + 1, f"{f}: {e.levels} levels")
                except MismatchAgainstTheorem as exc:
                    ext.record(False, str(exc))
            for f in _forms(function_monomials(n, xdeg, pdeg)):
                if bv_delta(f):
                    try:
                        neg.record(negative_control(f) == bv_delta(f), str(f))
                    except MismatchAgainstTheorem as exc:
                        neg.record(False, str(exc))
    for _ in range(25):
        z = HbarForm([random_form(rng, n, max_total) for _ in range(3)], n)
        hh.record(hbar_d(hbar_d(z)).is_zero(), lambda: format_hbar(z))
    return [ext.result(), neg.result(), hh.result()]


def _invariance(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    symp, law, inv = _Check("family members are symplectomorphisms"), _Check("r^2 = Ber(J)"), _Check("Delta commutes with transport")
    from .geometry import is_symplectomorphism

    for c in family_instances(ctx.n, rng.randrange(1 << 30)):
        ok, _ = is_symplectomorphism(c)
        symp.record(ok, c.tag)
        if not ok:
            continue
        r = semidensity_factor(c)
        law.record(mul(r, r) == berezinian(jacobian(c)), lambda: f"{c.tag}: r = {r}")
        try:
            verify_delta_invariance(c, max_total)
            inv.record(True)
        except MismatchAgainstTheorem as exc:
            inv.record(False, str(exc))
    return [symp.result(), law.result(), inv.result()]


def _manin(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    return [_guard("constant H(omega^) is the line [dx^top]", lambda: len(manin_fiber_check(ctx).slices))]


MALFORMED = ["x1 +", "3*(x1", "x1 ** 2", "dx0", "q1", "x1^p1", "1/0", ")", "", "x1 x2"]


def _parser(ctx: AlgebraContext, max_total: int, rng) -> list[CheckResult]:
    n = ctx.n
    rt, err = _Check("parse(print(f)) = f"), _Check("malformed input gives a positioned error")
    for _ in range(1000):
        f = random_form(rng, n, max_total, terms=rng.randint(0, 5))
        text = format_form(f)
        rt.record(parse(text, n) == f and format_form(parse(text, n)) == text, text)
    for bad in MALFORMED + [f"x{n + 1}"]:
        try:
            parse(bad, n)
            err.record(False, bad)
        except ParseError as exc:
            err.record(0 <= exc.position <= len(bad), bad)
    return [rt.result(), err.result()]


SUITES: dict[str, Callable] = {
    "bicomplex": _bicomplex,
    "homotopy": _homotopy,
    "e1": _e1,
    "d1": _d1,
    "d3": _d3,
    "delta-squared": _delta_squared,
    "degeneration": _degeneration,
    "invariance": _invariance,
    "manin": _manin,
    "parser": _parser,
}


def run_suite(name: str, n: int, max_xdeg: int = 3, seed: int = 0) -> CheckReport:
    """Run a named suite.

    ``max_xdeg`` caps the x-degree of enumerated slices; for suites that
    enumerate whole monomials it is the cap on total degree instead.
    """
    if name != "all" and name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if max_xdeg < 0:
        raise ValueError("max_xdeg must be non-negative")
    ctx = AlgebraContext(n, max_xdeg=max_xdeg)
    names = list(SUITES) if name == "all" else [name]
    report = CheckReport(name, {"n": n, "max_xdeg": max_xdeg, "seed": seed})
    t0 = time.perf_counter()
    for s in names:
        rng = random.Random(f"{s}:{seed}")
        for res in SUITES[s](ctx, max_xdeg, rng):
            if name == "all":
                res.name = f"{s}: {res.name}"
            report.checks.append(res)
    report.elapsed = time.perf_counter() - t0
    return report
