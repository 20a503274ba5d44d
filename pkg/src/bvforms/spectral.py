"""The third differential of the (omega^, d) bicomplex and degeneration.

Page numbering follows the informal order ``omega^``, then ``d`` (zero on
the cohomology of ``omega^``), then ``d (omega^)^-1 d``.  Degeneration is
certified constructively: a Delta-closed ``f`` is extended to a total
cocycle ``z = f*dx^top + hbar*z_1 + ...`` of ``hbar d + omega^``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cohomology import MismatchAgainstTheorem, function_monomials
from .core import AlgebraContext, SuperForm
from .operators import (
    ComponentAtTopAuxdeg,
    HbarForm,
    NotExact,
    bv_delta,
    canonical_rep,
    d,
    hbar_d,
    invert_omega,
    omega_wedge,
    reduce_class,
    top_form,
)

__all__ = [
    "DeltaNotClosed",
    "ObstructionFound",
    "CocycleExtension",
    "third_differential",
    "verify_d3_equals_delta",
    "extend_cocycle",
    "negative_control",
    "D3Report",
]


class DeltaNotClosed(ValueError):
    pass


class ObstructionFound(Exception):
    """The equation ``omega ^ z_{j+1} = -d z_j`` has no solution.

    ``residue`` is the function ``r`` with ``r*dx^top`` the auxdeg-n part of
    the right-hand side ``-d z_j``.
    """

    def __init__(self, level: int, target: SuperForm, residue: SuperForm | None):
        self.level = level
        self.target = target
        self.residue = residue
        super().__init__(f"obstruction at hbar^{level}: residue {residue}")


def _lift(f: SuperForm) -> SuperForm:
    if not f.is_function():
        raise ValueError(f"expected a function, got {f}")
    return f * top_form(f.n)


def third_differential(f: SuperForm) -> SuperForm:
    """``d (omega^)^-1 d`` on the class of ``f*dx^top``, as a function."""
    beta = d(_lift(f))
    for k, comp in beta.auxdeg_components().items():
        if omega_wedge(comp):
            raise MismatchAgainstTheorem(f"d(f*dx^top) has a non-closed auxdeg-{k} part", f)
    return canonical_rep(d(invert_omega(beta)))


@dataclass
class D3Report:
    n: int
    cases: list[tuple[SuperForm, SuperForm]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"n": self.n, "cases": [{"f": str(f), "delta_f": str(v)} for f, v in self.cases]}


def verify_d3_equals_delta(ctx: AlgebraContext, max_degree: int | None = None) -> D3Report:
    """Check the third differential against Delta on every function monomial.

    ``max_degree`` bounds ``xdeg + pdeg``; without it the context caps apply.
    """
    n = ctx.n
    report = D3Report(n)
    for xdeg in range(ctx.max_xdeg + 1 if max_degree is None else max_degree + 1):
        for pdeg in range(ctx.max_pdeg + 1):
            if max_degree is not None and xdeg + pdeg > max_degree:
                continue
            for m in function_monomials(n, xdeg, pdeg):
                f = SuperForm.monomial(m)
                lhs, rhs = third_differential(f), bv_delta(f)
                if lhs != rhs:
                    raise MismatchAgainstTheorem(f"third differential of {f} is {lhs}, Delta gives {rhs}", f)
                report.cases.append((f, rhs))
    return report


@dataclass
class CocycleExtension:
    f: SuperForm
    z: HbarForm
    # (level j, target -d z_{j-1}, alpha_j) for each correction
    steps: list[tuple[int, SuperForm, SuperForm]]

    @property
    def levels(self) -> int:
        return len(self.z)

    def replay(self) -> bool:
        return hbar_d(self.z).is_zero()

    def to_dict(self) -> dict:
        return {
            "f": str(self.f),
            "levels": [str(c) for c in self.z.coeffs],
            "steps": [{"level": j, "target": str(t), "alpha": str(a)} for j, t, a in self.steps],
            "replay": {"hbar_d(z)": [str(c) for c in hbar_d(self.z).coeffs], "closed": self.replay()},
        }


def _extend(f: SuperForm) -> CocycleExtension:
    n = f.n
    z = [_lift(f)]
    steps = []
    # each correction has one fewer dx factor, so at most n of them
    for level in range(1, n + 2):
        target = -d(z[-1])
        if not target:
            break
        try:
            alpha = invert_omega(target)
        except ComponentAtTopAuxdeg as exc:
            residue = reduce_class(exc.component)[0]
            raise ObstructionFound(level, target, residue) from exc
        except NotExact as exc:
            raise ObstructionFound(level, target, None) from exc
        z.append(alpha)
        steps.append((level, target, alpha))
    else:
        raise MismatchAgainstTheorem(f"extension of {f} did not terminate in {n + 1} levels", f)
    ext = CocycleExtension(f, HbarForm(z, n), steps)
    if not ext.replay():
        raise MismatchAgainstTheorem(f"extension of {f} is not a total cocycle", f)
    return ext


def extend_cocycle(f: SuperForm) -> CocycleExtension:
    """Total cocycle of ``hbar d + omega^`` starting at ``f*dx^top``.

    Requires ``Delta f == 0``.
    """
    delta = bv_delta(f)
    if delta:
        raise DeltaNotClosed(f"Delta({f}) = {delta} != 0")
    try:
        return _extend(f)
    except ObstructionFound as exc:
        raise MismatchAgainstTheorem(f"Delta-closed {f} is obstructed: {exc}", f) from exc


def negative_control(f: SuperForm) -> SuperForm:
    """Run the extension on a non-closed ``f``; return the obstruction residue.

    Succeeds only if the extension fails at the second level with residue
    exactly ``Delta f``.
    """
    delta = bv_delta(f)
    if not delta:
        raise DeltaNotClosed(f"negative control needs Delta f != 0; Delta({f}) = 0")
    try:
        _extend(f)
    except ObstructionFound as exc:
        if exc.level != 2 or exc.residue != delta:
            raise MismatchAgainstTheorem(
                f"obstruction for {f} at level {exc.level} with residue {exc.residue}, expected Delta f = {delta}", f
            ) from exc
        return exc.residue
    raise MismatchAgainstTheorem(f"extension of non-closed {f} unexpectedly succeeded", f)
