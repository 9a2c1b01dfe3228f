"""Toric intersection theory on smooth complete fans: curve/divisor pairings,
divisor-times-orbit reduction, ch2 against torus-invariant surfaces, and the
numeric screens.

All arithmetic is exact: big-integer curve classes and Fraction-valued cycle
coefficients.  ch2 values are half-integers and print exactly ("3/2").
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lattice
from .errors import PreconditionError
from .fan import ConeRef, LatticeFan, faces_of_dim, spans_cone, wall_relation
from .primitive import CurveClass, PrimitiveRelation


@dataclass(frozen=True)
class CycleExpression:
    """Integer/rational combination of orbit closures of one fixed codimension."""

    codim: int
    terms: tuple[tuple[ConeRef, Fraction], ...]

    def __iter__(self):
        return iter(self.terms)


def curve_divisor_pairing(f: LatticeFan, curve: CurveClass, ray: int) -> int:
    """C . V(ray): the ray's coordinate of the curve class."""
    if len(curve.alpha) != f.n_rays:
        raise PreconditionError("curve class indexed over a different ray set")
    return curve.alpha[ray]


def wall_curve_class(f: LatticeFan, wall: ConeRef) -> CurveClass:
    """Curve class of the invariant curve V(wall) for an (n-1)-cone: the
    integral relation u' + u'' + sum b_w w = 0 across the wall."""
    if len(wall) != f.rank - 1:
        raise PreconditionError(f"wall must have dimension {f.rank - 1}")
    return CurveClass(wall_relation(f, wall))


def _dual_covector(f: LatticeFan, cone: ConeRef, ray: int) -> tuple[int, ...]:
    """m in the dual lattice with <m, ray> = 1 and <m, w> = 0 for the other
    rays of ``cone`` (integral by unimodularity)."""
    basis = [f.vector(i) for i in cone]
    k = cone.index(ray)
    target = tuple(1 if i == k else 0 for i in range(f.rank))
    sol = lattice.solve_integer_system(basis, target)
    assert isinstance(sol, tuple)
    return sol


def divisor_dot_orbit(f: LatticeFan, ray: int, orbit: ConeRef) -> CycleExpression:
    """V(ray) . V(orbit) as a combination of orbit closures of one higher
    codimension.

    When the ray lies in the orbit's cone, V(ray) is first rewritten by the
    linear equivalence attached to a dual covector of the first maximal cone
    containing the orbit; the rewrite only involves rays outside that cone,
    so it reduces to the transversal cases.
    """
    f.require_valid()
    orbit = tuple(sorted(orbit))
    if not spans_cone(f, orbit):
        raise PreconditionError(f"{f.cone_labels(orbit)} does not span a cone")
    codim = len(orbit) + 1

    def transversal(r: int) -> ConeRef | None:
        bigger = tuple(sorted(set(orbit) | {r}))
        return bigger if spans_cone(f, bigger) else None

    if ray not in orbit:
        cone = transversal(ray)
        terms = [(cone, Fraction(1))] if cone else []
        return CycleExpression(codim, tuple(terms))

    host = next(c for c in f.max_cones if set(orbit) <= set(c))
    m = _dual_covector(f, host, ray)
    acc: dict[ConeRef, Fraction] = {}
    for w in range(f.n_rays):
        if w in host:
            continue
        coeff = -lattice.dot(m, f.vector(w))
        if coeff == 0:
            continue
        cone = transversal(w)
        if cone is None:
            continue
        acc[cone] = acc.get(cone, Fraction(0)) + coeff
    terms = tuple((c, v) for c, v in sorted(acc.items()) if v != 0)
    return CycleExpression(codim, terms)


def ch2_dot_invariant_surface(f: LatticeFan, tau: ConeRef) -> Fraction:
    """ch2(X) . V(tau) for an (n-2)-cone tau, via
    ch2 = (1/2) sum_v V(v)^2: each V(v).V(tau) is reduced to a curve
    expression and paired with V(v) again through wall curve classes."""
    tau = tuple(sorted(tau))
    if len(tau) != f.rank - 2:
        raise PreconditionError(f"invariant surfaces are cut by (n-2)-cones, got dim {len(tau)}")
    if not spans_cone(f, tau):
        raise PreconditionError(f"{f.cone_labels(tau)} does not span a cone")
    total = Fraction(0)
    for v in range(f.n_rays):
        curve_expr = divisor_dot_orbit(f, v, tau)
        for wall, coeff in curve_expr:
            total += coeff * wall_curve_class(f, wall).alpha[v]
    return total / 2


def anticanonical_degree(f: LatticeFan, curve: CurveClass) -> int:
    """-K . C = sum of the curve class coordinates (since -K = sum V(v))."""
    if len(curve.alpha) != f.n_rays:
        raise PreconditionError("curve class indexed over a different ray set")
    return sum(curve.alpha)


def screen_2fano(f: LatticeFan) -> tuple[list[tuple[ConeRef, Fraction]], Fraction]:
    """ch2 against every torus-invariant surface, with the minimum.

    A nonpositive minimum certifies the fan is not 2-Fano; a positive minimum
    is only a necessary condition (non-invariant surfaces are not screened).
    """
    f.require_valid()
    if f.rank < 2:
        raise PreconditionError("screening needs dimension >= 2")
    rows = [(tau, ch2_dot_invariant_surface(f, tau)) for tau in faces_of_dim(f, f.rank - 2)]
    return rows, min(v for _, v in rows)


def degree_via_chern(f: LatticeFan, rel: PrimitiveRelation) -> int:
    """Anticanonical degree of a primitive relation computed from the curve
    class; must agree with the combinatorial degree."""
    return anticanonical_degree(f, rel.curve_class())


def candidate_bound_predicate(n: int, m: int, rho: int) -> bool:
    """Numeric screen for surviving candidates: n >= 9, 3 <= m <= n-3,
    4 <= rho and rho < 2n - (sqrt(60n+1249) - 37)/30, decided in exact
    integer arithmetic by squaring."""
    if n < 1:
        raise PreconditionError("dimension must be positive")
    if n < 9 or not (3 <= m <= n - 3) or rho < 4:
        return False
    # rho < 2n - (sqrt(D) - 37)/30  <=>  sqrt(D) < 30(2n - rho) + 37
    rhs = 30 * (2 * n - rho) + 37
    return rhs > 0 and rhs * rhs > 60 * n + 1249
