"""Unimodular complete simplicial fans: validation, face queries, point
location and star subdivision.

A LatticeFan stores ray generators in Z^n plus the maximal cones as sorted
index tuples.  Cones of lower dimension are never stored; they are exactly
the subsets of maximal cones (simpliciality), and the fans in scope are small
enough (~20 rays) that on-demand enumeration is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from . import lattice
from .errors import FanValidationError, PreconditionError
from .lattice import IntVector

ConeRef = tuple[int, ...]

ZERO_CONE: ConeRef = ()


@dataclass(frozen=True)
class Ray:
    index: int
    vector: IntVector
    label: str | None = None

    def name(self) -> str:
        return self.label if self.label is not None else f"r{self.index}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple[str, ...]

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "invalid: " + "; ".join(self.failures)


def _canon_cones(cones: Iterable[Iterable[int]]) -> tuple[ConeRef, ...]:
    return tuple(sorted(tuple(sorted(set(c))) for c in cones))


class LatticeFan:
    """Immutable fan; all derived data is computed lazily and cached."""

    def __init__(
        self,
        rank: int,
        rays: Sequence[Sequence[int] | Ray],
        max_cones: Iterable[Iterable[int]],
        labels: Sequence[str | None] | None = None,
    ):
        self.rank = int(rank)
        built = []
        for i, r in enumerate(rays):
            if isinstance(r, Ray):
                built.append(Ray(i, lattice.as_vector(r.vector), r.label))
            else:
                lab = labels[i] if labels is not None else None
                built.append(Ray(i, lattice.as_vector(r), lab))
        self.rays: tuple[Ray, ...] = tuple(built)
        self.max_cones: tuple[ConeRef, ...] = _canon_cones(max_cones)

    # -- identity ---------------------------------------------------------

    def _key(self):
        return (
            self.rank,
            tuple((r.vector, r.label) for r in self.rays),
            self.max_cones,
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeFan) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"LatticeFan(rank={self.rank}, rays={len(self.rays)}, maxcones={len(self.max_cones)})"

    # -- basic accessors ----------------------------------------------------

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def vector(self, i: int) -> IntVector:
        return self.rays[i].vector

    def ray_label(self, i: int) -> str:
        return self.rays[i].name()

    def cone_labels(self, cone: ConeRef) -> tuple[str, ...]:
        return tuple(self.ray_label(i) for i in cone)

    @cached_property
    def vector_index(self) -> dict[IntVector, int]:
        return {r.vector: r.index for r in self.rays}

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {r.label: r.index for r in self.rays if r.label is not None}

    @cached_property
    def cone_masks(self) -> tuple[int, ...]:
        return tuple(_mask(c) for c in self.max_cones)

    @cached_property
    def validation(self) -> ValidationReport:
        return validate(self)

    def require_valid(self) -> "LatticeFan":
        if not self.validation.ok:
            raise FanValidationError(str(self.validation))
        return self

    def with_labels(self, labels: Sequence[str | None]) -> "LatticeFan":
        if len(labels) != self.n_rays:
            raise PreconditionError("label count differs from ray count")
        return LatticeFan(self.rank, [r.vector for r in self.rays], self.max_cones, labels)


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def validate(f: LatticeFan) -> ValidationReport:
    """Structural report: ray primitivity, cone unimodularity, wall-pairing
    completeness plus connectivity of the max-cone adjacency graph.

    Wall pairing (every (n-1)-face shared by exactly two maximal cones)
    together with a connected adjacency graph characterizes completeness for
    the simplicial unimodular fans in scope.  Never raises; downstream
    operations reject fans whose report carries failures.
    """
    failures: list[str] = []
    n = f.rank
    rays_well_shaped = True
    seen_vectors: dict[IntVector, int] = {}
    for ray in f.rays:
        if all(x == 0 for x in ray.vector):
            failures.append(f"ray {ray.index} is zero")
        elif not lattice.is_primitive(ray.vector):
            failures.append(f"ray {ray.index} is not primitive: {ray.vector}")
        if len(ray.vector) != n:
            failures.append(f"ray {ray.index} has length {len(ray.vector)}, rank is {n}")
            rays_well_shaped = False
        if ray.vector in seen_vectors:
            failures.append(f"duplicate ray vector at {seen_vectors[ray.vector]} and {ray.index}")
        seen_vectors.setdefault(ray.vector, ray.index)

    if len(set(f.max_cones)) != len(f.max_cones):
        failures.append("duplicate maximal cones")
    if not f.max_cones:
        failures.append("no maximal cones")

    for cone in f.max_cones:
        if any(i < 0 or i >= f.n_rays for i in cone):
            failures.append(f"cone {cone} has out-of-range ray indices")
            continue
        if len(cone) != n:
            failures.append(f"maximal cone {cone} has size {len(cone)}, expected {n}")
            continue
        if not rays_well_shaped:
            continue
        det = lattice.determinant([f.vector(i) for i in cone])
        if det not in (1, -1):
            failures.append(f"cone {f.cone_labels(cone)} is not unimodular (det {det})")

    if not failures:
        wall_count: dict[ConeRef, list[ConeRef]] = {}
        for cone in f.max_cones:
            for wall in combinations(cone, n - 1):
                wall_count.setdefault(wall, []).append(cone)
        for wall, owners in sorted(wall_count.items()):
            if len(owners) != 2:
                failures.append(
                    f"wall {f.cone_labels(wall)} appears in {len(owners)} maximal cone(s), expected 2"
                )
        if not failures and len(f.max_cones) > 1:
            # adjacency-graph connectivity
            adj: dict[ConeRef, set[ConeRef]] = {c: set() for c in f.max_cones}
            for owners in wall_count.values():
                if len(owners) == 2:
                    adj[owners[0]].add(owners[1])
                    adj[owners[1]].add(owners[0])
            seen = {f.max_cones[0]}
            stack = [f.max_cones[0]]
            while stack:
                for nb in adj[stack.pop()]:
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            if len(seen) != len(f.max_cones):
                failures.append("maximal-cone adjacency graph is disconnected")
        every_ray = set()
        for cone in f.max_cones:
            every_ray.update(cone)
        for ray in f.rays:
            if ray.index not in every_ray:
                failures.append(f"ray {ray.index} occurs in no maximal cone")

    return ValidationReport(ok=not failures, failures=tuple(failures))


def spans_cone(f: LatticeFan, s: Iterable[int]) -> bool:
    """True iff s is contained in some maximal cone (faces of a simplicial
    fan are exactly the subsets of maximal cones).  The empty set is the
    zero cone and always spans."""
    idx = tuple(s)
    for i in idx:
        if i < 0 or i >= f.n_rays:
            raise IndexError(f"ray index {i} out of range")
    m = _mask(idx)
    return any(cm & m == m for cm in f.cone_masks)


def locate(f: LatticeFan, p: Sequence[int]) -> tuple[ConeRef, tuple[int, ...]]:
    """Minimal cone containing the lattice point p, with its positive
    integer coordinates.

    Completeness guarantees some maximal cone contains p; unimodularity makes
    the coordinates integral.  Returns (zero cone, ()) for p = 0.
    """
    f.require_valid()
    if len(p) != f.rank:
        raise PreconditionError(f"point has length {len(p)}, rank is {f.rank}")
    if all(x == 0 for x in p):
        return ZERO_CONE, ()
    for cone in f.max_cones:
        coords = lattice.express_in_basis([f.vector(i) for i in cone], p)
        if all(c >= 0 for c in coords):
            support = tuple(i for i, c in zip(cone, coords) if c > 0)
            coeffs = tuple(c for c in coords if c > 0)
            return support, coeffs
    raise FanValidationError(f"no maximal cone contains {tuple(p)}; fan is not complete")


def star_subdivision(f: LatticeFan, center: Iterable[int], label: str | None = None) -> LatticeFan:
    """Star subdivision at the cone spanned by ``center``: one new ray (the
    sum of the center's generators); every maximal cone containing the center
    is replaced by |center| cones, each swapping one center ray for the new
    one."""
    f.require_valid()
    center = tuple(sorted(set(center)))
    if len(center) < 2:
        raise PreconditionError("star subdivision needs a center of dimension >= 2")
    if not spans_cone(f, center):
        raise PreconditionError(f"{f.cone_labels(center)} does not span a cone")
    new_vec = lattice.vec_sum([f.vector(i) for i in center], f.rank)
    new_idx = f.n_rays
    if label is None and all(f.rays[i].label is not None for i in center):
        label = "+".join(f.rays[i].label for i in center)
    rays = list(f.rays) + [Ray(new_idx, new_vec, label)]
    cset = set(center)
    cones: list[tuple[int, ...]] = []
    for cone in f.max_cones:
        if cset <= set(cone):
            for v in center:
                cones.append(tuple(sorted((set(cone) - {v}) | {new_idx})))
        else:
            cones.append(cone)
    out = LatticeFan(f.rank, rays, cones)
    out.require_valid()
    return out


def faces_of_dim(f: LatticeFan, d: int) -> list[ConeRef]:
    """All distinct d-dimensional cones, as sorted index tuples in
    deterministic (lexicographic) order."""
    if d < 0 or d > f.rank:
        raise IndexError(f"face dimension {d} out of range 0..{f.rank}")
    if d == 0:
        return [ZERO_CONE]
    faces = {sub for cone in f.max_cones for sub in combinations(cone, d)}
    return sorted(faces)


def all_faces(f: LatticeFan) -> list[ConeRef]:
    """Every cone of the fan including the zero cone, in (dim, lex) order."""
    out: list[ConeRef] = []
    for d in range(f.rank + 1):
        out.extend(faces_of_dim(f, d))
    return out


def wall_neighbors(f: LatticeFan, wall: ConeRef) -> tuple[int, int]:
    """The two rays completing a wall ((n-1)-cone) to its maximal cones."""
    wset = set(wall)
    others = []
    for cone in f.max_cones:
        if wset <= set(cone):
            extra = set(cone) - wset
            if len(extra) == 1:
                others.append(extra.pop())
    if len(others) != 2:
        raise PreconditionError(
            f"wall {f.cone_labels(wall)} is shared by {len(others)} maximal cones, expected 2"
        )
    return tuple(sorted(others))


def wall_relation(f: LatticeFan, wall: ConeRef) -> tuple[int, ...]:
    """Integer vector alpha over all rays with sum_v alpha_v * v = 0,
    normalized to +1 on the two rays opposite the wall."""
    u1, u2 = wall_neighbors(f, wall)
    target = [-(a + b) for a, b in zip(f.vector(u1), f.vector(u2))]
    if wall:
        cols = tuple(
            tuple(f.vector(w)[d] for w in wall) for d in range(f.rank)
        )
        sol = lattice.solve_integer_system(cols, target)
        if not isinstance(sol, tuple):
            raise FanValidationError(
                f"wall {f.cone_labels(wall)} has no integral relation ({sol})"
            )
    else:
        sol = ()
        if any(t != 0 for t in target):
            raise FanValidationError("opposite rays of an empty wall must cancel")
    alpha = [0] * f.n_rays
    alpha[u1] += 1
    alpha[u2] += 1
    for w, c in zip(wall, sol):
        alpha[w] = c
    return tuple(alpha)


def is_projective(f: LatticeFan) -> bool:
    """Existence of a strictly convex piecewise-linear support function.

    A divisor sum(a_v V(v)) is ample exactly when it pairs positively with
    every wall curve, so the fan is projective iff the system
    a . alpha_w > 0 over all wall relations is strictly feasible; by duality
    that fails precisely when some nonzero nonnegative combination of wall
    curve classes vanishes, which is decided exactly over the rationals."""
    f.require_valid()
    walls = faces_of_dim(f, f.rank - 1)
    rows = [wall_relation(f, w) for w in walls]
    if not rows:
        return True
    return not lattice.has_nonnegative_kernel(rows)
