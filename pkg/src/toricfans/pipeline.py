"""Reduction driver for fans with a centered order-3 collection: classify the
relevant relations, detect exceptional decompositions, contract the order-2
relevant relations, flip the remaining ones all at once, and verify that the
result carries the centered collection with no relevant collections left.

Every step is logged with enough vector-level data to replay it; certificates
are built from the log by the certificate module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .birational import BlowdownSpec, FlipSpec, contract, flip, is_contractible, multi_flip
from .errors import ContractionError, DisjointnessError, FlipError, PipelineError, UnsupportedError
from .fan import ConeRef, LatticeFan, spans_cone
from .lattice import IntVector
from .primitive import (
    PrimitiveRelation,
    require_centered,
    bundle_locus,
    is_fano,
    is_primitive_collection,
    minimal_p_dimension,
    primitive_collections,
    primitive_relation,
    relevant_collections,
)


# -- log data ----------------------------------------------------------------


@dataclass(frozen=True)
class RelationData:
    """Vector-level snapshot of a relation, stable across index shifts."""

    lhs: tuple[IntVector, ...]
    rhs: tuple[tuple[IntVector, int], ...]
    text: str


def _relation_data(f: LatticeFan, rel: PrimitiveRelation) -> RelationData:
    return RelationData(
        lhs=tuple(sorted(f.vector(i) for i in rel.collection)),
        rhs=tuple(sorted((f.vector(i), mu) for i, mu in zip(rel.focus, rel.coefficients))),
        text=rel.describe(f),
    )


@dataclass(frozen=True)
class TransformStep:
    """One pipeline event.

    kind "blowdown": relation x_i + a = b contracted (one relation logged).
    kind "exceptional_pair": the two contractions x_i + a = b then x_j + c = a
    (logged in contraction order).
    kind "flip": relation x_i + x_j + a = b + c flipped.
    i/j are positions (0..2) inside the centered collection; parameter_ray is
    the ray whose base-divisor intersection count becomes the certificate
    parameter of this step.
    """

    kind: str
    i: int
    j: Optional[int]
    relations: tuple[RelationData, ...]
    removed: tuple[IntVector, ...]
    added: tuple[IntVector, ...]
    parameter_ray_vector: IntVector
    parameter_ray_label: str


@dataclass(frozen=True)
class TransformLog:
    initial: LatticeFan
    centered: ConeRef
    x_vectors: tuple[IntVector, ...]
    steps: tuple[TransformStep, ...]
    final: LatticeFan


@dataclass(frozen=True)
class CheckItem:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckItem, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __str__(self) -> str:
        return "\n".join(f"[{'ok' if c.ok else 'FAIL'}] {c.name}: {c.detail}" for c in self.checks)


# -- exceptional decompositions ----------------------------------------------


@dataclass(frozen=True)
class ExceptionalDecomposition:
    """Cyclic splitting of the centered relation into order-2 (and for m=3
    possibly one order-3) relevant relations."""

    pattern: str  # "cyclic3" | "cyclic4" | "pair4"
    relations: tuple[PrimitiveRelation, ...]
    positions: tuple[int, ...]


def _type1_data(f: LatticeFan, centered: ConeRef):
    """Relevant relations of shape x + a = b as (position, aux ray, rhs ray, rel)."""
    cent = list(centered)
    out = []
    for q, tag, rel in relevant_collections(f, centered):
        if tag == "type1":
            (x,) = [i for i in q if i in cent]
            (aux,) = [i for i in q if i not in cent]
            out.append((cent.index(x), aux, rel.focus[0], rel))
    return out


def detect_exceptional(f: LatticeFan, centered: ConeRef) -> ExceptionalDecomposition | None:
    """Search for the cyclic splittings of the centered relation.

    m=2: three relations x_i + c = a, x_j + a = b, x_k + b = c with distinct
    x's; the result is normalized so the first relation carries the
    smallest-index x.  m=3: either a 4-cycle of order-2 relations, or an
    order-3 relation x_i + x_j + a = b closed up by two order-2 relations.
    """
    cent = require_centered(f, centered)
    m = len(cent) - 1
    if m not in (2, 3):
        raise UnsupportedError(f"exceptional detection implemented for m in {{2,3}}, got m={m}")
    ones = _type1_data(f, cent)

    if m == 2:
        for a0 in sorted(ones, key=lambda t: t[:3]):
            for a1 in sorted(ones, key=lambda t: t[:3]):
                for a2 in sorted(ones, key=lambda t: t[:3]):
                    pos = (a0[0], a1[0], a2[0])
                    if len(set(pos)) != 3:
                        continue
                    if a0[2] == a1[1] and a1[2] == a2[1] and a2[2] == a0[1]:
                        cycle = [a0, a1, a2]
                        start = min(range(3), key=lambda t: cycle[t][0])
                        cycle = cycle[start:] + cycle[:start]
                        return ExceptionalDecomposition(
                            pattern="cyclic3",
                            relations=tuple(c[3] for c in cycle),
                            positions=tuple(c[0] for c in cycle),
                        )
        return None

    # m == 3
    for a0 in sorted(ones, key=lambda t: t[:3]):
        for a1 in sorted(ones, key=lambda t: t[:3]):
            for a2 in sorted(ones, key=lambda t: t[:3]):
                for a3 in sorted(ones, key=lambda t: t[:3]):
                    pos = (a0[0], a1[0], a2[0], a3[0])
                    if len(set(pos)) != 4:
                        continue
                    if (
                        a0[2] == a1[1]
                        and a1[2] == a2[1]
                        and a2[2] == a3[1]
                        and a3[2] == a0[1]
                    ):
                        return ExceptionalDecomposition(
                            pattern="cyclic4",
                            relations=(a0[3], a1[3], a2[3], a3[3]),
                            positions=pos,
                        )
    cent_list = list(cent)
    for q, tag, rel in relevant_collections(f, cent):
        if tag != "type4":
            continue
        xs = [cent_list.index(i) for i in q if i in cent_list]
        (aux,) = [i for i in q if i not in cent_list]
        b = rel.focus[0]
        for t1 in sorted(ones, key=lambda t: t[:3]):
            for t2 in sorted(ones, key=lambda t: t[:3]):
                pos = tuple(xs) + (t1[0], t2[0])
                if len(set(pos)) != 4:
                    continue
                if t1[1] == b and t2[1] == t1[2] and t2[2] == aux:
                    return ExceptionalDecomposition(
                        pattern="pair4",
                        relations=(rel, t1[3], t2[3]),
                        positions=pos,
                    )
    return None


# -- the driver ----------------------------------------------------------------


def _current_x_indices(fan: LatticeFan, x_vectors) -> ConeRef:
    try:
        return tuple(fan.vector_index[v] for v in x_vectors)
    except KeyError as e:
        raise PipelineError("verification", f"centered ray {e} disappeared from the fan")


def _order2_vector_pairs(f: LatticeFan) -> set[frozenset]:
    return {
        frozenset(f.vector(i) for i in p)
        for p in primitive_collections(f)
        if len(p) == 2
    }


def _rpc_by_vectors(f: LatticeFan, centered: ConeRef):
    out = {}
    for q, tag, rel in relevant_collections(f, centered):
        key = frozenset(f.vector(i) for i in q)
        out[key] = (tag, _relation_data(f, rel))
    return out


def _contract_step(cur: LatticeFan, rel: PrimitiveRelation, x_vectors):
    """Contract one order-2 relevant relation with the stability checks:
    the centered collection persists, no new opponent pairs appear, and any
    relevant collection of the result was already relevant (with the same
    relation) except for the single predicted exceptional-transfer shape."""
    centered_before = _current_x_indices(cur, x_vectors)
    rpc_before = _rpc_by_vectors(cur, centered_before)
    pairs_before = _order2_vector_pairs(cur)
    (x_idx,) = [i for i in rel.collection if i in centered_before]
    (aux_idx,) = [i for i in rel.collection if i not in centered_before]
    pos = list(centered_before).index(x_idx)
    b_idx = rel.focus[0]
    a_vec, b_vec = cur.vector(aux_idx), cur.vector(b_idx)
    # predicted transfers: {x_q, x_pos, a} allowed when {x_q, b} was relevant
    allowed_new = set()
    for q, xv in enumerate(x_vectors):
        if q == pos:
            continue
        if frozenset({xv, b_vec}) in rpc_before:
            allowed_new.add(frozenset({xv, x_vectors[pos], a_vec}))

    if not is_contractible(cur, rel):
        raise PipelineError("contractibility", f"{rel.describe(cur)} is not contractible")
    try:
        new = contract(cur, BlowdownSpec(rel))
    except ContractionError as e:
        raise PipelineError("contraction", str(e))

    centered_after = _current_x_indices(new, x_vectors)
    if not is_primitive_collection(new, centered_after):
        raise PipelineError("verification", "centered collection lost after blowdown")
    new_pairs = _order2_vector_pairs(new) - pairs_before
    if new_pairs:
        raise PipelineError(
            "opponents", f"new opponent pairs appeared after blowdown: {sorted(map(sorted, new_pairs))}"
        )
    rpc_after = _rpc_by_vectors(new, centered_after)
    for key, (tag, data) in rpc_after.items():
        if key in rpc_before:
            if rpc_before[key][1].rhs != data.rhs or rpc_before[key][1].lhs != data.lhs:
                raise PipelineError(
                    "stability", f"relevant relation changed across blowdown: {data.text}"
                )
        elif key not in allowed_new:
            raise PipelineError(
                "stability", f"unexpected new relevant collection after blowdown: {data.text}"
            )
    return new, pos, a_vec, b_vec


def run_step1(
    f: LatticeFan, centered: ConeRef, *, require_fano: bool = True
) -> tuple[LatticeFan, TransformLog]:
    """Blowdowns (at most three, or one exceptional pair) followed by the
    simultaneous flips of the surviving order-3 relevant relations; the
    output is verified to carry the centered collection with an empty
    relevant set and bundle-locus codimension >= 2."""
    f.require_valid()
    cent = require_centered(f, centered)
    if f.rank <= 2:
        raise PipelineError("dimension", f"pipeline needs dim > 2, got {f.rank}")
    if len(cent) != 3:
        raise PipelineError("m-dimension", f"centered collection has order {len(cent)}, need 3")
    m_min = minimal_p_dimension(f)
    if m_min != 2:
        raise PipelineError("m-dimension", f"minimal P-dimension is {m_min}, need 2")
    if require_fano and not is_fano(f):
        raise PipelineError("not-fano", "input fan has a primitive relation of degree <= 0")

    x_vectors = tuple(f.vector(i) for i in cent)
    steps: list[TransformStep] = []
    cur = f

    exc = detect_exceptional(cur, cent)
    if exc is not None and exc.pattern == "cyclic3":
        r0, r1 = exc.relations[0], exc.relations[1]
        i_pos, j_pos = exc.positions[1], exc.positions[0]
        (c_idx,) = [i for i in r0.collection if i not in cent]
        c_vec, c_label = cur.vector(c_idx), cur.ray_label(c_idx)
        r0_lhs = tuple(cur.vector(i) for i in r0.collection)
        data1 = _relation_data(cur, r1)
        cur, _, _a1, b1 = _contract_step(cur, r1, x_vectors)
        # the second relation survives the first contraction verbatim
        r0_now = primitive_relation(cur, tuple(sorted(cur.vector_index[v] for v in r0_lhs)))
        data0 = _relation_data(cur, r0_now)
        cur, _, _a0, b0 = _contract_step(cur, r0_now, x_vectors)
        steps.append(
            TransformStep(
                kind="exceptional_pair",
                i=i_pos,
                j=j_pos,
                relations=(data1, data0),
                removed=(b1, b0),
                added=(),
                parameter_ray_vector=c_vec,
                parameter_ray_label=c_label,
            )
        )
        leftover = [
            (q, tag, rel)
            for q, tag, rel in relevant_collections(cur, _current_x_indices(cur, x_vectors))
            if tag == "type1"
        ]
        if leftover:
            raise PipelineError("type", "an order-2 relevant relation survived the exceptional pair")
    else:
        budget = 3
        while True:
            cent_now = _current_x_indices(cur, x_vectors)
            ones = _type1_data(cur, cent_now)
            if not ones:
                break
            if budget == 0:
                raise PipelineError("blowdown-budget", "more than three order-2 relevant relations")
            budget -= 1
            # deterministic order: ascending index of the auxiliary ray a
            ones.sort(key=lambda t: t[:3])
            pos, aux, b, rel = ones[0]
            a_label = cur.ray_label(aux)
            data = _relation_data(cur, rel)
            cur, pos2, a_vec, b_vec = _contract_step(cur, rel, x_vectors)
            assert pos2 == pos
            steps.append(
                TransformStep(
                    kind="blowdown",
                    i=pos,
                    j=None,
                    relations=(data,),
                    removed=(b_vec,),
                    added=(),
                    parameter_ray_vector=a_vec,
                    parameter_ray_label=a_label,
                )
            )

    # flip phase: everything left must be of shape x_i + x_j + a = b + c
    cent_now = _current_x_indices(cur, x_vectors)
    leftovers = relevant_collections(cur, cent_now)
    specs = []
    flip_meta = []
    for q, tag, rel in sorted(leftovers, key=lambda t: t[0]):
        if tag != "type2":
            raise PipelineError(
                "type",
                f"relevant relation {rel.describe(cur)} of shape {tag} survived the blowdown phase",
            )
        if not is_contractible(cur, rel):
            raise PipelineError("contractibility", f"{rel.describe(cur)} is not contractible")
        xs = sorted(list(cent_now).index(i) for i in q if i in cent_now)
        (aux,) = [i for i in q if i not in cent_now]
        specs.append(FlipSpec(rel))
        flip_meta.append(
            TransformStep(
                kind="flip",
                i=xs[0],
                j=xs[1],
                relations=(_relation_data(cur, rel),),
                removed=(),
                added=(),
                parameter_ray_vector=cur.vector(aux),
                parameter_ray_label=cur.ray_label(aux),
            )
        )
    if specs:
        before_rays = tuple(r.vector for r in cur.rays)
        try:
            cur = multi_flip(cur, specs)
        except DisjointnessError as e:
            raise PipelineError("disjointness", str(e))
        except FlipError as e:
            raise PipelineError("flip", str(e))
        if tuple(r.vector for r in cur.rays) != before_rays:
            raise PipelineError("verification", "flip phase changed the ray set")
        steps.extend(flip_meta)

    report = verify_output(cur, _current_x_indices(cur, x_vectors))
    if not report.ok:
        raise PipelineError("verification", str(report))

    log = TransformLog(
        initial=f,
        centered=cent,
        x_vectors=x_vectors,
        steps=tuple(steps),
        final=cur,
    )
    return cur, log


def verify_output(
    y: LatticeFan,
    centered: ConeRef,
    reference_ray_vectors: tuple[IntVector, ...] | None = None,
) -> VerificationReport:
    """Output contract of the pipeline: centered collection intact, no
    relevant collections, bundle locus in codimension >= 2, and every
    <x_i, x_j, a> spans a cone."""
    checks: list[CheckItem] = []
    cent = tuple(sorted(set(centered)))
    is_pc = is_primitive_collection(y, cent)
    total = [0] * y.rank
    for i in cent:
        for d, v in enumerate(y.vector(i)):
            total[d] += v
    centered_ok = is_pc and all(t == 0 for t in total)
    checks.append(
        CheckItem("centered-primitive", centered_ok, f"{y.cone_labels(cent)} sums to {tuple(total)}")
    )
    if centered_ok:
        rpc = relevant_collections(y, cent)
        checks.append(
            CheckItem(
                "rpc-empty",
                not rpc,
                f"{len(rpc)} relevant collection(s)" + (f": {[y.cone_labels(q) for q, _, _ in rpc]}" if rpc else ""),
            )
        )
        _, codim = bundle_locus(y, cent)
        checks.append(
            CheckItem(
                "bundle-locus-codim",
                codim is None or codim >= 2,
                "locus empty" if codim is None else f"minimal codim {codim}",
            )
        )
        pair_ok = True
        bad = None
        for ai in range(y.n_rays):
            if ai in cent:
                continue
            for s in range(len(cent)):
                for t in range(s + 1, len(cent)):
                    if not spans_cone(y, (cent[s], cent[t], ai)):
                        pair_ok = False
                        bad = (cent[s], cent[t], ai)
        checks.append(
            CheckItem(
                "pair-cones",
                pair_ok,
                "all <x_i, x_j, a> span" if pair_ok else f"{y.cone_labels(bad)} spans no cone",
            )
        )
    if reference_ray_vectors is not None:
        same = tuple(r.vector for r in y.rays) == tuple(reference_ray_vectors)
        checks.append(CheckItem("ray-set-preserved", same, "ray vectors match" if same else "ray vectors differ"))
    return VerificationReport(tuple(checks))


def replay(log: TransformLog) -> LatticeFan:
    """Re-apply the logged steps to the initial fan; must reproduce the final
    fan exactly."""
    cur = log.initial
    for step in log.steps:
        if step.kind in ("blowdown", "exceptional_pair"):
            for data in step.relations:
                idx = tuple(sorted(cur.vector_index[v] for v in data.lhs))
                rel = primitive_relation(cur, idx)
                cur = contract(cur, BlowdownSpec(rel))
        elif step.kind == "flip":
            (data,) = step.relations
            idx = tuple(sorted(cur.vector_index[v] for v in data.lhs))
            rel = primitive_relation(cur, idx)
            cur = flip(cur, FlipSpec(rel))
        else:
            raise PipelineError("replay", f"unknown step kind {step.kind}")
    return cur


# -- diagnostics for centered collections of order 4 -------------------------


@dataclass(frozen=True)
class M3Row:
    collection: tuple[str, ...]
    relation: str
    tag: str
    contractible: bool
    singular_if_transformed: bool


@dataclass(frozen=True)
class M3Report:
    rows: tuple[M3Row, ...]
    auxiliaries: tuple[str, ...]
    exceptional: ExceptionalDecomposition | None

    def __str__(self) -> str:
        lines = []
        for r in self.rows:
            flags = []
            flags.append("contractible" if r.contractible else "NOT contractible")
            if r.singular_if_transformed:
                flags.append("singular if transformed")
            lines.append(f"{r.relation}  [{r.tag}; {'; '.join(flags)}]")
        if self.auxiliaries:
            lines.append("auxiliary candidates: " + "; ".join(self.auxiliaries))
        if self.exceptional is not None:
            lines.append(f"exceptional decomposition: {self.exceptional.pattern}")
        return "\n".join(lines) if lines else "no relevant relations"


def diagnose_m3(f: LatticeFan, centered: ConeRef) -> M3Report:
    """Classification-only report for centered collections of order 4: shape
    tags, contractibility, singularity flags (a focus coefficient above 1
    means the associated contraction or flip leaves the smooth category), and
    candidate auxiliary relations whose contraction removes a relevant
    collection.  Performs no transformations."""
    cent = require_centered(f, centered)
    if len(cent) != 4:
        raise UnsupportedError(f"diagnostics need a centered collection of order 4, got {len(cent)}")
    rel_rows = []
    relevant = relevant_collections(f, cent)
    relevant_sets = [set(q) for q, _, _ in relevant]
    for q, tag, rel in relevant:
        rel_rows.append(
            M3Row(
                collection=f.cone_labels(q),
                relation=rel.describe(f),
                tag=tag,
                contractible=is_contractible(f, rel),
                singular_if_transformed=any(mu > 1 for mu in rel.coefficients),
            )
        )
    aux = []
    for p in primitive_collections(f):
        if any(p == q for q, _, _ in relevant):
            continue
        rel = primitive_relation(f, p)
        if len(rel.focus) != 1 or rel.coefficients != (1,):
            continue
        z = rel.focus[0]
        if any(z in qs for qs in relevant_sets) and is_contractible(f, rel):
            aux.append(rel.describe(f))
    return M3Report(
        rows=tuple(rel_rows),
        auxiliaries=tuple(aux),
        exceptional=detect_exceptional(f, cent),
    )
