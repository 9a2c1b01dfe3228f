import pytest
from hypothesis import given, settings, strategies as st

from toricfans.errors import FanValidationError, PreconditionError
from toricfans.fan import (
    LatticeFan,
    faces_of_dim,
    is_projective,
    locate,
    spans_cone,
    star_subdivision,
    validate,
    wall_neighbors,
)

from fixtures import b3, fivefold, hirzebruch, p1xp1, p2, p3, pn


class TestValidate:
    def test_p2_valid(self):
        assert validate(p2()).ok

    def test_missing_cone_breaks_completeness(self):
        f = LatticeFan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])
        report = validate(f)
        assert not report.ok
        assert any("wall" in msg for msg in report.failures)

    def test_non_primitive_ray(self):
        f = LatticeFan(2, [(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        report = validate(f)
        assert not report.ok
        assert any("primitive" in msg for msg in report.failures)

    def test_non_unimodular_cone(self):
        f = LatticeFan(2, [(1, 0), (1, 2), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert not validate(f).ok

    def test_duplicate_ray(self):
        f = LatticeFan(2, [(1, 0), (1, 0), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert not validate(f).ok

    def test_downstream_rejects_invalid(self):
        f = LatticeFan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])
        with pytest.raises(FanValidationError):
            locate(f, (1, 1))


class TestSpansCone:
    def test_face_of_max_cone(self):
        assert spans_cone(p2(), {0, 1})

    def test_full_collection_is_not_a_cone(self):
        assert not spans_cone(p2(), {0, 1, 2})

    def test_zero_cone(self):
        assert spans_cone(p2(), ())

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            spans_cone(p2(), {7})


class TestLocate:
    def test_b3_new_ray(self):
        assert locate(b3(), (0, 1, 1)) == ((4,), (1,))

    def test_origin(self):
        assert locate(p2(), (0, 0)) == ((), ())

    def test_first_quadrant(self):
        assert locate(p2(), (2, 1)) == ((0, 1), (2, 1))

    @given(st.lists(st.integers(-8, 8), min_size=3, max_size=3))
    @settings(max_examples=60)
    def test_coefficients_reproduce_point(self, p):
        f = b3()
        cone, coeffs = locate(f, p)
        total = [0, 0, 0]
        for i, c in zip(cone, coeffs):
            for d, x in enumerate(f.vector(i)):
                total[d] += c * x
        assert tuple(total) == tuple(p)
        assert all(c > 0 for c in coeffs)


class TestStarSubdivision:
    def test_p3_to_b3(self):
        sub = star_subdivision(p3(), (1, 2), label="b")
        assert sub == b3()

    def test_p2_point_blowup(self):
        sub = star_subdivision(p2(), (0, 1))
        assert sub.rays[-1].vector == (1, 1)
        assert validate(sub).ok
        assert len(sub.max_cones) == 4

    def test_center_size_one_rejected(self):
        with pytest.raises(PreconditionError):
            star_subdivision(p2(), (0,))

    def test_non_cone_center_rejected(self):
        with pytest.raises(PreconditionError):
            star_subdivision(p2(), (0, 1, 2))

    @pytest.mark.parametrize("fan", [p2(), p1xp1(), p3(), b3()])
    def test_output_valid_and_counts(self, fan):
        for cone in fan.max_cones:
            for size in (2, fan.rank):
                center = cone[:size]
                sub = star_subdivision(fan, center)
                assert validate(sub).ok
                assert sub.n_rays == fan.n_rays + 1
                through = sum(1 for c in fan.max_cones if set(center) <= set(c))
                assert len(sub.max_cones) == len(fan.max_cones) + through * (len(center) - 1)


class TestFaces:
    def test_p2_dims(self):
        assert faces_of_dim(p2(), 1) == [(0,), (1,), (2,)]
        assert len(faces_of_dim(p2(), 2)) == 3
        assert faces_of_dim(p2(), 0) == [()]

    def test_b3_codim_one(self):
        assert len(faces_of_dim(b3(), 2)) == 9

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            faces_of_dim(p2(), 3)

    def test_every_ray_in_a_max_cone(self):
        for f in (p2(), p1xp1(), b3(), pn(4)):
            rays_seen = {i for c in f.max_cones for i in c}
            assert rays_seen == set(range(f.n_rays))


class TestWalls:
    def test_wall_neighbors_b3(self):
        # wall <v1, v2> joins the cones <v1,v2,v0> and <v1,v2,b>
        assert wall_neighbors(b3(), (0, 1)) == (3, 4)

    def test_not_a_wall(self):
        with pytest.raises(PreconditionError):
            wall_neighbors(b3(), (1, 2))  # a primitive collection, not a face


class TestProjectivity:
    def test_projective_examples(self):
        assert is_projective(p2())
        assert is_projective(b3())
        assert is_projective(hirzebruch(2))

    def test_appendix_fivefold_projective(self):
        assert is_projective(fivefold(550))

    def test_nonprojective_threefold(self):
        from fixtures import nonprojective_3fold

        f = nonprojective_3fold()
        assert validate(f).ok
        assert not is_projective(f)

    def test_nonprojective_certificate_by_hand(self):
        # independent of the LP: the classes of the three twisted wall curves
        # sum to zero, and an ample divisor would pair positively with each
        from fixtures import nonprojective_3fold
        from toricfans.chern import wall_curve_class

        f = nonprojective_3fold()
        lab = f.label_index
        walls = [
            (lab["v3"], lab["w1"]),
            (lab["v1"], lab["w2"]),
            (lab["v2"], lab["w3"]),
        ]
        alphas = [wall_curve_class(f, tuple(sorted(w))).alpha for w in walls]
        total = [sum(col) for col in zip(*alphas)]
        assert all(t == 0 for t in total)

    def test_flops_of_projective_tower_stay_detectable(self):
        # the fixture is reachable from a projective blowup tower by flops;
        # its flop partner obtained by reversing one twist is projective again
        from fixtures import nonprojective_3fold
        from toricfans.birational import FlipSpec, flip
        from toricfans.primitive import primitive_relation

        f = nonprojective_3fold()
        rel = primitive_relation(f, tuple(sorted((f.label_index["v1"], f.label_index["w3"]))))
        assert rel.degree == 0
        g = flip(f, FlipSpec(rel))
        assert validate(g).ok and is_projective(g)


def test_fan_equality_and_labels():
    f = b3()
    assert f == b3()
    assert f != p3()
    relabeled = f.with_labels(["a"] * 5)
    assert relabeled != f
    assert relabeled.ray_label(0) == "a"
