import pytest

from toricfans.errors import ParseError, PreconditionError, ReconstructionError
from toricfans.fan import validate
from toricfans.fanio import (
    batch_classify,
    batch_csv,
    build_bundle_over_p1,
    emit_fan,
    parse_fan,
    parse_relations,
    reconstruct_fan,
    relations_of_fan,
    write_fan,
)
from toricfans.primitive import (
    is_fano,
    minimal_p_dimension,
    primitive_relations,
)

from fixtures import (
    b3,
    fivefold,
    fivefold_text,
    p1xp1,
    p2,
    pn,
    sixfold,
    small_zoo,
)


class TestToricfanFormat:
    @pytest.mark.parametrize("name,fan,_,__", small_zoo())
    def test_round_trip(self, name, fan, _, __):
        text = emit_fan(fan)
        back = parse_fan(text)
        assert back == fan
        assert emit_fan(back) == text  # canonical emission is byte-stable

    def test_b3_with_labels(self):
        text = emit_fan(b3())
        assert "# v1" in text and text.startswith("TORICFAN 1\ndim 3 rays 5 maxcones 6\n")
        assert parse_fan(text) == b3()

    def test_bad_header(self):
        with pytest.raises(ParseError):
            parse_fan("NOTAFAN 1\ndim 2 rays 0 maxcones 0\n")

    def test_rank_mismatch(self):
        text = "TORICFAN 1\ndim 2 rays 3 maxcones 3\n1 0 0\n0 1\n-1 -1\n0 1\n1 2\n0 2\n"
        with pytest.raises(ParseError) as err:
            parse_fan(text)
        assert err.value.line == 3

    def test_index_overflow(self):
        text = "TORICFAN 1\ndim 2 rays 3 maxcones 1\n1 0\n0 1\n-1 -1\n0 7\n"
        with pytest.raises(ParseError):
            parse_fan(text)

    def test_wrong_counts(self):
        text = "TORICFAN 1\ndim 2 rays 3 maxcones 3\n1 0\n0 1\n"
        with pytest.raises(ParseError):
            parse_fan(text)

    def test_comments_and_blank_lines_tolerated(self):
        text = emit_fan(p2())
        with_noise = "# leading comment\n\n" + text + "\n# trailing\n"
        assert parse_fan(with_noise) == p2()


class TestRelationsFormat:
    def test_basic(self):
        pres = parse_relations("x0 + x1 + x2 = 0\nx1 + a = b\nu + v = 2 b + c\n")
        assert pres.names == ("x0", "x1", "x2", "a", "b", "u", "v", "c")
        assert pres.relations[0].rhs == ()
        assert pres.relations[2].rhs == (("b", 2), ("c", 1))

    def test_juxtaposed_coefficient(self):
        pres = parse_relations("u + v = 2b\n")
        assert pres.relations[0].rhs == (("b", 2),)

    def test_lhs_coefficient_rejected(self):
        with pytest.raises(ParseError):
            parse_relations("2 u + v = b\n")

    def test_overlap_rejected(self):
        with pytest.raises(ParseError):
            parse_relations("u + v = u\n")

    def test_no_relations(self):
        with pytest.raises(ParseError):
            parse_relations("# nothing here\n")


class TestReconstruct:
    def test_p2_forced(self):
        f = reconstruct_fan(parse_relations("x0 + x1 + x2 = 0\n"), 2)
        assert validate(f).ok and f.n_rays == 3
        assert minimal_p_dimension(f) == 2

    @pytest.mark.parametrize("mid", [550, 659, 708])
    def test_fivefolds(self, mid):
        f = fivefold(mid)
        assert validate(f).ok and is_fano(f)
        assert f.n_rays - f.rank == 5
        assert len(primitive_relations(f)) == 8

    @pytest.mark.parametrize("mid", [276, 333, 338])
    def test_sixfolds(self, mid):
        f = sixfold(mid)
        assert validate(f).ok and is_fano(f)
        assert f.n_rays - f.rank == 5
        assert len(primitive_relations(f)) == 8

    def test_deleted_relation_detected(self):
        # dropping one relation leaves the system solvable but the recomputed
        # collections no longer match the presentation
        lines = [l for l in fivefold_text(550).strip().split("\n") if "u + v" not in l]
        with pytest.raises(ReconstructionError):
            reconstruct_fan(parse_relations("\n".join(lines)), 5)

    def test_underdetermined(self):
        # rank-1 system for two unknown rays
        text = "x0 + x1 = u + v\nu + v = x0 + x1\n"
        with pytest.raises(ReconstructionError) as err:
            reconstruct_fan(parse_relations(text), 2)
        assert "underdetermined" in str(err.value)

    def test_round_trip_through_relations(self):
        for fan in (p2(), p1xp1(), b3(), pn(4), fivefold(550)):
            pres = relations_of_fan(fan)
            rebuilt = reconstruct_fan(pres, fan.rank)
            # same combinatorics up to the basis choice
            back = relations_of_fan(rebuilt)
            normal = lambda p: sorted(
                (tuple(sorted(r.lhs)), tuple(sorted(r.rhs))) for r in p.relations
            )
            assert normal(back) == normal(pres)
            assert len(rebuilt.max_cones) == len(fan.max_cones)


class TestBundleBuilder:
    def test_trivial_bundle_is_product(self):
        f = build_bundle_over_p1([0, 0, 0])
        assert validate(f).ok
        degs = sorted(r.degree for r in primitive_relations(f))
        assert degs == [2, 3]  # fiber and base relations of P2 x P1
        assert minimal_p_dimension(f) == 1

    def test_b3_up_to_relabeling(self):
        f = build_bundle_over_p1([0, 0, 1])
        degs = sorted((r.order, r.degree) for r in primitive_relations(f))
        b = b3()
        assert degs == sorted((r.order, r.degree) for r in primitive_relations(b))
        assert minimal_p_dimension(f) == minimal_p_dimension(b) == 2
        from toricfans.chern import screen_2fano

        assert screen_2fano(f)[1] == screen_2fano(b)[1]

    def test_f1(self):
        f = build_bundle_over_p1([0, 1])
        degs = sorted(r.degree for r in primitive_relations(f))
        assert degs == [1, 2]

    def test_degree_data(self):
        f = build_bundle_over_p1([1, 2, 4])
        by_order = {r.order: r.degree for r in primitive_relations(f)}
        assert by_order[3] == 3  # fiber relation, m + 1
        assert by_order[2] == 2 - ((2 - 1) + (4 - 1))  # base relation

    def test_bad_length(self):
        with pytest.raises(PreconditionError):
            build_bundle_over_p1([0, 1], m=2)


class TestBatch:
    def test_single_p2(self, tmp_path):
        write_fan(p2(), tmp_path / "p2.fan")
        rows, hist = batch_classify(tmp_path)
        assert len(rows) == 1
        row = rows[0]
        assert (row.dim, row.rays, row.picard_rank) == (2, 3, 1)
        assert row.fano and row.m == 2 and row.rpc_count == 0
        assert str(row.min_ch2) == "3/2"
        assert hist == {2: {2: 1}}

    def test_histogram_and_csv_stability(self, tmp_path):
        for name, fan, _, _m in small_zoo():
            write_fan(fan, tmp_path / f"{name}.fan")
        rows1, hist = batch_classify(tmp_path, workers=1)
        rows2, _ = batch_classify(tmp_path, workers=3)
        assert batch_csv(rows1) == batch_csv(rows2)
        assert hist[2] == {1: 3, 2: 1}  # P1xP1, BlP2, F2 have m=1; P2 has m=2
        assert hist[3] == {2: 1, 3: 1}  # B3 and P3

    def test_unreadable_file_listed(self, tmp_path):
        (tmp_path / "broken.fan").write_text("not a fan\n")
        write_fan(p2(), tmp_path / "ok.fan")
        rows, _ = batch_classify(tmp_path)
        by_name = {r.file: r for r in rows}
        assert by_name["broken.fan"].error
        assert not by_name["ok.fan"].error
        assert batch_csv(rows).startswith("file,dim,")

    def test_row_without_centered_collection(self, tmp_path):
        from fixtures import nonprojective_3fold

        write_fan(nonprojective_3fold(), tmp_path / "np.fan")
        rows, hist = batch_classify(tmp_path)
        (row,) = rows
        assert row.m is None and row.rpc_count is None
        assert row.bound_candidate is False and not row.error
        assert hist == {}
        assert ",,," in row.csv()  # empty m and rpc columns
