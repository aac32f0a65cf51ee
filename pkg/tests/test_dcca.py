import itertools
import json

import numpy as np
import pytest

from longmem.dcca import (
    CrossFluctuation,
    DccaMatrix,
    cross_fluctuation,
    pairwise_matrix,
    rho_dcca,
    rho_from_profiles,
    rho_vs_scale,
)
from longmem.errors import AlignmentError, DegenerateSeriesError, ScaleError
from longmem.scaling import ScaleGrid, default_grid, dfa, dma, fluctuation
from longmem.series import (
    Profile,
    RatePanel,
    TimeSeries,
    profile_from_values,
    series_profile,
)
from longmem.synthetic import BlockSpec, FgnSpec, generate_blocks, generate_fgn

import reference
from conftest import make_panel, make_series


def fgn_profile(seed, n=2048, hurst=0.7):
    ts = generate_fgn(FgnSpec(n=n, hurst=hurst, seed=seed))
    return profile_from_values(ts.values, ts.id)


SMALL_GRID = ScaleGrid((10, 20, 50, 100))


class TestCrossFluctuation:
    def test_self_pair_equals_auto(self):
        prof = fgn_profile(0)
        cross = cross_fluctuation(prof, prof, SMALL_GRID, dfa(1))
        auto = fluctuation(prof, SMALL_GRID, dfa(1))
        assert np.allclose(cross.values, auto.values ** 2, rtol=1e-12)
        assert list(cross.n_segments) == list(auto.n_segments)

    def test_negated_pair_flips_sign(self):
        prof = fgn_profile(1)
        neg = Profile(prof.parent_id + "-neg", -prof.values)
        cross = cross_fluctuation(prof, neg, SMALL_GRID, dfa(1))
        auto = fluctuation(prof, SMALL_GRID, dfa(1))
        assert np.allclose(cross.values, -(auto.values ** 2), rtol=1e-12)

    def test_argument_order_irrelevant(self):
        pa, pb = fgn_profile(2), fgn_profile(3)
        ab = cross_fluctuation(pa, pb, SMALL_GRID, dma())
        ba = cross_fluctuation(pb, pa, SMALL_GRID, dma())
        assert np.array_equal(ab.values, ba.values)
        assert ab.pair == ("fgn-h0.7-seed2", "fgn-h0.7-seed3")
        assert ba.pair == ("fgn-h0.7-seed3", "fgn-h0.7-seed2")

    def test_length_mismatch(self):
        pa = fgn_profile(0, n=512)
        pb = fgn_profile(1, n=1024)
        with pytest.raises(AlignmentError, match="different"):
            cross_fluctuation(pa, pb, SMALL_GRID, dfa(1))

    def test_table_and_json(self):
        pa, pb = fgn_profile(2), fgn_profile(3)
        cross = cross_fluctuation(pa, pb, SMALL_GRID, dfa(1))
        lines = cross.to_table().strip().split("\n")
        assert lines[0] == "s,cross_f2"
        assert len(lines) == len(SMALL_GRID.scales) + 1
        payload = cross.to_json_dict()
        assert payload["pair"] == list(cross.pair)
        json.dumps(payload)


class TestRho:
    def test_self_is_one(self):
        for seed, s in [(0, 10), (1, 50), (2, 100)]:
            prof = fgn_profile(seed)
            assert rho_from_profiles(prof, prof, s, dfa(1)) == pytest.approx(
                1.0, abs=1e-12)

    def test_negated_is_minus_one(self):
        prof = fgn_profile(4)
        neg = Profile("neg", -prof.values)
        rho = rho_from_profiles(prof, neg, 50, dfa(1))
        assert rho == pytest.approx(-1.0, abs=1e-12)

    def test_positive_rescaling_is_one(self):
        ts = make_series(np.abs(np.random.default_rng(5).standard_normal(600))
                         + 1.0, "x")
        scaled = TimeSeries("cx", ts.dates, 3.7 * ts.values)
        assert rho_dcca(ts, scaled, 25, dfa(1)) == pytest.approx(1.0,
                                                                 abs=1e-12)

    def test_bounded_everywhere(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            pa = profile_from_values(rng.standard_normal(400), "a")
            pb = profile_from_values(rng.standard_normal(400), "b")
            s = int(rng.integers(5, 200))
            rho = rho_from_profiles(pa, pb, s, dfa(1))
            assert abs(rho) <= 1.0

    def test_mixing_weight_monotonicity(self):
        common = generate_fgn(FgnSpec(n=4096, hurst=0.7, seed=7)).values
        e1 = generate_fgn(FgnSpec(n=4096, hurst=0.7, seed=8)).values
        e2 = generate_fgn(FgnSpec(n=4096, hurst=0.7, seed=9)).values
        rho_at = {}
        for w in (0.0, 0.5, 1.0):
            p1 = profile_from_values(w * common + (1 - w) * e1, "x1")
            p2 = profile_from_values(w * common + (1 - w) * e2, "x2")
            rho_at[w] = np.mean([rho_from_profiles(p1, p2, s, dfa(1))
                                 for s in (50, 100, 200)])
        assert rho_at[0.0] < rho_at[0.5] < rho_at[1.0]
        assert abs(rho_at[0.0]) < 0.2
        assert rho_at[0.5] > 0.2
        assert rho_at[1.0] == pytest.approx(1.0, abs=1e-9)

    def test_independent_pairs_stay_weak(self):
        # Independent fGn: the scale-averaged |rho| stays below 0.15, and
        # no single scale strays past 0.35, in >= 18/20 seed pairs.
        grid = default_grid(8192)
        n_mean_ok = 0
        n_max_ok = 0
        for seed in range(20):
            pa = fgn_profile(seed, n=8192)
            pb = fgn_profile(100 + seed, n=8192)
            rhos = np.abs([rho_from_profiles(pa, pb, s, dfa(1))
                           for s in grid])
            n_mean_ok += rhos.mean() < 0.15
            n_max_ok += rhos.max() < 0.35
        assert n_mean_ok >= 18
        assert n_max_ok >= 18

    def test_degenerate_series_named(self):
        good = make_series(np.abs(np.random.default_rng(1)
                                  .standard_normal(300)) + 1.0, "good")
        flat = TimeSeries("flat", good.dates, np.full(300, 2.0))
        with pytest.raises(DegenerateSeriesError) as err:
            rho_dcca(good, flat, 20, dfa(1))
        assert err.value.ids == ("flat",)

    def test_both_degenerate_listed(self):
        dates = make_series(np.arange(100.0), "t").dates
        f1 = TimeSeries("f1", dates, np.full(100, 1.0))
        f2 = TimeSeries("f2", dates, np.full(100, 2.0))
        with pytest.raises(DegenerateSeriesError) as err:
            rho_dcca(f1, f2, 10, dfa(1))
        assert err.value.ids == ("f1", "f2")

    def test_date_mismatch(self):
        import datetime as dt

        a = make_series(np.arange(100.0), "a")
        b = make_series(np.arange(100.0), "b", start=dt.date(2001, 1, 1))
        with pytest.raises(AlignmentError, match="common date index"):
            rho_dcca(a, b, 10, dfa(1))


class TestPairwiseMatrix:
    def test_identical_pair_is_ones(self):
        values = np.abs(np.random.default_rng(2).standard_normal(500)) + 1.0
        panel = make_panel({"u": values, "v": values})
        m = pairwise_matrix(panel, 50, dfa(1))
        assert np.allclose(m.rho, 1.0, atol=1e-12)

    def test_matches_per_pair_rho(self):
        panel = RatePanel(tuple(
            generate_fgn(FgnSpec(n=1024, hurst=0.6, seed=s))
            for s in range(4)))
        m = pairwise_matrix(panel, 64, dfa(1), input_kind="increments")
        for a, b in itertools.combinations(panel.ids, 2):
            direct = rho_dcca(panel.member(a), panel.member(b), 64, dfa(1),
                              input_kind="increments")
            assert m.pair_value(a, b) == pytest.approx(direct, abs=1e-12)

    def test_exact_symmetry_and_diagonal(self):
        spec = BlockSpec(n_blocks=2, block_size=3, common_weight=0.7,
                         hurst=0.8, n=1024, seed=3)
        m = pairwise_matrix(generate_blocks(spec), 50, dma(),
                            input_kind="increments")
        assert np.array_equal(m.rho, m.rho.T)
        assert np.all(np.diag(m.rho) == 1.0)
        assert np.max(np.abs(m.rho)) <= 1.0

    def test_blocks_within_above_across(self):
        spec = BlockSpec(n_blocks=3, block_size=5, common_weight=0.9,
                         hurst=0.8, n=2048, seed=0)
        panel = generate_blocks(spec)
        m = pairwise_matrix(panel, 100, dfa(1), input_kind="increments")
        within, across = [], []
        for a, b in itertools.combinations(m.ids, 2):
            value = m.pair_value(a, b)
            (within if a.split(":")[0] == b.split(":")[0]
             else across).append(value)
        assert np.mean(within) > np.mean(across)

    def test_degenerate_members_all_listed(self):
        good = make_series(np.abs(np.random.default_rng(3)
                                  .standard_normal(400)) + 1.0, "good")
        c1 = TimeSeries("c1", good.dates, np.full(400, 1.0))
        c2 = TimeSeries("c2", good.dates, np.full(400, 5.0))
        with pytest.raises(DegenerateSeriesError) as err:
            pairwise_matrix(RatePanel((good, c1, c2)), 20, dfa(1))
        assert err.value.ids == ("c1", "c2")

    def test_unaligned_rejected(self):
        import datetime as dt

        a = make_series(np.arange(300.0), "a")
        b = make_series(np.arange(300.0), "b", start=dt.date(2001, 1, 1))
        with pytest.raises(AlignmentError, match="aligned"):
            pairwise_matrix(RatePanel((a, b)), 20, dfa(1))

    def test_single_series_rejected(self):
        panel = make_panel({"only": np.arange(100.0) % 7 + 1.0})
        with pytest.raises(ValueError, match="at least two"):
            pairwise_matrix(panel, 10, dfa(1))

    def test_threads_identical(self):
        panel = RatePanel(tuple(
            generate_fgn(FgnSpec(n=512, hurst=0.7, seed=s))
            for s in range(5)))
        one = pairwise_matrix(panel, 32, dfa(1), input_kind="increments")
        four = pairwise_matrix(panel, 32, dfa(1), input_kind="increments",
                               threads=4)
        assert np.array_equal(one.rho, four.rho)

    def test_table_layout(self):
        panel = RatePanel(tuple(
            generate_fgn(FgnSpec(n=512, hurst=0.7, seed=s))
            for s in range(3)))
        m = pairwise_matrix(panel, 32, dfa(1), input_kind="increments")
        lines = m.to_table().strip().split("\n")
        assert lines[0] == "id," + ",".join(m.ids)
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == m.ids[0]
        assert float(first[1]) == 1.0
        payload = json.loads(m.to_json())
        assert payload["scale"] == 32

    def test_matrix_validation(self):
        method = dfa(1)
        with pytest.raises(ValueError, match="square"):
            DccaMatrix(("a", "b"), 10, method, np.ones((2, 3)))
        bad_diag = np.array([[0.5, 0.1], [0.1, 1.0]])
        with pytest.raises(ValueError, match="diagonal"):
            DccaMatrix(("a", "b"), 10, method, bad_diag)
        asym = np.array([[1.0, 0.2], [0.3, 1.0]])
        with pytest.raises(ValueError, match="symmetric"):
            DccaMatrix(("a", "b"), 10, method, asym)
        too_big = np.array([[1.0, 1.5], [1.5, 1.0]])
        with pytest.raises(ValueError, match="lie in"):
            DccaMatrix(("a", "b"), 10, method, too_big)


class TestRhoVsScale:
    def test_identical_pair_flat_at_one(self):
        values = np.abs(np.random.default_rng(4).standard_normal(2048)) + 1.0
        a = make_series(values, "a")
        b = TimeSeries("b", a.dates, values)
        curve = rho_vs_scale(a, b, method=dfa(1))
        assert np.allclose(curve.values, 1.0, atol=1e-12)

    def test_default_grid_span(self):
        a = generate_fgn(FgnSpec(n=2048, hurst=0.7, seed=0))
        b = generate_fgn(FgnSpec(n=2048, hurst=0.7, seed=1))
        curve = rho_vs_scale(a, b, method=dma(), input_kind="increments")
        assert curve.scales[0] == 5
        assert curve.scales[-1] == 500
        assert len(curve.scales) <= 40
        assert np.all(np.abs(curve.values) <= 1.0)

    def test_too_short_for_default_grid(self):
        a = generate_fgn(FgnSpec(n=300, hurst=0.7, seed=0))
        b = generate_fgn(FgnSpec(n=300, hurst=0.7, seed=1))
        with pytest.raises(ScaleError, match="half"):
            rho_vs_scale(a, b, method=dfa(1), input_kind="increments")

    def test_method_required(self):
        a = generate_fgn(FgnSpec(n=2048, hurst=0.7, seed=0))
        with pytest.raises(ValueError, match="method"):
            rho_vs_scale(a, a)

    def test_table(self):
        a = generate_fgn(FgnSpec(n=2048, hurst=0.7, seed=0))
        b = generate_fgn(FgnSpec(n=2048, hurst=0.7, seed=1))
        curve = rho_vs_scale(a, b, grid=ScaleGrid((10, 50, 200)),
                             method=dfa(1), input_kind="increments")
        lines = curve.to_table().strip().split("\n")
        assert lines[0] == "s,rho"
        assert len(lines) == 4
        json.dumps(curve.to_json_dict())


class TestBruteForce:
    @pytest.mark.parametrize("method", [dfa(1), dma(), dma("backward")],
                             ids=lambda m: m.label)
    @pytest.mark.parametrize("s", [5, 10])
    def test_rho_matches_naive(self, method, s):
        rng = np.random.default_rng(12)
        pa = profile_from_values(rng.standard_normal(59), "a")
        pb = profile_from_values(rng.standard_normal(59), "b")
        got = rho_from_profiles(pa, pb, s, method)
        want = reference.naive_rho(pa.values, pb.values, s, method)
        assert got == pytest.approx(want, rel=1e-10)

    def test_cross_f2_matches_naive(self):
        rng = np.random.default_rng(13)
        pa = profile_from_values(rng.standard_normal(60), "a")
        pb = profile_from_values(rng.standard_normal(60), "b")
        grid = ScaleGrid((5, 10), s_min=5)
        for method in (dfa(1), dma()):
            cross = cross_fluctuation(pa, pb, grid, method)
            for s, got in cross.points:
                want = reference.naive_cross_f2(pa.values, pb.values, s,
                                                method)
                assert got == pytest.approx(want, rel=1e-10)


class TestSeriesLevelPipeline:
    def test_series_profile_feeds_pipeline(self):
        ts = make_series(np.abs(np.random.default_rng(9)
                                .standard_normal(400)) + 2.0, "r")
        prof = series_profile(ts)
        assert len(prof) == len(ts) - 1
        rho = rho_dcca(ts, ts, 20, dfa(1))
        assert rho == pytest.approx(1.0, abs=1e-12)
