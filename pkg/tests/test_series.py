import datetime as dt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from longmem.errors import AlignmentError, SchemaError
from longmem.series import (
    RatePanel,
    TimeSeries,
    align,
    increments,
    load_panel,
    panel_to_csv,
    profile,
    profile_from_values,
    series_profile,
)

from conftest import make_panel, make_series


class TestTimeSeries:
    def test_rejects_short(self):
        with pytest.raises(ValueError, match="length 1"):
            make_series([1.0])

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            make_series([1.0, np.nan, 2.0])

    def test_rejects_unsorted_dates(self):
        d = dt.date
        with pytest.raises(ValueError, match="not strictly increasing"):
            TimeSeries("x", (d(2020, 1, 2), d(2020, 1, 1)), [1.0, 2.0])

    def test_values_read_only(self):
        ts = make_series([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            ts.values[0] = 9.0

    def test_restrict_inclusive(self):
        ts = make_series([1.0, 2.0, 3.0, 4.0, 5.0])
        sub = ts.restrict(ts.dates[1], ts.dates[3])
        assert sub.dates == ts.dates[1:4]
        assert list(sub.values) == [2.0, 3.0, 4.0]

    def test_restrict_too_narrow(self):
        ts = make_series([1.0, 2.0, 3.0])
        with pytest.raises(AlignmentError):
            ts.restrict(ts.dates[0], ts.dates[0])


class TestLoadPanel:
    def test_complete_file(self, csv_panel):
        panel = load_panel(csv_panel)
        assert panel.ids == ("aaa", "bbb")
        assert all(len(s) == 5 for s in panel.series)
        assert panel.is_aligned

    def test_missing_cells_become_gaps(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("date,a,b\n2020-01-01,1,\n2020-01-02,2,5\n2020-01-03,3,6\n")
        panel = load_panel(p)
        assert len(panel.member("a")) == 3
        assert len(panel.member("b")) == 2
        assert not panel.is_aligned

    def test_duplicate_date(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("date,a\n2020-01-01,1\n2020-01-01,2\n2020-01-03,3\n")
        with pytest.raises(SchemaError, match="duplicate dates"):
            load_panel(p)

    def test_duplicate_label(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("date,a,a\n2020-01-01,1,2\n2020-01-02,3,4\n")
        with pytest.raises(SchemaError, match="duplicate column labels"):
            load_panel(p)

    def test_single_row_column(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("date,a\n2020-01-01,1\n")
        with pytest.raises(SchemaError, match="< 2"):
            load_panel(p)

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("date,a\n2020-01-01,1\n2020-01-02,oops\n")
        with pytest.raises(SchemaError, match="non-numeric"):
            load_panel(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="cannot read"):
            load_panel(tmp_path / "nope.csv")

    def test_unparseable_date_rows_dropped(self, tmp_path):
        p = tmp_path / "w.csv"
        p.write_text("date,a\n2020-01-01,1\nnot-a-date,9\n2020-01-03,3\n")
        with pytest.warns(UserWarning, match="unparseable dates"):
            panel = load_panel(p)
        assert len(panel.member("a")) == 2

    def test_round_trip(self, csv_panel):
        panel = load_panel(csv_panel)
        text = panel_to_csv(panel)
        back_path = csv_panel.parent / "back.csv"
        back_path.write_text(text)
        back = load_panel(back_path)
        assert back.ids == panel.ids
        for a, b in zip(panel.series, back.series):
            assert a.dates == b.dates
            assert np.array_equal(a.values, b.values)


class TestAlign:
    def test_intersect_shared_dates(self):
        a = make_series(np.arange(10.0), "a", start=dt.date(2020, 1, 1))
        b = make_series(np.arange(10.0), "b",
                        start=a.dates[2])  # starts 2 trading days later
        panel = RatePanel((a, b))
        out = align(panel)
        assert out.is_aligned
        assert out.date_index == a.dates[2:10]

    def test_intersect_is_exact_set_intersection(self):
        a = make_series(np.arange(8.0), "a")
        b_dates = a.dates[1::2]
        b = TimeSeries("b", b_dates, np.arange(len(b_dates), dtype=float))
        out = align(RatePanel((a, b)))
        assert set(out.date_index) == set(a.dates) & set(b_dates)

    def test_disjoint_ranges(self):
        a = make_series([1.0, 2.0], "a", start=dt.date(2020, 1, 1))
        b = make_series([1.0, 2.0], "b", start=dt.date(2021, 1, 1))
        with pytest.raises(AlignmentError, match="< 2"):
            align(RatePanel((a, b)))

    def test_forward_fill_interior_gap(self):
        full = make_series(np.arange(6.0), "full")
        holey_dates = full.dates[:2] + full.dates[3:]
        holey = TimeSeries("holey", holey_dates, [0.0, 1.0, 3.0, 4.0, 5.0])
        out = align(RatePanel((full, holey)), policy="forward_fill", max_gap=1)
        assert out.is_aligned
        assert len(out.date_index) == 6
        filled = out.member("holey").values
        assert filled[2] == 1.0  # carried from the prior observation

    def test_forward_fill_gap_longer_than_max(self):
        full = make_series(np.arange(8.0), "full")
        holey_dates = full.dates[:2] + full.dates[5:]
        holey = TimeSeries("holey", holey_dates, [0.0, 1.0, 5.0, 6.0, 7.0])
        out = align(RatePanel((full, holey)), policy="forward_fill", max_gap=2)
        # 3-wide run stays missing, so those dates drop out at intersection
        assert len(out.date_index) == 5

    def test_forward_fill_requires_max_gap(self):
        panel = make_panel({"a": np.arange(4.0)})
        with pytest.raises(ValueError, match="max_gap"):
            align(panel, policy="forward_fill")

    def test_forward_fill_leading_gap_is_error(self):
        full = make_series(np.arange(5.0), "full")
        late = TimeSeries("late", full.dates[1:], np.arange(4.0))
        with pytest.raises(AlignmentError, match="no prior value"):
            align(RatePanel((full, late)), policy="forward_fill", max_gap=2)

    def test_unknown_policy(self):
        panel = make_panel({"a": np.arange(4.0)})
        with pytest.raises(ValueError, match="policy"):
            align(panel, policy="pad")


class TestIncrementsAndProfile:
    def test_increments_basic(self):
        assert list(increments(make_series([2, 3, 5])).values) == [1.0, 2.0]

    def test_increments_constant(self):
        assert list(increments(make_series([4, 4, 4, 4])).values) == [0.0, 0.0, 0.0]

    def test_increments_absolute(self):
        assert list(increments(make_series([1.0, 0.5, 1.5])).values) == [0.5, 1.0]

    def test_profile_small(self):
        prof = profile_from_values([1.0, 2.0, 3.0], "t")
        assert list(prof.values) == [-1.0, -1.0, 0.0]

    def test_profile_zeros(self):
        prof = profile_from_values([0.0, 0.0, 0.0], "t")
        assert list(prof.values) == [0.0, 0.0, 0.0]

    def test_series_profile_kinds(self):
        ts = make_series([1.0, 3.0, 2.0, 5.0])
        via_levels = series_profile(ts)  # default: absolute changes first
        assert np.allclose(via_levels.values,
                           profile(increments(ts)).values)
        via_incr = series_profile(ts, input_kind="increments")
        assert np.allclose(via_incr.values,
                           np.cumsum(ts.values - ts.values.mean()))

    def test_series_profile_bad_kind(self):
        with pytest.raises(ValueError, match="input_kind"):
            series_profile(make_series([1.0, 2.0]), input_kind="returns")

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=200))
    def test_profile_telescopes_to_zero(self, xs):
        prof = profile_from_values(xs, "h")
        variation = float(np.sum(np.abs(np.diff(prof.values))))
        assert abs(prof.values[-1]) <= 1e-9 * max(variation, 1.0)


class TestRatePanel:
    def test_duplicate_ids_rejected(self):
        a = make_series([1.0, 2.0], "a")
        with pytest.raises(ValueError, match="duplicate"):
            RatePanel((a, a))

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no series"):
            RatePanel(())

    def test_member_lookup(self):
        panel = make_panel({"a": [1.0, 2.0], "b": [3.0, 4.0]})
        assert panel.member("b").id == "b"
        with pytest.raises(KeyError):
            panel.member("zz")
