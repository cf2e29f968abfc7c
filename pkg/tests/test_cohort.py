import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riskfuse.cohort import (
    ViewSpec,
    build_endpoint,
    filter_cohort,
    load_cohort,
    split_views,
    variance_filter,
)
from riskfuse.errors import DataError

from conftest import make_table


class TestLoadCohort:
    def test_mixed_kinds_and_missing(self, csv_dir):
        path = csv_dir("t.csv", "a,b\n1,x\n2,y\n,z\n")
        table = load_cohort(path)
        a = table.column("a")
        b = table.column("b")
        assert a.kind == "numeric"
        assert np.isnan(a.values[2]) and a.values[0] == 1.0
        assert b.kind == "categorical"
        assert list(b.values) == ["x", "y", "z"]

    def test_one_bad_cell_forces_categorical(self, csv_dir):
        table = load_cohort(csv_dir("t.csv", "c\n1\n2\nthree\n"))
        assert table.column("c").kind == "categorical"

    def test_missing_tokens_case_insensitive(self, csv_dir):
        table = load_cohort(csv_dir("t.csv", "c\nNA\nnan\n7\nNaN\n"))
        col = table.column("c")
        assert col.kind == "numeric"
        assert np.isnan(col.values[[0, 1, 3]]).all() and col.values[2] == 7.0

    def test_inf_token_is_not_numeric(self, csv_dir):
        table = load_cohort(csv_dir("t.csv", "c\n1\ninf\n"))
        assert table.column("c").kind == "categorical"

    def test_ragged_rows_rejected(self, csv_dir):
        with pytest.raises(DataError, match="fields"):
            load_cohort(csv_dir("t.csv", "a,b\n1,2\n3\n"))

    def test_duplicate_header_rejected(self, csv_dir):
        with pytest.raises(DataError, match="duplicate"):
            load_cohort(csv_dir("t.csv", "a,a\n1,2\n"))

    def test_unreadable_path(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            load_cohort(tmp_path / "absent.csv")


class TestBuildEndpoint:
    def make(self, t, status):
        return make_table(
            overall_survival_months=np.asarray(t, dtype=float),
            death_from_cancer=np.array(status, dtype=object),
        )

    def test_four_case_rule(self):
        table = self.make(
            [40, 80, 70, 30],
            ["Died of Disease", "Died of Disease", "Living", "Living"],
        )
        ep = build_endpoint(table, horizon=60)
        assert ep.y[0] == 1.0  # event within the window
        assert ep.y[1] == 0.0  # died after the window
        assert ep.y[2] == 0.0  # alive past the window
        assert np.isnan(ep.y[3])  # censored before the window

    def test_label_normalization(self):
        table = self.make(
            [10, 10, 10, 10, 90, 10],
            ["DEAD", "deceased", "1", "Died of Other Causes", "ALIVE", "mystery"],
        )
        ep = build_endpoint(table)
        assert list(ep.delta[:3]) == [1.0, 1.0, 1.0]
        assert ep.delta[3] == 0.0  # non-cancer death counts as no event
        assert ep.delta[4] == 0.0
        assert np.isnan(ep.delta[5]) and np.isnan(ep.y[5])

    def test_numeric_status_column(self):
        table = make_table(
            overall_survival_months=np.array([10.0, 90.0]),
            overall_survival=np.array([1.0, 0.0]),
        )
        ep = build_endpoint(table)
        assert ep.y[0] == 1.0 and ep.y[1] == 0.0

    def test_prefers_cancer_specific_column(self):
        table = make_table(
            overall_survival_months=np.array([10.0]),
            overall_survival=np.array([1.0]),
            death_from_cancer=np.array(["Living"], dtype=object),
        )
        ep = build_endpoint(table)
        assert np.isnan(ep.y[0])  # living + t<60: indeterminate

    def test_missing_required_columns(self):
        with pytest.raises(DataError, match="overall_survival_months"):
            build_endpoint(make_table(x=np.array([1.0])))
        with pytest.raises(DataError, match="death_from_cancer"):
            build_endpoint(make_table(overall_survival_months=np.array([1.0])))

    def test_negative_time_rejected(self):
        with pytest.raises(DataError, match="negative"):
            build_endpoint(self.make([-1], ["Living"]))

    def test_reconstruction_invariant(self, rng):
        n = 300
        t = rng.uniform(0, 150, n)
        labels = rng.choice(["Died of Disease", "Living", "Died of Other Causes"], n)
        ep = build_endpoint(self.make(t, labels), horizon=60)
        for i in range(n):
            d, ti = ep.delta[i], ep.t_months[i]
            if d == 1 and ti <= 60:
                assert ep.y[i] == 1.0
            elif (d == 1 and ti > 60) or (d == 0 and ti >= 60):
                assert ep.y[i] == 0.0
            else:
                assert np.isnan(ep.y[i])


class TestFilterCohort:
    def make(self, statuses, times):
        table = make_table(
            patient_id=np.array([f"P{i}" for i in range(len(times))], dtype=object),
            overall_survival_months=np.asarray(times, dtype=float),
            death_from_cancer=np.array(statuses, dtype=object),
        )
        return table, build_endpoint(table)

    def test_drops_missing_y(self):
        table, ep = self.make(
            ["Died of Disease", "Living", "Living", "Living", "Living"],
            [10, 80, 20, 70, 30],
        )
        out, ep_out = filter_cohort(table, ep)
        assert out.n_rows == 3
        assert list(ep_out.y) == [1.0, 0.0, 0.0]
        assert list(out.column("patient_id").values) == ["P0", "P1", "P3"]

    def test_idempotent(self):
        table, ep = self.make(["Died of Disease", "Living"], [10, 20])
        once = filter_cohort(table, ep)
        twice = filter_cohort(*once)
        assert twice[0].n_rows == once[0].n_rows
        assert np.array_equal(twice[1].y, once[1].y)

    def test_all_missing_is_error(self):
        table, ep = self.make(["Living", "Living"], [10, 20])
        with pytest.raises(DataError, match="no rows"):
            filter_cohort(table, ep)


class TestSplitViews:
    def make(self):
        return make_table(
            patient_id=np.array(["a", "b"], dtype=object),
            age=np.array([50.0, 60.0]),
            tumor_size=np.array([1.0, 2.0]),
            gene1_z=np.array([0.1, 0.2]),
            overall_survival_months=np.array([5.0, 6.0]),
            overall_survival=np.array([0.0, 1.0]),
            death_from_cancer=np.array(["Living", "Dead"], dtype=object),
        )

    def test_basic_split(self):
        spec = ViewSpec(clinical_columns=("age", "tumor_size"))
        clin, gen = split_views(self.make(), spec)
        assert clin.column_names == ["age", "tumor_size"]
        assert gen.column_names == ["gene1_z"]

    def test_survival_listed_in_clinical_still_excluded(self):
        spec = ViewSpec(clinical_columns=("age", "tumor_size", "overall_survival"))
        clin, gen = split_views(self.make(), spec)
        assert "overall_survival" not in clin.column_names
        for banned in ("overall_survival_months", "overall_survival", "death_from_cancer"):
            assert banned not in clin.column_names + gen.column_names

    def test_partition_of_columns(self):
        table = self.make()
        spec = ViewSpec(clinical_columns=("age",))
        clin, gen = split_views(table, spec)
        reunion = set(clin.column_names) | set(gen.column_names) | {"patient_id"} | set(spec.survival_columns)
        assert reunion == set(table.column_names)
        assert not set(clin.column_names) & set(gen.column_names)

    def test_absent_column_is_error(self):
        spec = ViewSpec(clinical_columns=("age", "nope"))
        with pytest.raises(DataError, match="nope"):
            split_views(self.make(), spec)

    def test_empty_genomic_remainder_is_error(self):
        spec = ViewSpec(clinical_columns=("age", "tumor_size", "gene1_z"))
        with pytest.raises(DataError, match="genomic view is empty"):
            split_views(self.make(), spec)


class TestVarianceFilter:
    def test_top_k_by_variance(self):
        # variances 0.1, 5.0, 2.0 -> keep columns 2 and 3
        table = make_table(
            low=np.array([0.0, 0.1, 0.2, 0.3, 0.63]),
            high=np.array([0.0, 2.0, 4.0, 6.0, 3.0]),
            mid=np.array([0.0, 1.0, 2.0, 3.0, 2.1]),
        )
        vals = {c.name: np.var(c.values, ddof=1) for c in table.columns}
        assert vals["low"] < vals["mid"] < vals["high"]
        out = variance_filter(table, k=2)
        assert out.column_names == ["high", "mid"]

    def test_k_saturation_keeps_all(self):
        table = make_table(a=np.array([1.0, 2.0]), b=np.array([3.0, 5.0]))
        assert variance_filter(table, k=10).column_names == ["a", "b"]

    def test_constant_column_never_beats_varying(self):
        table = make_table(
            const=np.array([1.0, 1.0, 1.0]),
            x=np.array([0.0, 1.0, 2.0]),
            y=np.array([0.0, 2.0, 4.0]),
        )
        assert "const" not in variance_filter(table, k=2).column_names

    def test_missing_cells_skipped(self):
        table = make_table(
            a=np.array([1.0, np.nan, 3.0]),
            b=np.array([0.0, 0.1, 0.2]),
        )
        out = variance_filter(table, k=1)
        assert out.column_names == ["a"]  # var of (1,3) = 2 beats 0.01

    def test_no_numeric_columns_is_error(self):
        table = make_table(s=np.array(["x", "y"], dtype=object))
        with pytest.raises(DataError, match="numeric"):
            variance_filter(table, k=1)

    def test_tie_breaks_to_earlier_column(self):
        table = make_table(
            first=np.array([0.0, 1.0, 2.0]),
            second=np.array([5.0, 6.0, 7.0]),  # same variance as first
            third=np.array([0.0, 0.01, 0.02]),
        )
        assert variance_filter(table, k=1).column_names == ["first"]

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_row_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.standard_normal((12, 5)) * rng.uniform(0.1, 3.0, 5)
        table = make_table(**{f"c{j}": data[:, j] for j in range(5)})
        shuffled = table.take_rows(rng.permutation(12))
        assert variance_filter(table, k=3).column_names == variance_filter(shuffled, k=3).column_names
