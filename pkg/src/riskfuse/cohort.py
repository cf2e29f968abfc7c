"""Cohort ingestion: CSV loading, 5-year endpoint construction, predictor views.

A cohort is an immutable column-typed table. Numeric columns are stored as
float arrays with NaN marking missing cells; categorical columns as object
arrays with None marking missing cells. All operations return new tables.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError

MISSING_TOKENS = frozenset({"", "na", "nan"})

DEATH_LABELS = frozenset({"died of disease", "dead", "deceased", "1"})
ALIVE_LABELS = frozenset({"living", "alive", "0", "died of other causes"})

SURVIVAL_COLUMNS = ("overall_survival_months", "overall_survival", "death_from_cancer")

# Clinical variables of the standard METABRIC export, used when no explicit
# view specification is supplied.
DEFAULT_CLINICAL_COLUMNS = (
    "age_at_diagnosis",
    "type_of_breast_surgery",
    "cancer_type",
    "cancer_type_detailed",
    "cellularity",
    "chemotherapy",
    "pam50_+_claudin-low_subtype",
    "cohort",
    "er_status_measured_by_ihc",
    "er_status",
    "neoplasm_histologic_grade",
    "her2_status_measured_by_snp6",
    "her2_status",
    "tumor_other_histologic_subtype",
    "hormone_therapy",
    "inferred_menopausal_state",
    "integrative_cluster",
    "primary_tumor_laterality",
    "lymph_nodes_examined_positive",
    "mutation_count",
    "nottingham_prognostic_index",
    "oncotree_code",
    "pr_status",
    "radio_therapy",
    "3-gene_classifier_subtype",
    "tumor_size",
    "tumor_stage",
)


@dataclass(frozen=True)
class Column:
    """One typed column: numeric (float64 + NaN) or categorical (object + None)."""

    name: str
    kind: str  # "numeric" | "categorical"
    values: np.ndarray

    def missing_mask(self) -> np.ndarray:
        if self.kind == "numeric":
            return np.isnan(self.values)
        return np.array([v is None for v in self.values], dtype=bool)


@dataclass(frozen=True)
class CohortTable:
    """Immutable table of typed columns sharing one row count."""

    columns: tuple[Column, ...]
    n_rows: int

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names in table")
        for c in self.columns:
            if len(c.values) != self.n_rows:
                raise DataError(f"column {c.name!r} has {len(c.values)} cells, expected {self.n_rows}")

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise DataError(f"column {name!r} not present in table")

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def select(self, names: list[str]) -> "CohortTable":
        return CohortTable(tuple(self.column(n) for n in names), self.n_rows)

    def take_rows(self, idx: np.ndarray) -> "CohortTable":
        idx = np.asarray(idx)
        cols = tuple(Column(c.name, c.kind, c.values[idx]) for c in self.columns)
        return CohortTable(cols, int(len(idx)))


@dataclass(frozen=True)
class EndpointVector:
    """Per-patient follow-up time, event indicator and 5-year binary outcome.

    ``delta`` is 1 for a recorded cancer death, 0 otherwise, and NaN when the
    status label could not be interpreted. ``y`` is 1/0/NaN following the
    fixed-window rule; rows with unparseable status or insufficient follow-up
    carry NaN.
    """

    t_months: np.ndarray
    delta: np.ndarray
    y: np.ndarray
    horizon: float = 60.0

    def __post_init__(self):
        n = len(self.t_months)
        if len(self.delta) != n or len(self.y) != n:
            raise DataError("endpoint arrays must have equal length")

    def __len__(self) -> int:
        return len(self.t_months)

    def take(self, idx: np.ndarray) -> "EndpointVector":
        return EndpointVector(self.t_months[idx], self.delta[idx], self.y[idx], self.horizon)


@dataclass(frozen=True)
class ViewSpec:
    """Names that carve a cohort into clinical and genomic predictor views."""

    clinical_columns: tuple[str, ...] = DEFAULT_CLINICAL_COLUMNS
    id_column: str = "patient_id"
    survival_columns: tuple[str, ...] = SURVIVAL_COLUMNS

    @staticmethod
    def from_dict(d: dict) -> "ViewSpec":
        return ViewSpec(
            clinical_columns=tuple(d.get("clinical_columns", DEFAULT_CLINICAL_COLUMNS)),
            id_column=d.get("id_column", "patient_id"),
            survival_columns=tuple(d.get("survival_columns", SURVIVAL_COLUMNS)),
        )


def _is_missing_token(cell: str) -> bool:
    return cell.strip().lower() in MISSING_TOKENS


def _parse_number(cell: str) -> float | None:
    """Return a finite float, or None when the cell is not a usable number."""
    try:
        x = float(cell)
    except ValueError:
        return None
    return x if np.isfinite(x) else None


def load_cohort(csv_path) -> CohortTable:
    """Load a CSV file with a header row into a typed CohortTable.

    A column is numeric when every non-missing cell parses to a finite
    number, categorical otherwise. Empty strings and the tokens NA / NaN
    (any case) count as missing.
    """
    try:
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{csv_path}: file is empty")
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {csv_path}: {exc}") from exc

    if len(set(header)) != len(header):
        raise DataError(f"{csv_path}: duplicate header names")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{csv_path}: row {i + 2} has {len(row)} fields, header has {len(header)}")

    n = len(rows)
    columns = []
    for j, name in enumerate(header):
        raw = [rows[i][j] for i in range(n)]
        missing = [_is_missing_token(c) for c in raw]
        parsed = [None if m else _parse_number(c) for c, m in zip(raw, missing)]
        numeric = all(p is not None for p, m in zip(parsed, missing) if not m)
        if numeric:
            vals = np.array([np.nan if m else p for p, m in zip(parsed, missing)], dtype=float)
            columns.append(Column(name, "numeric", vals))
        else:
            vals = np.array([None if m else c.strip() for c, m in zip(raw, missing)], dtype=object)
            columns.append(Column(name, "categorical", vals))
    return CohortTable(tuple(columns), n)


def _normalize_status(col: Column) -> np.ndarray:
    """Map a status column onto {1, 0, NaN} (cancer death / not / unknown)."""
    n = len(col.values)
    out = np.full(n, np.nan)
    if col.kind == "numeric":
        vals = col.values
        out[vals == 1] = 1.0
        out[vals == 0] = 0.0
        return out
    for i, v in enumerate(col.values):
        if v is None:
            continue
        label = v.strip().lower()
        if label in DEATH_LABELS:
            out[i] = 1.0
        elif label in ALIVE_LABELS:
            out[i] = 0.0
    return out


def build_endpoint(table: CohortTable, horizon: float = 60.0, status_column: str | None = None) -> EndpointVector:
    """Construct the fixed-window cancer-death endpoint from survival columns.

    The event indicator comes from ``death_from_cancer`` when present (else
    ``overall_survival``), with string labels normalized case-insensitively.
    The binary outcome is 1 for a cancer death within the horizon, 0 for a
    death after the horizon or survival past it, and missing when follow-up
    ends before the horizon without an event or the status is unrecognized.
    """
    if not table.has_column("overall_survival_months"):
        raise DataError("endpoint requires column 'overall_survival_months'")
    if status_column is None:
        for cand in ("death_from_cancer", "overall_survival"):
            if table.has_column(cand):
                status_column = cand
                break
        else:
            raise DataError("endpoint requires 'death_from_cancer' or 'overall_survival'")
    elif not table.has_column(status_column):
        raise DataError(f"status column {status_column!r} not present")

    t_col = table.column("overall_survival_months")
    if t_col.kind != "numeric":
        raise DataError("'overall_survival_months' must be numeric")
    t = t_col.values.astype(float)
    if np.any(t[~np.isnan(t)] < 0):
        raise DataError("negative follow-up times")

    delta = _normalize_status(table.column(status_column))

    y = np.full(len(t), np.nan)
    known = ~np.isnan(delta) & ~np.isnan(t)
    y[known & (delta == 1) & (t <= horizon)] = 1.0
    y[known & (delta == 1) & (t > horizon)] = 0.0
    y[known & (delta == 0) & (t >= horizon)] = 0.0
    # remaining rows (censored before horizon, unknown status, missing time) stay NaN
    return EndpointVector(t, delta, y, float(horizon))


def filter_cohort(table: CohortTable, endpoint: EndpointVector) -> tuple[CohortTable, EndpointVector]:
    """Drop rows whose 5-year outcome is missing; preserve order, re-base indices."""
    if len(endpoint) != table.n_rows:
        raise DataError("endpoint length does not match table")
    keep = np.flatnonzero(~np.isnan(endpoint.y))
    if len(keep) == 0:
        raise DataError("no rows with a determinable 5-year outcome")
    return table.take_rows(keep), endpoint.take(keep)


def split_views(table: CohortTable, spec: ViewSpec) -> tuple[CohortTable, CohortTable]:
    """Split predictors into a clinical view and the genomic remainder.

    Survival columns and the id column never appear in either view, even if
    listed among the clinical columns.
    """
    for name in (spec.id_column, *spec.clinical_columns, *spec.survival_columns):
        if not table.has_column(name):
            raise DataError(f"view column {name!r} not present in table")
    excluded = set(spec.survival_columns) | {spec.id_column}
    clinical_names = [c for c in spec.clinical_columns if c not in excluded]
    clinical_set = set(clinical_names)
    genomic_names = [c.name for c in table.columns if c.name not in excluded and c.name not in clinical_set]
    if not genomic_names:
        raise DataError("genomic view is empty after removing clinical, id and survival columns")
    return table.select(clinical_names), table.select(genomic_names)


def variance_filter(genomic: CohortTable, k: int = 50) -> CohortTable:
    """Keep the k numeric columns with the largest sample variance.

    Missing cells are skipped; a column with fewer than two observed values
    gets variance 0. Ties break toward the earlier column. Categorical
    columns are dropped.
    """
    numeric = [c for c in genomic.columns if c.kind == "numeric"]
    if not numeric:
        raise DataError("variance filter requires at least one numeric column")
    variances = []
    for c in numeric:
        obs = c.values[~np.isnan(c.values)]
        variances.append(float(np.var(obs, ddof=1)) if len(obs) >= 2 else 0.0)
    if len(numeric) <= k:
        keep = list(range(len(numeric)))
    else:
        # stable sort on negated variance keeps original order among ties
        keep = sorted(np.argsort(-np.asarray(variances), kind="stable")[:k])
    return CohortTable(tuple(numeric[i] for i in keep), genomic.n_rows)
