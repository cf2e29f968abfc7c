import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from riskfuse.cohort import CohortTable, Column


def make_table(**columns):
    """Build a CohortTable from keyword arrays; object dtype -> categorical."""
    cols = []
    n = None
    for name, values in columns.items():
        values = np.asarray(values)
        if values.dtype.kind in "if":
            cols.append(Column(name, "numeric", values.astype(float)))
        else:
            cols.append(Column(name, "categorical", np.array(
                [None if v is None else str(v) for v in values], dtype=object)))
        n = len(values)
    return CohortTable(tuple(cols), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def csv_dir(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
