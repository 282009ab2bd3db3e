import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from activerules import (
    DecisionSet,
    Instance,
    LabeledInstance,
    Rule,
    interval_condition,
    load_schema,
    make_boxes_oracle,
)

PRICE_STATE_SCHEMA = """{
  "attributes": [
    {"name": "price", "type": "continuous", "min": 0, "max": 10},
    {"name": "state", "type": "categorical",
     "values": ["California", "Texas", "NewYork"]}
  ]
}"""

UNIT_SQUARE_SCHEMA = """{
  "attributes": [
    {"name": "x", "type": "continuous", "min": 0, "max": 1},
    {"name": "y", "type": "continuous", "min": 0, "max": 1}
  ]
}"""


@pytest.fixture
def price_state_space():
    return load_schema(PRICE_STATE_SCHEMA)


@pytest.fixture
def unit_square_space():
    return load_schema(UNIT_SQUARE_SCHEMA)


@pytest.fixture
def two_box_truth():
    """Two diagonal corner boxes on the unit square."""
    return DecisionSet([
        Rule([interval_condition(0, 0.0, 0.45), interval_condition(1, 0.0, 0.45)]),
        Rule([interval_condition(0, 0.55, 1.0), interval_condition(1, 0.55, 1.0)]),
    ])


@pytest.fixture
def two_box_oracle(unit_square_space, two_box_truth):
    return make_boxes_oracle(two_box_truth, unit_square_space)


def skewed_two_box_rows(seed: int, n: int = 200) -> np.ndarray:
    """Training sample that hides the box extents: positives sit deep in the
    box corners, negatives form bands whose marginals straddle the edges."""
    rng = np.random.default_rng(seed)
    n_in = max(1, int(round(n * 0.125)))
    n_band = (n - 2 * n_in) // 2
    rows = np.vstack([
        np.column_stack([rng.uniform(0.0, 0.18, n_in), rng.uniform(0.0, 0.18, n_in)]),
        np.column_stack([rng.uniform(0.82, 1.0, n_in), rng.uniform(0.82, 1.0, n_in)]),
        np.column_stack([
            rng.uniform(0.3, 0.45, n_band), rng.uniform(0.55, 0.9, n_band)
        ]),
        np.column_stack([
            rng.uniform(0.55, 0.7, n - 2 * n_in - n_band),
            rng.uniform(0.3, 0.45, n - 2 * n_in - n_band),
        ]),
    ])
    return rows[rng.permutation(rows.shape[0])]


def labeled_pool(space, rows, oracle, origin="real"):
    labels = oracle.query_encoded_batch(np.asarray(rows, dtype=np.float64))
    return [
        LabeledInstance(space.decode(row), int(label), origin)
        for row, label in zip(rows, labels)
    ]


def labeled_from_pairs(space, pairs, origin="real"):
    return [
        LabeledInstance(Instance(tuple(vals)), label, origin)
        for vals, label in pairs
    ]
