"""Random generators shared by the property and acceptance tests."""
from __future__ import annotations

import numpy as np

from activerules import (
    AttributeSpec,
    DecisionSet,
    InputSpace,
    Instance,
    Rule,
    interval_condition,
    value_condition,
)

WORDS = ["alpha", "beta", "gamma", "delta", "zeta", "kappa", "omega", "sigma"]


def random_space(rng, max_attrs: int = 5) -> InputSpace:
    m = int(rng.integers(1, max_attrs + 1))
    attrs = []
    for j in range(m):
        if rng.random() < 0.5:
            lo = float(rng.uniform(-10, 5))
            hi = lo + float(rng.uniform(0.5, 10))
            attrs.append(AttributeSpec.continuous(f"c{j}", lo, hi))
        else:
            k = int(rng.integers(2, len(WORDS) + 1))
            attrs.append(AttributeSpec.categorical(f"k{j}", WORDS[:k]))
    return InputSpace(tuple(attrs))


def random_instance(space: InputSpace, rng) -> Instance:
    vals = []
    for a in space.attributes:
        if a.is_continuous:
            vals.append(float(rng.uniform(a.lo, a.hi)))
        else:
            vals.append(a.values[int(rng.integers(len(a.values)))])
    return Instance(tuple(vals))


def random_rule(space: InputSpace, rng) -> Rule:
    n_conds = int(rng.integers(1, space.m + 1))
    attrs = rng.choice(space.m, size=n_conds, replace=False)
    conds = []
    for j in sorted(int(a) for a in attrs):
        a = space.attributes[j]
        if a.is_continuous:
            lo = float(rng.uniform(a.lo, a.hi))
            hi = float(rng.uniform(lo, a.hi))
            conds.append(interval_condition(j, lo, hi))
        else:
            k = int(rng.integers(1, len(a.values) + 1))
            picked = rng.choice(len(a.values), size=k, replace=False)
            conds.append(value_condition(j, [a.values[int(i)] for i in picked]))
    return Rule(conds)


def random_decision_set(space: InputSpace, rng, max_rules: int = 4) -> DecisionSet:
    rules = []
    for _ in range(int(rng.integers(0, max_rules + 1))):
        r = random_rule(space, rng)
        if r not in rules:
            rules.append(r)
    return DecisionSet(rules)


def random_rows(space: InputSpace, rng, n: int) -> np.ndarray:
    rows = np.empty((n, space.m))
    for j, a in enumerate(space.attributes):
        if a.is_continuous:
            rows[:, j] = rng.uniform(a.lo, a.hi, size=n)
        else:
            rows[:, j] = rng.integers(0, len(a.values), size=n)
    return rows
