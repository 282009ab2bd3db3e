"""Conditions, rules, and decision sets, plus their geometric measures.

A condition constrains one attribute: a closed interval for continuous
attributes, a non-empty value subset for categorical ones. A rule is a
conjunction of conditions on distinct attributes; a decision set predicts
positive when any rule fires. Volume is normalized so the full input
space has volume 1, which makes the dataset density over the whole space
equal to the instance count.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError
from .schema import Instance, InputSpace

VOLUME_FLOOR = 1e-9  # per-attribute fraction floor; guards zero-width intervals


@dataclass(frozen=True)
class Interval:
    """Closed interval payload for a continuous attribute."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValidationError(f"interval requires lo <= hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class ValueSet:
    """Value subset payload for a categorical attribute."""

    values: frozenset[str]

    def __post_init__(self):
        if not self.values:
            raise ValidationError("value set must be non-empty")


@dataclass(frozen=True)
class Condition:
    attribute: int
    payload: Interval | ValueSet

    @property
    def is_interval(self) -> bool:
        return isinstance(self.payload, Interval)


def interval_condition(attribute: int, lo: float, hi: float) -> Condition:
    return Condition(attribute, Interval(float(lo), float(hi)))


def value_condition(attribute: int, values) -> Condition:
    return Condition(attribute, ValueSet(frozenset(values)))


@dataclass(frozen=True)
class Rule:
    """Conjunction of conditions on pairwise-distinct attributes.

    Conditions are stored sorted by attribute index, so two rules with the
    same conditions compare equal regardless of construction order.
    """

    conditions: tuple[Condition, ...]

    def __init__(self, conditions):
        conditions = tuple(sorted(conditions, key=lambda c: c.attribute))
        if not conditions:
            raise ValidationError("a rule needs at least one condition")
        attrs = [c.attribute for c in conditions]
        if len(set(attrs)) != len(attrs):
            raise ValidationError("a rule may constrain each attribute at most once")
        object.__setattr__(self, "conditions", conditions)

    def __len__(self) -> int:
        return len(self.conditions)

    def condition_on(self, attribute: int) -> Condition | None:
        for c in self.conditions:
            if c.attribute == attribute:
                return c
        return None

    def constrained_attributes(self) -> frozenset[int]:
        return frozenset(c.attribute for c in self.conditions)


@dataclass(frozen=True)
class DecisionSet:
    """Unordered set of rules; predicts 1 iff any rule covers the instance."""

    rules: tuple[Rule, ...]

    def __init__(self, rules=()):
        rules = tuple(rules)
        if len(set(rules)) != len(rules):
            raise ValidationError("decision set contains duplicate rules")
        object.__setattr__(self, "rules", rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, rule: Rule) -> bool:
        return rule in self.rules


EMPTY_SET = DecisionSet(())


# ---- evaluation -----------------------------------------------------------


def condition_satisfies(c: Condition, x: Instance) -> bool:
    v = x.values[c.attribute]
    if isinstance(c.payload, Interval):
        return c.payload.lo <= float(v) <= c.payload.hi
    return v in c.payload.values


def rule_covers(r: Rule, x: Instance) -> bool:
    return all(condition_satisfies(c, x) for c in r.conditions)


def predict(s: DecisionSet, x: Instance) -> int:
    return 1 if any(rule_covers(r, x) for r in s.rules) else 0


# ---- compiled (array) form -------------------------------------------------


class CompiledRules:
    """Rules lowered to the array form the kernels consume.

    Index i of the kernel output corresponds to rules[i]. An empty rule
    list compiles to zero-row arrays and covers nothing.
    """

    def __init__(self, space: InputSpace, rules):
        rules = tuple(rules)
        m, K = space.m, space.max_domain
        R = len(rules)
        lo = np.full((R, m), -np.inf, dtype=np.float64)
        hi = np.full((R, m), np.inf, dtype=np.float64)
        mask = np.ones((R, m, K), dtype=np.bool_)
        for ri, rule in enumerate(rules):
            for c in rule.conditions:
                j = c.attribute
                if isinstance(c.payload, Interval):
                    lo[ri, j] = c.payload.lo
                    hi[ri, j] = c.payload.hi
                else:
                    mask[ri, j, :] = False
                    for v in c.payload.values:
                        mask[ri, j, space.code_of(j, v)] = True
        self.space = space
        self.rules = rules
        self.lo, self.hi, self.mask = lo, hi, mask

    def __len__(self) -> int:
        return len(self.rules)

    def cover(self, X: np.ndarray) -> np.ndarray:
        """(R, n) coverage of each rule over encoded rows X."""
        if len(self.rules) == 0:
            return np.zeros((0, X.shape[0]), dtype=np.bool_)
        return kernels.cover_matrix(X, self.space.kinds, self.lo, self.hi, self.mask)

    def any_cover(self, X: np.ndarray) -> np.ndarray:
        """(n,) disjunction over rules; all-False for an empty rule list."""
        if len(self.rules) == 0:
            return np.zeros(X.shape[0], dtype=np.bool_)
        return self.cover(X).any(axis=0)


def predict_rows(s: DecisionSet, X: np.ndarray, space: InputSpace) -> np.ndarray:
    """Vector predictions of a decision set over encoded rows."""
    return CompiledRules(space, s.rules).any_cover(X)


# ---- measures ---------------------------------------------------------------


def rule_volume(r: Rule, space: InputSpace) -> float:
    """Fraction of the input space covered by a rule, in (0, 1].

    Product over attributes of the covered fraction: interval width over
    attribute range for continuous, member count over domain size for
    categorical, 1 for unconstrained attributes. Each continuous fraction
    is floored at VOLUME_FLOOR so degenerate intervals keep the density
    finite.
    """
    vol = 1.0
    for c in r.conditions:
        a = space.attributes[c.attribute]
        if isinstance(c.payload, Interval):
            vol *= max((c.payload.hi - c.payload.lo) / a.span, VOLUME_FLOOR)
        else:
            vol *= len(c.payload.values) / len(a.values)
    return vol


def coverage_count(r: Rule, pool) -> int:
    """Number of pool instances (real and synthetic alike) covered by r."""
    return sum(1 for li in pool if rule_covers(r, li.instance))


def relative_density(r: Rule, pool, space: InputSpace) -> float:
    """Covered-instance count over rule volume; 0.0 when nothing is covered.

    Callers treat a zero density as an infinitely wide confidence bound.
    """
    n = coverage_count(r, pool)
    if n == 0:
        return 0.0
    return n / rule_volume(r, space)


# ---- rendering and JSON -----------------------------------------------------


def render_condition(c: Condition, space: InputSpace) -> str:
    a = space.attributes[c.attribute]
    if isinstance(c.payload, Interval):
        return f"{a.name} ∈ [{c.payload.lo:.2f}, {c.payload.hi:.2f}]"
    ordered = [v for v in a.values if v in c.payload.values]
    return f"{a.name} ∈ {{{', '.join(ordered)}}}"


def render_rule(r: Rule, space: InputSpace) -> str:
    clauses = " AND ".join(render_condition(c, space) for c in r.conditions)
    return f"IF {clauses} THEN positive"


def render_decision_set(s: DecisionSet, space: InputSpace) -> str:
    return "\n".join(render_rule(r, space) for r in s.rules)


def rule_to_json(r: Rule, space: InputSpace) -> dict:
    conds = []
    for c in r.conditions:
        a = space.attributes[c.attribute]
        if isinstance(c.payload, Interval):
            conds.append({"attribute": a.name, "min": c.payload.lo, "max": c.payload.hi})
        else:
            ordered = [v for v in a.values if v in c.payload.values]
            conds.append({"attribute": a.name, "values": ordered})
    return {"conditions": conds}


def rule_from_json(doc: dict, space: InputSpace) -> Rule:
    conds = []
    for entry in doc.get("conditions", []):
        j = space.index_of(entry["attribute"])
        a = space.attributes[j]
        if "values" in entry:
            if a.is_continuous:
                raise ValidationError(f"attribute {a.name!r} is continuous")
            bad = [v for v in entry["values"] if v not in a.values]
            if bad:
                raise ValidationError(f"values {bad} not in domain of {a.name!r}")
            conds.append(value_condition(j, entry["values"]))
        else:
            if not a.is_continuous:
                raise ValidationError(f"attribute {a.name!r} is categorical")
            lo, hi = float(entry["min"]), float(entry["max"])
            if lo < a.lo or hi > a.hi:
                raise ValidationError(
                    f"interval [{lo}, {hi}] outside range of {a.name!r}"
                )
            conds.append(interval_condition(j, lo, hi))
    return Rule(conds)


def decision_set_to_json(s: DecisionSet, space: InputSpace) -> dict:
    return {"rules": [rule_to_json(r, space) for r in s.rules]}


def decision_set_from_json(doc: dict, space: InputSpace) -> DecisionSet:
    return DecisionSet(rule_from_json(r, space) for r in doc.get("rules", []))
