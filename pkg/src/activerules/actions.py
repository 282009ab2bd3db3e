"""Enumeration and application of single-edit modifications of a decision set.

Five edit kinds exist: add a rule, remove a rule, and add, remove, or
modify one condition of a rule. Candidate continuous endpoints come from
a fixed cut-point grid (empirical quantiles of the training data), so the
action space is finite and stable across iterations. Every action carries
the rule whose region it touches; confidence bounds are computed on that
rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StaleActionError, ValidationError
from .rules import (
    Condition,
    DecisionSet,
    Interval,
    Rule,
    ValueSet,
    interval_condition,
    value_condition,
)
from .schema import InputSpace

ADD_RULE = "add_rule"
REMOVE_RULE = "remove_rule"
ADD_CONDITION = "add_condition"
REMOVE_CONDITION = "remove_condition"
MODIFY_CONDITION = "modify_condition"


@dataclass(frozen=True)
class Action:
    """One edit of a decision set.

    affected_rule is the rule whose region drives the confidence bound:
    the post-edit rule for additions and modifications, the removed rule
    for rule removal. target_rule is the pre-edit rule the edit applies
    to (None for add_rule) and guards against stale application.
    """

    kind: str
    affected_rule: Rule
    rule_index: int = -1
    attr_index: int = -1
    target_rule: Rule | None = None

    @property
    def keeps_affected_rule(self) -> bool:
        """Whether the edited set still contains affected_rule."""
        return self.kind != REMOVE_RULE

    def resulting_size(self, s: DecisionSet) -> int:
        if self.kind == ADD_RULE:
            return len(s) + 1
        if self.kind == REMOVE_RULE:
            return len(s) - 1
        return len(s)


def apply_action(a: Action, s: DecisionSet) -> DecisionSet:
    """The edited decision set; s itself is unmodified."""
    rules = list(s.rules)
    if a.kind == ADD_RULE:
        if a.affected_rule in s:
            raise StaleActionError("rule to add is already present")
        return DecisionSet(rules + [a.affected_rule])
    if not (0 <= a.rule_index < len(rules)):
        raise StaleActionError(f"rule index {a.rule_index} out of range")
    if a.target_rule is not None and rules[a.rule_index] != a.target_rule:
        raise StaleActionError("decision set changed since the action was generated")
    if a.kind == REMOVE_RULE:
        del rules[a.rule_index]
        return DecisionSet(rules)
    if a.kind in (ADD_CONDITION, REMOVE_CONDITION, MODIFY_CONDITION):
        others = rules[: a.rule_index] + rules[a.rule_index + 1 :]
        if a.affected_rule in others:
            raise StaleActionError("edit would duplicate an existing rule")
        rules[a.rule_index] = a.affected_rule
        return DecisionSet(rules)
    raise ValidationError(f"unknown action kind {a.kind!r}")


def candidate_cutpoints(values, lo: float, hi: float, bins: int) -> list[float]:
    """Interior cut points for one continuous attribute.

    The (1/bins ... (bins-1)/bins) quantiles of the distinct observed
    values, linearly interpolated, deduplicated, and restricted to the
    open interval (lo, hi). Fewer than two distinct values yield no cuts.
    """
    if bins < 2:
        raise ValidationError(f"bins must be >= 2, got {bins}")
    distinct = np.unique(np.asarray(list(values), dtype=np.float64))
    if distinct.size < 2:
        return []
    qs = np.arange(1, bins) / bins
    cuts = np.unique(np.quantile(distinct, qs, method="linear"))
    return [float(c) for c in cuts if lo < c < hi]


def compute_cutpoints(X: np.ndarray, space: InputSpace, bins: int) -> list[list[float]]:
    """Per-attribute cut lists from encoded training rows (empty for
    categorical attributes)."""
    out = []
    for j, a in enumerate(space.attributes):
        if a.is_continuous:
            out.append(candidate_cutpoints(X[:, j], a.lo, a.hi, bins))
        else:
            out.append([])
    return out


def _candidate_conditions(space: InputSpace, cuts, attr: int) -> list[Condition]:
    """Single-attribute candidates: both half-intervals per cut for a
    continuous attribute, each singleton value for a categorical one."""
    a = space.attributes[attr]
    if a.is_continuous:
        conds = []
        for v in cuts[attr]:
            conds.append(interval_condition(attr, a.lo, v))
            conds.append(interval_condition(attr, v, a.hi))
        return conds
    return [value_condition(attr, [u]) for u in a.values]


def _ladder(space: InputSpace, cuts, attr: int) -> list[float]:
    a = space.attributes[attr]
    return [a.lo] + list(cuts[attr]) + [a.hi]


def _step_left(ladder, x: float) -> float | None:
    below = [v for v in ladder if v < x]
    return max(below) if below else None


def _step_right(ladder, x: float) -> float | None:
    above = [v for v in ladder if v > x]
    return min(above) if above else None


def _modified_payloads(space: InputSpace, cuts, c: Condition):
    """Every one-step modification of a condition's payload, in a fixed
    order: endpoint moves for intervals (lower left/right, upper
    left/right), then value additions and removals in domain order."""
    a = space.attributes[c.attribute]
    out = []
    if isinstance(c.payload, Interval):
        ladder = _ladder(space, cuts, c.attribute)
        lo, hi = c.payload.lo, c.payload.hi
        v = _step_left(ladder, lo)
        if v is not None:
            out.append(Interval(v, hi))
        v = _step_right(ladder, lo)
        if v is not None and v < hi:
            out.append(Interval(v, hi))
        v = _step_left(ladder, hi)
        if v is not None and v > lo:
            out.append(Interval(lo, v))
        v = _step_right(ladder, hi)
        if v is not None:
            out.append(Interval(lo, v))
    else:
        present = c.payload.values
        for u in a.values:
            if u not in present:
                out.append(ValueSet(present | {u}))
        if len(present) >= 2:
            for u in a.values:
                if u in present:
                    out.append(ValueSet(present - {u}))
    return out


def generate_actions(s: DecisionSet, space: InputSpace, cuts) -> list[Action]:
    """The full single-edit neighborhood of s, in deterministic order.

    Edits that would duplicate an existing rule or recreate s itself are
    excluded. The enumeration order is part of the search contract since
    ties are broken by action index.
    """
    actions: list[Action] = []
    existing = set(s.rules)

    def try_replace(kind, idx, new_rule, attr=-1):
        old = s.rules[idx]
        if new_rule == old or new_rule in existing:
            return
        actions.append(
            Action(
                kind=kind,
                affected_rule=new_rule,
                rule_index=idx,
                attr_index=attr,
                target_rule=old,
            )
        )

    for attr in range(space.m):
        for cond in _candidate_conditions(space, cuts, attr):
            rule = Rule([cond])
            if rule not in existing:
                actions.append(Action(kind=ADD_RULE, affected_rule=rule))

    for idx, rule in enumerate(s.rules):
        actions.append(
            Action(
                kind=REMOVE_RULE,
                affected_rule=rule,
                rule_index=idx,
                target_rule=rule,
            )
        )

    for idx, rule in enumerate(s.rules):
        constrained = rule.constrained_attributes()
        for attr in range(space.m):
            if attr in constrained:
                continue
            for cond in _candidate_conditions(space, cuts, attr):
                try_replace(
                    ADD_CONDITION, idx, Rule(rule.conditions + (cond,)), attr
                )

    for idx, rule in enumerate(s.rules):
        if len(rule) < 2:
            continue
        for cond in rule.conditions:
            remaining = tuple(c for c in rule.conditions if c is not cond)
            try_replace(REMOVE_CONDITION, idx, Rule(remaining), cond.attribute)

    for idx, rule in enumerate(s.rules):
        for cond in rule.conditions:
            for payload in _modified_payloads(space, cuts, cond):
                new_conditions = tuple(
                    Condition(c.attribute, payload) if c is cond else c
                    for c in rule.conditions
                )
                try_replace(MODIFY_CONDITION, idx, Rule(new_conditions), cond.attribute)

    return actions
