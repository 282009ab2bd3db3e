"""Objective estimation and confidence bounds for candidate edits.

The search maximizes agreement with the target classifier minus a
per-rule complexity penalty. Agreement is estimated as the fraction of
pooled labeled instances (given data plus synthetics) on which the
decision set matches the stored label. Each candidate edit gets a
symmetric confidence interval whose half-width is

    beta * sqrt(rho0 * V(r) / N(r))

where r is the rule the edit touches, V its normalized volume, N the
number of pooled instances it covers, and rho0 the density of the given
dataset over the full input space (the real-instance count, since the
full space has volume 1). An uncovered rule (N = 0) gets an unbounded
interval, which steers sampling into its region.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ValidationError
from .rules import DecisionSet, Rule, coverage_count, predict, rule_covers, rule_volume
from .schema import InputSpace, LabeledInstance


@dataclass(frozen=True)
class ObjectiveParams:
    """lam: per-rule penalty; beta: exploration rate; rho0: dataset density
    over the full space (real-instance count under normalized volume)."""

    lam: float = 0.01
    beta: float = 0.02
    rho0: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValidationError(f"lambda must be finite and >= 0, got {self.lam}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValidationError(f"beta must be finite and >= 0, got {self.beta}")
        if self.rho0 is not None and not self.rho0 > 0:
            raise ValidationError(f"rho0 must be positive, got {self.rho0}")

    def resolved(self, n_real: int) -> "ObjectiveParams":
        """Fill rho0 from the real-instance count when left unset."""
        if self.rho0 is not None:
            return self
        return replace(self, rho0=float(n_real))


@dataclass(frozen=True)
class Estimate:
    """Point estimate and confidence interval for one decision set / edit.

    agree_count and pool_n carry the exact integer tallies behind
    theta_hat so incremental updates stay bit-identical to recomputing
    from scratch.
    """

    q_hat: float
    theta_hat: float
    lower: float
    upper: float
    support: int
    agree_count: int
    pool_n: int


def empirical_theta(s: DecisionSet, pool) -> float:
    """Fraction of the pooled instances whose label the set reproduces."""
    if not pool:
        raise ValidationError("empirical agreement is undefined on an empty pool")
    agree = sum(1 for li in pool if predict(s, li.instance) == li.label)
    return agree / len(pool)


def objective_estimate(s: DecisionSet, pool, p: ObjectiveParams) -> float:
    return empirical_theta(s, pool) - p.lam * len(s)


def interval_width(beta: float, rho0: float, volume: float, support: int) -> float:
    """Half-width of the confidence interval; inf when nothing is covered.

    beta = 0 forces zero width regardless of support, which is what makes
    the zero-exploration run purely passive.
    """
    if beta == 0.0:
        return 0.0
    if support == 0:
        return math.inf
    return beta * math.sqrt(rho0 * volume / support)


def action_bounds(
    q_hat: float,
    r_a: Rule,
    pool,
    space: InputSpace,
    p: ObjectiveParams,
    theta_hat: float | None = None,
    agree_count: int | None = None,
) -> Estimate:
    """Confidence interval for an edit whose affected rule is r_a."""
    if p.rho0 is None:
        raise ValidationError("rho0 is unset; call ObjectiveParams.resolved first")
    n = coverage_count(r_a, pool)
    w = interval_width(p.beta, p.rho0, rule_volume(r_a, space), n)
    pool_n = len(pool)
    if theta_hat is None:
        theta_hat = q_hat
    if agree_count is None:
        agree_count = round(theta_hat * pool_n)
    return Estimate(
        q_hat=q_hat,
        theta_hat=theta_hat,
        lower=q_hat - w,
        upper=q_hat + w,
        support=n,
        agree_count=agree_count,
        pool_n=pool_n,
    )


def estimate_for(
    s: DecisionSet, r_a: Rule, pool, space: InputSpace, p: ObjectiveParams
) -> Estimate:
    """From-scratch estimate of an edited set s with affected rule r_a."""
    if not pool:
        raise ValidationError("empirical agreement is undefined on an empty pool")
    agree = sum(1 for li in pool if predict(s, li.instance) == li.label)
    theta = agree / len(pool)
    q = theta - p.lam * len(s)
    return action_bounds(q, r_a, pool, space, p, theta_hat=theta, agree_count=agree)


def incremental_update(
    e: Estimate,
    s_after_action: DecisionSet,
    new_point: LabeledInstance,
    r_a: Rule,
    space: InputSpace,
    p: ObjectiveParams,
) -> Estimate:
    """Fold one appended labeled instance into an estimate.

    Equivalent to recomputing from scratch on the pool with new_point
    appended; only the new point is evaluated.
    """
    if p.rho0 is None:
        raise ValidationError("rho0 is unset; call ObjectiveParams.resolved first")
    agree = e.agree_count + (
        1 if predict(s_after_action, new_point.instance) == new_point.label else 0
    )
    support = e.support + (1 if rule_covers(r_a, new_point.instance) else 0)
    pool_n = e.pool_n + 1
    theta = agree / pool_n
    q = theta - p.lam * len(s_after_action)
    w = interval_width(p.beta, p.rho0, rule_volume(r_a, space), support)
    return Estimate(
        q_hat=q,
        theta_hat=theta,
        lower=q - w,
        upper=q + w,
        support=support,
        agree_count=agree,
        pool_n=pool_n,
    )
