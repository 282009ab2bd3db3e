"""The active local-search loop over decision sets.

Starting from the empty set, each iteration enumerates every single-edit
neighbor of the current decision set and applies the best one. "Best" is
decided by a lower/upper confidence bound race: the empirically best edit
and the most optimistic competitor each receive one freshly synthesized,
oracle-labeled instance inside their affected rule per round, until the
leader's lower bound clears every rival's upper bound (or the per-
iteration query budget runs out). An epsilon-greedy coin occasionally
applies a uniformly random edit instead, skipping the race entirely.

The best set seen so far is tracked throughout and re-scored on the final
pool at the end, so the returned set dominates every visited set under
the final estimates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .actions import Action, apply_action, compute_cutpoints, generate_actions
from .errors import RegionExhaustedError, ValidationError
from .objective import ObjectiveParams
from .oracle import Oracle
from .rules import CompiledRules, DecisionSet, EMPTY_SET, render_rule, rule_volume
from .sampling import generate_pool_rows, select_query_row
from .schema import InputSpace, LabeledInstance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    params: ObjectiveParams = field(default_factory=ObjectiveParams)
    epsilon: float = 0.1
    max_iters: int = 500
    pool_size: int = 50
    query_budget_per_iter: int = 100
    bins: int = 20
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.max_iters < 0:
            raise ValidationError("max_iters must be non-negative")
        if self.pool_size < 1 or self.query_budget_per_iter < 1:
            raise ValidationError("pool_size and query budget must be positive")
        if self.bins < 2:
            raise ValidationError("bins must be >= 2")


class SearchState:
    """Mutable search state: current and best sets, the labeled pool, RNG.

    Real instances are appended once up front and never mutated;
    synthetic instances are only ever appended.
    """

    def __init__(self, space: InputSpace, rng, current=EMPTY_SET, best=EMPTY_SET):
        self.space = space
        self.rng = rng
        self.current = current
        self.best = best
        self.iteration = 0
        self.synthetic_count = 0
        self._cap = 1024
        self._X = np.empty((self._cap, space.m), dtype=np.float64)
        self._y = np.empty(self._cap, dtype=np.uint8)
        self._synth = np.empty(self._cap, dtype=np.bool_)
        self._n = 0

    @property
    def n(self) -> int:
        return self._n

    @property
    def X(self) -> np.ndarray:
        return self._X[: self._n]

    @property
    def y(self) -> np.ndarray:
        return self._y[: self._n]

    @property
    def real_count(self) -> int:
        return int(np.count_nonzero(~self._synth[: self._n]))

    def _grow(self, need: int):
        while self._cap < need:
            self._cap *= 2
        X = np.empty((self._cap, self.space.m), dtype=np.float64)
        X[: self._n] = self._X[: self._n]
        y = np.empty(self._cap, dtype=np.uint8)
        y[: self._n] = self._y[: self._n]
        s = np.empty(self._cap, dtype=np.bool_)
        s[: self._n] = self._synth[: self._n]
        self._X, self._y, self._synth = X, y, s

    def append_row(self, row: np.ndarray, label: int, synthetic: bool):
        if self._n + 1 > self._cap:
            self._grow(self._n + 1)
        self._X[self._n] = row
        self._y[self._n] = label
        self._synth[self._n] = synthetic
        self._n += 1
        if synthetic:
            self.synthetic_count += 1

    def append_rows(self, rows: np.ndarray, labels, synthetic: bool):
        for row, label in zip(rows, labels):
            self.append_row(row, int(label), synthetic)

    def pool(self) -> list[LabeledInstance]:
        out = []
        for i in range(self._n):
            out.append(
                LabeledInstance(
                    instance=self.space.decode(self._X[i]),
                    label=int(self._y[i]),
                    origin="synthetic" if self._synth[i] else "real",
                )
            )
        return out


@dataclass
class LucbCertificate:
    """Outcome of one confidence-bound race."""

    l_star: float
    u_prime: float  # -inf when the action had no competitor
    queries_spent: int
    certified: bool  # False when the race stopped on budget or exhaustion


@dataclass
class IterationRecord:
    iteration: int
    action_kind: str
    action_rule: str
    rule_index: int
    was_random: bool
    q_before: float
    q_after: float
    queries_spent: int
    certificate: LucbCertificate | None
    state_after: DecisionSet

    def to_json(self) -> dict:
        cert = None
        if self.certificate is not None:
            c = self.certificate
            # unbounded endpoints serialize as null; Infinity is not JSON
            cert = {
                "l_star": None if math.isinf(c.l_star) else c.l_star,
                "u_prime": None if math.isinf(c.u_prime) else c.u_prime,
                "certified": c.certified,
            }
        return {
            "iteration": self.iteration,
            "action": {
                "kind": self.action_kind,
                "rule": self.action_rule,
                "rule_index": self.rule_index,
            },
            "was_random": self.was_random,
            "q_before": self.q_before,
            "q_after": self.q_after,
            "synthetic_queries": self.queries_spent,
            "certificate": cert,
        }


@dataclass
class SearchResult:
    best: DecisionSet
    best_objective: float
    best_theta: float
    history: list[IterationRecord]
    state: SearchState
    cutpoints: list[list[float]]


class _ActionEstimates:
    """Running objective estimates for every action of one iteration.

    Holds one boolean coverage row per current rule and per affected rule
    over the whole pool, plus integer agreement and support tallies per
    action. Appending a labeled instance updates every action estimate
    exactly, matching a from-scratch recount.
    """

    def __init__(self, current: DecisionSet, actions, state: SearchState,
                 params: ObjectiveParams, capacity: int):
        space = state.space
        self.params = params
        self.R = len(current.rules)
        self.A = len(actions)
        self.compiled = CompiledRules(
            space, list(current.rules) + [a.affected_rule for a in actions]
        )
        self.sizes = np.array([a.resulting_size(current) for a in actions])
        self.volumes = np.array(
            [rule_volume(a.affected_rule, space) for a in actions]
        )
        self.exclude = np.array(
            [a.rule_index if a.kind != "add_rule" else -1 for a in actions],
            dtype=np.int64,
        )
        self.include = np.array([a.keeps_affected_rule for a in actions], dtype=bool)

        n = state.n
        self.n = n
        self._cap = max(capacity, n)
        self.cov = np.zeros((self.R + self.A, self._cap), dtype=np.bool_)
        if self.R + self.A:
            self.cov[:, :n] = self.compiled.cover(state.X)
        y = state.y[:n].astype(bool)

        rule_cov = self.cov[: self.R, :n]
        counts = rule_cov.sum(axis=0)
        or_all = counts > 0
        self.agree_current = int(np.count_nonzero(or_all == y))
        self.agree = np.empty(self.A, dtype=np.int64)
        self.support = np.empty(self.A, dtype=np.int64)
        for i in range(self.A):
            row = self.cov[self.R + i, :n]
            k = self.exclude[i]
            others = or_all if k < 0 else (counts - rule_cov[k]) > 0
            pred = (others | row) if self.include[i] else others
            self.agree[i] = np.count_nonzero(pred == y)
            self.support[i] = np.count_nonzero(row)

    def append(self, row: np.ndarray, label: int):
        col = self.compiled.cover(row.reshape(1, -1))[:, 0]
        n = self.n
        if n >= self._cap:  # capacity is sized for the budget; safety net
            grown = np.zeros((self.R + self.A, self._cap * 2), dtype=np.bool_)
            grown[:, :n] = self.cov[:, :n]
            self.cov, self._cap = grown, self._cap * 2
        self.cov[:, n] = col
        self.n = n + 1

        rule_hits = int(col[: self.R].sum())
        or_all = rule_hits > 0
        y = bool(label)
        self.agree_current += int(or_all == y)
        if self.A == 0:
            return
        others = np.empty(self.A, dtype=bool)
        excl = self.exclude >= 0
        others[~excl] = or_all
        if excl.any():
            others[excl] = (rule_hits - col[self.exclude[excl]]) > 0
        pred = others | (col[self.R :] & self.include)
        self.agree += pred == y
        self.support += col[self.R :]

    def q_hat(self) -> np.ndarray:
        return self.agree / self.n - self.params.lam * self.sizes

    def bounds(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        q = self.q_hat()
        if self.params.beta == 0.0:
            return q, q.copy(), q.copy()
        w = np.full(self.A, np.inf)
        covered = self.support > 0
        w[covered] = self.params.beta * np.sqrt(
            self.params.rho0 * self.volumes[covered] / self.support[covered]
        )
        return q, q - w, q + w

    def covered_rows(self, action_index: int, X: np.ndarray) -> np.ndarray:
        """Pool rows currently covered by the action's affected rule."""
        return X[self.cov[self.R + action_index, : self.n]]


def _pick_arms(q, upper):
    a_star = int(np.argmax(q))
    if q.shape[0] == 1:
        return a_star, None
    masked = upper.copy()
    masked[a_star] = -np.inf
    return a_star, int(np.argmax(masked))


def _sample_for_arm(
    arm: int, actions, est: _ActionEstimates, state: SearchState,
    cfg: SearchConfig, oracle: Oracle,
) -> np.ndarray:
    """One synthetic query instance inside the arm's affected rule."""
    rule = actions[arm].affected_rule
    rows, _ = generate_pool_rows(
        rule, state.X, cfg.pool_size, state.space, state.rng,
        already_queried=oracle.queried_keys(),
    )
    covered = est.covered_rows(arm, state.X)
    return rows[select_query_row(rows, covered, state.space)]


def _run_lucb(
    actions, est: _ActionEstimates, state: SearchState,
    cfg: SearchConfig, oracle: Oracle,
) -> tuple[int, LucbCertificate]:
    budget = cfg.query_budget_per_iter
    spent = 0
    while True:
        q, lower, upper = est.bounds()
        a_star, a_prime = _pick_arms(q, upper)
        u_prime = -math.inf if a_prime is None else upper[a_prime]
        if a_prime is None or lower[a_star] >= u_prime:
            return a_star, LucbCertificate(
                l_star=float(lower[a_star]), u_prime=float(u_prime),
                queries_spent=spent, certified=True,
            )
        if spent + 2 > budget:
            log.info("query budget exhausted after %d synthetic queries", spent)
            return a_star, LucbCertificate(
                l_star=float(lower[a_star]), u_prime=float(u_prime),
                queries_spent=spent, certified=False,
            )
        fresh = []
        for arm in (a_star, a_prime):
            try:
                row = _sample_for_arm(arm, actions, est, state, cfg, oracle)
            except RegionExhaustedError:
                continue
            label = oracle.query_encoded(row)
            fresh.append((row, label))
            spent += 1
        if not fresh:
            log.debug("both candidate regions exhausted; stopping the race")
            return a_star, LucbCertificate(
                l_star=float(lower[a_star]), u_prime=float(u_prime),
                queries_spent=spent, certified=False,
            )
        for row, label in fresh:
            state.append_row(row, label, synthetic=True)
            est.append(row, label)


def lucb_select(
    s: DecisionSet, actions, state: SearchState, cfg: SearchConfig, oracle: Oracle
) -> Action:
    """Identify the provably best action, querying the oracle as needed.

    Repeatedly compares the empirically best action with the competitor
    holding the highest upper bound; each round both receive one
    synthetic labeled instance inside their affected rule. Returns once
    the leader's lower bound reaches every competitor's upper bound, or
    the per-iteration budget is spent.
    """
    if not actions:
        raise ValidationError("action list must be non-empty")
    params = cfg.params.resolved(state.real_count)
    est = _ActionEstimates(
        s, actions, state, params, capacity=state.n + cfg.query_budget_per_iter + 2
    )
    idx, _ = _run_lucb(actions, est, state, cfg, oracle)
    return actions[idx]


def _objective_of(s: DecisionSet, state: SearchState, params: ObjectiveParams) -> float:
    pred = CompiledRules(state.space, s.rules).any_cover(state.X)
    agree = int(np.count_nonzero(pred == state.y.astype(bool)))
    return agree / state.n - params.lam * len(s)


def run_search(
    cfg: SearchConfig, real, oracle: Oracle, space: InputSpace
) -> SearchResult:
    """Full search: label the data, iterate edits, return the best set.

    ``real`` is a list of instances or an encoded (n, m) float array.
    Deterministic given (cfg, data, oracle): the RNG is seeded from
    cfg.seed and consumed in a fixed order (one epsilon draw per
    iteration, then either one action draw or the race's sampling draws).
    """
    if isinstance(real, np.ndarray):
        rows = np.asarray(real, dtype=np.float64)
    else:
        rows = space.encode_many(list(real))
    if rows.shape[0] == 0:
        raise ValidationError("the training set must be non-empty")

    rng = np.random.default_rng(cfg.seed)
    state = SearchState(space, rng)
    labels = oracle.query_encoded_batch(rows)
    state.append_rows(rows, labels, synthetic=False)
    params = cfg.params.resolved(rows.shape[0])

    cuts = compute_cutpoints(rows, space, cfg.bins)
    history: list[IterationRecord] = []

    for t in range(1, cfg.max_iters + 1):
        state.iteration = t
        actions = generate_actions(state.current, space, cuts)
        if not actions:
            log.warning("no applicable actions at iteration %d; stopping", t)
            break
        q_before = _objective_of(state.current, state, params)

        if state.rng.random() < cfg.epsilon:
            chosen = actions[int(state.rng.integers(len(actions)))]
            cert = None
            was_random = True
        else:
            est = _ActionEstimates(
                state.current, actions, state, params,
                capacity=state.n + cfg.query_budget_per_iter + 2,
            )
            idx, cert = _run_lucb(actions, est, state, cfg, oracle)
            chosen = actions[idx]
            was_random = False

        state.current = apply_action(chosen, state.current)
        q_after = _objective_of(state.current, state, params)
        if q_after > _objective_of(state.best, state, params):
            state.best = state.current

        history.append(
            IterationRecord(
                iteration=t,
                action_kind=chosen.kind,
                action_rule=render_rule(chosen.affected_rule, space),
                rule_index=chosen.rule_index,
                was_random=was_random,
                q_before=q_before,
                q_after=q_after,
                queries_spent=0 if cert is None else cert.queries_spent,
                certificate=cert,
                state_after=state.current,
            )
        )

    # Final selection: re-score every visited set on the final pool so the
    # returned set dominates the whole trajectory under one estimate.
    visited: list[DecisionSet] = [EMPTY_SET]
    for rec in history:
        if rec.state_after not in visited:
            visited.append(rec.state_after)
    if state.best not in visited:
        visited.append(state.best)
    scores = [_objective_of(s, state, params) for s in visited]
    best_i = int(np.argmax(scores))
    state.best = visited[best_i]

    pred = CompiledRules(space, state.best.rules).any_cover(state.X)
    theta = float(np.count_nonzero(pred == state.y.astype(bool))) / state.n
    return SearchResult(
        best=state.best,
        best_objective=float(scores[best_i]),
        best_theta=theta,
        history=history,
        state=state,
        cutpoints=cuts,
    )
