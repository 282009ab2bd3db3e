"""Counterfactual synthesis of query instances inside a rule's region.

To probe a candidate rule, seed instances are drawn from the pooled data
that the rule does not cover, and every attribute the rule constrains is
resampled uniformly inside the rule's condition (interval or value set);
unconstrained attributes keep their seed values. The single instance
actually sent to the oracle is the pool candidate farthest from its
nearest neighbor among the existing instances the rule covers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import RegionExhaustedError, ValidationError
from .rules import CompiledRules, Interval, Rule
from .schema import Instance, InputSpace

_REFILL_ATTEMPTS = 8


@dataclass(frozen=True)
class CandidatePool:
    """Candidate query instances for one rule, with their seed indices."""

    rule: Rule
    space: InputSpace
    rows: np.ndarray  # (k, m) encoded candidates, all satisfying rule
    provenance: tuple[int, ...]  # pool index each candidate was modified from

    @cached_property
    def candidates(self) -> tuple[Instance, ...]:
        return tuple(self.space.decode(row) for row in self.rows)

    def __len__(self) -> int:
        return self.rows.shape[0]


def _resample_constrained(row: np.ndarray, r: Rule, space: InputSpace, rng) -> None:
    """Overwrite the rule-constrained attributes of an encoded row in place.

    Draw order is fixed: conditions in attribute order, one uniform draw
    each. Categorical draws index the condition's members sorted by their
    position in the attribute domain.
    """
    for c in r.conditions:
        j = c.attribute
        if isinstance(c.payload, Interval):
            row[j] = rng.uniform(c.payload.lo, c.payload.hi)
        else:
            codes = sorted(space.code_of(j, v) for v in c.payload.values)
            row[j] = codes[rng.integers(len(codes))]


def counterfactual_modify(
    seed_x: Instance, r: Rule, space: InputSpace, rng
) -> Instance:
    """A copy of seed_x with every rule-constrained attribute resampled
    uniformly inside the rule's condition. Always satisfies the rule."""
    row = space.encode(seed_x)
    _resample_constrained(row, r, space, rng)
    return space.decode(row)


def generate_pool_rows(
    r: Rule,
    pool_rows: np.ndarray,
    size: int,
    space: InputSpace,
    rng,
    already_queried=None,
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Array-level pool generation; returns (candidate rows, seed indices).

    Seeds are drawn uniformly with replacement from the instances the rule
    does not cover (from all instances when it covers everything).
    Candidates equal to an already-queried instance are dropped; draws are
    retried a few times before giving up on a fully exhausted region.
    """
    if pool_rows.shape[0] == 0:
        raise ValidationError("cannot generate candidates from an empty pool")
    if size < 1:
        raise ValidationError(f"pool size must be >= 1, got {size}")
    covered = CompiledRules(space, [r]).cover(pool_rows)[0]
    seed_idx = np.flatnonzero(~covered)
    if seed_idx.size == 0:
        seed_idx = np.arange(pool_rows.shape[0])

    is_dup = (
        (lambda row: False)
        if already_queried is None
        else (lambda row: tuple(row.tolist()) in already_queried)
    )
    for _ in range(_REFILL_ATTEMPTS):
        picks = seed_idx[rng.integers(seed_idx.size, size=size)]
        rows = pool_rows[picks].copy()
        keep = []
        for i in range(size):
            _resample_constrained(rows[i], r, space, rng)
            if not is_dup(rows[i]):
                keep.append(i)
        if keep:
            return rows[keep], tuple(int(picks[i]) for i in keep)
    raise RegionExhaustedError(
        "every candidate drawn for the rule was already queried"
    )


def generate_pool(
    r: Rule,
    pool_instances,
    size: int,
    space: InputSpace,
    rng,
    already_queried=None,
) -> CandidatePool:
    rows = space.encode_many([li.instance for li in pool_instances])
    cand_rows, provenance = generate_pool_rows(
        r, rows, size, space, rng, already_queried
    )
    return CandidatePool(rule=r, space=space, rows=cand_rows, provenance=provenance)


def select_query_row(
    candidate_rows: np.ndarray, covered_rows: np.ndarray, space: InputSpace
) -> int:
    """Index of the candidate maximizing distance to its nearest neighbor
    among covered_rows; the first candidate when no neighbor exists.
    Ties resolve to the lowest index."""
    if candidate_rows.shape[0] == 0:
        raise ValidationError("candidate pool is empty")
    if covered_rows.shape[0] == 0:
        return 0
    dists = kernels.min_gower_distances(
        candidate_rows, covered_rows, space.kinds, space.ranges
    )
    return int(np.argmax(dists))


def select_query_instance(
    pool: CandidatePool, covered_existing, space: InputSpace
) -> Instance:
    covered_rows = space.encode_many(list(covered_existing))
    idx = select_query_row(pool.rows, covered_rows, space)
    return space.decode(pool.rows[idx])
