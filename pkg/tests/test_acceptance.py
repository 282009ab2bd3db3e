"""Acceptance suite.

Each test exercises one release criterion end to end at its stated
tolerance and prints a single PASS/FAIL line (visible with ``pytest -s``).
The paired active-vs-passive experiment is shared by several criteria and
runs once per session.
"""
import itertools
import json
import math
import time

import numpy as np
import pytest

import activerules as ar
from activerules import kernels
from activerules.actions import generate_actions
from activerules.metrics import evaluate_rows
from activerules.objective import estimate_for, incremental_update, interval_width
from activerules.rules import CompiledRules, EMPTY_SET
from activerules.search import SearchState
from conftest import UNIT_SQUARE_SCHEMA, skewed_two_box_rows
from helpers import (
    random_decision_set,
    random_instance,
    random_rule,
    random_space,
)
from test_cli import base_run_args, run_cli, write_fixture

TRUE_BOXES = [((0.0, 0.45), (0.0, 0.45)), ((0.55, 1.0), (0.55, 1.0))]


def _report(num, name, ok, detail=""):
    line = f"[criterion {num}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def unit_space():
    return ar.load_schema(UNIT_SQUARE_SCHEMA)


def two_box_truth():
    return ar.DecisionSet([
        ar.Rule([ar.interval_condition(0, 0.0, 0.45),
                 ar.interval_condition(1, 0.0, 0.45)]),
        ar.Rule([ar.interval_condition(0, 0.55, 1.0),
                 ar.interval_condition(1, 0.55, 1.0)]),
    ])


def rule_box(rule):
    intervals = {0: (0.0, 1.0), 1: (0.0, 1.0)}
    for c in rule.conditions:
        intervals[c.attribute] = (c.payload.lo, c.payload.hi)
    return intervals[0], intervals[1]


def box_iou(b1, b2):
    (ax1, ax2), (ay1, ay2) = b1
    (bx1, bx2), (by1, by2) = b2
    ox = max(0.0, min(ax2, bx2) - max(ax1, bx1))
    oy = max(0.0, min(ay2, by2) - max(ay1, by1))
    inter = ox * oy
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return inter / union if union else 0.0


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed criteria measure the
    algorithm, not the JIT."""
    space = unit_space()
    compiled = CompiledRules(
        space, [ar.Rule([ar.interval_condition(0, 0.1, 0.9)])]
    )
    X = np.random.default_rng(0).uniform(0, 1, (4, 2))
    compiled.cover(X)
    kernels.min_gower_distances(X, X, space.kinds, space.ranges)


@pytest.fixture(scope="session")
def paired_experiment():
    """Ten paired (beta=0.02 vs beta=0) runs on the two-box fixture:
    200 skewed training points, lambda=0.01, shared per-seed test sample."""
    space = unit_space()
    truth = two_box_truth()
    runs = []
    started = time.perf_counter()
    for k in range(10):
        seed = 1000 + k
        train = skewed_two_box_rows(seed, n=200)
        test = np.random.default_rng(5000 + k).uniform(0, 1, (1500, 2))
        per_beta = {}
        for beta in (0.02, 0.0):
            oracle = ar.make_boxes_oracle(truth, space)
            cfg = ar.SearchConfig(
                params=ar.ObjectiveParams(lam=0.01, beta=beta),
                max_iters=60,
                seed=seed,
            )
            result = ar.run_search(cfg, train, oracle, space)
            f1 = evaluate_rows(result.best, oracle, test, space).f1
            per_beta[beta] = (result, f1)
        runs.append(per_beta)
    elapsed = time.perf_counter() - started
    return {"runs": runs, "elapsed": elapsed, "space": space}


@pytest.fixture(scope="session")
def cli_reports(tmp_path_factory):
    """Two identical seeded CLI runs plus one passive run, reports parsed."""
    tmp = tmp_path_factory.mktemp("acceptance-cli")
    data, schema, oracle = write_fixture(tmp, n=150, seed=41)

    started = time.perf_counter()
    passive = run_cli(*base_run_args(
        data, schema, oracle, tmp / "passive",
        **{"--beta": 0.0, "--max-iters": 10},
    ))
    passive_elapsed = time.perf_counter() - started
    assert passive.returncode == 0, passive.stderr

    first = run_cli(*base_run_args(
        data, schema, oracle, tmp / "t1", **{"--max-iters": 10}
    ))
    second = run_cli(*base_run_args(
        data, schema, oracle, tmp / "t2", **{"--max-iters": 10}
    ))
    assert first.returncode == 0 and second.returncode == 0

    def load(which):
        return json.loads((tmp / which / "report.json").read_text())

    return {
        "passive": load("passive"),
        "passive_elapsed": passive_elapsed,
        "twin_a": load("t1"),
        "twin_b": load("t2"),
    }


def test_criterion_1_passive_reduction(cli_reports):
    report = cli_reports["passive"]
    synthetic = report["queries"]["synthetic"]
    elapsed = cli_reports["passive_elapsed"]
    _report(
        1, "passive reduction at beta=0",
        synthetic == 0 and elapsed < 5.0,
        f"synthetic={synthetic}, runtime={elapsed:.2f}s",
    )


def test_criterion_2_exact_objective_equivalence():
    space = ar.InputSpace((
        ar.AttributeSpec.categorical("color", ["red", "green", "blue"]),
        ar.AttributeSpec.categorical("shape", ["circle", "square", "triangle", "star"]),
    ))
    points = [
        ar.Instance((c, s))
        for c, s in itertools.product(space.attributes[0].values,
                                      space.attributes[1].values)
    ]
    truth_region = ar.DecisionSet([
        ar.Rule([ar.value_condition(0, ["red", "blue"]),
                 ar.value_condition(1, ["circle", "star"])]),
        ar.Rule([ar.value_condition(1, ["square"])]),
    ])
    oracle = ar.make_boxes_oracle(truth_region, space)
    pool = [
        ar.LabeledInstance(x, oracle.query(x)) for x in points
    ]
    rng = np.random.default_rng(2024)
    started = time.perf_counter()
    mismatches = 0
    for _ in range(100):
        s = random_decision_set(space, rng, max_rules=4)
        brute = sum(
            1 for x in points if ar.predict(s, x) == oracle.query(x)
        ) / len(points)
        if ar.empirical_theta(s, pool) != brute:  # exact, tolerance 0
            mismatches += 1
    elapsed = time.perf_counter() - started
    _report(
        2, "exact objective on enumerable space",
        mismatches == 0 and elapsed < 5.0,
        f"mismatches={mismatches}/100, runtime={elapsed:.2f}s",
    )


def test_criterion_3_lucb_identification():
    space = unit_space()
    truth = ar.DecisionSet([ar.Rule([ar.interval_condition(0, 0.4, 1.0)])])
    cuts = [[round(0.1 * k, 10) for k in range(1, 10)],
            [round(0.1 * k, 10) for k in range(1, 10)]]
    actions = generate_actions(EMPTY_SET, space, cuts)

    # dense-grid brute force (10^4 midpoints) fixes the true best action
    g = 100
    mids = (np.arange(g) + 0.5) / g
    xs, ys = np.meshgrid(mids, mids)
    grid = np.column_stack([xs.ravel(), ys.ravel()])
    grid_oracle = ar.make_boxes_oracle(truth, space)
    grid_truth = grid_oracle.query_encoded_batch(grid).astype(bool)
    lam = 0.01
    q_true = np.array([
        np.count_nonzero(
            CompiledRules(space, [a.affected_rule]).any_cover(grid) == grid_truth
        ) / grid.shape[0] - lam
        for a in actions
    ])
    order = np.argsort(-q_true)
    best_idx = int(order[0])
    gap = q_true[best_idx] - q_true[order[1]]
    assert gap >= 0.05, f"fixture defect: Q-gap {gap} below 0.05"
    assert np.count_nonzero(q_true == q_true[best_idx]) == 1

    started = time.perf_counter()
    hits = 0
    for trial in range(100):
        rng = np.random.default_rng(trial)
        rows = np.vstack([
            np.column_stack([rng.uniform(0.45, 0.95, 20), rng.uniform(0, 1, 20)]),
            np.column_stack([rng.uniform(0.0, 0.28, 30), rng.uniform(0, 1, 30)]),
        ])
        oracle = ar.make_boxes_oracle(truth, space)
        state = SearchState(space, np.random.default_rng(10_000 + trial))
        state.append_rows(rows, oracle.query_encoded_batch(rows), synthetic=False)
        cfg = ar.SearchConfig(
            params=ar.ObjectiveParams(lam=lam, beta=0.02), seed=trial
        )
        chosen = ar.lucb_select(EMPTY_SET, actions, state, cfg, oracle)
        if chosen == actions[best_idx]:
            hits += 1
    elapsed = time.perf_counter() - started
    _report(
        3, "confidence-bound identification of the best action",
        hits >= 90 and elapsed < 60.0,
        f"hits={hits}/100, Q-gap={gap:.3f}, runtime={elapsed:.1f}s",
    )


def test_criterion_4_counterfactual_validity():
    rng = np.random.default_rng(99)
    total = 0
    violations = 0
    for _ in range(250):
        space = random_space(rng)
        rule = random_rule(space, rng)
        for _ in range(40):
            seed_x = random_instance(space, rng)
            out = ar.counterfactual_modify(seed_x, rule, space, rng)
            total += 1
            try:
                space.validate_instance(out)
            except ar.ValidationError:
                violations += 1
                continue
            if not ar.rule_covers(rule, out):
                violations += 1
    _report(
        4, "counterfactual instances satisfy rule and schema",
        total >= 10_000 and violations == 0,
        f"instances={total}, violations={violations}",
    )


def test_criterion_5_active_beats_passive(paired_experiment):
    runs = paired_experiment["runs"]
    f1_active = [per[0.02][1] for per in runs]
    f1_passive = [per[0.0][1] for per in runs]
    wins = sum(1 for a, p in zip(f1_active, f1_passive) if a > p)
    med_a, med_p = float(np.median(f1_active)), float(np.median(f1_passive))
    elapsed = paired_experiment["elapsed"]
    _report(
        5, "active runs beat passive on the two-box fixture",
        med_a >= med_p and wins >= 7 and elapsed < 120.0,
        f"median F1 {med_a:.3f} vs {med_p:.3f}, wins={wins}/10, "
        f"runtime={elapsed:.1f}s",
    )


def test_criterion_6_box_recovery(paired_experiment):
    runs = paired_experiment["runs"]
    recovered = 0
    for per in runs:
        result, _ = per[0.02]
        boxes = [rule_box(r) for r in result.best.rules]
        if all(
            any(box_iou(b, true_box) >= 0.8 for b in boxes)
            for true_box in TRUE_BOXES
        ):
            recovered += 1
    _report(
        6, "returned rules recover the true boxes (IoU >= 0.8)",
        recovered >= 7,
        f"recovered in {recovered}/10 seeds",
    )


def test_criterion_7_cli_determinism(cli_reports):
    a = dict(cli_reports["twin_a"])
    b = dict(cli_reports["twin_b"])
    a.pop("timestamp")
    b.pop("timestamp")
    same = json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    _report(7, "identical seeded CLI runs produce identical reports", same)


def test_criterion_8_certificate_validity(paired_experiment, cli_reports):
    checked = 0
    bad = 0

    def check(l_star, u_prime):
        nonlocal checked, bad
        checked += 1
        if l_star < u_prime:
            bad += 1

    for per in paired_experiment["runs"]:
        for beta in (0.02, 0.0):
            for rec in per[beta][0].history:
                cert = rec.certificate
                if cert is not None and cert.certified:
                    check(cert.l_star, cert.u_prime)
    for name in ("passive", "twin_a", "twin_b"):
        for rec in cli_reports[name]["history"]:
            cert = rec["certificate"]
            if cert is not None and cert["certified"]:
                l, u = cert["l_star"], cert["u_prime"]
                check(
                    -math.inf if l is None else l,
                    -math.inf if u is None else u,
                )
    _report(
        8, "recorded certificates satisfy lower >= max upper",
        checked > 0 and bad == 0,
        f"checked={checked}, violations={bad}",
    )


def test_criterion_9_invariant_suites():
    rng = np.random.default_rng(7)

    # width strictly decreasing in covered count
    width_ok = True
    for beta, rho0, vol in [(0.02, 200, 0.5), (0.1, 50, 0.05), (1.0, 1000, 1.0)]:
        widths = [interval_width(beta, rho0, vol, n) for n in range(0, 80)]
        width_ok &= widths[0] == math.inf
        width_ok &= all(a > b for a, b in zip(widths[1:], widths[2:]))

    # volume multiplies over conditions
    volume_ok = True
    for _ in range(100):
        space = random_space(rng)
        rule = random_rule(space, rng)
        product = 1.0
        for c in rule.conditions:
            product *= ar.rule_volume(ar.Rule([c]), space)
        volume_ok &= abs(ar.rule_volume(rule, space) - product) < 1e-12

    # adding a rule never flips a positive prediction to negative
    monotone_ok = True
    for _ in range(100):
        space = random_space(rng)
        s = random_decision_set(space, rng)
        extra = random_rule(space, rng)
        if extra in s.rules:
            continue
        bigger = ar.DecisionSet(list(s.rules) + [extra])
        for _ in range(5):
            x = random_instance(space, rng)
            if ar.predict(s, x) == 1 and ar.predict(bigger, x) != 1:
                monotone_ok = False

    # incremental updates equal from-scratch recomputation
    incremental_ok = True
    for _ in range(100):
        space = random_space(rng)
        s = random_decision_set(space, rng, max_rules=3)
        rule = random_rule(space, rng)
        params = ar.ObjectiveParams(lam=0.01, beta=0.05, rho0=5.0)
        pool = [
            ar.LabeledInstance(random_instance(space, rng), int(rng.integers(2)))
            for _ in range(5)
        ]
        est = estimate_for(s, rule, pool, space, params)
        for _ in range(50):
            point = ar.LabeledInstance(
                random_instance(space, rng), int(rng.integers(2)), "synthetic"
            )
            pool.append(point)
            est = incremental_update(est, s, point, rule, space, params)
        incremental_ok &= est == estimate_for(s, rule, pool, space, params)

    _report(
        9, "invariant suites",
        width_ok and volume_ok and monotone_ok and incremental_ok,
        f"width={width_ok}, volume={volume_ok}, "
        f"monotone={monotone_ok}, incremental={incremental_ok}",
    )
