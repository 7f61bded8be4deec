"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; stated runtime budgets are asserted inside the tests themselves.
"""
import math
import time

import numpy as np
import pytest

import oracles
from oracles import make_subgraph, random_subgraph
from tgcl import graph_indices as gi
from tgcl.competence import CompetenceParams, active_count, competence
from tgcl.io import load_task
from tgcl.kernels import KERNEL_KINDS, kernel_eval, fit_tau, solve_delay_x
from tgcl.learner import NeighborLogisticLearner, baseline_ccl, baseline_nocl
from tgcl.pipeline import (IndexMatrix, RankingTable, build_index_matrix,
                           build_pair_tables, correlation_matrix, rank_samples,
                           select_indices, summed_difficulty_order)
from tgcl.records import load_record, replay, save_record
from tgcl.scheduler import SchedulerConfig, run_training
from tgcl.synth import make_planted_dataset
from tgcl.text_indices import score_text

ETAS = (0.6, 0.7, 0.8, 0.9, 0.95)
TAU_GRID = 10.0 ** np.linspace(-3.0, 3.0, 13)


def report(criterion, message):
    print(f"\nACCEPTANCE {criterion}: PASS - {message}")


def bisect_inverse(kind, eta, tau, iters=200):
    hi = 1.0
    while kernel_eval(kind, hi, tau) > eta:
        hi *= 2.0
    lo = 0.0
    for _ in range(iters):
        mid = (lo + hi) / 2.0
        if kernel_eval(kind, mid, tau) >= eta:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def test_criterion_01_kernel_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    checks = 0
    for kind in KERNEL_KINDS:
        for tau in TAU_GRID:
            tau = float(tau)
            assert kernel_eval(kind, 0.0, tau) == pytest.approx(1.0, abs=1e-12)
            x = np.sort(rng.uniform(0.0, 4.0 / tau, size=128))
            y = kernel_eval(kind, x, tau)
            assert np.all(np.diff(y) <= 1e-12), (kind, tau)
            assert np.all((y >= 0.0) & (y <= 1.0)), (kind, tau)
            for eta in ETAS:
                closed = solve_delay_x(kind, eta, tau)
                assert abs(closed - bisect_inverse(kind, eta, tau)) < 1e-9
                checks += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"kernel suite took {elapsed:.2f}s"
    report(1, f"5 kernels, {checks} closed-form inversions vs bisection "
              f"within 1e-9 ({elapsed:.2f}s)")


def test_criterion_02_competence_suite():
    start = time.perf_counter()
    for c0 in (0.0, 0.2, 0.5, 0.9, 1.0):
        p = CompetenceParams(c0=c0, alpha=1.0, epochs=2)
        assert competence(0.0, p) == pytest.approx(c0, abs=1e-12)
    for c0 in (0.0, 0.3, 1.0):
        for alpha in (0.2, 1.0, 2.7, 5.0):
            p = CompetenceParams(c0=c0, alpha=alpha, epochs=2)
            assert competence(1.0, p) == 1.0
    rng = np.random.default_rng(1)
    ts = np.linspace(0.0, 1.0, 21)
    for _ in range(1000):
        p = CompetenceParams(c0=float(rng.uniform(0.0, 1.0)),
                             alpha=float(rng.uniform(0.2, 5.0)), epochs=2)
        vals = [competence(t, p) for t in ts]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(0.0 <= v <= 1.0 for v in vals)
    p1 = CompetenceParams(c0=0.2, alpha=1.0, epochs=2)
    p2 = CompetenceParams(c0=0.2, alpha=2.0, epochs=2)
    for t in ts:
        assert competence(t, p2) >= competence(t, p1) - 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"competence suite took {elapsed:.2f}s"
    report(2, f"boundaries, 1000 monotone draws, alpha dominance ({elapsed:.2f}s)")


def test_criterion_03_graph_index_oracles():
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    graphs = 0
    for _ in range(200):
        n = int(rng.integers(1, 8))
        sg = random_subgraph(rng, n, float(rng.uniform(0.1, 0.9)))
        t = sg.target_local_ids[0]
        tol = 1e-9
        assert abs(gi.compute_index("degree", sg) - sg.degree(t)) <= tol
        assert abs(gi.compute_index("density", sg) - oracles.bf_density(sg)) <= tol
        assert abs(gi.compute_index("average_clustering", sg)
                   - oracles.bf_average_clustering(sg)) <= tol
        assert abs(gi.compute_index("closeness_centrality", sg)
                   - oracles.bf_closeness(sg, t)) <= tol
        assert abs(gi.compute_index("local_bridges", sg)
                   - oracles.bf_local_bridges(sg)) <= tol
        assert gi.compute_index("number_of_nodes", sg) == n
        assert gi.compute_index("number_of_edges", sg) == sg.edge_count
        if n >= 2:
            pair_sg = make_subgraph(n, sg.edges, targets=(0, n - 1))
            assert abs(gi.compute_index("common_neighbors", pair_sg)
                       - oracles.bf_common_neighbors(pair_sg, 0, n - 1)) <= tol
        # validity of every heuristic set
        assert oracles.is_vertex_cover(sg, gi.min_weighted_vertex_cover(sg))
        assert oracles.is_dominating_set(sg, gi.min_weighted_dominating_set(sg))
        assert oracles.is_maximal_matching(sg, gi.min_maximal_matching(sg))
        assert oracles.is_maximal_matching(sg, gi.min_edge_dominating_set(sg))
        clique, indep = gi.ramsey_r2(sg)
        assert oracles.is_clique(sg, clique)
        assert oracles.is_independent_set(sg, indep)
        assert oracles.is_clique(sg, gi.large_clique(sg))
        graphs += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"graph oracle suite took {elapsed:.2f}s"
    report(3, f"{graphs} random graphs: exact stats at 1e-9 and 100% valid "
              f"heuristic sets ({elapsed:.2f}s)")


def test_criterion_04_readability_oracles():
    frozen = {
        "The cat sat on the mat.": {
            "coleman_liau": -4.073333, "gunning_fog": 2.4,
            "smog": 3.1291, "new_ari": 27.475},
        "Reading is fun. Books open the imagination.": {
            "coleman_liau": 5.142857, "gunning_fog": 7.114286,
            "smog": 7.168622, "new_ari": 31.7925},
        "Communication establishes extraordinary opportunities.": {
            "coleman_liau": 50.3, "gunning_fog": 41.6,
            "smog": 14.554593, "new_ari": 68.295},
        "Graphs encode rich structure. Nodes connect. Paths emerge quickly.": {
            "coleman_liau": 10.266667, "gunning_fog": 1.2,
            "smog": 3.1291, "new_ari": 35.848333},
        "Does it help? Yes!": {
            "coleman_liau": -11.49, "gunning_fog": 0.8,
            "smog": 3.1291, "new_ari": 20.0175},
    }
    for text, expected in frozen.items():
        for kind, value in expected.items():
            assert score_text(kind, text) == pytest.approx(value, abs=1e-3), \
                (kind, text)
    report(4, "Coleman-Liau, Gunning Fog, SMOG, ARI match hand oracles on "
              "5 sentences within 1e-3")


def test_criterion_05_selection_suite(bench_dataset):
    matrix = build_index_matrix(bench_dataset)
    rows = matrix.rows_of("train")
    keep = [j for j in range(matrix.normalized.shape[1])
            if np.ptp(matrix.normalized[rows, j]) > 0.0]
    corr = correlation_matrix(matrix.normalized[np.ix_(rows, keep)])
    assert np.allclose(corr, corr.T, atol=1e-12)
    assert np.allclose(np.diag(corr), 1.0, atol=1e-12)
    s1, c1 = select_indices(matrix, k_clusters=10, seed=7)
    s2, c2 = select_indices(matrix, k_clusters=10, seed=7)
    assert s1 == s2 and c1 == c2
    assert len(s1) == 10
    assert len(set(s1)) == 10
    report(5, f"correlation matrix well-formed; 10 deterministic selections "
              f"from {len(keep)} candidate indices")


def test_criterion_06_scheduler_benchmark(bench_dataset):
    start = time.perf_counter()
    epochs = 60
    matrix = build_index_matrix(bench_dataset)
    selected, _ = select_indices(matrix, k_clusters=10, seed=7)
    rankings = build_pair_tables(matrix, selected)
    params = CompetenceParams(c0=0.1, alpha=1.0, epochs=epochs)
    config = SchedulerConfig(kernel="lap", eta=0.8, competence=params, seed=7)
    learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    result = run_training(config, rankings, learner, bench_dataset)

    n = bench_dataset.train_ids.size
    budget = n * epochs
    assert result.presented_total <= 0.8 * budget, \
        f"presented {result.presented_total} > 80% of {budget}"

    fractions = [len(e.current_pairs) / len(rankings)
                 for e in result.record.entries]
    first, last = np.mean(fractions[:20]), np.mean(fractions[-20:])
    assert last <= first + 1e-12, f"no spacing effect: {first:.3f} -> {last:.3f}"

    nocl_learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    nocl = baseline_nocl(nocl_learner, bench_dataset, epochs)
    assert result.val_metric >= nocl.val_metric - 0.02, \
        f"tgcl {result.val_metric:.4f} vs nocl {nocl.val_metric:.4f}"

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"benchmark took {elapsed:.2f}s"
    report(6, f"usage {100 * result.presented_total / budget:.1f}% of No-CL, "
              f"active pairs {first:.2f}->{last:.2f}, accuracy "
              f"{result.val_metric:.3f} vs No-CL {nocl.val_metric:.3f} "
              f"({elapsed:.1f}s)")


def test_criterion_07_baseline_equivalence(bench_dataset):
    epochs = 5
    train = np.sort(bench_dataset.train_ids)
    val = np.sort(bench_dataset.val_ids)
    identity = RankingTable(pair=("constant", "ascending"),
                            train_order=train.copy(), val_order=val.copy())
    params = CompetenceParams(c0=1.0, alpha=1.0, epochs=epochs)
    config = SchedulerConfig(kernel="lap", eta=0.8, competence=params,
                             pin_delays=True, seed=7)
    learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    tgcl = run_training(config, [identity], learner, bench_dataset,
                        track_presentations=True)
    nocl_learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    nocl = baseline_nocl(nocl_learner, bench_dataset, epochs)
    tgcl_seq = [(e, ids.tolist()) for e, _, ids in tgcl.presentation_log]
    nocl_seq = [(e, ids.tolist()) for e, ids in nocl.presentation_log]
    assert tgcl_seq == nocl_seq
    assert np.array_equal(tgcl.learner.weights_, nocl.learner.weights_)

    matrix = build_index_matrix(bench_dataset)
    order = summed_difficulty_order(matrix)
    c0 = 0.3
    ccl_params = CompetenceParams(c0=c0, alpha=1.0, epochs=epochs)
    ccl_learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    ccl = baseline_ccl(ccl_learner, bench_dataset, epochs, ccl_params, order)
    expected = np.sort(order[:math.ceil(train.size * c0)])
    assert ccl.presentation_log[0][1].tolist() == expected.tolist()
    report(7, "pinned one-pair run replays the No-CL sequence bit-for-bit; "
              "CCL epoch 0 is the ascending summed-index prefix")


def test_criterion_08_record_replay(bench_dataset, tmp_path):
    epochs = 25
    matrix = build_index_matrix(bench_dataset)
    selected, _ = select_indices(matrix, k_clusters=10, seed=7)
    rankings = build_pair_tables(matrix, selected)
    params = CompetenceParams(c0=0.1, alpha=1.0, epochs=epochs)
    config = SchedulerConfig(kernel="lap", eta=0.8, competence=params, seed=7)
    learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    result = run_training(config, rankings, learner, bench_dataset,
                          track_presentations=True)

    path = tmp_path / "record.jsonl"
    save_record(result.record, path)
    loaded = load_record(path)
    assert loaded.header == result.record.header
    assert loaded.entries == result.record.entries

    self_learner = NeighborLogisticLearner(seed=7).bind(bench_dataset)
    self_replay = replay(loaded, rankings, self_learner, bench_dataset,
                         track_presentations=True)
    original = [(e, p, ids.tolist()) for e, p, ids in result.presentation_log]
    again = [(e, p, ids.tolist()) for e, p, ids in self_replay.presentation_log]
    assert original == again

    target_paths = make_planted_dataset(tmp_path / "target", nodes=300, dim=16,
                                        seed=101)
    target = load_task("node_classification", target_paths["edges"],
                       target_paths["samples"],
                       feature_path=target_paths["features"],
                       label_path=target_paths["labels"],
                       text_path=target_paths["texts"])
    target_matrix = build_index_matrix(target)
    target_rankings = [rank_samples(target_matrix, name, order)
                       for name, order in
                       (pid.split("/") for pid in loaded.header.pairs)]
    target_learner = NeighborLogisticLearner(seed=7).bind(target)
    transferred = replay(loaded, target_rankings, target_learner, target)
    nocl_budget = target.train_ids.size * epochs
    assert transferred.presented_total <= nocl_budget
    report(8, f"round-trip + self-replay identity; transfer to a 300-node "
              f"target used {transferred.presented_total}/{nocl_budget} "
              f"presentations")


def test_criterion_09_gradient_check(tiny_dataset):
    learner = NeighborLogisticLearner(seed=3, weight_decay=0.03).bind(tiny_dataset)
    rng = np.random.default_rng(4)
    learner.weights_ = 0.3 * rng.standard_normal(learner.weights_.shape)
    ids = [0, 1, 2, 3, 4]
    _, grad = learner.loss_and_grad(ids)
    h = 1e-5
    worst = 0.0
    for r in range(grad.shape[0]):
        for c in range(grad.shape[1]):
            w0 = learner.weights_[r, c]
            learner.weights_[r, c] = w0 + h
            up, _ = learner.loss_and_grad(ids)
            learner.weights_[r, c] = w0 - h
            down, _ = learner.loss_and_grad(ids)
            learner.weights_[r, c] = w0
            worst = max(worst, abs(grad[r, c] - (up - down) / (2 * h)))
    assert worst < 1e-6
    report(9, f"analytic vs central-difference gradients agree "
              f"(max abs diff {worst:.2e})")


def test_criterion_10_fit_tau_recovery():
    tau_true = 3.0
    x_max = {"lap": 0.07, "sec": 0.25, "cos": 0.08, "qua": 0.25, "lin": 0.06}
    worst = 0.0
    for kind in KERNEL_KINDS:
        x = np.linspace(0.001, x_max[kind], 30)
        p = kernel_eval(kind, x, tau_true)
        assert np.all(p >= 0.8)
        tau_hat = fit_tau(kind, x, p, eta=0.8)
        worst = max(worst, abs(tau_hat - tau_true))
        assert abs(tau_hat - tau_true) < 1e-3, kind
    report(10, f"planted tau=3.0 recovered for all kernels "
               f"(worst error {worst:.2e})")
