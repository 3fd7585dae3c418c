"""Acceptance gate: one test per shipping criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see
them live).  Tolerances are part of the contract and are asserted exactly
as stated, never loosened to make a run go green.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from fastapi.testclient import TestClient

from consensus_kit import nullsim
from consensus_kit.cli import main
from consensus_kit.metrics import (
    EquivalenceGrouping,
    agreement_rate,
    jaccard_similarity,
    one_hot_embed,
    percent_agreeing,
    soft_agreement_rate,
)
from consensus_kit.service import AnnotationStore, create_app
from consensus_kit.studyio import (
    build_report,
    bundled_taxonomy,
    load_report,
    parse_dataset,
    parse_report,
    parse_taxonomy,
    save_dataset,
    save_taxonomy,
    write_dataset,
    write_report,
    write_taxonomy,
)
from helpers_golden import GOLDEN_EXPECTED, golden_dataset, golden_taxonomy


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}")
        raise
    print(f"PASS  {name}")


def random_grouping(rng, max_n):
    n = int(rng.integers(2, max_n + 1))
    cuts = sorted(rng.choice(np.arange(1, n), size=int(rng.integers(0, n - 1)), replace=False).tolist())
    sizes = tuple(b - a for a, b in zip([0] + cuts, cuts + [n]))
    grouping = EquivalenceGrouping(group_sizes=sizes, n_total=n)
    assignment = []
    for index, size in enumerate(sizes):
        assignment += [index] * size
    rng.shuffle(assignment)
    return grouping, assignment


def naive_soft_rate(vectors):
    n = len(vectors)
    total = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            inter = sum(a & b for a, b in zip(vectors[j], vectors[k]))
            union = sum(a | b for a, b in zip(vectors[j], vectors[k]))
            total += inter / union if union else 0.0
    return 2.0 * total / (n * (n - 1))


class TestAcceptance:
    def test_reduction_theorem(self):
        with criterion(
            "reduction: soft rate over one-hot vectors equals hard rate "
            "(1000 partitions, N<=20, tol 1e-12, <1s)"
        ):
            rng = np.random.default_rng(2026)
            cases = [random_grouping(rng, 20) for _ in range(1000)]
            started = time.perf_counter()
            worst = 0.0
            for grouping, assignment in cases:
                hard = agreement_rate(grouping).value
                soft = soft_agreement_rate(one_hot_embed(grouping, assignment)).value
                worst = max(worst, abs(soft - hard))
            elapsed = time.perf_counter() - started
            assert worst <= 1e-12, f"worst deviation {worst}"
            assert elapsed < 1.0, f"took {elapsed:.2f}s"

    def test_scenario_values(self):
        with criterion(
            "scenario values: [4,1x6] and [6,1x4] rates and percent-agreeing figures"
        ):
            one_large = agreement_rate(
                EquivalenceGrouping(group_sizes=(4, 1, 1, 1, 1, 1, 1), n_total=10)
            ).value
            assert abs(one_large - 2 / 15) <= 1e-12
            assert abs(percent_agreeing(one_large) - 36.51) <= 0.01
            majority = agreement_rate(
                EquivalenceGrouping(group_sizes=(6, 1, 1, 1, 1), n_total=10)
            ).value
            assert abs(majority - 1 / 3) <= 1e-12
            assert abs(percent_agreeing(majority) - 57.74) <= 0.01
            # the coarse percent figures 0.40 / 0.60 only square back to the
            # rates approximately
            assert abs(0.40**2 - one_large) <= 0.04
            assert abs(0.60**2 - majority) <= 0.04

    def test_jaccard_property_suite(self):
        with criterion(
            "similarity properties: symmetry, range, identity, zero handling, "
            "algebraic==popcount on 10000 pairs (tol 1e-15)"
        ):
            rng = np.random.default_rng(7)
            zero_pair = jaccard_similarity([0, 0, 0], [0, 0, 0])
            assert zero_pair == 0.0
            for _ in range(10_000):
                d = int(rng.integers(1, 129))
                a = (rng.random(d) < rng.random()).astype(np.uint8)
                b = (rng.random(d) < rng.random()).astype(np.uint8)
                forward = jaccard_similarity(a, b)
                assert forward == jaccard_similarity(b, a)
                assert 0.0 <= forward <= 1.0
                if a.any():
                    assert jaccard_similarity(a, a) == 1.0
                dot = int(a @ b)
                denom = int(a @ a) + int(b @ b) - dot
                algebraic = dot / denom if denom else 0.0
                assert abs(forward - algebraic) <= 1e-15

    def test_brute_force_equivalence(self):
        with criterion(
            "optimized soft rate equals naive double loop "
            "(1000 instances, N<=12, d<=64, tol 1e-12)"
        ):
            rng = np.random.default_rng(11)
            for _ in range(1000):
                n = int(rng.integers(2, 13))
                d = int(rng.integers(1, 65))
                vectors = (rng.random((n, d)) < rng.random()).astype(np.uint8)
                fast = soft_agreement_rate(vectors).value
                slow = naive_soft_rate(vectors.tolist())
                assert abs(fast - slow) <= 1e-12

    def test_monte_carlo_checkpoints(self):
        with criterion(
            "null-model checkpoints at 1e6 iterations: dense and sparse CDF "
            "windows and mode bins, each run <60s"
        ):
            started = time.perf_counter()
            dense = nullsim.simulate(
                nullsim.NullModelParams(
                    subjects=9, dims=55, p_one=0.5, iterations=10**6, seed=0
                )
            )
            dense_elapsed = time.perf_counter() - started
            assert dense_elapsed < 60.0, f"dense run took {dense_elapsed:.1f}s"
            assert 0.86 <= nullsim.cdf(dense, 0.35) <= 0.90
            assert nullsim.cdf(dense, 0.40) >= 0.995
            mode = dense.mode_bin
            assert mode / 100 >= 0.30 and (mode + 1) / 100 <= 0.36

            started = time.perf_counter()
            sparse = nullsim.simulate(
                nullsim.NullModelParams(
                    subjects=9, dims=55, p_one=0.07, iterations=10**6, seed=0
                )
            )
            sparse_elapsed = time.perf_counter() - started
            assert sparse_elapsed < 60.0, f"sparse run took {sparse_elapsed:.1f}s"
            assert 0.82 <= nullsim.cdf(sparse, 0.04) <= 0.86
            assert nullsim.cdf(sparse, 0.07) >= 0.985
            assert (sparse.mode_bin + 1) / 100 <= 0.1

    def test_simulation_determinism(self, tmp_path, monkeypatch):
        with criterion(
            "simulate CLI: same params and seed under different thread counts "
            "give byte-identical histogram CSVs"
        ):
            args = ["simulate", "-S", "9", "-d", "55", "-p", "0.5",
                    "--iters", "120000", "--seed", "7", "--quiet"]
            monkeypatch.setenv("CONSENSUS_KIT_THREADS", "1")
            assert main(args + ["--out", str(tmp_path / "serial")]) == 0
            monkeypatch.setenv("CONSENSUS_KIT_THREADS", "4")
            assert main(args + ["--out", str(tmp_path / "threaded")]) == 0
            serial = (tmp_path / "serial.csv").read_bytes()
            threaded = (tmp_path / "threaded.csv").read_bytes()
            assert serial == threaded

    def test_report_golden_fixture(self):
        with criterion(
            "report generator: hand-derived 3-referent fixture values and "
            "mean/std row match independent recomputation (tol 1e-12)"
        ):
            report = build_report(golden_dataset())
            assert len(report.rows) == 3
            for row in report.rows:
                expected = GOLDEN_EXPECTED[row.referent]
                assert abs(row.ar - expected["ar"]) <= 1e-12
                assert abs(row.sar - expected["sar"]) <= 1e-12
                assert abs(row.eta_ar - 100 * math.sqrt(expected["ar"])) <= 1e-12
                assert abs(row.eta_sar - 100 * math.sqrt(expected["sar"])) <= 1e-12
            for column in ("ar", "eta_ar", "sar", "eta_sar"):
                values = [getattr(row, column) for row in report.rows]
                mean = math.fsum(values) / len(values)
                std = math.sqrt(
                    math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
                )
                assert abs(report.summary[column].mean - mean) <= 1e-12
                assert abs(report.summary[column].std - std) <= 1e-12

    def test_round_trips(self):
        with criterion(
            "round-trip: parse(write(x)) == x for taxonomy, dataset and "
            "report in every supported format"
        ):
            for taxonomy in (golden_taxonomy(), bundled_taxonomy()):
                assert parse_taxonomy(write_taxonomy(taxonomy)) == taxonomy
            dataset = golden_dataset()
            assert parse_dataset(write_dataset(dataset), golden_taxonomy()) == dataset
            for mode in ("hard", "soft", "both"):
                report = build_report(dataset, mode=mode)
                assert parse_report(write_report(report, "csv"), "csv") == report
                assert parse_report(write_report(report, "json"), "json") == report

    def test_service_cli_consistency(self, tmp_path, capsys):
        with criterion(
            "live report over a persisted store equals offline compute over "
            "the exported study file, field for field"
        ):
            save_taxonomy(golden_taxonomy(), tmp_path / "taxonomy.json")
            save_dataset(golden_dataset(), tmp_path / "study.json")
            store = AnnotationStore(tmp_path)
            client = TestClient(create_app(store))
            for i in (1, 2):
                response = client.put(
                    f"/api/proposals/c_u{i}/annotation",
                    json={"annotator_id": "alice", "descriptor_ids": ["f1", "f2"]},
                )
                assert response.status_code == 200
            response = client.put(
                "/api/proposals/c_u1/annotation",
                json={"annotator_id": "bob", "descriptor_ids": ["f1"]},
            )
            assert response.status_code == 200
            live_text = client.get("/api/report").text
            store.compact()
            store.close()

            out = tmp_path / "offline.json"
            code = main([
                "compute",
                "--dataset", str(tmp_path / "study.json"),
                "--taxonomy", str(tmp_path / "taxonomy.json"),
                "--out", str(out),
            ])
            capsys.readouterr()
            assert code == 0
            live = parse_report(live_text, "json")
            offline = load_report(out)
            assert live == offline
            # byte-level too: same writer, same content
            assert live_text == out.read_text()


def test_primary_suite_summary():
    # the per-criterion lines above are the contract; this line closes the gate
    print("acceptance suite complete")
