"""HTTP-driven simulation must reproduce the in-process run exactly."""

from __future__ import annotations

import signal
import socket
import subprocess
import sys
import time

import pytest

from bucketnet.cli import main as cli_main
from bucketnet.http_driver import list_buckets, run_http_experiment, total_weight
from bucketnet.simulation import SimulationSettings, run_simulation


@pytest.fixture
def live_service(tmp_path, capsys):
    data = str(tmp_path / "net")
    assert cli_main([
        "init", "--data-dir", data,
        "--buckets", "20", "--links-per-bucket", "3", "--seed", "31",
    ]) == 0
    capsys.readouterr()
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    child = subprocess.Popen(
        [sys.executable, "-m", "bucketnet.cli", "serve",
         "--data-dir", data, "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    deadline = time.time() + 10
    while time.time() < deadline:
        try:
            with socket.create_connection(("127.0.0.1", port), timeout=0.2):
                break
        except OSError:
            time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    child.send_signal(signal.SIGTERM)
    child.wait(timeout=10)


def test_http_run_matches_in_process(live_service):
    settings = SimulationSettings(
        buckets=20, links_per_bucket=3, seed=31,
        users=4, sessions=12, hops_target=None, genre_size=5,
    )
    over_http = run_http_experiment(settings, live_service)
    in_process = run_simulation(settings)

    assert over_http.hops == in_process.hops
    assert over_http.sessions == in_process.sessions
    assert over_http.ledger.learned_weight == pytest.approx(
        in_process.ledger.learned_weight, abs=1e-6
    )
    assert over_http.pearson == pytest.approx(in_process.pearson, abs=1e-9)
    assert over_http.spearman == pytest.approx(in_process.spearman, abs=1e-9)
    assert over_http.top_k_overlap == in_process.top_k_overlap
    assert over_http.top_weighted == in_process.top_weighted
    assert over_http.hierarchy_buckets == in_process.hierarchy_buckets


def test_analytics_readers(live_service):
    buckets = list_buckets(live_service)
    assert len(buckets) == 20
    assert buckets[0] == "b000"
    assert total_weight(live_service) == pytest.approx(30.0, abs=1e-9)
