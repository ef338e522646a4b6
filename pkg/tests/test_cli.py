"""CLI subcommands via main(): exit codes, output formats, precedence."""

from __future__ import annotations

import json
import signal
import socket
import subprocess
import sys
import time
import urllib.request

import pytest

from bucketnet.cli import EXIT_DATA, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInit:
    def test_default_parameters_summary(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "init", "--data-dir", str(tmp_path / "net"))
        assert code == EXIT_OK
        assert out.strip() == "150 buckets, 450 links, total weight 225.0"

    def test_small_network_arithmetic(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys, "init", "--data-dir", str(tmp_path / "net"),
            "--buckets", "10", "--links-per-bucket", "2",
        )
        assert code == EXIT_OK
        assert out.strip() == "10 buckets, 20 links, total weight 10.0"

    def test_occupied_dir_without_force(self, tmp_path, capsys):
        data = str(tmp_path / "net")
        run_cli(capsys, "init", "--data-dir", data)
        code, _, err = run_cli(capsys, "init", "--data-dir", data)
        assert code == EXIT_DATA
        assert "force" in err

    def test_force_reinitializes(self, tmp_path, capsys):
        data = str(tmp_path / "net")
        run_cli(capsys, "init", "--data-dir", data)
        code, out, _ = run_cli(capsys, "init", "--data-dir", data, "--force",
                               "--buckets", "12", "--links-per-bucket", "2")
        assert code == EXIT_OK
        assert out.strip().startswith("12 buckets")

    def test_deterministic_under_seed(self, tmp_path, capsys):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        run_cli(capsys, "init", "--data-dir", a, "--seed", "42")
        run_cli(capsys, "init", "--data-dir", b, "--seed", "42")
        files_a = sorted((tmp_path / "a" / "buckets").glob("*.xml"))
        files_b = sorted((tmp_path / "b" / "buckets").glob("*.xml"))
        assert [f.name for f in files_a] == [f.name for f in files_b]
        for fa, fb in zip(files_a, files_b):
            assert fa.read_bytes() == fb.read_bytes()

    def test_invalid_parameters(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "init", "--data-dir", str(tmp_path / "net"),
            "--buckets", "3", "--links-per-bucket", "3",
        )
        assert code == EXIT_DATA
        assert "InvalidParameters" in err


class TestSimulate:
    def test_ephemeral_deterministic(self, capsys):
        argv = ["simulate", "--ephemeral", "--seed", "7", "--hops-target", "150"]
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == EXIT_OK
        assert out1 == out2
        report = json.loads(out1)
        assert report["hops"] >= 150
        per_hop = report["ledger"]["learned_weight"] / report["hops"]
        assert 1.5 <= per_hop <= 1.8

    def test_zero_users(self, capsys):
        code, _, err = run_cli(
            capsys, "simulate", "--ephemeral", "--users", "0", "--hops-target", "10"
        )
        assert code == EXIT_DATA
        assert "InsufficientData" in err

    def test_data_dir_mode_persists_learning(self, tmp_path, capsys):
        data = str(tmp_path / "net")
        run_cli(capsys, "init", "--data-dir", data, "--buckets", "30", "--seed", "1")
        code, out, _ = run_cli(
            capsys, "simulate", "--data-dir", data, "--seed", "1",
            "--sessions", "10",
        )
        assert code == EXIT_OK
        report = json.loads(out)
        from bucketnet.store import BucketStore
        graph = BucketStore(data).sync_graph()
        learned = graph.total_weight() - report["ledger"]["initial_weight"]
        assert learned == pytest.approx(report["ledger"]["learned_weight"], abs=1e-6)

    def test_uninitialized_data_dir(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "simulate", "--data-dir", str(tmp_path / "empty")
        )
        assert code == EXIT_DATA

    def test_trace_file(self, tmp_path, capsys):
        trace = tmp_path / "trace.log"
        code, out, _ = run_cli(
            capsys, "simulate", "--ephemeral", "--seed", "3",
            "--sessions", "5", "--trace", str(trace),
        )
        assert code == EXIT_OK
        report = json.loads(out)
        lines = trace.read_text().splitlines()
        assert all(len(line.split("\t")) == 6 for line in lines)
        assert len(lines) >= 2 * report["hops"]

    def test_pairs_csv_export(self, tmp_path, capsys):
        pairs = tmp_path / "pairs.csv"
        code, _, _ = run_cli(
            capsys, "simulate", "--ephemeral", "--seed", "4",
            "--hops-target", "300", "--pairs-csv", str(pairs),
        )
        assert code == EXIT_OK
        lines = pairs.read_text().splitlines()
        assert lines[0] == "bucket,relationship_weight,ground_truth"
        assert len(lines) >= 4
        for line in lines[1:]:
            bucket, weight, truth = line.split(",")
            assert float(weight) > 0
            assert 0.0 <= float(truth) <= 1.0


class TestAnalyze:
    @pytest.fixture
    def data_dir(self, tmp_path, capsys) -> str:
        data = str(tmp_path / "net")
        run_cli(capsys, "init", "--data-dir", data, "--buckets", "25", "--seed", "2")
        return data

    def test_fresh_network_rankings_agree(self, data_dir, capsys):
        _, by_degree, _ = run_cli(
            capsys, "analyze", "centrality", "--data-dir", data_dir,
            "--metric", "degree",
        )
        _, by_weight, _ = run_cli(
            capsys, "analyze", "centrality", "--data-dir", data_dir,
            "--metric", "weighted",
        )
        deg_rank = [line.split(",")[0] for line in by_degree.splitlines()[1:]]
        wt_order = sorted(
            (line.split(",") for line in by_weight.splitlines()[1:]),
            key=lambda row: int(row[4]),
        )
        assert deg_rank == [row[0] for row in wt_order]

    def test_top_k_row_count(self, data_dir, capsys):
        code, out, _ = run_cli(
            capsys, "analyze", "centrality", "--data-dir", data_dir,
            "--metric", "weighted", "-k", "8",
        )
        assert code == EXIT_OK
        assert len(out.splitlines()) == 9

    def test_hierarchy_unknown_root(self, data_dir, capsys):
        code, _, err = run_cli(
            capsys, "analyze", "hierarchy", "--data-dir", data_dir, "--root", "zz",
        )
        assert code == EXIT_DATA

    def test_hierarchy_json_shape(self, data_dir, capsys):
        code, out, _ = run_cli(
            capsys, "analyze", "hierarchy", "--data-dir", data_dir,
            "--root", "b000", "--min-weight", "0.4",
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["root"]["bucket"] == "b000"
        assert len(payload["root"]["children"]) == 3

    def test_missing_root_is_usage_error(self, data_dir, capsys):
        code, _, _ = run_cli(capsys, "analyze", "hierarchy", "--data-dir", data_dir)
        assert code == EXIT_USAGE


class TestConfigFile:
    def test_precedence_defaults_file_flags(self, tmp_path, capsys):
        cfg = tmp_path / "net.cfg"
        cfg.write_text(
            "# experiment settings\n"
            "buckets = 20\n"
            "links_per_bucket = 2\n"
            "seed = 9\n"
        )
        data = str(tmp_path / "net")
        code, out, _ = run_cli(
            capsys, "init", "--config", str(cfg), "--data-dir", data,
            "--buckets", "12",
        )
        assert code == EXIT_OK
        # buckets: flag (12) beats file (20); links: file (2) beats default (3)
        assert out.strip() == "12 buckets, 24 links, total weight 12.0"

    def test_malformed_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("this is not a pair\n")
        code, _, err = run_cli(
            capsys, "init", "--config", str(cfg), "--data-dir", str(tmp_path / "n")
        )
        assert code == EXIT_USAGE


class TestServe:
    @staticmethod
    def _free_port() -> int:
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            return s.getsockname()[1]

    @staticmethod
    def _spawn_serve(data: str, port: int) -> subprocess.Popen:
        return subprocess.Popen(
            [sys.executable, "-m", "bucketnet.cli", "serve",
             "--data-dir", data, "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )

    @staticmethod
    def _wait_ready(port: int, timeout: float = 10.0) -> None:
        deadline = time.time() + timeout
        while time.time() < deadline:
            try:
                with socket.create_connection(("127.0.0.1", port), timeout=0.2):
                    return
            except OSError:
                time.sleep(0.05)
        raise TimeoutError(f"service on port {port} never came up")

    def test_serve_smoke_and_graceful_shutdown(self, tmp_path, capsys):
        data = str(tmp_path / "net")
        run_cli(capsys, "init", "--data-dir", data, "--buckets", "8", "--seed", "5")
        port = self._free_port()
        child = self._spawn_serve(data, port)
        try:
            self._wait_ready(port)
            with urllib.request.urlopen(
                f"http://127.0.0.1:{port}/b000?format=json&session=s", timeout=5
            ) as response:
                assert response.status == 200
                payload = json.loads(response.read().decode())
            assert payload["bucket"] == "b000"
            assert len(payload["links"]) == 3
        finally:
            child.send_signal(signal.SIGTERM)
            assert child.wait(timeout=10) == EXIT_OK

    def test_serve_occupied_port_exits_3(self, tmp_path, capsys):
        data = str(tmp_path / "net")
        run_cli(capsys, "init", "--data-dir", data, "--buckets", "8", "--seed", "5")
        port = self._free_port()
        first = self._spawn_serve(data, port)
        try:
            self._wait_ready(port)
            second = self._spawn_serve(data, port)
            assert second.wait(timeout=10) == EXIT_RUNTIME
        finally:
            first.send_signal(signal.SIGTERM)
            first.wait(timeout=10)

    def test_serve_uninitialized_dir_exits_2(self, tmp_path):
        child = subprocess.Popen(
            [sys.executable, "-m", "bucketnet.cli", "serve",
             "--data-dir", str(tmp_path / "nothing"), "--port", "1"],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        assert child.wait(timeout=10) == EXIT_DATA


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["warp"])
        assert err.value.code == EXIT_USAGE

    def test_missing_data_dir(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "centrality")
        assert code == EXIT_USAGE
