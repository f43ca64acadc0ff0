from pathlib import Path

import numpy as np
import pytest

from vqepes.cli import main
from vqepes.pes import parse_results_table

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"
H2_FIXTURE = FIXTURES / "h2" / "h2_d0.90.fcidump"


def strip_timing(text: str) -> str:
    """Results table with the wall-clock column masked (timing is the one
    legitimately nondeterministic field)."""
    out = []
    for line in text.splitlines():
        if line.startswith("#") or line.startswith("distance_angstrom"):
            out.append(line)
        else:
            out.append(" ".join(line.split()[:-1]))
    return "\n".join(out)


class TestInspect:
    def test_h2_summary(self, capsys):
        assert main(["inspect", "--fcidump", str(H2_FIXTURE)]) == 0
        captured = capsys.readouterr().out
        assert "norb=2 nelec=2 qubits=4" in captured

    def test_missing_file(self, capsys):
        assert main(["inspect", "--fcidump", "/nonexistent/file.fcidump"]) == 1
        assert "/nonexistent/file.fcidump" in capsys.readouterr().err

    def test_corrupt_header_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.fcidump"
        bad.write_text("NOT A HEADER\n")
        assert main(["inspect", "--fcidump", str(bad)]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_writes_result_file(self, tmp_path):
        assert main(["inspect", "--fcidump", str(H2_FIXTURE), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "inspect_h2_d0.90.result").exists()


class TestSingleRuns:
    def test_exact_and_uccsd_agree(self, tmp_path, capsys):
        assert main(["exact", "--fcidump", str(H2_FIXTURE), "--out", str(tmp_path)]) == 0
        assert main(["vqe", "--method", "uccsd", "--fcidump", str(H2_FIXTURE),
                     "--out", str(tmp_path)]) == 0
        exact = dict(
            line.split(" = ") for line in
            (tmp_path / "exact_h2_d0.90.result").read_text().splitlines()
        )
        uccsd = dict(
            line.split(" = ") for line in
            (tmp_path / "uccsd_h2_d0.90.result").read_text().splitlines()
        )
        assert float(uccsd["energy_ha"]) == pytest.approx(float(exact["energy_ha"]), abs=1e-6)

    def test_adapt_runs(self, tmp_path):
        assert main(["adapt", "--fcidump", str(H2_FIXTURE), "--out", str(tmp_path)]) == 0
        text = (tmp_path / "adapt_h2_d0.90.result").read_text()
        assert "chosen_ops" in text and "stop_reason" in text

    def test_vqe_bad_method(self, capsys):
        assert main(["vqe", "--method", "magic", "--fcidump", str(H2_FIXTURE)]) == 1

    def test_active_space_fold_from_cli(self, tmp_path):
        full = FIXTURES / "h2o_full" / "h2o_full_d0.00.fcidump"
        assert main(["exact", "--fcidump", str(full), "--active-space", "2,2",
                     "--out", str(tmp_path)]) == 0


class TestScan:
    def write_manifest(self, tmp_path, method="exact", distances=None, extra=""):
        distances = distances or [0.6, 0.9, 1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 3.0, 3.3, 3.6]
        manifest = tmp_path / "scan.yaml"
        manifest.write_text(
            f"system: H2\nfixture_dir: {FIXTURES / 'h2'}\nmethod: {method}\n"
            f"distances: {distances}\n{extra}"
        )
        return manifest

    def test_exact_scan_writes_outputs(self, tmp_path):
        manifest = self.write_manifest(tmp_path)
        out = tmp_path / "out"
        assert main(["scan", "--manifest", str(manifest), "--out", str(out)]) == 0
        assert (out / "H2_exact.results").exists()
        assert (out / "H2_exact.fit").exists()
        assert (out / "H2_exact.curve").exists()
        points = parse_results_table((out / "H2_exact.results").read_text())
        assert len(points) == 11

    def test_unknown_method_usage_error(self, tmp_path):
        manifest = self.write_manifest(tmp_path, method="bogus")
        assert main(["scan", "--manifest", str(manifest), "--out", str(tmp_path / "o")]) == 2

    def test_rerun_is_deterministic(self, tmp_path):
        manifest = self.write_manifest(tmp_path, method="sampled-adapt",
                                       distances=[0.6, 0.9, 1.2, 1.5],
                                       extra="shots: 256\nnoise_p01: 0.02\nnoise_p10: 0.02\nseed: 3\n")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["scan", "--manifest", str(manifest), "--out", str(out1)]) == 0
        assert main(["scan", "--manifest", str(manifest), "--out", str(out2)]) == 0
        t1 = (out1 / "H2_sampled-adapt.results").read_text()
        t2 = (out2 / "H2_sampled-adapt.results").read_text()
        assert strip_timing(t1) == strip_timing(t2)

    def test_seed_echoed_in_results(self, tmp_path):
        manifest = self.write_manifest(tmp_path, distances=[0.9, 1.5, 2.1, 3.0])
        out = tmp_path / "out"
        main(["scan", "--manifest", str(manifest), "--out", str(out)])
        assert "# seed = 0" in (out / "H2_exact.results").read_text()

    def test_missing_manifest(self):
        assert main(["scan", "--manifest", "/no/such.yaml", "--out", "/tmp/x"]) == 1

    def test_fixtures_not_mutated(self, tmp_path):
        before = {p.name: p.read_bytes() for p in (FIXTURES / "h2").iterdir()}
        manifest = self.write_manifest(tmp_path, distances=[0.9, 1.5, 2.1, 3.0])
        main(["scan", "--manifest", str(manifest), "--out", str(tmp_path / "o")])
        after = {p.name: p.read_bytes() for p in (FIXTURES / "h2").iterdir()}
        assert before == after


class TestFit:
    def test_synthetic_table_recovers_parameters(self, tmp_path, capsys):
        rs = 0.3 * np.arange(1, 13)
        d_e, a, r_e = 0.1, 1.5, 1.87
        rows = ["distance_angstrom energy_ha stderr_ha method iterations evaluations wall_time_s"]
        for r in rs:
            e = d_e * (1 - np.exp(-a * (r - r_e))) ** 2 - d_e
            rows.append(f"{r:.4f} {e:.10f} 0.0 synthetic 0 0 0.0")
        table = tmp_path / "points.results"
        table.write_text("\n".join(rows) + "\n")
        assert main(["fit", "--points", str(table), "--out", str(tmp_path)]) == 0
        report = capsys.readouterr().out
        assert "r_e_angstrom = 1.87" in report
        assert (tmp_path / "points.fit").exists()

    def test_three_point_file_rejected(self, tmp_path):
        table = tmp_path / "short.results"
        table.write_text(
            "distance_angstrom energy_ha stderr_ha method iterations evaluations wall_time_s\n"
            "1.0 -1.0 0.0 x 0 0 0.0\n2.0 -1.1 0.0 x 0 0 0.0\n3.0 -1.05 0.0 x 0 0 0.0\n"
        )
        assert main(["fit", "--points", str(table)]) == 1

    def test_missing_points_file(self):
        assert main(["fit", "--points", "/no/such.results"]) == 1


class TestResources:
    def test_uccsd_counts_on_h2(self, tmp_path, capsys):
        assert main(["resources", "--method", "uccsd", "--fcidump", str(H2_FIXTURE),
                     "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "CNOT" in out and "depth" in out
        assert "unitary_verified = True" in out

    def test_ordering_on_hardware_scale_fixture(self):
        # CNOT(UCCSD) > CNOT(RyRz) > CNOT(largest ADAPT) on the (4,4) fixture
        import io
        from contextlib import redirect_stdout

        counts = {}
        fixture = FIXTURES / "mgh2o_44" / "mgh2o_44_d1.90.fcidump"
        for method in ("uccsd", "ryrz", "adapt"):
            buf = io.StringIO()
            with redirect_stdout(buf):
                assert main(["resources", "--method", method, "--fcidump", str(fixture)]) == 0
            for line in buf.getvalue().splitlines():
                if line.strip().startswith("cnot ="):
                    counts[method] = int(line.split("=")[1])
        assert counts["uccsd"] > counts["ryrz"] > counts["adapt"]
