import json

import numpy as np
import pytest

from slitcpw.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestImpedanceCommand:
    def test_default_geometry(self, capsys):
        code, out, _ = run(capsys, "impedance")
        assert code == 0
        report = json.loads(out)
        assert 46.5 <= report["z0_ohm"] <= 53.5
        assert report["reflection_db_vs_50ohm"] < -30

    def test_air_substrate_file(self, capsys, tmp_path):
        geom = tmp_path / "air.txt"
        geom.write_text("eps_r = 1.0\n")
        code, out, _ = run(capsys, "impedance", "--geometry", str(geom))
        assert code == 0
        assert json.loads(out)["z0_ohm"] == pytest.approx(115.4, rel=0.10)

    def test_missing_file_names_path(self, capsys):
        code, _, err = run(capsys, "impedance", "--geometry", "/no/such/geom.txt")
        assert code == 2
        assert "/no/such/geom.txt" in err

    def test_invalid_geometry_is_domain_error(self, capsys, tmp_path):
        geom = tmp_path / "bad.txt"
        geom.write_text("signal_width_um = 50\nslit_width_um = 60\n")
        code, _, err = run(capsys, "impedance", "--geometry", str(geom))
        assert code == 2
        assert "slit_width_um" in err


class TestUsageErrors:
    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "no-such-command")
        assert code == 1

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "impedance", "--bogus")
        assert code == 1

    def test_fit_without_input(self, capsys, tmp_path):
        code, _, err = run(capsys, "odmr", "--fit", "--out", str(tmp_path))
        assert code == 1
        assert "--in" in err


class TestFieldMapCommand:
    def test_writes_csv_with_exact_header(self, capsys, tmp_path):
        code, out, _ = run(capsys, "field-map", "--section", "with-slit",
                           "--grid", "-60,60,10,2,20,6", "--out", str(tmp_path))
        assert code == 0
        lines = (tmp_path / "field_map.csv").read_text().splitlines()
        assert lines[0] == "x_um,y_um,z_um,Bx_G,By_G,Bz_G"
        assert len(lines) == 1 + 13 * 4

    def test_verify_flag_passes_on_symmetric_map(self, capsys, tmp_path):
        code, _, _ = run(capsys, "field-map", "--verify",
                         "--grid", "-60,60,10,2,20,6", "--out", str(tmp_path))
        assert code == 0

    def test_gap_region_dominated_by_bz(self, capsys, tmp_path):
        code, _, _ = run(capsys, "field-map", "--grid", "52,88,4,6,14,4",
                         "--out", str(tmp_path))
        assert code == 0
        rows = (tmp_path / "field_map.csv").read_text().splitlines()[1:]
        vals = [list(map(float, r.split(","))) for r in rows]
        frac = np.mean([abs(v[5]) > abs(v[3]) for v in vals])
        assert frac > 0.9


class TestDepthSweepCommand:
    def test_trends_across_slit_widths(self, capsys, tmp_path):
        code, _, _ = run(capsys, "depth-sweep", "--slit-widths", "10,20,40,80",
                         "--grid", "0,0,1,1,130,1", "--out", str(tmp_path))
        assert code == 0
        summary = json.loads((tmp_path / "depth_sweep_summary.json").read_text())
        rows = summary["profiles"]
        peaks = [r["max_bx_G"] for r in rows]
        depths = [r["argmax_depth_um"] for r in rows]
        assert all(a > b for a, b in zip(peaks, peaks[1:]))
        assert all(a < b for a, b in zip(depths, depths[1:]))
        assert all(r["interior_max"] for r in rows)

    def test_no_slit_run_reports_monotone(self, capsys, tmp_path):
        code, _, _ = run(capsys, "depth-sweep", "--slit-widths", "0",
                         "--grid", "0,0,1,1,100,1", "--out", str(tmp_path))
        assert code == 0
        summary = json.loads((tmp_path / "depth_sweep_summary.json").read_text())
        row = summary["profiles"][0]
        assert row["monotone_decreasing"] is True
        assert row["interior_max"] is False

    def test_per_width_csvs_written(self, capsys, tmp_path):
        run(capsys, "depth-sweep", "--slit-widths", "20,40",
            "--grid", "0,0,1,1,80,1", "--out", str(tmp_path))
        assert (tmp_path / "depth_profile_slit_20um.csv").exists()
        assert (tmp_path / "depth_profile_slit_40um.csv").exists()


class TestOdmrCommand:
    def test_synth_then_fit_round_trip(self, capsys, tmp_path):
        code, _, _ = run(capsys, "odmr", "--synth", "--b0-g", "97",
                         "--out", str(tmp_path))
        assert code == 0
        code, out, _ = run(capsys, "odmr", "--fit", "--estimate-b0",
                           "--in", str(tmp_path / "odmr.csv"),
                           "--out", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        centers = sorted([report["params"]["center_1_mhz"],
                          report["params"]["center_2_mhz"]])
        assert centers[0] == pytest.approx(201.5, abs=0.5)
        assert centers[1] == pytest.approx(341.5, abs=0.5)
        branches = {c["branch"]: c for c in report["b0_candidates"]}
        assert branches["high_field"]["b0_g"] == pytest.approx(97.0, abs=0.5)
        assert branches["high_field"]["plausible"] is True
        assert (tmp_path / "odmr_fit.json").exists()

    def test_synth_deterministic(self, capsys, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        for d in (a_dir, b_dir):
            run(capsys, "odmr", "--synth", "--noise", "4e-4", "--seed", "3",
                "--out", str(d))
        assert (a_dir / "odmr.csv").read_bytes() == (b_dir / "odmr.csv").read_bytes()


class TestRabiCommand:
    def test_synth_byte_identical_reruns(self, capsys, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        for d in (a_dir, b_dir):
            code, _, _ = run(capsys, "rabi", "--synth", "--noise", "1e-3",
                             "--seed", "11", "--out", str(d))
            assert code == 0
        assert (a_dir / "rabi.csv").read_bytes() == (b_dir / "rabi.csv").read_bytes()

    def test_fit_with_field_conversion(self, capsys, tmp_path):
        run(capsys, "rabi", "--synth", "--a-rabi", "0.01", "--f-rabi-mhz", "4.8485",
            "--t2-us", "2", "--out", str(tmp_path))
        code, out, _ = run(capsys, "rabi", "--fit", "--to-field",
                           "--in", str(tmp_path / "rabi.csv"),
                           "--out", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        assert report["params"]["f_rabi_mhz"] == pytest.approx(4.8485, rel=1e-3)
        assert report["b_ac_x_g"] == pytest.approx(1.0, abs=2e-3)


class TestCompareCommand:
    def test_identical_profiles(self, capsys, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("x_um,value\n-10.0,1.5\n0.0,1.0\n10.0,1.5\n")
        code, out, _ = run(capsys, "compare", str(path), str(path))
        assert code == 0
        assert json.loads(out)["rms_deviation"] == 0.0

    def test_constant_offset(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("x_um,value\n-10.0,1.0\n0.0,1.0\n10.0,1.0\n")
        b.write_text("x_um,value\n-10.0,1.1\n0.0,1.1\n10.0,1.1\n")
        code, out, _ = run(capsys, "compare", str(a), str(b))
        assert code == 0
        assert json.loads(out)["rms_deviation"] == pytest.approx(0.1, rel=1e-12)

    def test_missing_profile_file(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        a.write_text("x_um,value\n0.0,1.0\n1.0,1.0\n")
        code, _, err = run(capsys, "compare", str(a), str(tmp_path / "nope.csv"))
        assert code == 2
        assert "nope.csv" in err


class TestLineScanCommand:
    def test_writes_scan_and_profile(self, capsys, tmp_path):
        code, _, _ = run(capsys, "line-scan", "--z-um", "8.1",
                         "--x-range", "-18,18,1", "--out", str(tmp_path))
        assert code == 0
        scan = (tmp_path / "line_scan.csv").read_text().splitlines()
        assert scan[0] == "x_um,y_um,z_um,Bx_G,By_G,Bz_G"
        prof = (tmp_path / "profile_bx.csv").read_text().splitlines()
        assert prof[0] == "x_um,value"
        assert len(prof) == len(scan) == 38
