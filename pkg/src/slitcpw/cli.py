"""Command-line front end wiring the toolkit into reproducible runs.

Commands write plot-ready CSV files and JSON reports. Every run is
deterministic for a given configuration and seed; re-runs produce
byte-identical outputs. Exit codes: 0 success, 1 usage error, 2 domain or
precondition error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, emfield, fitting, spinphys
from .geometry import (
    GeometryError,
    Section,
    WaveguideGeometry,
    build_filaments,
    load_geometry,
    validate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_geometry_arg(path: str | None) -> WaveguideGeometry:
    if path is None:
        return validate(WaveguideGeometry())
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"geometry file not found: {p}")
    return load_geometry(p)


def _drive_from_args(args) -> emfield.DriveConditions:
    return emfield.DriveConditions(
        input_power_w=args.power_w, frequency_hz=args.freq_mhz * 1e6)


def _section_from_args(args) -> Section:
    return Section(args.section.replace("-", "_"))


def _spin_from_args(args) -> spinphys.SpinParams:
    return spinphys.SpinParams(
        zero_field_splitting_mhz=args.d_mhz, g_factor=args.g_factor)


def _parse_grid(text: str) -> emfield.GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise ValueError(f"--grid expects x0,x1,dx,z0,z1,dz, got {text!r}")
    x0, x1, dx, z0, z1, dz = (float(p) for p in parts)
    return emfield.GridSpec(x0, x1, dx, z0, z1, dz)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_common_field_flags(p: _Parser) -> None:
    p.add_argument("--geometry", help="geometry key=value file (default: built-in)")
    p.add_argument("--power-w", type=float, default=1.0, help="input power in W")
    p.add_argument("--freq-mhz", type=float, default=70.0, help="drive frequency in MHz")
    p.add_argument("--out", default=".", help="output directory")


def _add_spin_flags(p: _Parser) -> None:
    p.add_argument("--d-mhz", type=float, default=35.0,
                   help="zero-field splitting D/h in MHz")
    p.add_argument("--g-factor", type=float, default=2.0, help="electron g-factor")


def build_parser() -> _Parser:
    parser = _Parser(prog="slitcpw",
                     description="Slit-loaded coplanar waveguide toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impedance", help="characteristic impedance and mismatch")
    p.add_argument("--geometry", help="geometry key=value file (default: built-in)")

    p = sub.add_parser("field-map", help="grid map of the microwave magnetic field")
    _add_common_field_flags(p)
    p.add_argument("--section", choices=["with-slit", "without-slit"],
                   default="with-slit")
    p.add_argument("--grid", default="-150,150,2,0,60,2",
                   help="x0,x1,dx,z0,z1,dz in um")
    p.add_argument("--verify", action="store_true",
                   help="assert mirror symmetry of the map before writing")

    p = sub.add_parser("line-scan", help="field along x at a fixed depth")
    _add_common_field_flags(p)
    p.add_argument("--section", choices=["with-slit", "without-slit"],
                   default="with-slit")
    p.add_argument("--z-um", type=float, default=8.1, help="scan depth in um")
    p.add_argument("--x-range", default="-150,150,0.5",
                   help="x0,x1,dx in um")

    p = sub.add_parser("depth-sweep",
                       help="Bx(0, z) versus depth for several slit widths")
    _add_common_field_flags(p)
    p.add_argument("--slit-widths", default="40",
                   help="comma-separated slit widths in um (0 = no slit)")
    p.add_argument("--grid", default="0,0,1,0.5,150,0.5",
                   help="x0,x1,dx,z0,z1,dz in um; only the z part is used")

    p = sub.add_parser("odmr", help="synthesize or fit contrast spectra")
    _add_spin_flags(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--synth", action="store_true")
    mode.add_argument("--fit", action="store_true")
    p.add_argument("--b0-g", type=float, default=97.0, help="static field in G")
    p.add_argument("--amplitude", type=float, default=0.004,
                   help="peak contrast for synthesis")
    p.add_argument("--sigma-mhz", type=float, default=2.0)
    p.add_argument("--gamma-mhz", type=float, default=2.0)
    p.add_argument("--fmin-mhz", type=float, default=150.0)
    p.add_argument("--fmax-mhz", type=float, default=400.0)
    p.add_argument("--df-mhz", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.0,
                   help="additive contrast noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="infile", help="spectrum CSV to fit")
    p.add_argument("--n-peaks", type=int, default=2, choices=[1, 2])
    p.add_argument("--estimate-b0", action="store_true",
                   help="append both (B0, D) branch candidates to the fit report")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("rabi", help="synthesize or fit Rabi traces")
    _add_spin_flags(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--synth", action="store_true")
    mode.add_argument("--fit", action="store_true")
    p.add_argument("--a-rabi", type=float, default=0.01)
    p.add_argument("--f-rabi-mhz", type=float, default=1.5)
    p.add_argument("--t2-us", type=float, default=2.0)
    p.add_argument("--tmax-us", type=float, default=8.0)
    p.add_argument("--dt-us", type=float, default=0.02)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="infile", help="trace CSV to fit")
    p.add_argument("--to-field", action="store_true",
                   help="convert the fitted Rabi frequency to B_AC,x")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("compare", help="compare two profile CSVs")
    p.add_argument("measured", help="measured profile CSV (x_um,value)")
    p.add_argument("simulated", help="simulated profile CSV (x_um,value)")
    p.add_argument("--out", help="optional JSON report path")

    p = sub.add_parser("reproduce-paper",
                       help="run the reference pipelines and report pass/fail")
    p.add_argument("--out", default="reproduce", help="output directory")
    p.add_argument("--power-w", type=float, default=1.0)
    p.add_argument("--freq-mhz", type=float, default=70.0)

    return parser


def _cmd_impedance(args) -> int:
    geom = _load_geometry_arg(args.geometry)
    z0 = emfield.cpw_impedance(geom)
    report = {
        "z0_ohm": z0,
        "eps_eff": emfield.effective_permittivity(geom),
        "reflection_db_vs_50ohm": emfield.reflection_estimate(z0, 50.0),
    }
    sys.stdout.write(_json_dumps(report))
    return EXIT_OK


def _cmd_field_map(args) -> int:
    geom = _load_geometry_arg(args.geometry)
    grid = _parse_grid(args.grid)
    fmap = emfield.field_map(geom, _drive_from_args(args),
                             _section_from_args(args), grid)
    if args.verify:
        _verify_map_symmetry(fmap)
    out = _out_dir(args)
    path = out / "field_map.csv"
    fmap.to_csv(path)
    sys.stdout.write(f"wrote {path}\n")
    return EXIT_OK


def _verify_map_symmetry(fmap: emfield.FieldMap) -> None:
    """Bx must be even and Bz odd in x wherever the mirrored node exists."""
    by_pos = {(s.x_um, s.z_um): s for s in fmap.samples}
    worst = 0.0
    for s in fmap.samples:
        m = by_pos.get((-s.x_um, s.z_um))
        if m is None:
            continue
        scale = max(abs(s.bx_g), abs(s.bz_g), 1e-30)
        worst = max(worst, abs(s.bx_g - m.bx_g) / scale,
                    abs(s.bz_g + m.bz_g) / scale)
    if worst > 1e-10:
        raise FloatingPointError(
            f"mirror-symmetry verification failed: relative residual {worst:g}")


def _cmd_line_scan(args) -> int:
    geom = _load_geometry_arg(args.geometry)
    x0, x1, dx = (float(v) for v in args.x_range.split(","))
    xs = np.arange(x0, x1 + dx / 2, dx)
    samples = emfield.line_scan(geom, _drive_from_args(args),
                                _section_from_args(args), xs, args.z_um)
    out = _out_dir(args)
    scan_path = out / "line_scan.csv"
    with open(scan_path, "w") as fh:
        fh.write(emfield.FIELD_MAP_CSV_HEADER + "\n")
        for s in samples:
            fh.write(",".join(repr(float(v)) for v in
                              (s.x_um, s.y_um, s.z_um, s.bx_g, s.by_g, s.bz_g)) + "\n")
    profile = analysis.FieldProfile(xs, np.array([s.bx_g for s in samples]))
    profile_path = out / "profile_bx.csv"
    profile.to_csv(profile_path)
    sys.stdout.write(f"wrote {scan_path}\nwrote {profile_path}\n")
    return EXIT_OK


def _cmd_depth_sweep(args) -> int:
    geom = _load_geometry_arg(args.geometry)
    drive = _drive_from_args(args)
    grid = _parse_grid(args.grid)
    widths = [float(w) for w in args.slit_widths.split(",")]
    out = _out_dir(args)
    summary = []
    for w in widths:
        g = validate(dataclasses.replace(geom, slit_width_um=max(w, 0.0)))
        section = Section.WITH_SLIT if w > 0 else Section.WITHOUT_SLIT
        prof = emfield.depth_profile(g, drive, section,
                                     (grid.z0_um if grid.z0_um > 0 else grid.dz_um,
                                      grid.z1_um), grid.dz_um)
        tag = f"{w:g}".replace(".", "p")
        prof.to_csv(out / f"depth_profile_slit_{tag}um.csv")
        summary.append({
            "slit_width_um": w,
            "argmax_depth_um": prof.argmax_depth_um,
            "max_bx_G": prof.max_bx_g,
            "interior_max": prof.interior_max,
            "monotone_decreasing": prof.is_monotone_decreasing(),
        })
    path = out / "depth_sweep_summary.json"
    path.write_text(_json_dumps({"profiles": summary}))
    sys.stdout.write(f"wrote {path}\n")
    return EXIT_OK


def _cmd_odmr(args) -> int:
    params = _spin_from_args(args)
    out = _out_dir(args)
    if args.synth:
        field = spinphys.StaticField(args.b0_g)
        peak = spinphys.PeakShape(args.amplitude, args.sigma_mhz, args.gamma_mhz)
        freq = np.arange(args.fmin_mhz, args.fmax_mhz + args.df_mhz / 2, args.df_mhz)
        spec = spinphys.synthesize_odmr(params, field, peak, peak, freq,
                                        noise_sigma=args.noise, seed=args.seed)
        path = out / "odmr.csv"
        spec.to_csv(path)
        sys.stdout.write(f"wrote {path}\n")
        return EXIT_OK
    if not args.infile:
        raise _UsageError("odmr --fit requires --in <csv>")
    if not Path(args.infile).exists():
        raise FileNotFoundError(f"spectrum file not found: {args.infile}")
    spec = spinphys.OdmrSpectrum.from_csv(args.infile)
    result = fitting.fit_odmr(spec, n_peaks=args.n_peaks)
    report = result.to_dict()
    if args.estimate_b0:
        if args.n_peaks != 2:
            raise ValueError("--estimate-b0 requires --n-peaks 2")
        centers = sorted([result.params["center_1_mhz"],
                          result.params["center_2_mhz"]])
        low, high = analysis.b0_and_d_from_resonances(
            centers[1], centers[0], params, d_prior_mhz=(30.0, 40.0))
        report["b0_candidates"] = [
            {"branch": c.branch, "b0_g": c.b0_g, "d_mhz": c.d_mhz,
             "plausible": c.plausible}
            for c in (low, high)
        ]
    path = out / "odmr_fit.json"
    path.write_text(_json_dumps(report))
    sys.stdout.write(_json_dumps(report))
    return EXIT_OK


def _cmd_rabi(args) -> int:
    params = _spin_from_args(args)
    out = _out_dir(args)
    if args.synth:
        t = np.arange(0.0, args.tmax_us + args.dt_us / 2, args.dt_us)
        trace = spinphys.synthesize_rabi(args.a_rabi, args.f_rabi_mhz,
                                         args.t2_us, t,
                                         noise_sigma=args.noise, seed=args.seed)
        path = out / "rabi.csv"
        trace.to_csv(path)
        sys.stdout.write(f"wrote {path}\n")
        return EXIT_OK
    if not args.infile:
        raise _UsageError("rabi --fit requires --in <csv>")
    if not Path(args.infile).exists():
        raise FileNotFoundError(f"trace file not found: {args.infile}")
    trace = spinphys.RabiTrace.from_csv(args.infile)
    result = fitting.fit_rabi(trace)
    report = result.to_dict()
    if args.to_field:
        report["b_ac_x_g"] = analysis.rabi_to_field(
            params, result.params["f_rabi_mhz"])
    path = out / "rabi_fit.json"
    path.write_text(_json_dumps(report))
    sys.stdout.write(_json_dumps(report))
    return EXIT_OK


def _cmd_compare(args) -> int:
    for path in (args.measured, args.simulated):
        if not Path(path).exists():
            raise FileNotFoundError(f"profile file not found: {path}")
    measured = analysis.FieldProfile.from_csv(args.measured)
    simulated = analysis.FieldProfile.from_csv(args.simulated)
    report = analysis.compare_profiles(measured, simulated)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def _measured_equivalent_profile(geom, drive, params, x_points, z_um,
                                 t2_star_us=2.0, a_rabi=0.01):
    """Simulate Bx, synthesize Rabi traces, fit them, invert to field.

    The sampling step tracks the expected Rabi period (20 samples per
    oscillation) so fast near-edge oscillations are not aliased.
    """
    samples = emfield.line_scan(geom, drive, Section.WITH_SLIT,
                                np.asarray(x_points, dtype=float), z_um)
    values = []
    for s in samples:
        f_rabi = spinphys.rabi_frequency(params, abs(s.bx_g))
        dt = min(0.02, 1.0 / (20.0 * f_rabi))
        t = np.arange(0.0, 3.0 * t2_star_us, dt)
        trace = spinphys.synthesize_rabi(a_rabi, f_rabi, t2_star_us, t)
        fit = fitting.fit_rabi(trace)
        values.append(analysis.rabi_to_field(params, fit.params["f_rabi_mhz"]))
    return analysis.FieldProfile(np.asarray(x_points, dtype=float),
                                 np.asarray(values))


def _cmd_reproduce_paper(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geom = validate(WaveguideGeometry())
    drive = emfield.DriveConditions(input_power_w=args.power_w,
                                    frequency_hz=args.freq_mhz * 1e6)
    params = spinphys.SpinParams()
    checks: list[tuple[str, bool, str]] = []

    z0 = emfield.cpw_impedance(geom)
    checks.append(("impedance 46.5-53.5 ohm", 46.5 <= z0 <= 53.5,
                   f"Z0 = {z0:.2f} ohm"))

    current = emfield.power_to_current(drive, z0)
    fil = build_filaments(geom, Section.WITH_SLIT, current)
    bx0, _ = emfield.b_field_at(fil, (0.0, 0.0))
    bz_line = max(abs(emfield.b_field_at(fil, (0.0, z))[1])
                  for z in np.arange(0.5, 60.0, 0.5))
    checks.append(("symmetry zeros Bx(0,0)=0, Bz(0,z)=0",
                   abs(bx0) <= 1e-10 and bz_line <= 1e-10,
                   f"|Bx(0,0)| = {abs(bx0):.2e} G, max|Bz(0,z)| = {bz_line:.2e} G"))

    prof = emfield.depth_profile(geom, drive, Section.WITH_SLIT, (0.5, 150.0), 0.5)
    prof.to_csv(out / "depth_profile_default.csv")
    ok4 = (prof.interior_max and 15.0 <= prof.argmax_depth_um <= 40.0
           and 2.0 <= prof.max_bx_g <= 5.0)
    checks.append(("depth maximum z* in 15-40 um, peak in 2-5 G", ok4,
                   f"peak = {prof.max_bx_g:.2f} G at z* = {prof.argmax_depth_um:.1f} um"))

    noslit = emfield.depth_profile(geom, drive, Section.WITHOUT_SLIT,
                                   (1.0, 100.0), 0.5)
    checks.append(("no-slit profile monotone decreasing",
                   noslit.is_monotone_decreasing(),
                   f"Bx(1 um) = {noslit.bx_g[0]:.2f} G, no interior max"))

    peaks, depths = [], []
    for w in (10.0, 20.0, 40.0, 80.0):
        g = validate(dataclasses.replace(geom, slit_width_um=w))
        pw = emfield.depth_profile(g, drive, Section.WITH_SLIT, (0.5, 150.0), 0.5)
        pw.to_csv(out / f"depth_profile_slit_{w:g}um.csv")
        peaks.append(pw.max_bx_g)
        depths.append(pw.argmax_depth_um)
    ok5 = (all(a > b for a, b in zip(peaks, peaks[1:]))
           and all(a < b for a, b in zip(depths, depths[1:])))
    checks.append(("slit-width sweep: peak down, z* up", ok5,
                   f"peaks {['%.2f' % p for p in peaks]} G, "
                   f"z* {['%.1f' % d for d in depths]} um"))

    wide = validate(dataclasses.replace(geom, signal_width_um=1000.0))
    pw = emfield.depth_profile(wide, drive, Section.WITH_SLIT, (1.0, 300.0), 1.0)
    ok6 = (pw.max_bx_g <= prof.max_bx_g / 5.0
           and pw.argmax_depth_um > prof.argmax_depth_um)
    checks.append(("1 mm signal: peak <= 1/5, z* deeper", ok6,
                   f"peak ratio = {prof.max_bx_g / pw.max_bx_g:.1f}, "
                   f"z* = {pw.argmax_depth_um:.0f} um"))

    xs = np.arange(-18.0, 18.01, 0.5)
    slit_scan = emfield.line_scan(geom, drive, Section.WITH_SLIT, xs, 8.1)
    floor = min(s.bx_g for s in slit_scan)
    dominance = all(abs(s.bx_g) > abs(s.bz_g) for s in slit_scan)
    gap_x = np.arange(50.5, 89.51, 0.25)
    gap_scan = emfield.line_scan(geom, drive, Section.WITH_SLIT, gap_x, 8.1)
    gap_bx = np.array([s.bx_g for s in gap_scan])
    crossing = bool(np.any(np.sign(gap_bx[:-1]) != np.sign(gap_bx[1:])))
    checks.append(("in-slit Bx >= 1.5 G and |Bx| > |Bz| at z = 8.1 um",
                   floor >= 1.5 and dominance, f"floor = {floor:.2f} G"))
    checks.append(("gap Bx crosses zero at z = 8.1 um", crossing,
                   "sign change found" if crossing else "no sign change"))

    x_points = (-20.0, -16.0, -10.0, 0.0)
    measured = _measured_equivalent_profile(geom, drive, params, x_points, 8.1)
    sim_xs = np.arange(-21.0, 21.01, 0.5)
    sim_scan = emfield.line_scan(geom, drive, Section.WITH_SLIT, sim_xs, 8.1)
    simulated = analysis.FieldProfile(sim_xs, np.array([s.bx_g for s in sim_scan]))
    measured_n = analysis.normalize_profile(measured)
    simulated_n = analysis.normalize_profile(simulated)
    comp = analysis.compare_profiles(measured_n, simulated_n)
    (out / "profile_comparison_z8p1.json").write_text(comp.to_json())
    checks.append(("Rabi pipeline matches simulated profile (rms < 0.05)",
                   comp.rms_deviation < 0.05,
                   f"rms = {comp.rms_deviation:.2e}"))
    checks.append(("four-point measurement-grid comparison (rms < 0.25)",
                   comp.rms_deviation < 0.25, f"rms = {comp.rms_deviation:.2e}"))

    shallow = emfield.line_scan(geom, drive, Section.WITH_SLIT, sim_xs, 1.7)
    shallow_n = analysis.normalize_profile(
        analysis.FieldProfile(sim_xs, np.array([s.bx_g for s in shallow])))
    edge = shallow_n.value_at(16.0)
    checks.append(("z = 1.7 um: normalized edge value exceeds center", edge > 1.0,
                   f"value(16 um) = {edge:.2f}"))

    all_ok = all(ok for _, ok, _ in checks)
    width = max(len(name) for name, _, _ in checks)
    for name, ok, detail in checks:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}\n")
    sys.stdout.write(("all checks passed" if all_ok else "SOME CHECKS FAILED") + "\n")
    (out / "reproduce_summary.json").write_text(_json_dumps({
        "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
        "all_passed": all_ok,
    }))
    return EXIT_OK if all_ok else EXIT_NUMERICAL


_COMMANDS = {
    "impedance": _cmd_impedance,
    "field-map": _cmd_field_map,
    "line-scan": _cmd_line_scan,
    "depth-sweep": _cmd_depth_sweep,
    "odmr": _cmd_odmr,
    "rabi": _cmd_rabi,
    "compare": _cmd_compare,
    "reproduce-paper": _cmd_reproduce_paper,
}


_DASH_VALUE_FLAGS = ("--grid", "--x-range", "--slit-widths", "--z-um",
                     "--b0-g", "--fmin-mhz", "--fmax-mhz")


def _join_dash_values(argv):
    """Rewrite '--grid -60,...' as '--grid=-60,...' so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        if (argv[i] in _DASH_VALUE_FLAGS and i + 1 < len(argv)
                and argv[i + 1].startswith("-")):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_dash_values(list(argv)))
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (GeometryError, FileNotFoundError, ValueError,
            fitting.FitInitializationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except (fitting.FitError, FloatingPointError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
