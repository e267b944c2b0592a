import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitcpw.emfield import b_field_at
from slitcpw.geometry import (
    GeometryError,
    Section,
    WaveguideGeometry,
    build_filaments,
    geometry_violations,
    load_geometry,
    save_geometry,
    validate,
)


def test_default_geometry_is_valid():
    geom = validate(WaveguideGeometry())
    assert geom.signal_width_um == 100.0
    assert geom.gap_width_um == 40.0
    assert geom.ground_width_um == 200.0
    assert geom.slit_width_um == 40.0
    assert geom.slit_length_um == 300.0
    assert geom.metal_thickness_um == 2.0
    assert geom.substrate_thickness_um == 300.0
    assert geometry_violations(geom) == []


def test_slit_as_wide_as_signal_rejected():
    geom = WaveguideGeometry(signal_width_um=100.0, slit_width_um=100.0)
    with pytest.raises(GeometryError, match="slit_width_um < signal_width_um"):
        validate(geom)
    report = geometry_violations(geom)
    assert len(report) == 1 and "100.0" in report[0]


def test_zero_slit_is_plain_cpw():
    assert geometry_violations(WaveguideGeometry(slit_width_um=0.0)) == []


def test_negative_dimension_reported_with_value():
    bad = WaveguideGeometry(gap_width_um=-3.0, substrate_rel_permittivity=0.5)
    report = geometry_violations(bad)
    assert any("gap_width_um" in r and "-3.0" in r for r in report)
    assert any("substrate_rel_permittivity" in r for r in report)


class TestBuildFilaments:
    def test_paper_default_strip_currents(self):
        fil = build_filaments(WaveguideGeometry(), Section.WITH_SLIT, 0.2,
                              filaments_per_strip=200)
        assert len(fil.strips) == 4
        assert len(fil.x_um) == 4 * 200
        currents = sorted(s.current_a for s in fil.strips)
        assert currents[:2] == pytest.approx([-0.1, -0.1], rel=1e-12)
        assert currents[2:] == pytest.approx([0.1, 0.1], rel=1e-12)

    def test_without_slit_single_signal_strip(self):
        fil = build_filaments(WaveguideGeometry(), Section.WITHOUT_SLIT, 0.2)
        signal = [s for s in fil.strips if s.current_a > 0]
        assert len(signal) == 1
        assert signal[0].current_a == pytest.approx(0.2, rel=1e-12)
        x, _ = fil.strip_rows(fil.strips.index(signal[0]))
        assert x.min() >= -50.0 and x.max() <= 50.0

    def test_net_current_zero(self):
        fil = build_filaments(WaveguideGeometry(), Section.WITH_SLIT, 0.2)
        assert abs(fil.net_current_a) < 1e-12 * 0.2

    def test_positions_within_strip_extents(self):
        fil = build_filaments(WaveguideGeometry(), Section.WITH_SLIT, 0.2)
        for i, strip in enumerate(fil.strips):
            x, _ = fil.strip_rows(i)
            assert np.all(x >= strip.x_lo_um) and np.all(x <= strip.x_hi_um)

    def test_with_slit_requires_slit(self):
        geom = WaveguideGeometry(slit_width_um=0.0)
        with pytest.raises(GeometryError, match="slit_width_um is 0"):
            build_filaments(geom, Section.WITH_SLIT, 0.2)

    def test_too_few_filaments_rejected(self):
        with pytest.raises(GeometryError, match="filaments_per_strip"):
            build_filaments(WaveguideGeometry(), Section.WITH_SLIT, 0.2,
                            filaments_per_strip=1)

    def test_nonfinite_current_rejected(self):
        with pytest.raises(GeometryError, match="finite"):
            build_filaments(WaveguideGeometry(), Section.WITH_SLIT, float("nan"))


@st.composite
def geometries(draw):
    signal = draw(st.floats(20.0, 400.0))
    slit_frac = draw(st.sampled_from([0.0, 0.1, 0.4, 0.8]))
    return WaveguideGeometry(
        signal_width_um=signal,
        gap_width_um=draw(st.floats(5.0, 100.0)),
        ground_width_um=draw(st.floats(50.0, 400.0)),
        slit_width_um=signal * slit_frac,
    )


@given(geometries(), st.floats(0.01, 2.0))
@settings(max_examples=40, deadline=None)
def test_layout_mirror_symmetric(geom, current):
    section = Section.WITH_SLIT if geom.slit_width_um > 0 else Section.WITHOUT_SLIT
    fil = build_filaments(geom, section, current, filaments_per_strip=24)
    order = np.argsort(fil.x_um)
    x_sorted = fil.x_um[order]
    c_sorted = fil.current_a[order]
    np.testing.assert_allclose(x_sorted, -x_sorted[::-1], atol=1e-12)
    np.testing.assert_allclose(c_sorted, c_sorted[::-1], rtol=1e-12)


@given(geometries(), st.sampled_from([2, 7, 50, 400]))
@settings(max_examples=30, deadline=None)
def test_strip_sums_independent_of_resolution(geom, n):
    section = Section.WITH_SLIT if geom.slit_width_um > 0 else Section.WITHOUT_SLIT
    fil = build_filaments(geom, section, 0.2, filaments_per_strip=n)
    expected = {True: 0.2 if section is Section.WITHOUT_SLIT else 0.1,
                False: -0.1}
    for i, strip in enumerate(fil.strips):
        _, c = fil.strip_rows(i)
        ref = expected[strip.current_a > 0]
        assert c.sum() == pytest.approx(ref, rel=1e-12)


def test_field_converges_when_doubling_filaments(default_geometry):
    pts = [(0.0, 1.0), (10.0, 1.0), (19.0, 1.0), (35.0, 1.0), (70.0, 1.0),
           (120.0, 1.0), (190.0, 1.0), (250.0, 1.0), (0.0, 8.1), (60.0, 20.0)]
    for section in (Section.WITH_SLIT, Section.WITHOUT_SLIT):
        coarse = build_filaments(default_geometry, section, 0.2,
                                 filaments_per_strip=400)
        fine = build_filaments(default_geometry, section, 0.2,
                               filaments_per_strip=800)
        for x, z in pts:
            b1 = np.hypot(*b_field_at(coarse, (x, z)))
            b2 = np.hypot(*b_field_at(fine, (x, z)))
            assert abs(b1 - b2) / b2 < 0.005, (section, x, z)


class TestGeometryFile:
    def test_round_trip(self, tmp_path):
        geom = WaveguideGeometry(signal_width_um=120.0, slit_width_um=30.0,
                                 substrate_rel_permittivity=11.0)
        path = tmp_path / "geom.txt"
        save_geometry(geom, path)
        assert load_geometry(path) == geom

    def test_missing_keys_default(self, tmp_path):
        path = tmp_path / "geom.txt"
        path.write_text("# only permittivity overridden\neps_r = 1.0\n")
        geom = load_geometry(path)
        assert geom.substrate_rel_permittivity == 1.0
        assert geom.signal_width_um == 100.0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "geom.txt"
        path.write_text("signal_width_um = 100\nwavelength_um = 3\n")
        with pytest.raises(GeometryError, match="unknown key 'wavelength_um'"):
            load_geometry(path)

    def test_non_numeric_value_rejected(self, tmp_path):
        path = tmp_path / "geom.txt"
        path.write_text("signal_width_um = wide\n")
        with pytest.raises(GeometryError, match="not a number"):
            load_geometry(path)

    def test_invalid_loaded_geometry_rejected(self, tmp_path):
        path = tmp_path / "geom.txt"
        path.write_text("signal_width_um = 50\nslit_width_um = 60\n")
        with pytest.raises(GeometryError, match="slit_width_um"):
            load_geometry(path)
