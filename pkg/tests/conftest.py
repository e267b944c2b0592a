import numpy as np
import pytest

from slitcpw.emfield import DriveConditions, cpw_impedance, power_to_current
from slitcpw.geometry import Section, WaveguideGeometry, build_filaments
from slitcpw.spinphys import SpinParams


@pytest.fixture(scope="session")
def default_geometry():
    return WaveguideGeometry()


@pytest.fixture(scope="session")
def drive():
    return DriveConditions(input_power_w=1.0, frequency_hz=70e6)


@pytest.fixture(scope="session")
def drive_current(default_geometry, drive):
    return power_to_current(drive, cpw_impedance(default_geometry))


@pytest.fixture(scope="session")
def slit_filaments(default_geometry, drive_current):
    return build_filaments(default_geometry, Section.WITH_SLIT, drive_current)


@pytest.fixture(scope="session")
def noslit_filaments(default_geometry, drive_current):
    return build_filaments(default_geometry, Section.WITHOUT_SLIT, drive_current)


@pytest.fixture(scope="session")
def spin_params():
    return SpinParams()
