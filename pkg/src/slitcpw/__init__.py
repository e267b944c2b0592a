"""Slit-loaded coplanar waveguide design and spin-resonance analysis toolkit.

Subpackages:
  geometry - waveguide cross-section and current-filament discretization
  emfield  - quasi-static field maps, impedance, depth profiles
  spinphys - spin-3/2 Hamiltonian, resonances, spectrum/trace synthesis
  fitting  - Levenberg-Marquardt engine, Voigt and Rabi fits
  analysis - field conversion, resonance inversion, profile comparison
  cli      - command-line interface ("slitcpw" entry point)
"""

from .analysis import (
    BranchCandidate,
    FieldProfile,
    ProfileComparison,
    b0_and_d_from_resonances,
    compare_profiles,
    normalize_profile,
    rabi_to_field,
)
from .emfield import (
    DepthProfile,
    DriveConditions,
    FieldMap,
    FieldSample,
    FieldSingularityError,
    GridSpec,
    b_field_at,
    cpw_impedance,
    depth_profile,
    field_map,
    line_scan,
    power_to_current,
    reflection_estimate,
)
from .fitting import (
    FitError,
    FitInitializationError,
    FitResult,
    VoigtParams,
    fit_odmr,
    fit_rabi,
    lm_fit,
    voigt,
)
from .geometry import (
    FilamentSet,
    GeometryError,
    Section,
    WaveguideGeometry,
    build_filaments,
    load_geometry,
    validate,
)
from .spinphys import (
    OdmrSpectrum,
    PeakShape,
    RabiTrace,
    SpinParams,
    SpinSpectrum,
    StaticField,
    f_minus,
    f_plus,
    hamiltonian,
    rabi_frequency,
    synthesize_odmr,
    synthesize_rabi,
    transition_frequencies,
)

__version__ = "0.1.0"
