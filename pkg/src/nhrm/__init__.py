"""Exceptional points, auxiliary fields and winding numbers of non-Hermitian
coupled dimerized chains with staggered gain and loss."""

__version__ = "0.1.0"

from .core_algebra import EigenResult, eig2, principal_sqrt
from .ep_finder import EPDomain, EPRecord, PhaseRegion, classify_phase, ep_domain_perturbed, locate_eps
from .exceptions import (
    Coalescent,
    DegenerateParams,
    InvariantViolation,
    LoopThroughEP,
    NHRMError,
    NonQuantized,
    ParameterError,
    SizeGuardError,
    SpectrumConvergenceError,
)
from .field import (
    FieldSample,
    KinkReport,
    KLoop,
    assign_charges,
    auxiliary_b,
    circle_loop,
    field_f,
    kink_profile,
    near_ep_asymptote,
    winding_number,
)
from .lattice import (
    Base2D,
    BlochMatrix,
    Chain,
    HoppingPerturbed,
    ModelParams,
    Momentum,
    PotentialPerturbed,
    build_bloch,
    build_realspace,
    momentum_grid,
)
from .oracle import CrosscheckReport, crosscheck_spectra, dense_spectrum, min_gap_scan
from .spectrum import BandPoint, BiorthPair, PointClass, band_pair, biorthogonal_pair, classify_point
from .symmetry import SymmetryReport, qx_expectation, symmetry_defect, symmetry_report
from .estimators import AuxiliaryFieldTransformer, PhaseDiagramClassifier
