"""Triple Helix communication-field simulator and analysis toolkit."""

from .closedform import ClosedFormSolution, eval_state, redundancy_series, solve
from .dynamics import Trajectory, integrate, invariant_drift, rhs
from .fuzz import FuzzyConfig, fuzzy_redundancy, saturation_check
from .infometrics import (
    ContingencyTable,
    entropy,
    mutual_information2,
    mutual_redundancy3,
    mutual_redundancy4,
    series,
)
from .model import PRESETS, ConservedSet, HelixState, Vec3, conserved, cross, derive_abc, redundancy_components
from .spectral import FourierModel, Spectrum, fit, reconstruct, spectrum

__version__ = "0.1.0"
