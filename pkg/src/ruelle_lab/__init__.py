"""Thermodynamic formalism on one-sided shifts over finite and discretized alphabets."""

__version__ = "0.1.0"

from .alphabet import Alphabet, discretize_interval, finite, integrate, uniform_finite
from .errors import (ContractViolation, DegenerateMeasure, EnumerationTooLarge, InvalidArgument,
                     NonConvergence, RuelleLabError, TransferOverflow)
from .measures import MarkovMeasure, gibbs_from_normalized, product_measure, random_markov
from .potential import Potential
from .symbolic import Sequence, concat, shift
from .transfer import SpectralData, TransferMatrix, build, normalize, rpf_solve, solve
from .variational import equilibrium_state, pressure

__all__ = [
    "Alphabet", "ContractViolation", "DegenerateMeasure", "EnumerationTooLarge", "InvalidArgument",
    "MarkovMeasure", "NonConvergence", "Potential", "RuelleLabError", "Sequence", "SpectralData",
    "TransferMatrix", "TransferOverflow", "build", "concat", "discretize_interval", "equilibrium_state",
    "finite", "gibbs_from_normalized", "integrate", "normalize", "pressure", "product_measure",
    "random_markov", "rpf_solve", "shift", "solve", "uniform_finite",
]
