"""Free convolution with a semicircle law and spiked deformed Wigner matrices."""

__version__ = '0.1.0'

from .errors import (  # noqa: E402
    ConvergenceError, DomainError, RangeError, RankError, ResolutionError, SizeError,
)
from .measure import Atom, Measure, Uniform  # noqa: E402
from .subord import SubordModel, compute_u_components  # noqa: E402
from .spikes import SpikeSet, SpikePrediction, classify_spike, predict, separation_image  # noqa: E402
from .ensemble import DeformedEnsemble, EntryDist, assemble, build_perturbation, sample_wigner  # noqa: E402
from .spectra import (  # noqa: E402
    check_inclusion, check_outliers, check_separation, eigenvalues_sorted, ks_distance,
)
