"""Cognitive interference alignment (CIA) precoding for OFDM two-tier networks."""

from .errors import (AlignmentFailure, AllZeroEigenvalues, CiaError, DegenerateChannel, DimensionMismatch,
                     GramSchmidtBreakdown, NotPositiveDefinite, RepeatedRoots, VfdmFailure)
from .harness import ExperimentConfig, SimPoint, SimResult, emit_results, run_experiment
from .metrics import (primary_leakage, primary_spectral_efficiency,
                      secondary_spectral_efficiency)
from .power import NoiseModel, PowerAllocation, interference_covariance, waterfill, whiten
from .precoders import (KernelBasis, Precoder, PrecoderKind, cia_precoder, kernel_basis,
                        nonunitary_baseline, vfdm_root_precoder)
from .signal_model import (ChannelRealization, OfdmConfig, PdpModel, ReducedChannel,
                           conv_matrix, cp_insertion_matrix, cp_removal_matrix, dft_matrix,
                           generate_channel, reduced_channel)

__version__ = "0.1.0"
