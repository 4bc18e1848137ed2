"""Quantum layer: Fock-space algebra, optics, state families and measures."""

from .entanglement import enumerate_splittings, gain, hierarchy_check, log_negativity
from .fock import (
    Circuit,
    FockSpace,
    Mixture,
    ModeOperator,
    QuantumState,
    create,
    destroy,
    embed,
    expm_unitary,
    hermitian_eigenvalues,
    number,
    partial_trace,
    partial_transpose,
)
from .ghz import (
    CompositeState,
    LossyComposite,
    local_equiv_unitary,
    loss_composite,
    prepare_composite,
    prepare_phi0_direct,
    prepare_psi0_direct,
    subtract_composite,
    subtract_lossy,
)
from .optics import (
    beam_splitter,
    loss_channel,
    splitter_matrix,
    squeeze_single,
    squeeze_two,
    squeezed_vacuum,
    subtract_photon,
    symmetric_splitter,
)
from .splittings import (
    CanonicalSplitting,
    canonical_classes,
    four_party_classes,
    parse_splitting,
)

__all__ = [
    "FockSpace",
    "QuantumState",
    "Mixture",
    "ModeOperator",
    "Circuit",
    "destroy",
    "create",
    "number",
    "embed",
    "expm_unitary",
    "partial_trace",
    "partial_transpose",
    "hermitian_eigenvalues",
    "beam_splitter",
    "squeeze_single",
    "squeeze_two",
    "squeezed_vacuum",
    "symmetric_splitter",
    "splitter_matrix",
    "loss_channel",
    "subtract_photon",
    "CompositeState",
    "prepare_psi0_direct",
    "prepare_phi0_direct",
    "local_equiv_unitary",
    "prepare_composite",
    "subtract_composite",
    "loss_composite",
    "LossyComposite",
    "subtract_lossy",
    "log_negativity",
    "gain",
    "enumerate_splittings",
    "hierarchy_check",
    "CanonicalSplitting",
    "canonical_classes",
    "four_party_classes",
    "parse_splitting",
]
