"""Fan-states of a cavity field generated by a sequence of Lambda-type atoms.

Two engines: an exact algebra of coherent-state superpositions
(:mod:`fanstate.coherent`, :mod:`fanstate.protocol`) and a truncated Fock-space
simulator used as an independent oracle (:mod:`fanstate.fock`).
"""

from .coherent import (
    CoherentSuperposition,
    GramSum,
    apply_annihilation_power,
    coherent_overlap,
    fan_state,
    fidelity,
    gram_sum,
    k_photon_coherent,
    norm_sq,
    rotate,
    superposition_inner,
)
from .phasespace import QGrid, peak_find, q_grid, q_value
from .protocol import (
    AtomPreparation,
    DetectionOutcome,
    ProtocolRun,
    ProtocolStep,
    TauOrder,
    closed_form_state,
    fan_schedule,
    kraus_step,
    p1_closed_form,
    pk_paper_formula,
    run_protocol,
    single_atom_probability,
)

__version__ = "0.1.0"
