"""Conclusive quantum-state transfer through one spin chain with local memories."""
from .chain import (ChainSpec, DisorderModel, SpectralData, build_single_excitation_hamiltonian,
                    chain_spectrum, propagator_amplitude, sample_random_chain, spectral_decompose,
                    uniform_end_amplitude, uniform_spectrum)
from .engine import (Cooling, DecodeOutcome, DecodeReport, ProtocolError, QubitState, StepRecord,
                     Switch, SystemState, Topology, cool_chain, decode_run, decode_step, encode_cnot,
                     evolve, init_state, prepare_transfer, run_protocol, set_switch,
                     swap_bob_memory, transfer_run)
from .scheduler import (eta_profile, greedy_optimize_schedule, greedy_steps, max_eta1_curve,
                        memories_for_target)
from .timing import (EtaProfile, Schedule, TimingReport, average_decoding_time,
                     natural_time_unit, to_physical_units)

__version__ = "0.1.0"
