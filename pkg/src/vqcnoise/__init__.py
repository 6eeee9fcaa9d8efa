"""Noisy quantum-circuit simulation and a noise-robustness benchmark harness
for a variational quantum classifier.

The library layers a hierarchical noise study: classical dataset corruption,
Gaussian perturbation of encoding angles, and CPTP circuit noise applied
during density-matrix simulation, with a seeded experiment grid, CSV logs,
and SVG plot emission on top.
"""

from .ansatz import (CircuitGate, ParameterizedCircuit, bind, build_ansatz,
                     compose_classifier, initial_weights)
from .channels import (CircuitNoiseMask, KrausChannel, NoiseParams,
                       NoiseProfile, ReadoutModel, StageChannels,
                       amplitude_damping, compose, depolarizing,
                       enumerate_masks, identity_channel, mask_from_index,
                       mask_to_channel_sets, pauli_channel, phase_damping,
                       tensor)
from .data import (DEFAULT_FEATURES, LabeledSet, Preprocessor,
                   fit_preprocessor, load_csv, split, transform,
                   transform_with_report)
from .encoding import (DEFAULT_ANGLE_SIGMAS, NOISE_KINDS, DatasetNoiseSpec,
                       build_zz_feature_map, from_angles, inject_angle_noise,
                       inject_dataset_noise, to_angles, wrap_angle)
from .experiment import (Cell, DataConfig, ExperimentConfig, ExperimentRecord,
                         GridFilter, GridSpec, build_grid,
                         bundled_dataset_path, cell_config, emit_plots,
                         load_config, run_cell, run_grid, summarize,
                         write_config)
from .qcore import (DENSITY, STATEVECTOR, Gate, Observable, QuantumState,
                    apply_circuit, apply_gate, apply_kraus,
                    basis_probabilities, counts_expectation, expectation,
                    gate_matrix, parity_observable, sample_counts,
                    statevector_to_density, validate_state, zero_state)
from .train import (Executor, TrainConfig, TrainTrace, accuracy, fit,
                    mse_loss, nelder_mead, predict_raw, spsa)

__version__ = "0.1.0"
