//! Channels, states and closed forms from the worked examples.

pub mod depolarizing;
pub mod gap;
pub mod pauli;
pub mod subspaces;
pub mod superadd;

pub use depolarizing::{
    depolarizing_channel, depolarizing_smin, weyl_operator, DepolarizingParams,
};
pub use gap::{
    gap_condition, gap_consistency_check, gap_polynomial, gap_polynomial_generic, gap_region_scan,
    gap_trace_norm, write_gap_csv, ConsistencyReport, GapRecord,
};
pub use pauli::{
    pauli_channel, pauli_ec_closed_form, pauli_ec_unchecked, pauli_states, rho_t_mixture,
    PauliParams, PauliStates,
};
pub use subspaces::{
    antisym_channel, antisym_formula, antisym_subspace, transpose_depolarizing, vdc_channel,
    vdc_family, vdc_subspace, vdc_weight_to_p,
};
pub use superadd::{
    four_qubit_fact, superadd_sample, superadd_sides, superadditivity_search, Candidate,
    SuperaddSample, JOINT_CUT,
};
