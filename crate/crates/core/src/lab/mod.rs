//! Sequence-level diagnostics.

pub mod ae;
pub mod boylan;
pub mod cn;
pub mod cover;
pub(crate) mod engine;
pub mod sets_profile;

pub use ae::{ae_report, AeOptions, Checkpoints, ConvergenceReport};
pub use boylan::{boylan_distance, boylan_distance_capped, boylan_inf, boylan_table};
pub use cn::{cn_element, pairing_profile, wperp_witness, CnElement, PairingProfile, WperpWitness};
pub use cover::{
    check_uniform_cover, combine_witnesses, cover_crosscheck, uniform_cover_witness, CombineMode,
    CoverVerdict, CoverWitness,
};
pub use sets_profile::{tail_set_crosscheck, mu_approach_profile, tail_symdiff_profile};
