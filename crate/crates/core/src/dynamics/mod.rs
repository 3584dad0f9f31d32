//! Finite dynamical models: odometers and finite G-sets, Rokhlin towers,
//! Følner sets, the nilpotent growth recursion, marker sets and
//! amenability-dimension witnesses.

mod action;
mod folner;
mod growth;
mod marker;
mod towers;
mod witness;

pub use action::{build_odometer, odometer_lattice, point_label, ActionKind, FiniteAction};
pub use folner::{folner_set, symmetric_difference, FolnerSet};
pub use growth::{interval_growth_certificate, nilpotent_growth, GrowthCertificate};
pub use marker::{marker_search, verify_marker, MarkerSet};
pub use towers::{build_towers, build_towers_lattice, verify_towers, TowerReport, TowerSystem};
pub use witness::{
    build_amdim_witness_folner, build_amdim_witness_product, verify_witness, witness_to_simplicial_map,
    AmdimWitness, SimplicialReport, WitnessFamily, WitnessReport,
};
