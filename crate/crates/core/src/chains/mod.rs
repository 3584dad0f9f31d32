//! Decreasing chains of finite-index subgroups, coset spaces with their
//! Schreier metrics, box-space windows and the injectivity-radius lemmas.

mod chain;
mod coset;
mod dominate;
mod lattice;
mod radius;
mod window;

pub use chain::{ChainKind, SubgroupChain};
pub use coset::{coset_space, quotient_distance, CosetSpace, DEFAULT_INDEX_CAP};
pub use dominate::{dominates, Domination};
pub use lattice::Lattice;
pub use radius::{injective_radius_stage, isometry_radius_check, InjectiveOutcome, IsometryOutcome};
pub use window::{box_window, BoxWindow, Block as WindowBlock, DEFAULT_TABLE_CAP};
