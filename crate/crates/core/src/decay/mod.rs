mod dist;
mod family;
mod transform;
mod verify;

pub use family::DecayFamily;
pub use transform::{cover_to_decay, decay_to_cover, lipschitz_bound, DecayCover, COMPLETE_CAP};
pub use verify::{sup_shift, verify_decay, DecayReport};
