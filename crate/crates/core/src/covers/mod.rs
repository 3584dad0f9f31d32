mod cover;
mod quotient;
mod scaled;
mod simplicial;
mod verify;

pub use cover::{BaseSet, ColoredCover, PeriodStage};
pub(crate) use cover::ColorIndex;
pub use quotient::{push_cover_to_quotient, verify_quotient_cover, QuotientCover, QuotientMember, QuotientReport};
pub use scaled::{staggered_brick_cover_u3, synth_scaled_cover_ud};
pub use simplicial::{open_star_simplices, synth_simplicial_cover_zm};
pub use verify::{verify_cover, CoverReport, WITNESS_LIST_CAP};
