//! Group backends: free abelian groups, integer unitriangular groups and
//! their direct products, with exact big-integer coordinates.

mod ball;
mod element;
mod scaling;
mod spec;

pub use ball::{word_ball, word_distance, word_length, Ball, LengthTable, DEFAULT_CAP};
pub use element::Element;
pub use scaling::scaling_endomorphism;
pub(crate) use spec::pow;
pub use spec::{GroupKind, GroupSpec};
