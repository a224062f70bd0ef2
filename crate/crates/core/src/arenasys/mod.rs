//! System objects, system lenses with deterministic output, and the square
//! calculus mixing ordinary composition on states with copy-composition on
//! interfaces.

mod nabla;
mod object;
pub mod relaxed;
mod square;

pub use nabla::nabla;
pub use object::{SysXMor, SysYMor, SystemObject};
pub use square::SysXYSquare;
