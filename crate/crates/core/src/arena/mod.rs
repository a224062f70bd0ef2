//! Deterministic lenses, copy-composition charts and the three square
//! species between them.

mod chart;
mod lens;
mod square;
mod thin;

pub use chart::Chart;
pub use lens::{DetLens, Interface, ZPair};
pub use square::XYSquare;
pub use thin::{XZSquare, YZSquare};
