//! Exact finite Markov categories and the lens, chart and square calculus of
//! compositional Moore-style systems, with chain-indexed systems, trajectory
//! unrolling, uniformization and Mealy machines on top.

pub mod arena;
pub mod arenasys;
pub mod error;
pub mod gen;
pub mod kernel;
pub mod knight;
pub mod laws;
pub mod markov;
pub mod mealy;
pub mod model;
pub mod morphism;
pub mod object;
pub mod rational;
pub mod time;

pub use arena::{Chart, DetLens, Interface, XYSquare, XZSquare, YZSquare, ZPair};
pub use arenasys::{SysXMor, SysXYSquare, SysYMor, SystemObject};
pub use error::{Error, Result};
pub use kernel::{DetKernel, Kernel, PossKernel, StochKernel, Weight};
pub use markov::FillRule;
pub use morphism::{Instance, Morphism};
pub use object::{Atom, Blocks, FiniteObject};
pub use rational::Q;
