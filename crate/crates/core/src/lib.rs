//! Spectral simulator for continuous-time quantum-walk search of a marked
//! vertex on the complete graph, the hypercube and periodic lattices.
//!
//! The search Hamiltonian is `H = -gamma L - |w><w|` with `L = A - D`, started
//! from the uniform state `|s>`. Because each supported graph has a
//! uniform-magnitude eigenbasis, `H` reduces to a rank-one perturbation of a
//! compressed Laplacian spectrum and is solved through its secular equation.

pub mod analysis;
pub mod constants;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod numeric;
pub mod secular;
pub mod validation;

pub use error::{Error, Result};
pub use graph::{GraphFamily, Level, LevelSpectrum, MomentumVector};
pub use secular::{SecularRoot, SecularSpectrum};
