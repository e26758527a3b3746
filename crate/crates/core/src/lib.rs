//! Exact Voronoi reduction on self-adjoint homogeneous cones, and modular
//! symbols / Hecke operators for Q-rank one groups built on top of it.

pub mod cone;
pub mod error;
pub mod linalg;
pub mod modsym;
pub mod polyhedra;
pub mod serial;
pub mod voronoi;

pub use error::{Error, Result};
