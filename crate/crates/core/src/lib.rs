//! Fractal analysis of orbits of germs of diffeomorphisms.

pub mod abel;
pub mod classify;
pub mod error;
pub mod fatou;
pub mod fit;
pub mod germ;
pub mod neighborhood;
pub mod orbit;
pub mod parallel;
pub mod scales;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use germ::{parse_complex, Dynamics, FormalInvariants, Germ};
