//! Steady states, stability, operating diagrams and simulation of a three-tier
//! chlorophenol/phenol/hydrogen chemostat food web.
//!
//! Most of the analysis runs on the rescaled model (see [`kinetics`]), in which
//! every yield is one except the hydrogen recycle fraction `omega`.

pub mod cli;
pub mod diagram;
pub mod eigen;
pub mod equilibria;
pub mod error;
pub mod kinetics;
pub mod ode;
pub mod roots;
pub mod simulate;
pub mod stability;

pub use error::{Error, Result};
pub use kinetics::{rescale, FoodWeb, FullParameters, GrowthModel, Monod, RescaledParameters};
