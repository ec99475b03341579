//! Exact machinery for a family of rays on the genus-2 surface whose
//! projective limit set is a 1-simplex of measured laminations.
//!
//! The crate is layered bottom-up:
//!
//! * [`curve_algebra`]: slopes, arc classes, intersection numbers and Dehn twists
//!   on the once-punctured torus.
//! * [`contfrac`]: continued fractions with coefficients ≥ 4, convergents,
//!   continuants and certified enclosures of the limiting irrational.
//! * [`farey_graph`]: bounded neighbor enumeration, BFS distances,
//!   geodesicity and pivot checks.
//! * [`pairing`]: two-sided arc systems and their pairings with the curves of a
//!   schedule and with the two limiting laminations.
//! * [`schedule`]: coefficient generation under the growth conditions, nominal
//!   times and the model functions f₁, f₂.
//! * [`ray_model`]: the coarse length model along the ray.
//! * [`limit_analysis`]: projectivization and convergence diagnostics.

pub mod contfrac;
pub mod curve_algebra;
pub mod error;
pub mod farey_graph;
pub mod limit_analysis;
pub mod numeric;
pub mod pairing;
pub mod ray_model;
pub mod schedule;

pub use error::{Error, Result};
pub use numeric::{Rat, RatInterval};
