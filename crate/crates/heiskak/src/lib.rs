//! Heisenberg-group geometry and incidence counting on discrete measures.
//!
//! The crate is organized around a handful of geometric layers:
//!
//! - [`hgroup`]: the group law on ℍ ≅ ℝ³, the Korányi norm/metric,
//!   homogeneous dilations, and the vertical/horizontal projection
//!   decomposition onto the planes `V_θ^⊥`.
//! - [`duality`]: the point-line duality between points of ℍ and light
//!   rays in ℝ³, dual tubes, and empirical probes of the tube-inclusion
//!   constants.
//! - [`measures`]: weighted families of Euclidean balls as discrete
//!   measures, Frostman-constant estimation, Monte Carlo pushforwards onto
//!   vertical planes, and `L^q` energies over the projection angle.
//! - [`xray`]: line integrals (X-ray transforms) of ball families over
//!   horizontal lines, with the two line-space parametrizations and the
//!   identity/comparison/translation checks built on them.
//! - [`incidence`]: cone cap covers, dual-tube incidence sets, the
//!   broad/narrow classification, trilinear wedge sums, plank covers, cell
//!   measures and the rescaling step.
//! - [`generators`]: constructions of test measures (self-similar Cantor
//!   families, uniform ball packings, vertical-plane samples).
//!
//! Everything is deterministic given a seed; randomized routines take
//! explicit seeds and split per work item, so results do not depend on
//! thread count.

pub mod duality;
mod error;
pub mod generators;
pub mod geom;
pub mod hgroup;
pub mod incidence;
pub mod measures;
pub mod xray;

pub use error::{Error, Result};
pub use geom::Vec3;
pub use hgroup::{Angle, HPoint};
pub use measures::WeightedBallFamily;
