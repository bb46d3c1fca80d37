//! Constructive bounds for chromatic numbers of hyperbolic surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`]: points, isometries and lines of the hyperbolic plane in the
//!   hyperboloid model, plus polygon realizations and chain development.
//! * [`formulas`]: the closed-form trigonometry (collars, clique distances,
//!   triangle side lengths, degree bounds).
//! * [`bounds`]: color upper bounds and clique lower bounds in terms of the
//!   distance `d` or the genus `g`.
//! * [`graph`] and [`net`]: separated nets in a hyperbolic disk, their distance
//!   graphs, colorings and sampled validation of the induced `d`-coloring.
//! * [`rotation`]: rotation systems, face tracing and genus.
//! * [`surfaces`]: polygon-glued surfaces carrying geometric clique embeddings.
//! * [`collar`]: slicing of half-collars and the cylinder color budget.
//! * [`svg`]: presentation-only rendering in the Poincaré disk.

pub mod bounds;
pub mod collar;
pub mod error;
pub mod formulas;
pub mod graph;
pub mod kernel;
pub mod net;
pub mod rotation;
pub mod surfaces;
pub mod svg;

pub use error::{Error, Result};
