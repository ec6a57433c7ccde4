//! Numerical toolkit for asymptotically hyperbolic metrics over flat torus
//! boundaries: normal-form curvature expansions, mass extraction and its
//! conformal/gauge behavior, closed-form toroidal soliton charts, static
//! vacuum residuals, and a conformal mass-decrease pipeline built on a radial
//! semilinear solver.

pub mod error;
pub mod grid;
pub mod jet;
pub mod series;

pub use error::{Error, Result};
pub use grid::{ScalarField, SymTensorField, TorusGrid};
pub use jet::{Jet, RadialFn};
pub use series::{ScalarSeries, SeriesJson, TensorSeries};
