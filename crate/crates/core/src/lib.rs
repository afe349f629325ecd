//! Exact symbolic and numeric toolkit for the Killing fields that make the
//! hyperbolic half-space a Ricci-Bourguignon soliton.
//!
//! * [`ratlaurent`]: rationals and Laurent polynomials (negative powers only
//!   in the boundary coordinate).
//! * [`exterior`]: vector fields, differential forms, wedge, `d`, interior
//!   products and Lie derivatives.
//! * [`hypgeo`]: metric, Christoffel symbols, Ricci tensor, soliton residual.
//! * [`gamma`]: the soliton field family, its brackets, closure and the
//!   contact computations.
//! * [`flows`]: RK4 and closed-form flows of the generators.

pub mod exterior;
pub mod flows;
pub mod gamma;
pub mod hypgeo;
pub mod linalg;
pub mod ratlaurent;

pub use exterior::{KForm, VectorField};
pub use hypgeo::{HalfSpace, SolitonParams};
pub use ratlaurent::{LaurentPoly, Monomial, Rational};
