//! Piecewise-constant functions on exact grids, super-vectors and
//! trigonometric polynomials.

mod sampled;
mod supervector;
mod trig;

pub use sampled::{Run, SampledFunction};
pub use supervector::{super_inner_product, SuperVector};
pub use trig::TrigPolynomial;
