//! Multiresolution super-wavelets on finite direct sums of `L²(ℝ)`.
//!
//! Given a low-pass filter `m0` of scale `N`, the toolkit finds its cycles,
//! builds super-scaling vectors and super-wavelets over the corresponding
//! cyclic representations, and decides whether they are orthonormal or only
//! normalized tight frames.
//!
//! Conventions used throughout:
//! - circle points are `z = e^{-iθ}`, and angles are exact fractions of `2π`;
//! - filters are `m(θ) = Σ_k a_k e^{-ikθ}`;
//! - `f̂(ξ) = ∫ f(x) e^{-iξx} dx` and `⟨u, v⟩ = ∫ u·conj(v)`;
//! - `(Uf)(x) = N^{-1/2} f(x/N)` and `(Tf)(x) = f(x − 1)`.

pub mod arcs;
pub mod cascade;
pub mod constructions;
pub mod cycles;
pub mod error;
pub mod filters;
pub mod numerics;
pub mod rational;
pub mod transfer;
pub mod verdict;
pub mod wavelets;

pub use arcs::{Arc, ArcSet, LineSet};
pub use cycles::{Cycle, CycleSystem};
pub use error::{Error, Result};
pub use filters::{Filter, FilterKind};
pub use numerics::{SampledFunction, SuperVector, TrigPolynomial};
pub use rational::{Rational, RationalAngle};
pub use verdict::Verdict;

pub use num_complex::Complex64;
