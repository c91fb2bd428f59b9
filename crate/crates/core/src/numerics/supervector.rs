use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use super::{SampledFunction, TrigPolynomial};
use crate::cycles::CycleSystem;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// One sampled function per cycle point of a [`CycleSystem`], ordered cycle by
/// cycle and, inside a cycle, in orbit order.
#[derive(Clone, Debug)]
pub struct SuperVector {
    system: Arc<CycleSystem>,
    components: Vec<SampledFunction>,
}

impl SuperVector {
    pub fn new(system: Arc<CycleSystem>, components: Vec<SampledFunction>) -> Result<Self> {
        if components.len() != system.component_count() {
            return Err(Error::Structural(format!(
                "{} components for a system with {} cycle points",
                components.len(),
                system.component_count()
            )));
        }
        Ok(SuperVector { system, components })
    }

    /// Every component equal to `f`.
    pub fn replicate(system: Arc<CycleSystem>, f: &SampledFunction) -> Self {
        let components = vec![f.clone(); system.component_count()];
        SuperVector { system, components }
    }

    pub fn system(&self) -> &Arc<CycleSystem> {
        &self.system
    }

    pub fn components(&self) -> &[SampledFunction] {
        &self.components
    }

    pub fn into_components(self) -> Vec<SampledFunction> {
        self.components
    }

    /// Component for point `j` of cycle `i`.
    pub fn component(&self, cycle: usize, point: usize) -> &SampledFunction {
        &self.components[self.system.flat_index(cycle, point)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(SampledFunction::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Fails unless `other` lives over the same cycle system.
    pub fn check_same_system(&self, other: &SuperVector) -> Result<()> {
        self.check_system(&other.system)
    }

    pub fn check_system(&self, system: &CycleSystem) -> Result<()> {
        if std::ptr::eq(&*self.system, system) || *self.system == *system {
            Ok(())
        } else {
            Err(Error::Structural(
                "super-vectors over different cycle systems".into(),
            ))
        }
    }

    /// Apply `f` to each component, keeping the system.
    pub fn map(&self, f: impl Fn(&SampledFunction) -> SampledFunction) -> SuperVector {
        SuperVector {
            system: self.system.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&SampledFunction) -> Result<SampledFunction>,
    ) -> Result<SuperVector> {
        let components = self.components.iter().map(f).collect::<Result<_>>()?;
        Ok(SuperVector {
            system: self.system.clone(),
            components,
        })
    }

    pub fn scale(&self, c: Complex64) -> SuperVector {
        self.map(|f| f.scale_values(c))
    }

    fn zip(
        &self,
        other: &SuperVector,
        f: impl Fn(&SampledFunction, &SampledFunction) -> Result<SampledFunction>,
    ) -> Result<SuperVector> {
        self.check_same_system(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(SuperVector {
            system: self.system.clone(),
            components,
        })
    }

    pub fn add(&self, other: &SuperVector) -> Result<SuperVector> {
        self.zip(other, SampledFunction::add)
    }

    pub fn sub(&self, other: &SuperVector) -> Result<SuperVector> {
        self.zip(other, SampledFunction::sub)
    }

    /// `‖u − v‖` in the direct-sum norm.
    pub fn distance(&self, other: &SuperVector) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Correlation function `h(θ) = Σ_j Σ_k ⟨v_j, T^k w_j⟩·e^{-ik(θ−θ_j)}`,
    /// summed over the components of the selected cycles (all when `None`).
    pub fn correlation(
        &self,
        other: Option<&SuperVector>,
        cycles: Option<&[usize]>,
    ) -> Result<TrigPolynomial> {
        let w = other.unwrap_or(self);
        self.check_same_system(w)?;
        let mut terms = Vec::new();
        for comp in self.system.points() {
            if let Some(sel) = cycles {
                if !sel.contains(&comp.cycle) {
                    continue;
                }
            }
            let v = &self.components[comp.flat];
            let u = &w.components[comp.flat];
            let (Some((a, b)), Some((c, d))) = (v.support(), u.support()) else {
                continue;
            };
            // ⟨v, u(· − k)⟩ vanishes unless [a, b) meets [c + k, d + k).
            let lo = (a - d).floor().to_integer() as i64;
            let hi = (b - c).ceil().to_integer() as i64;
            let theta = comp.angle.radians();
            for k in lo..=hi {
                let ip = v.inner(&u.translate(&int(k as i128)))?;
                if !ip.is_zero() {
                    terms.push((k, ip * Complex64::from_polar(1.0, k as f64 * theta)));
                }
            }
        }
        Ok(TrigPolynomial::from_terms(terms))
    }

    /// Largest support width over the components.
    pub fn max_support_width(&self) -> Rational {
        self.components
            .iter()
            .filter_map(|f| f.support().map(|(a, b)| b - a))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// `Σ_c ∫ u_c(x)·conj(v_c(x)) dx`.
pub fn super_inner_product(u: &SuperVector, v: &SuperVector) -> Result<Complex64> {
    u.check_same_system(v)?;
    let mut acc = Complex64::zero();
    for (a, b) in u.components.iter().zip(&v.components) {
        acc += a.inner(b)?;
    }
    Ok(acc)
}
