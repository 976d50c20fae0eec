//! Numerical inverse Laplace transformation with the family's explicit
//! poles and residues.
//!
//! The density is a finite sum of damped complex exponentials,
//!
//! ```text
//! f(t) = Re Σ_ℓ c_ℓ e^{-λ_ℓ t},   λ_ℓ = 1 - iℓω,
//! c_0 = C B_0,   c_ℓ = 2 C B_ℓ e^{-iℓω},
//! ```
//!
//! so for any `g` with transform `G(s) = ∫ g(t) e^{-st} dt`,
//!
//! ```text
//! E[g(T X)] = (1/T) Σ_ℓ Re[c_ℓ G(λ_ℓ / T)].
//! ```
//!
//! Since `X` concentrates at one, this is an approximation of `g(T)`; it is
//! exact for the mixture itself and inherits nonnegativity of the density.
//! Poles are stored as decay rates (`Re λ = +1`), so the transform is
//! evaluated at points with positive real part `1/T`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::compensated::NeumaierSum;
use crate::distribution::PfCme;
use crate::error::{PfCmeError, Result};
use crate::scalar::Real;

/// Complex decay rates and weights of the density.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidueForm<T> {
    /// Minimal matrix-exponential order `2L + 1`.
    pub order: usize,
    pub nodes: Vec<Complex<T>>,
    pub weights: Vec<Complex<T>>,
}

pub fn pole_residue<T: Real>(dist: &PfCme<T>) -> PoleResidueForm<T> {
    let omega = dist.params().omega;
    let c = dist.norm();
    let b = &dist.coefficients().b;
    let mut nodes = Vec::with_capacity(b.len());
    let mut weights = Vec::with_capacity(b.len());
    for (l, &bl) in b.iter().enumerate() {
        let a = T::from_count(l) * omega;
        nodes.push(Complex::new(T::one(), -a));
        if l == 0 {
            weights.push(Complex::new(c * bl, T::zero()));
        } else {
            let (sin, cos) = a.sin_cos();
            let amp = T::two() * c * bl;
            weights.push(Complex::new(amp * cos, -amp * sin));
        }
    }
    PoleResidueForm {
        order: dist.params().order,
        nodes,
        weights,
    }
}

impl<T: Real> PoleResidueForm<T> {
    /// `Re Σ c_ℓ e^{-λ_ℓ t}`.
    pub fn reconstruct(&self, t: T) -> T {
        let mut acc = NeumaierSum::new();
        for (c, lam) in self.weights.iter().zip(&self.nodes) {
            acc += (*c * (-*lam * t).exp()).re;
        }
        acc.value()
    }

    /// `Σ Re[c_ℓ / λ_ℓ]`, the total mass.
    pub fn mass(&self) -> T {
        let mut acc = NeumaierSum::new();
        for (c, lam) in self.weights.iter().zip(&self.nodes) {
            acc += (*c / *lam).re;
        }
        acc.value()
    }

    /// Drops terms with `|c_ℓ| < rel · max |c_ℓ|`. The discarded mass is at
    /// most `Σ |c_ℓ| / |λ_ℓ|` over the dropped terms.
    pub fn truncated(&self, rel: T) -> Self {
        let max = self
            .weights
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max);
        let keep = |c: &Complex<T>| c.norm() >= rel * max;
        let (nodes, weights) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, c)| keep(c))
            .map(|(l, c)| (*l, *c))
            .unzip();
        Self {
            order: self.order,
            nodes,
            weights,
        }
    }
}

type TransformFn<T> = dyn Fn(Complex<T>) -> Complex<T> + Send + Sync;
type InverseFn<T> = dyn Fn(T) -> T + Send + Sync;

/// A Laplace transform `G(s)`, analytic for `Re s > 0`, with its inverse
/// when known in closed form.
pub struct TransformFunction<T> {
    pub name: String,
    pub description: String,
    eval: Box<TransformFn<T>>,
    inverse: Option<Box<InverseFn<T>>>,
}

impl<T> fmt::Debug for TransformFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformFunction")
            .field("name", &self.name)
            .field("description", &self.description)
            .field("has_inverse", &self.inverse.is_some())
            .finish()
    }
}

impl<T: Real> TransformFunction<T> {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        eval: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            eval: Box::new(eval),
            inverse: None,
        }
    }

    pub fn with_inverse(mut self, inverse: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.inverse = Some(Box::new(inverse));
        self
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        (self.eval)(s)
    }

    /// Closed-form inverse `g(t)`, if cataloged.
    pub fn known_inverse(&self, t: T) -> Option<T> {
        self.inverse.as_ref().map(|g| g(t))
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }
}

/// `(1/T) Σ Re[c_ℓ G(λ_ℓ / T)]`, accumulated in ascending `ℓ` with one
/// transform call per node.
pub fn invert<T: Real>(form: &PoleResidueForm<T>, f: &TransformFunction<T>, t: T) -> Result<T> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(PfCmeError::Domain(format!(
            "inversion time must be positive and finite, got {t}"
        )));
    }
    let mut acc = NeumaierSum::new();
    for (l, (c, lam)) in form.weights.iter().zip(&form.nodes).enumerate() {
        let s = *lam / t;
        let v = f.eval(s);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(PfCmeError::Numeric(format!(
                "transform '{}' is not finite at node {l}: s = {} {:+}i",
                f.name, s.re, s.im
            )));
        }
        acc += (*c * v).re;
    }
    Ok(acc.value() / t)
}

/// `1 / (s + a)`, the transform of `e^{-a t}`.
pub fn exp_decay<T: Real>(a: T) -> TransformFunction<T> {
    TransformFunction::new("exp", "1/(s+a) <-> exp(-a t)", move |s: Complex<T>| {
        Complex::new(T::one(), T::zero()) / (s + Complex::new(a, T::zero()))
    })
    .with_inverse(move |t| (-a * t).exp())
}

/// Built-in transform pairs.
///
/// | name    | `G(s)`        | `g(t)`            |
/// |---------|---------------|-------------------|
/// | `const` | `1/s`         | `1`               |
/// | `ramp`  | `1/s²`        | `t`               |
/// | `exp`   | `1/(s+1)`     | `e^{-t}`          |
/// | `sin`   | `1/(s²+1)`    | `sin t`           |
/// | `step`  | `e^{-s}/s`    | `1` for `t >= 1`  |
pub fn catalog<T: Real>() -> Vec<TransformFunction<T>> {
    let one = || Complex::new(T::one(), T::zero());
    vec![
        TransformFunction::new("const", "1/s <-> 1", move |s: Complex<T>| one() / s)
            .with_inverse(|_| T::one()),
        TransformFunction::new("ramp", "1/s^2 <-> t", move |s: Complex<T>| one() / (s * s))
            .with_inverse(|t| t),
        exp_decay(T::one()),
        TransformFunction::new("sin", "1/(s^2+1) <-> sin t", move |s: Complex<T>| {
            one() / (s * s + one())
        })
        .with_inverse(|t: T| t.sin()),
        TransformFunction::new("step", "exp(-s)/s <-> unit step at t = 1", move |s: Complex<T>| {
            (-s).exp() / s
        })
        .with_inverse(|t: T| if t >= T::one() { T::one() } else { T::zero() }),
    ]
}

/// Catalog entry by name.
pub fn lookup<T: Real>(name: &str) -> Option<TransformFunction<T>> {
    catalog().into_iter().find(|f| f.name == name)
}

/// Rational transform `N(s) / D(s)` with real coefficients listed from the
/// highest power down (`[1, 1]` is `s + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTransform<T> {
    pub numerator: Vec<T>,
    pub denominator: Vec<T>,
}

fn horner<T: Real>(coeffs: &[T], s: Complex<T>) -> Complex<T> {
    let mut it = coeffs.iter();
    let mut acc = Complex::new(*it.next().expect("nonempty"), T::zero());
    for &c in it {
        acc = acc * s + Complex::new(c, T::zero());
    }
    acc
}

impl<T: Real> RationalTransform<T> {
    pub fn new(numerator: Vec<T>, denominator: Vec<T>) -> Result<Self> {
        if numerator.is_empty() || denominator.is_empty() {
            return Err(PfCmeError::Domain(
                "rational transform needs nonempty numerator and denominator".into(),
            ));
        }
        if denominator.iter().all(|c| c.is_zero()) {
            return Err(PfCmeError::Domain("denominator is identically zero".into()));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        horner(&self.numerator, s) / horner(&self.denominator, s)
    }

    pub fn into_transform(self) -> TransformFunction<T> {
        let name = self.to_string();
        TransformFunction::new(name, "user rational transform", move |s| self.eval(s))
    }
}

impl<T: Real> fmt::Display for RationalTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[T]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "num={}; den={}", join(&self.numerator), join(&self.denominator))
    }
}

/// Parses `num=<c,c,...>; den=<c,c,...>`.
impl<T: Real + FromStr> FromStr for RationalTransform<T> {
    type Err = PfCmeError;

    fn from_str(text: &str) -> Result<Self> {
        let mut num = None;
        let mut den = None;
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, list) = part
                .split_once('=')
                .ok_or_else(|| PfCmeError::Domain(format!("expected key=list, got '{part}'")))?;
            let values = list
                .split(',')
                .map(|c| {
                    c.trim().parse::<T>().map_err(|_| {
                        PfCmeError::Domain(format!("bad coefficient '{}' in '{part}'", c.trim()))
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            match key.trim() {
                "num" => num = Some(values),
                "den" => den = Some(values),
                other => {
                    return Err(PfCmeError::Domain(format!(
                        "unknown key '{other}', expected 'num' or 'den'"
                    )))
                }
            }
        }
        match (num, den) {
            (Some(n), Some(d)) => Self::new(n, d),
            _ => Err(PfCmeError::Domain(
                "rational transform needs both 'num=' and 'den='".into(),
            )),
        }
    }
}
