//! Construction of a family member: normalization, exact moments, density,
//! distribution function and the Erlang comparison.
//!
//! The density is
//!
//! ```text
//! f(t) = C e^{-t} W(ω (t - 1)),   W = Φ_m^r,
//! ```
//!
//! and every moment integral reduces to a finite sum over the cosine
//! coefficients of `W` against the closed-form integrals
//! `∫ t^k e^{-t} cos(at) dt` and `∫ t^k e^{-t} sin(at) dt`.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::compensated::{DoubleDouble, NeumaierSum};
use crate::decomposition::BaseCellTable;
use crate::error::{PfCmeError, Result};
use crate::kernel::{power_coefficients, FamilyParams, PoweredKernelCoefficients};
use crate::scalar::Real;

/// Parameter schedule for index `m >= 3`.
pub fn make_params<T: Real>(m: usize) -> Result<FamilyParams<T>> {
    FamilyParams::new(m)
}

/// The six damped-trigonometric integrals at frequency `a`:
/// `J_k(a) = ∫_0^∞ t^k e^{-t} cos(at) dt`, `S_k(a) = ∫_0^∞ t^k e^{-t} sin(at) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisIntegrals<T> {
    pub j0: T,
    pub s0: T,
    pub j1: T,
    pub s1: T,
    pub j2: T,
    pub s2: T,
}

impl<T: Real> BasisIntegrals<T> {
    /// `(J_k, S_k)` for `k = 0, 1, 2`.
    pub fn pair(&self, k: usize) -> (T, T) {
        match k {
            0 => (self.j0, self.s0),
            1 => (self.j1, self.s1),
            2 => (self.j2, self.s2),
            _ => panic!("basis integrals only defined for k <= 2"),
        }
    }
}

pub fn basis_integrals<T: Real>(a: T) -> BasisIntegrals<T> {
    let one = T::one();
    let two = T::two();
    let a2 = a * a;
    let d = one + a2;
    let d2 = d * d;
    let d3 = d2 * d;
    BasisIntegrals {
        j0: one / d,
        s0: a / d,
        j1: (one - a2) / d2,
        s1: two * a / d2,
        j2: two * (one - T::lit(3.0) * a2) / d3,
        s2: two * a * (T::lit(3.0) - a2) / d3,
    }
}

/// Moment integrals and derived statistics of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet<T> {
    /// `∫ e^{-t} W(ω(t-1)) dt` on the raw coefficient scale.
    pub m0: T,
    pub m1: T,
    pub m2: T,
    pub mean: T,
    pub second_moment: T,
    pub variance: T,
    pub scv: T,
}

impl<T: Real> MomentSet<T> {
    /// Derives mean, variance and SCV from double-double moment integrals.
    ///
    /// The variance numerator `M2 M0 - M1²` is formed in double-double so
    /// that an SCV of order `1e-5` keeps full working precision.
    pub(crate) fn from_integrals(
        m0: DoubleDouble<T>,
        m1: DoubleDouble<T>,
        m2: DoubleDouble<T>,
    ) -> Result<Self> {
        let numer = m2 * m0 - m1.square();
        let set = Self {
            m0: m0.value(),
            m1: m1.value(),
            m2: m2.value(),
            mean: m1.div(m0),
            second_moment: m2.div(m0),
            variance: numer.div(m0.square()),
            scv: numer.div(m1.square()),
        };
        let fields = [
            set.m0,
            set.m1,
            set.m2,
            set.mean,
            set.second_moment,
            set.variance,
            set.scv,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(PfCmeError::Numeric(format!(
                "non-finite moment: M0={:e}, M1={:e}, M2={:e}",
                set.m0, set.m1, set.m2
            )));
        }
        Ok(set)
    }
}

/// Exact moment integrals
///
/// ```text
/// M_k = B_0 J_k(0) + 2 Σ_ℓ B_ℓ (cos(ℓω) J_k(ℓω) + sin(ℓω) S_k(ℓω))
/// ```
///
/// accumulated with compensated summation in ascending `ℓ`.
pub fn moment_sums<T: Real>(
    params: &FamilyParams<T>,
    coeffs: &PoweredKernelCoefficients<T>,
) -> Result<MomentSet<T>> {
    if coeffs.m != params.m || coeffs.r != params.r {
        return Err(PfCmeError::Domain(format!(
            "coefficients (m={}, r={}) do not match parameters (m={}, r={})",
            coeffs.m, coeffs.r, params.m, params.r
        )));
    }
    let mut acc = [NeumaierSum::new(); 3];
    for (l, &b) in coeffs.b.iter().enumerate().skip(1) {
        let a = T::from_count(l) * params.omega;
        let (sin, cos) = a.sin_cos();
        let basis = basis_integrals(a);
        for (k, sum) in acc.iter_mut().enumerate() {
            let (j, s) = basis.pair(k);
            *sum += b * cos.mul_add(j, sin * s);
        }
        if !b.is_finite() || !acc.iter().all(|s| s.value().is_finite()) {
            return Err(PfCmeError::Numeric(format!(
                "non-finite moment term at lag {l}"
            )));
        }
    }
    let b0 = coeffs.b[0];
    // J_0(0) = J_1(0) = 1, J_2(0) = 2
    let lead = [b0, b0, T::two() * b0];
    let two = DoubleDouble::new(T::two());
    let [m0, m1, m2] = std::array::from_fn(|k| {
        DoubleDouble::new(lead[k]) + two * acc[k].to_double_double()
    });
    MomentSet::from_integrals(m0, m1, m2)
}

/// Squared coefficient of variation of the order-`n` Erlang law, the
/// minimum over all phase-type laws of that order.
pub fn erlang_scv<T: Real>(n: usize) -> Result<T> {
    if n == 0 {
        return Err(PfCmeError::Domain("Erlang order must be >= 1".into()));
    }
    Ok(T::one() / T::from_count(n))
}

/// A fully constructed family member.
#[derive(Debug)]
pub struct PfCme<T: Real> {
    params: FamilyParams<T>,
    coeffs: PoweredKernelCoefficients<T>,
    norm: T,
    moments: MomentSet<T>,
    base_cell: OnceLock<Arc<BaseCellTable<T>>>,
}

impl<T: Real> Clone for PfCme<T> {
    fn clone(&self) -> Self {
        let base_cell = OnceLock::new();
        if let Some(t) = self.base_cell.get() {
            let _ = base_cell.set(Arc::clone(t));
        }
        Self {
            params: self.params,
            coeffs: self.coeffs.clone(),
            norm: self.norm,
            moments: self.moments,
            base_cell,
        }
    }
}

impl<T: Real> PfCme<T> {
    pub fn new(m: usize) -> Result<Self> {
        let params = make_params(m)?;
        let coeffs = power_coefficients(&params)?;
        Self::from_parts(params, coeffs)
    }

    pub fn from_parts(
        params: FamilyParams<T>,
        coeffs: PoweredKernelCoefficients<T>,
    ) -> Result<Self> {
        let moments = moment_sums(&params, &coeffs)?;
        Ok(Self {
            params,
            coeffs,
            norm: moments.m0.recip(),
            moments,
            base_cell: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &FamilyParams<T> {
        &self.params
    }

    pub fn coefficients(&self) -> &PoweredKernelCoefficients<T> {
        &self.coeffs
    }

    /// Normalizing constant `C = 1 / M_0`.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn moments(&self) -> &MomentSet<T> {
        &self.moments
    }

    pub fn mean(&self) -> T {
        self.moments.mean
    }

    pub fn variance(&self) -> T {
        self.moments.variance
    }

    pub fn scv(&self) -> T {
        self.moments.scv
    }

    /// Splits `t >= 0` into a cell index `k` and an offset `u ∈ [0, h)` with
    /// `t = k h + u`; the offset is formed with a fused multiply-add.
    pub fn cell_split(&self, t: T) -> (usize, T) {
        let h = self.params.h;
        let mut k = (t / h).floor();
        let mut u = (-k).mul_add(h, t);
        if u < T::zero() {
            k = k - T::one();
            u = u + h;
        } else if u >= h {
            k = k + T::one();
            u = u - h;
        }
        (k.to_usize().unwrap_or(usize::MAX), u.max(T::zero()))
    }

    /// Density `f(t) = C e^{-t} W(ω(t - 1))`; `W` is evaluated at the
    /// reduced offset of `t` within its cell.
    pub fn density(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(PfCmeError::Domain(format!(
                "density requires t >= 0, got {t}"
            )));
        }
        Ok(self.density_unchecked(t))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, t: T) -> T {
        let (_, u) = self.cell_split(t);
        self.norm * (-t).exp() * self.coeffs.eval_power(self.params.omega * (u - T::one()))
    }

    /// Raw base-cell integrand `e^{-u} W(ω(u - 1))` (no normalization).
    #[inline]
    pub(crate) fn base_integrand(&self, u: T) -> T {
        (-u).exp() * self.coeffs.eval_power(self.params.omega * (u - T::one()))
    }

    /// Tabulated base-cell integral, built on first use.
    pub fn base_cell(&self) -> &Arc<BaseCellTable<T>> {
        self.base_cell
            .get_or_init(|| Arc::new(BaseCellTable::build(self, BaseCellTable::<T>::default_panels(&self.params))))
    }

    /// Distribution function through the cell decomposition:
    /// `F(kh + u) = 1 - q^k + q^k (1 - q) G(u)` with `G` the normalized
    /// base-cell distribution function.
    pub fn cdf(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        if t.is_infinite() {
            return T::one();
        }
        let q = self.params.cell_ratio();
        let (k, u) = self.cell_split(t);
        let qk = q.powi(k.min(i32::MAX as usize) as i32);
        let g = self.base_cell().cdf(u);
        let f = (T::one() - qk) + qk * (T::one() - q) * g;
        f.min(T::one()).max(T::zero())
    }

    pub fn diagnostics(&self) -> Diagnostics<T> {
        diagnostics(self)
    }
}

/// Scaling diagnostics for the Erlang comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics<T> {
    /// `SCV · n`: below one means the family member beats Erlang of equal order.
    pub scv_times_n: T,
    /// `(m² / ln m) · SCV`.
    pub m2_over_logm_scv: T,
    /// `(n² / ln³ n) · SCV`.
    pub n2_over_log3n_scv: T,
}

pub fn diagnostics<T: Real>(dist: &PfCme<T>) -> Diagnostics<T> {
    let scv = dist.scv();
    let m = T::from_count(dist.params.m);
    let n = T::from_count(dist.params.order);
    let ln_n = n.ln();
    Diagnostics {
        scv_times_n: scv * n,
        m2_over_logm_scv: m * m / m.ln() * scv,
        n2_over_log3n_scv: n * n / (ln_n * ln_n * ln_n) * scv,
    }
}
