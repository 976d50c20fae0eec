//! Fejér kernel, its Fourier coefficients, and the powered kernel
//! `W = Φ_m^r` obtained by repeated coefficient convolution.

use std::ops::{Add, Mul};

use num_traits::{FromPrimitive, Num, Zero};
use serde::Serialize;

use crate::compensated::{pairwise_sum, NeumaierSum};
use crate::error::{PfCmeError, Result};
use crate::scalar::Real;

/// Distance to `2πℤ` below which [`fejer_eval`] switches from the closed
/// form to the coefficient sum.
pub const NEAR_PEAK_SWITCH: f64 = 1e-8;

/// Index-derived quantities of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams<T> {
    /// Construction index, `m >= 3`.
    pub m: usize,
    /// Kernel power `⌈ln m⌉`.
    pub r: u32,
    /// Modulation period (cell length) `2 ln m + ln ln m`.
    pub h: T,
    /// Angular frequency `2π / h`.
    pub omega: T,
    /// Trigonometric degree `r (m - 1)`.
    pub degree: usize,
    /// Minimal matrix-exponential order `2 r (m - 1) + 1`.
    pub order: usize,
}

impl<T: Real> FamilyParams<T> {
    /// Builds the parameter schedule for index `m`.
    ///
    /// `m = 2` is rejected: `ln ln 2 < 0` and the cell length is not
    /// meaningful there.
    pub fn new(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(PfCmeError::Domain(format!(
                "family index must satisfy m >= 3, got {m}"
            )));
        }
        let log_m = (m as f64).ln();
        let r = log_m.ceil() as u32;
        let log_m = T::from_count(m).ln();
        let h = T::two() * log_m + log_m.ln();
        let omega = T::TAU() / h;
        let degree = r as usize * (m - 1);
        Ok(Self {
            m,
            r,
            h,
            omega,
            degree,
            order: 2 * degree + 1,
        })
    }

    /// Cell decay ratio `e^{-h} = 1 / (m² ln m)`.
    pub fn cell_ratio(&self) -> T {
        (-self.h).exp()
    }
}

fn check_index(m: usize) -> Result<()> {
    if m < 2 {
        Err(PfCmeError::Domain(format!(
            "Fejér kernel order must satisfy m >= 2, got {m}"
        )))
    } else {
        Ok(())
    }
}

/// Reduces `theta` into `[-π, π]`.
#[inline]
pub fn reduce_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let k = (theta / tau).round();
    (-k).mul_add(tau, theta)
}

/// Distance from `x` to the lattice `2πℤ`.
#[inline]
pub fn lattice_distance<T: Real>(x: T) -> T {
    reduce_angle(x).abs()
}

/// Evaluates the Fejér kernel `Φ_m(θ) = (1/m) (sin(mθ/2) / sin(θ/2))²`.
///
/// Within [`NEAR_PEAK_SWITCH`] of `2πℤ` the cosine expansion
/// `1 + (2/m) Σ (m - ℓ) cos(ℓθ)` is used instead, which returns exactly
/// `m` at `θ = 0`.
pub fn fejer_eval<T: Real>(theta: T, m: usize) -> Result<T> {
    check_index(m)?;
    Ok(fejer_unchecked(theta, m))
}

#[inline]
pub(crate) fn fejer_unchecked<T: Real>(theta: T, m: usize) -> T {
    let x = reduce_angle(theta);
    let mf = T::from_count(m);
    if x.abs() < T::lit(NEAR_PEAK_SWITCH) {
        let mut acc = NeumaierSum::new();
        for l in 1..m {
            let lf = T::from_count(l);
            acc += T::from_count(m - l) * (lf * x).cos();
        }
        T::one() + T::two() * acc.value() / mf
    } else {
        let half = x / T::two();
        let ratio = (mf * half).sin() / half.sin();
        ratio * ratio / mf
    }
}

/// Triangular Fourier sequence `γ_k = 1 - |k|/m` of the Fejér kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerCoefficients<T> {
    pub m: usize,
    /// `γ_k` stored at position `k + m - 1`, for `k = -(m-1) ..= m-1`.
    pub gamma: Vec<T>,
}

impl<T> FejerCoefficients<T> {
    /// `γ_k`, zero outside the support.
    pub fn get(&self, k: isize) -> T
    where
        T: Clone + Zero,
    {
        let half = self.m as isize - 1;
        if k.abs() > half {
            T::zero()
        } else {
            self.gamma[(k + half) as usize].clone()
        }
    }
}

/// Builds `γ_k = (m - |k|) / m`. Works for any numeric ring with
/// division, including exact rationals.
pub fn fejer_coefficients<T>(m: usize) -> Result<FejerCoefficients<T>>
where
    T: Num + FromPrimitive,
{
    check_index(m)?;
    let denom = || T::from_usize(m).expect("m representable");
    let gamma = (0..2 * m - 1)
        .map(|i| {
            let k = i.abs_diff(m - 1);
            T::from_usize(m - k).expect("m representable") / denom()
        })
        .collect();
    Ok(FejerCoefficients { m, gamma })
}

/// Nonnegative-lag half of the `r`-fold self-convolution of a symmetric
/// sequence (`full` has odd length and is centred).
///
/// Direct convolution, one factor at a time, with each output coefficient
/// reduced by pairwise summation in a fixed order.
pub fn self_convolve_power<T>(full: &[T], r: u32) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    assert!(full.len() % 2 == 1, "symmetric sequence must have odd length");
    assert!(r >= 1, "power must be at least one");
    let half = (full.len() / 2) as isize;
    let mut cur: Vec<T> = full.to_vec();
    let mut cur_half = half;
    let mut scratch: Vec<T> = Vec::with_capacity(full.len());
    for _ in 1..r {
        let next_half = cur_half + half;
        let mut next_pos: Vec<T> = Vec::with_capacity(next_half as usize + 1);
        for lag in 0..=next_half {
            let lo = (-cur_half).max(lag - half);
            let hi = cur_half.min(lag + half);
            scratch.clear();
            for j in lo..=hi {
                let a = cur[(j + cur_half) as usize].clone();
                let b = full[(lag - j + half) as usize].clone();
                scratch.push(a * b);
            }
            next_pos.push(pairwise_sum(&scratch));
        }
        cur = next_pos
            .iter()
            .rev()
            .chain(next_pos.iter().skip(1))
            .cloned()
            .collect();
        cur_half = next_half;
    }
    cur.split_off(cur_half as usize)
}

/// Cosine coefficients `B_0 ..= B_L` of `W = Φ_m^r`, stored unnormalized
/// so that `B_0 + 2 Σ B_ℓ = m^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoweredKernelCoefficients<T> {
    pub m: usize,
    pub r: u32,
    pub b: Vec<T>,
}

impl<T: Real> PoweredKernelCoefficients<T> {
    /// Convolves `γ` with itself `r` times.
    ///
    /// Fails with [`PfCmeError::Capacity`] when `m^r` exceeds the square
    /// root of the largest finite value of `T` (about `1.3e154` for `f64`,
    /// `1.8e19` for `f32`); above that the moment products `M_i M_j`
    /// overflow.
    pub fn new(m: usize, r: u32) -> Result<Self> {
        check_index(m)?;
        if r == 0 {
            return Err(PfCmeError::Domain("kernel power must be >= 1".into()));
        }
        let log_mass = r as f64 * (m as f64).ln();
        let limit = T::max_value().to_f64().unwrap_or(f64::MAX).ln() / 2.0;
        if log_mass > limit {
            return Err(PfCmeError::Capacity {
                m,
                r,
                scalar: T::NAME,
                log_mass,
                limit,
            });
        }
        let gamma = fejer_coefficients::<T>(m)?;
        let b = self_convolve_power(&gamma.gamma, r);
        Ok(Self { m, r, b })
    }

    pub fn degree(&self) -> usize {
        self.b.len() - 1
    }

    /// `W(0) = B_0 + 2 Σ_{ℓ≥1} B_ℓ`, which equals `m^r`.
    pub fn mass(&self) -> T {
        let mut acc = NeumaierSum::new();
        for &b in &self.b[1..] {
            acc += b;
        }
        self.b[0] + T::two() * acc.value()
    }

    /// `W(θ)` through the closed-form kernel raised to the power `r`.
    #[inline]
    pub fn eval_power(&self, theta: T) -> T {
        fejer_unchecked(theta, self.m).powi(self.r as i32)
    }

    /// `W(θ)` through the cosine expansion `B_0 + 2 Σ B_ℓ cos(ℓθ)`.
    pub fn eval_cosine(&self, theta: T) -> T {
        let x = reduce_angle(theta);
        let mut acc = NeumaierSum::new();
        for (l, &b) in self.b.iter().enumerate().skip(1) {
            acc += b * (T::from_count(l) * x).cos();
        }
        self.b[0] + T::two() * acc.value()
    }
}

/// Cosine coefficients of `W` for the schedule in `params`.
pub fn power_coefficients<T: Real>(
    params: &FamilyParams<T>,
) -> Result<PoweredKernelCoefficients<T>> {
    PoweredKernelCoefficients::new(params.m, params.r)
}

/// `W(θ) = Φ_m(θ)^r` via the closed form.
pub fn w_eval_power<T: Real>(theta: T, coeffs: &PoweredKernelCoefficients<T>) -> T {
    coeffs.eval_power(theta)
}

/// `W(θ)` via the cosine coefficient sum.
pub fn w_eval_cosine<T: Real>(theta: T, coeffs: &PoweredKernelCoefficients<T>) -> T {
    coeffs.eval_cosine(theta)
}
