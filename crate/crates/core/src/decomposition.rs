//! Geometric cell decomposition `X = Y + K h`.
//!
//! Because `W(ω(t - 1))` has period `h`, the density on cell `k` is the
//! density on `[0, h)` scaled by `q^k` with `q = e^{-h}`. The cell index
//! `K` is geometric with success probability `1 - q` and is independent of
//! the in-cell offset `Y`. This gives a moment oracle that never touches
//! the cosine coefficients, and an exact sampler.
//!
//! The base cell is integrated with four-point Gauss–Legendre panels whose
//! width is at most `h / (32 L)`, so the fastest oscillation of `W`
//! (degree `L`) is covered by at least 32 panels per period.

use std::sync::Arc;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::compensated::{DoubleDouble, NeumaierSum};
use crate::distribution::{MomentSet, PfCme};
use crate::error::{PfCmeError, Result};
use crate::kernel::FamilyParams;
use crate::quadrature::gauss_legendre_4;
use crate::scalar::Real;

/// Relative change allowed between the base and doubled quadrature grids.
pub const GRID_DOUBLING_TOL: f64 = 1e-9;

/// Cumulative integral of the raw base-cell integrand `e^{-u} W(ω(u-1))`
/// on `[0, h)` at uniformly spaced panel edges.
#[derive(Debug, Clone)]
pub struct BaseCellTable<T> {
    step: T,
    /// Cumulative raw integral at panel edges, `cumulative[0] = 0`.
    cumulative: Vec<T>,
    /// Raw integrand at panel edges.
    edge_values: Vec<T>,
    /// `∫ (u - 1)^k g(u) du` for `k = 0, 1, 2`.
    centered: [T; 3],
}

struct PanelSums<T> {
    cumulative: Vec<T>,
    edge_values: Vec<T>,
    centered: [T; 3],
}

fn integrate_panels<T: Real>(dist: &PfCme<T>, panels: usize, keep_table: bool) -> PanelSums<T> {
    let h = dist.params().h;
    let step = h / T::from_count(panels);
    let mut sums = [NeumaierSum::new(); 3];
    let mut running = NeumaierSum::new();
    let cap = if keep_table { panels + 1 } else { 0 };
    let mut cumulative = Vec::with_capacity(cap);
    let mut edge_values = Vec::with_capacity(cap);
    if keep_table {
        cumulative.push(T::zero());
        edge_values.push(dist.base_integrand(T::zero()));
    }
    for i in 0..panels {
        let a = T::from_count(i) * step;
        let mut panel = NeumaierSum::new();
        for (x, w) in gauss_legendre_4(a, step) {
            let g = w * dist.base_integrand(x);
            let d = x - T::one();
            panel += g;
            sums[0] += g;
            sums[1] += g * d;
            sums[2] += g * d * d;
        }
        running += panel.value();
        if keep_table {
            cumulative.push(running.value());
            edge_values.push(dist.base_integrand(T::from_count(i + 1) * step));
        }
    }
    PanelSums {
        cumulative,
        edge_values,
        centered: [sums[0].value(), sums[1].value(), sums[2].value()],
    }
}

impl<T: Real> BaseCellTable<T> {
    /// `max(32 L, 1024)` panels.
    pub fn default_panels(params: &FamilyParams<T>) -> usize {
        (32 * params.degree).max(1024)
    }

    pub fn build(dist: &PfCme<T>, panels: usize) -> Self {
        let sums = integrate_panels(dist, panels, true);
        Self {
            step: dist.params().h / T::from_count(panels),
            cumulative: sums.cumulative,
            edge_values: sums.edge_values,
            centered: sums.centered,
        }
    }

    pub fn panels(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// Raw base-cell integral `∫_0^h e^{-u} W(ω(u-1)) du`.
    pub fn total(&self) -> T {
        self.centered[0]
    }

    /// Raw integrals `∫ (u - 1)^k e^{-u} W(ω(u-1)) du`, `k = 0, 1, 2`.
    pub fn centered_moments(&self) -> [T; 3] {
        self.centered
    }

    /// Cumulative raw integral at the panel edges.
    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// Normalized base-cell distribution function `G(u)`, `u ∈ [0, h]`.
    ///
    /// Cubic Hermite interpolation between panel edges with the integrand
    /// as slope. Slopes are limited so the Bernstein control points are
    /// ordered (`α + β <= 3`), which keeps `G` monotone.
    pub fn cdf(&self, u: T) -> T {
        let n = self.panels();
        let total = self.cumulative[n];
        if !(u > T::zero()) {
            return T::zero();
        }
        let pos = u / self.step;
        let i = pos.floor().to_usize().unwrap_or(n).min(n);
        if i >= n {
            return T::one();
        }
        let s = (pos - T::from_count(i)).max(T::zero()).min(T::one());
        let (g0, g1) = (self.cumulative[i], self.cumulative[i + 1]);
        let rise = g1 - g0;
        if !(rise > T::zero()) {
            return g0 / total;
        }
        let three = T::lit(3.0);
        // control points 0 <= c1 <= c2 <= 1 of the normalized cubic on [0, 1]
        let mut alpha = self.edge_values[i] * self.step / rise;
        let mut beta = self.edge_values[i + 1] * self.step / rise;
        let sum = alpha + beta;
        if sum > three {
            alpha = alpha * three / sum;
            beta = beta * three / sum;
        }
        let c1 = alpha / three;
        let c2 = T::one() - beta / three;
        let t = T::one() - s;
        let shape = three * t * s * (t * c1 + s * c2) + s * s * s;
        let v = g0 + rise * shape.max(T::zero()).min(T::one());
        v.min(g1) / total
    }

    /// Inverse of the piecewise-linear interpolant of `G` through the
    /// panel edges; `p ∈ [0, 1]`.
    pub fn quantile_linear(&self, p: T) -> T {
        let n = self.panels();
        let target = p * self.cumulative[n];
        let j = self.cumulative.partition_point(|&c| c <= target);
        let i = j.saturating_sub(1).min(n - 1);
        let (g0, g1) = (self.cumulative[i], self.cumulative[i + 1]);
        let frac = if g1 > g0 {
            ((target - g0) / (g1 - g0)).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        (T::from_count(i) + frac) * self.step
    }
}

/// Moment pieces of the base cell `Y` and the geometric cell index `K`.
#[derive(Debug, Clone)]
pub struct CellDecomposition<T> {
    /// Cell decay ratio `q = e^{-h} = 1 / (m² ln m)`.
    pub q: T,
    /// Cell length `h`.
    pub h: T,
    pub base_mean: T,
    pub base_var: T,
    /// Normalizing constant `C` of the full density.
    pub norm: T,
    pub base_cdf: Arc<BaseCellTable<T>>,
}

/// Summary moments from one quadrature grid.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BaseMoments<T> {
    mass: T,
    mean: T,
    centered2: T,
}

fn base_moments<T: Real>(centered: [T; 3]) -> BaseMoments<T> {
    BaseMoments {
        mass: centered[0],
        mean: T::one() + centered[1] / centered[0],
        centered2: centered[2] / centered[0],
    }
}

/// Builds the cell decomposition of `dist`, reusing its cached base-cell table.
pub fn decompose<T: Real>(dist: &PfCme<T>) -> CellDecomposition<T> {
    let table = Arc::clone(dist.base_cell());
    let bm = base_moments(table.centered_moments());
    let offset = bm.mean - T::one();
    CellDecomposition {
        q: dist.params().cell_ratio(),
        h: dist.params().h,
        base_mean: bm.mean,
        base_var: bm.centered2 - offset * offset,
        norm: dist.norm(),
        base_cdf: table,
    }
}

impl<T: Real> CellDecomposition<T> {
    /// Probability mass of cell `k`, `(1 - q) q^k`.
    pub fn cell_mass(&self, k: u32) -> T {
        (T::one() - self.q) * self.q.powi(k as i32)
    }

    /// Base-cell mass of the normalized density, `C ∫_0^h e^{-u} W du`;
    /// equals `1 - q`.
    pub fn base_mass(&self) -> T {
        self.norm * self.base_cdf.total()
    }

    /// `E[X] = E[Y] + h q / (1 - q)`.
    pub fn mean(&self) -> T {
        self.base_mean + self.h * self.q / (T::one() - self.q)
    }

    /// `Var X = Var Y + h² q / (1 - q)²`.
    pub fn variance(&self) -> T {
        self.base_var + self.geometric_variance()
    }

    /// Variance contributed by the cell index, `h² q / (1 - q)²`.
    pub fn geometric_variance(&self) -> T {
        let p = T::one() - self.q;
        self.h * self.h * self.q / (p * p)
    }

    /// i.i.d. draws of `X = Y + K h`.
    pub fn sample(&self, state: &mut SamplerState, count: usize) -> Result<Vec<T>> {
        if count == 0 {
            return Err(PfCmeError::Domain("sample count must be >= 1".into()));
        }
        let ln_q = self.q.ln();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let uk = T::lit(state.next_open01());
            let uy = T::lit(state.next_open01());
            let k = (uk.ln() / ln_q).floor();
            let y = self.base_cdf.quantile_linear(uy);
            out.push(k.mul_add(self.h, y));
        }
        Ok(out)
    }
}

/// Moments of `X` assembled from base-cell quadrature and the geometric
/// cell index. Fails when doubling the quadrature grid changes the base
/// mass, mean or second central moment by more than [`GRID_DOUBLING_TOL`].
pub fn oracle_moments<T: Real>(dist: &PfCme<T>) -> Result<MomentSet<T>> {
    let decomp = decompose(dist);
    let coarse = base_moments(decomp.base_cdf.centered_moments());
    let fine_panels = 2 * decomp.base_cdf.panels();
    let fine = base_moments(integrate_panels(dist, fine_panels, false).centered);

    let tol = T::lit(GRID_DOUBLING_TOL);
    let checks = [
        ("base mass", (fine.mass - coarse.mass) / fine.mass),
        ("base mean", fine.mean - coarse.mean),
        (
            "base second central moment",
            (fine.centered2 - coarse.centered2) / fine.centered2,
        ),
    ];
    for (what, change) in checks {
        if !(change.abs() <= tol) {
            return Err(PfCmeError::Convergence {
                what,
                change: change.to_f64().unwrap_or(f64::NAN),
                limit: GRID_DOUBLING_TOL,
            });
        }
    }

    let q = decomp.q;
    let p = T::one() - q;
    let offset = fine.mean - T::one();
    let base_var = fine.centered2 - offset * offset;
    let mean = fine.mean + decomp.h * q / p;
    let var = base_var + decomp.h * decomp.h * q / (p * p);
    let m0 = fine.mass / p;
    MomentSet::from_integrals(
        DoubleDouble::new(m0),
        DoubleDouble::new(m0 * mean),
        DoubleDouble::new(m0 * (var + mean * mean)),
    )
    .map(|mut set| {
        // keep the directly assembled values instead of re-deriving them
        set.mean = mean;
        set.variance = var;
        set.second_moment = var + mean * mean;
        set.scv = var / (mean * mean);
        set
    })
}

/// Seeded pseudorandom state for the sampler.
///
/// The generator is xoshiro256++ seeded through SplitMix64 from a 64-bit
/// seed. Each uniform variate takes the top 53 bits `x >> 11` of one
/// output word and maps it to `((x >> 11) + 0.5) · 2⁻⁵³`, which lies in the
/// open interval `(0, 1)`. Every draw consumes two words: the first fixes
/// the cell index `K = ⌊ln U / ln q⌋`, the second the in-cell offset by
/// inverse-CDF lookup.
#[derive(Debug, Clone)]
pub struct SamplerState {
    seed: u64,
    rng: Xoshiro256PlusPlus,
}

impl SamplerState {
    pub const GENERATOR: &'static str = "xoshiro256++/splitmix64";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform variate in `(0, 1)`.
    pub fn next_open01(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * SCALE
    }
}

/// Draws `count` variates from `dist`.
pub fn sample<T: Real>(dist: &PfCme<T>, state: &mut SamplerState, count: usize) -> Result<Vec<T>> {
    decompose(dist).sample(state, count)
}
