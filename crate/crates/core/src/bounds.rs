//! Grid verification of the scaled Fejér kernel bounds.
//!
//! With `y = m x` the kernel splits into three regions:
//!
//! * peak, `|x| <= 5/m`: `m e^{-a2 m² x²} <= Φ_m(x) <= m e^{-a1 m² x²}`
//! * transition, `5/m < |x| <= 20/m`: `Φ_m(x) <= (6/25) m`
//! * tail, `20/m < dist(x, 2πℤ) <= π`: `Φ_m(x) <= (π²/400) m`
//!
//! Existence of the constants is asymptotic; here each inequality is
//! checked at finitely many points for a given `m`.

use serde::Serialize;

use crate::kernel::{fejer_unchecked, lattice_distance};
use crate::scalar::Real;

/// Grid points per region.
pub const DEFAULT_GRID_POINTS: usize = 10_000;
/// Below this index a report is produced but failures are not asserted.
pub const MIN_RECOMMENDED_M: usize = 8;
/// Default Gaussian constants of the peak bound.
pub const DEFAULT_A1: f64 = 0.08;
pub const DEFAULT_A2: f64 = 0.13;
/// Transition constant `6/25`.
pub const TRANSITION_CONST: f64 = 6.0 / 25.0;
/// Tail constant `π²/400`.
pub const TAIL_CONST: f64 = std::f64::consts::PI * std::f64::consts::PI / 400.0;

/// Margins are normalized by `m`; this much negative margin is rounding.
const ROUNDING_SLACK: f64 = 64.0 * f64::EPSILON;

const PEAK_CUT: f64 = 5.0;
const TAIL_CUT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Peak,
    Transition,
    Tail,
}

/// Region of `x` for index `m`, by distance to `2πℤ`.
pub fn classify<T: Real>(x: T, m: usize) -> Region {
    let d = lattice_distance(x) * T::from_count(m);
    if d <= T::lit(PEAK_CUT) {
        Region::Peak
    } else if d <= T::lit(TAIL_CUT) {
        Region::Transition
    } else {
        Region::Tail
    }
}

/// Outcome of one inequality on one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCheck<T> {
    pub ok: bool,
    /// Smallest `(bound - value) / m` over the grid; negative on failure.
    pub worst_margin: T,
    /// Grid point attaining `worst_margin`.
    pub worst_x: T,
    pub points: usize,
}

impl<T: Real> RegionCheck<T> {
    fn scan(xs: impl Iterator<Item = T>, m: usize, margin: impl Fn(T) -> T) -> Self {
        let mut worst_margin = T::infinity();
        let mut worst_x = T::zero();
        let mut points = 0;
        for x in xs {
            let g = margin(x) / T::from_count(m);
            if g < worst_margin || g.is_nan() {
                worst_margin = g;
                worst_x = x;
            }
            points += 1;
        }
        Self {
            ok: points == 0 || worst_margin >= -T::lit(ROUNDING_SLACK),
            worst_margin: if points == 0 { T::zero() } else { worst_margin },
            worst_x,
            points,
        }
    }
}

/// Verification report for one `m`; unchecked regions are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub m: usize,
    pub a1: T,
    pub a2: T,
    pub grid_points: usize,
    pub below_recommended_range: bool,
    pub peak_ok: Option<bool>,
    pub transition_ok: Option<bool>,
    pub tail_ok: Option<bool>,
    pub peak_upper: Option<RegionCheck<T>>,
    pub peak_lower: Option<RegionCheck<T>>,
    pub transition: Option<RegionCheck<T>>,
    pub tail: Option<RegionCheck<T>>,
}

impl<T: Real> BoundReport<T> {
    fn empty(m: usize, a1: T, a2: T, grid_points: usize) -> Self {
        Self {
            m,
            a1,
            a2,
            grid_points,
            below_recommended_range: m < MIN_RECOMMENDED_M,
            peak_ok: None,
            transition_ok: None,
            tail_ok: None,
            peak_upper: None,
            peak_lower: None,
            transition: None,
            tail: None,
        }
    }

    /// True when every checked region passed.
    pub fn ok(&self) -> bool {
        [self.peak_ok, self.transition_ok, self.tail_ok]
            .iter()
            .all(|r| r.unwrap_or(true))
    }

    fn merge(mut self, other: Self) -> Self {
        self.peak_ok = self.peak_ok.or(other.peak_ok);
        self.transition_ok = self.transition_ok.or(other.transition_ok);
        self.tail_ok = self.tail_ok.or(other.tail_ok);
        self.peak_upper = self.peak_upper.or(other.peak_upper);
        self.peak_lower = self.peak_lower.or(other.peak_lower);
        self.transition = self.transition.or(other.transition);
        self.tail = self.tail.or(other.tail);
        self
    }
}

/// `n` uniform points on `[a, b]` including both ends.
fn linspace<T: Real>(a: T, b: T, n: usize) -> impl Iterator<Item = T> {
    let n = n.max(2);
    let step = (b - a) / T::from_count(n - 1);
    (0..n).map(move |i| if i + 1 == n { b } else { a + step * T::from_count(i) })
}

/// Points on `±[a, b]`, `n` in total.
fn symmetric_band<T: Real>(a: T, b: T, n: usize) -> impl Iterator<Item = T> {
    let half = (n / 2).max(2);
    linspace(a, b, half).flat_map(|x| [x, -x])
}

/// Checks the two-sided Gaussian bound on `|x| <= 5/m`.
pub fn verify_peak<T: Real>(m: usize, a1: T, a2: T, grid_points: usize) -> BoundReport<T> {
    assert!(m >= 2, "Fejér kernel order must be >= 2");
    assert!(T::zero() < a1 && a1 < a2, "need 0 < a1 < a2");
    let mf = T::from_count(m);
    let edge = T::lit(PEAK_CUT) / mf;
    let grid = || linspace(-edge, edge, grid_points).chain(std::iter::once(T::zero()));
    let upper = RegionCheck::scan(grid(), m, |x| {
        mf * (-a1 * mf * mf * x * x).exp() - fejer_unchecked(x, m)
    });
    let lower = RegionCheck::scan(grid(), m, |x| {
        fejer_unchecked(x, m) - mf * (-a2 * mf * mf * x * x).exp()
    });
    let mut report = BoundReport::empty(m, a1, a2, grid_points);
    report.peak_ok = Some(upper.ok && lower.ok);
    report.peak_upper = Some(upper);
    report.peak_lower = Some(lower);
    report
}

/// Checks `Φ_m(x) <= (6/25) m` on `5/m <= |x| <= min(20/m, π)`.
pub fn verify_transition<T: Real>(m: usize, grid_points: usize) -> BoundReport<T> {
    assert!(m >= 2, "Fejér kernel order must be >= 2");
    let mf = T::from_count(m);
    let lo = T::lit(PEAK_CUT) / mf;
    let hi = (T::lit(TAIL_CUT) / mf).min(T::PI());
    let bound = T::lit(TRANSITION_CONST) * mf;
    let check = if lo <= hi {
        RegionCheck::scan(symmetric_band(lo, hi, grid_points), m, |x| {
            bound - fejer_unchecked(x, m)
        })
    } else {
        RegionCheck::scan(std::iter::empty(), m, |x| x)
    };
    let mut report = BoundReport::empty(m, T::lit(DEFAULT_A1), T::lit(DEFAULT_A2), grid_points);
    report.transition_ok = Some(check.ok);
    report.transition = Some(check);
    report
}

/// Checks `Φ_m(x) <= (π²/400) m` on `20/m <= |x| <= π`.
pub fn verify_tail<T: Real>(m: usize, grid_points: usize) -> BoundReport<T> {
    assert!(m >= 2, "Fejér kernel order must be >= 2");
    let mf = T::from_count(m);
    let lo = T::lit(TAIL_CUT) / mf;
    let bound = T::lit(TAIL_CONST) * mf;
    let check = if lo <= T::PI() {
        RegionCheck::scan(symmetric_band(lo, T::PI(), grid_points), m, |x| {
            bound - fejer_unchecked(x, m)
        })
    } else {
        RegionCheck::scan(std::iter::empty(), m, |x| x)
    };
    let mut report = BoundReport::empty(m, T::lit(DEFAULT_A1), T::lit(DEFAULT_A2), grid_points);
    report.tail_ok = Some(check.ok);
    report.tail = Some(check);
    report
}

/// All three regions.
pub fn verify_all<T: Real>(m: usize, a1: T, a2: T, grid_points: usize) -> BoundReport<T> {
    verify_peak(m, a1, a2, grid_points)
        .merge(verify_transition(m, grid_points))
        .merge(verify_tail(m, grid_points))
}

/// Tightest peak constants, to `1e-3`, such that the peak check passes for
/// every listed `m`: the largest feasible `a1` and smallest feasible `a2`.
///
/// Each constant is bracketed by bisection on `[0, 2]` against the
/// corresponding one-sided check; the returned ends are the feasible ones.
pub fn fit_constants<T: Real>(m_list: &[usize], grid_points: usize) -> (T, T) {
    assert!(!m_list.is_empty(), "need at least one m");
    let tol = T::lit(1e-3);
    let upper_holds = |a1: T| {
        m_list.iter().all(|&m| {
            let a2 = a1 + T::one();
            verify_peak(m, a1, a2, grid_points)
                .peak_upper
                .is_some_and(|c| c.ok)
        })
    };
    let lower_holds = |a2: T| {
        m_list.iter().all(|&m| {
            let a1 = a2 / T::two();
            verify_peak(m, a1, a2, grid_points)
                .peak_lower
                .is_some_and(|c| c.ok)
        })
    };
    // a1: feasible at lo, infeasible at hi
    let (mut lo, mut hi) = (T::lit(1e-6), T::two());
    while hi - lo > tol {
        let mid = (lo + hi) / T::two();
        if upper_holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a1_max = lo;
    // a2: infeasible at lo, feasible at hi
    let (mut lo, mut hi) = (T::lit(1e-6), T::two());
    while hi - lo > tol {
        let mid = (lo + hi) / T::two();
        if lower_holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (a1_max, hi)
}
