//! Compensated summation and double-double helpers.
//!
//! The moment sums subtract quantities of order one to recover a squared
//! coefficient of variation of order `1e-5`, so plain accumulation loses
//! several digits. Everything here relies on error-free transformations
//! (`two_sum`, `two_prod` through a fused multiply-add).

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::Float;

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
pub fn two_sum<T: Float>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product: `a * b = p + e` exactly (requires a correctly rounded fma).
#[inline]
pub fn two_prod<T: Float>(a: T, b: T) -> (T, T) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Kahan–Neumaier running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Float> NeumaierSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let s = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - s) + x);
        } else {
            self.comp = self.comp + ((x - s) + self.sum);
        }
        self.sum = s;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }

    /// The unrounded `(sum, compensation)` pair as a double-double.
    pub fn to_double_double(&self) -> DoubleDouble<T> {
        DoubleDouble::from_sum(self.sum, self.comp)
    }
}

impl<T: Float> AddAssign<T> for NeumaierSum<T> {
    fn add_assign(&mut self, rhs: T) {
        self.add(rhs);
    }
}

impl<T: Float> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Pairwise (cascade) summation of a slice.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Clone + num_traits::Zero + Add<Output = T>,
{
    const BLOCK: usize = 8;
    if xs.len() <= BLOCK {
        return xs.iter().cloned().fold(T::zero(), |a, b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble<T> {
    pub hi: T,
    pub lo: T,
}

impl<T: Float> DoubleDouble<T> {
    pub fn new(x: T) -> Self {
        Self { hi: x, lo: T::zero() }
    }

    /// Renormalizes an arbitrary pair.
    pub fn from_sum(a: T, b: T) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    pub fn value(self) -> T {
        self.hi + self.lo
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn div(self, rhs: Self) -> T {
        // one Newton correction is enough for a plain-precision result
        let q = self.hi / rhs.hi;
        let r = self - rhs * DoubleDouble::new(q);
        q + r.value() / rhs.hi
    }
}

impl<T: Float> Add for DoubleDouble<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        Self::from_sum(s, e)
    }
}

impl<T: Float> Neg for DoubleDouble<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl<T: Float> Sub for DoubleDouble<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Float> Mul for DoubleDouble<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::from_sum(p, e)
    }
}
