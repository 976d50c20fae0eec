//! Fixed-order Gauss–Legendre rule used for panel-wise integration.

use crate::scalar::Real;

const NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

/// Four-point Gauss–Legendre abscissae and weights mapped to `[a, a + w]`.
pub(crate) fn gauss_legendre_4<T: Real>(a: T, width: T) -> [(T, T); 4] {
    let half = width / T::two();
    let mid = a + half;
    std::array::from_fn(|i| (mid + half * T::lit(NODES[i]), half * T::lit(WEIGHTS[i])))
}
