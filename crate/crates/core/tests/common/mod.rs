//! Test-only oracles, independent of the library's evaluation paths.
#![allow(dead_code)]

/// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded
/// 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive bisection: split the panel with the largest error
/// estimate until the summed estimate is below `tol` (QAG-style).
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_panels: usize) -> f64 {
    // start from a uniform split so narrow peaks are never missed
    const START: usize = 32;
    let w = (b - a) / START as f64;
    let mut panels: Vec<_> = (0..START)
        .map(|i| {
            let lo = a + w * i as f64;
            let hi = if i + 1 == START { b } else { lo + w };
            (lo, hi, gk15(f, lo, hi))
        })
        .collect();
    loop {
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= tol || panels.len() >= max_panels {
            break;
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap())
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        panels.push((lo, mid, gk15(f, lo, mid)));
        panels.push((mid, hi, gk15(f, mid, hi)));
    }
    let mut vals: Vec<f64> = panels.iter().map(|p| p.2 .0).collect();
    vals.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap());
    vals.iter().sum()
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 4000)
}

/// Adaptive quadrature with forced breakpoints (sorted, inside `[a, b]`).
pub fn integrate_with_breaks(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    let n = (pts.len() - 1) as f64;
    pts.windows(2)
        .map(|w| adapt(&f, w[0], w[1], tol / n, 4000))
        .sum()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Kolmogorov–Smirnov distance between a sample and a distribution function.
pub fn ks_distance(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Sample fourth central moment.
pub fn central4(xs: &[f64], mean: f64) -> f64 {
    xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / xs.len() as f64
}
