//! Small numerical toolkit: quadrature, root bracketing and normal helpers.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for k in 0..7 {
        let x = h * KRONROD_NODES[k];
        let s = f(c - x) + f(c + x);
        kronrod += KRONROD_WEIGHTS[k] * s;
        if k % 2 == 1 {
            gauss += GAUSS_WEIGHTS[k / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
    let (value, err) = whole;
    if err <= tol || depth == 0 || (b - a) < 1e-15 {
        return value;
    }
    let mid = 0.5 * (a + b);
    let left = kronrod15(f, a, mid);
    let right = kronrod15(f, mid, b);
    adapt(f, a, mid, left, 0.5 * tol, depth - 1) + adapt(f, mid, b, right, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = kronrod15(&f, a, b);
    adapt(&f, a, b, whole, tol, 40)
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        // Tricomi initial guess, refined by Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[order - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[order - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on `[0, 1]`: `panels` equal panels of `order` points.
pub fn composite_gauss_legendre_unit(panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre_unit(order);
    let width = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = p as f64 * width;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + width * xi);
            weights.push(width * wi);
        }
    }
    (nodes, weights)
}

/// Find a root of an increasing function on `[lo, hi]` by bisection.
///
/// `f(lo) <= 0 <= f(hi)` must hold.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64, what: &str) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(Error::Convergence(format!(
            "{what}: root not bracketed on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "{what}: bisection did not reach tolerance {tol}; final bracket [{lo}, {hi}]"
    )))
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// Standard normal quantile function.
pub fn norm_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// Student-t distribution function with `nu` degrees of freedom.
pub fn t_cdf(x: f64, nu: f64) -> f64 {
    StudentsT::new(0.0, 1.0, nu).expect("valid degrees of freedom").cdf(x)
}

/// Student-t quantile function with `nu` degrees of freedom.
pub fn t_quantile(p: f64, nu: f64) -> f64 {
    StudentsT::new(0.0, 1.0, nu).expect("valid degrees of freedom").inverse_cdf(p)
}
