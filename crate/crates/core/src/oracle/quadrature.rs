//! Adaptive Gauss–Kronrod (7/15) quadrature for cross-checking closed forms.

use crate::error::{Error, Result};

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

const MAX_SUBDIVISIONS: usize = 4000;

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut pairs = [(0.0, 0.0); 7];
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        pairs[j] = (f(c - dx), f(c + dx));
        let sum = pairs[j].0 + pairs[j].1;
        kron += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (w, (l, r)) in WGK.iter().zip(pairs) {
        asc += w * ((l - mean).abs() + (r - mean).abs());
    }
    let (asc, mut err) = (asc * h.abs(), ((kron - gauss) * h).abs());
    // QUADPACK's rescaling: pessimistic when the two rules agree by accident
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (kron * h, err.max(50.0 * f64::EPSILON * (kron * h).abs()))
}

/// `∫_a^b f` to `max(abs_tol, rel_tol·|I|)`. `b` may be `+∞`, handled by
/// `t = a + u/(1−u)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if b == a {
        return Ok(0.0);
    }
    if b == f64::INFINITY {
        let g = |u: f64| {
            let one_minus = 1.0 - u;
            if one_minus <= 0.0 {
                return 0.0;
            }
            f(a + u / one_minus) / (one_minus * one_minus)
        };
        return adaptive(&g, 0.0, 1.0, abs_tol, rel_tol);
    }
    adaptive(&f, a, b, abs_tol, rel_tol)
}

const INITIAL_PIECES: usize = 8;

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let w = (b - a) / INITIAL_PIECES as f64;
    let mut intervals: Vec<(f64, f64, f64, f64)> = (0..INITIAL_PIECES)
        .map(|i| {
            let lo = a + w * i as f64;
            let hi = if i + 1 == INITIAL_PIECES { b } else { lo + w };
            let (v, e) = kronrod(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    for _ in 0..MAX_SUBDIVISIONS {
        let total: f64 = intervals.iter().map(|s| s.2).sum();
        let err: f64 = intervals.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(f, lo, mid);
        let (v2, e2) = kronrod(f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    Err(Error::Numeric(format!("quadrature on [{a}, {b}] did not converge")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - x, 0.0, 2.0, 1e-14, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn half_line_exponential() {
        let v = integrate(|x| (-x).exp(), 0.0, f64::INFINITY, 1e-12, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kink_needs_refinement() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-11);
    }
}
