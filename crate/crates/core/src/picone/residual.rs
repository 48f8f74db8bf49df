//! Finite-difference and quadrature helpers on uniform grids.

use alloc::vec::Vec;

/// Derivative estimates of `f` sampled with spacing `h`: five-point central
/// differences inside, fourth-order one-sided stencils at the two points
/// nearest each end. Needs at least 5 samples.
pub fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "derivative stencil needs 5 samples");
    let mut out = Vec::with_capacity(n);
    let fwd0 =
        |i: usize| (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]) / (12.0 * h);
    let fwd1 = |i: usize| (-3.0 * f[i - 1] - 10.0 * f[i] + 18.0 * f[i + 1] - 6.0 * f[i + 2] + f[i + 3]) / (12.0 * h);
    let bwd0 =
        |i: usize| (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]) / (12.0 * h);
    let bwd1 = |i: usize| (3.0 * f[i + 1] + 10.0 * f[i] - 18.0 * f[i - 1] + 6.0 * f[i - 2] - f[i - 3]) / (12.0 * h);
    for i in 0..n {
        let d = if i == 0 {
            fwd0(0)
        } else if i == 1 {
            fwd1(1)
        } else if i == n - 1 {
            bwd0(i)
        } else if i == n - 2 {
            bwd1(i)
        } else {
            (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
        };
        out.push(d);
    }
    out
}

/// Composite Simpson on `f` with spacing `h`; an odd number of intervals
/// closes with the 3/8 rule on the last three. Needs at least 3 samples
/// (or exactly 2, where the trapezoid is used).
pub fn integrate(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        3 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        4 => 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]),
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
            let mut s = f[0] + f[simpson_end];
            for (i, v) in f.iter().enumerate().take(simpson_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = h / 3.0 * s;
            if simpson_end != n - 1 {
                let g = &f[simpson_end..];
                total += 3.0 * h / 8.0 * (g[0] + 3.0 * g[1] + 3.0 * g[2] + g[3]);
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(n: usize, h: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(i as f64 * h)).collect()
    }

    #[test]
    fn quartics_are_differentiated_exactly() {
        let h = 0.1;
        let f = samples(9, h, |x| x * x * x * x - 2.0 * x + 1.0);
        for (i, d) in derivative(&f, h).iter().enumerate() {
            let x = i as f64 * h;
            assert!((d - (4.0 * x * x * x - 2.0)).abs() < 1e-11, "i={i}");
        }
    }

    #[test]
    fn cubics_are_integrated_exactly() {
        for n in [5, 6, 7, 8, 11] {
            let h = 0.25;
            let f = samples(n, h, |x| x * x * x - x);
            let b = (n - 1) as f64 * h;
            let exact = b * b * b * b / 4.0 - b * b / 2.0;
            assert!((integrate(&f, h) - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn sine_integral_converges() {
        let n = 2001;
        let h = core::f64::consts::PI / (n - 1) as f64;
        let f = samples(n, h, libm::sin);
        assert!((integrate(&f, h) - 2.0).abs() < 1e-12);
    }
}
