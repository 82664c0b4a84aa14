//! Quadrature: Gauss–Legendre rules and globally adaptive Gauss–Kronrod
//! (7/15) integration, including the whole real line via tail mapping.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::legendre::legendre_with_derivative;

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |Kronrod − Gauss| on one interval.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration over the finite pieces `[p_k, p_{k+1}]`.
///
/// The worst segment (by error estimate) is bisected until the summed error
/// meets `max(tol.abs, tol.rel·|I|)`.
pub fn integrate_pieces(mut f: impl FnMut(f64) -> f64, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                value,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot bisect further in floating point
            return Err(Error::QuadratureNonConvergence {
                value,
                error,
                intervals: heap.len() + 1,
            });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, a, b);
            heap.push(Segment { a, b, value, error });
        }
    }
}

/// `∫_a^b f`.
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if b < a {
        let r = integrate(f, b, a, tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    integrate_pieces(f, &[a, b], tol)
}

/// `∫_{-∞}^{∞} f` for integrands decaying at least like `1/x²`.
///
/// `[-half_width, half_width]` is integrated directly, split at `breaks`
/// (points inside the window where `f` has sharp structure); the two tails
/// are mapped onto `(0, 1]` by `x = ±half_width / t`.
pub fn integrate_real_line(
    f: impl Fn(f64) -> f64,
    half_width: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadResult> {
    assert!(half_width > 0.0, "window must be non-degenerate");
    let l = half_width;
    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && b.abs() < l)
        .collect();
    points.push(-l);
    points.push(l);
    points.sort_by(f64::total_cmp);
    points.dedup();
    // map the tails onto the segments [2, 3] and [-3, -2] of a single
    // parameter so one adaptive pool balances all three pieces
    let g = |u: f64| -> f64 {
        if u > 1.5 * l {
            let t = 3.0 * l - u; // in (0, l]
            let tt = t / l;
            f(l / tt) / (tt * tt)
        } else if u < -1.5 * l {
            let t = 3.0 * l + u;
            let tt = t / l;
            f(-l / tt) / (tt * tt)
        } else {
            f(u)
        }
    };
    let mut pieces = vec![-3.0 * l, -2.0 * l];
    pieces.extend(points.iter().copied());
    pieces.push(2.0 * l);
    pieces.push(3.0 * l);
    // the gaps (-2l, -l) and (l, 2l) carry no weight: drop them
    let mut total = QuadResult {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    let segments: [&[f64]; 3] = [&pieces[..2], &pieces[2..pieces.len() - 2], &pieces[pieces.len() - 2..]];
    let share = Tolerance {
        abs: tol.abs / 3.0,
        ..tol
    };
    for seg in segments {
        let r = integrate_pieces(g, seg, share)?;
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
    }
    // the relative target applies to the whole integral
    if total.error > tol.abs.max(tol.rel * total.value.abs()) {
        return Err(Error::QuadratureNonConvergence {
            value: total.value,
            error: total.error,
            intervals: total.intervals,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^18 = 2/19 is the highest exact degree for 10 nodes
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn gauss_legendre_64_weights() {
        let (_, w) = gauss_legendre(64);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(w.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn adaptive_smooth() {
        let r = integrate(|x| x.sin(), 0.0, PI, Tolerance::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reversed_limits() {
        let r = integrate(|x| x * x, 1.0, 0.0, Tolerance::default()).unwrap();
        assert!((r.value + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lorentzian_over_real_line() {
        let g = 0.01;
        let f = |x: f64| (g / (2.0 * PI)) / ((x - 3.0).powi(2) + g * g / 4.0);
        let r = integrate_real_line(f, 200.0, &[3.0], Tolerance::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn slow_tail_is_captured() {
        // truncating at |x| ≤ 200 would lose ~3e-3 of the mass
        let f = |x: f64| 1.0 / (PI * (1.0 + x * x));
        let r = integrate_real_line(f, 200.0, &[], Tolerance::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn non_integrable_reports_failure() {
        let tol = Tolerance {
            max_intervals: 50,
            ..Tolerance::default()
        };
        let r = integrate(|x| 1.0 / x.abs().max(1e-300), -1.0, 1.0, tol);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }
}
