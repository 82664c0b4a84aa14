//! Legendre polynomials by upward three-term recurrence.

/// Values `P_0(x) ..= P_lmax(x)`.
///
/// Uses `(l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}`, which is stable on
/// `[-1, 1]` for the angular momenta used here.
pub fn legendre_values(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax == 0 {
        return p;
    }
    p.push(x);
    for l in 1..lmax {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

/// `P_l(x)` together with its derivative, used for Gauss–Legendre nodes.
pub(crate) fn legendre_with_derivative(l: usize, x: f64) -> (f64, f64) {
    if l == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..l {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let lf = l as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint limit P_l'(±1) = (±1)^{l+1} l(l+1)/2
        let sign = if x > 0.0 || l % 2 == 1 { 1.0 } else { -1.0 };
        sign * lf * (lf + 1.0) / 2.0
    } else {
        lf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_match_closed_forms() {
        for &x in &[-1.0, -0.3, 0.0, 0.5, 1.0] {
            let p = legendre_values(4, x);
            assert!((p[0] - 1.0).abs() < 1e-15);
            assert!((p[1] - x).abs() < 1e-15);
            assert!((p[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
            assert!((p[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
            let p4 = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
            assert!((p[4] - p4).abs() < 1e-14);
        }
    }

    #[test]
    fn endpoint_values() {
        let p = legendre_values(100, 1.0);
        assert!(p.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let m = legendre_values(100, -1.0);
        for (l, v) in m.iter().enumerate() {
            let expect = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for l in 0..8 {
            let (_, d) = legendre_with_derivative(l, 0.37);
            let fd = (legendre_with_derivative(l, 0.37 + h).0 - legendre_with_derivative(l, 0.37 - h).0) / (2.0 * h);
            assert!((d - fd).abs() < 1e-7, "l={l}: {d} vs {fd}");
        }
    }
}
