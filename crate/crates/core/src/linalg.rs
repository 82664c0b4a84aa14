//! Small dense complex linear algebra: 3×3 matrices, their spectra and
//! exponentials, plus a generic pivoted solver for the oracle paths.

// explicit indices read better than iterator chains for 3×3 algebra
#![allow(clippy::needless_range_loop)]

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec3 = [C64; 3];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[C64; 3]; 3]);

impl Mat3 {
    pub const fn zeros() -> Self {
        Mat3([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[C64; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec3 {
        self.0[i]
    }

    pub fn col(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn from_cols(cols: [Vec3; 3]) -> Self {
        let mut m = Self::zeros();
        for (j, c) in cols.iter().enumerate() {
            for i in 0..3 {
                m.0[i][j] = c[i];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|e| *e *= s);
        m
    }

    /// `self + s·I`
    pub fn shift(&self, s: C64) -> Self {
        let mut m = *self;
        for i in 0..3 {
            m.0[i][i] += s;
        }
        m
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> C64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Cofactor `C_ij` (signed minor deleting row `i`, column `j`).
    pub fn cofactor(&self, i: usize, j: usize) -> C64 {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let a = &self.0;
        let minor = a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]];
        if (i + j).is_multiple_of(2) {
            minor
        } else {
            -minor
        }
    }

    /// Adjugate: `adj(A)_ij = C_ji`, so that `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.cofactor(j, i);
            }
        }
        m
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(det.inv()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..3)
            .map(|j| (0..3).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|e| *e = e.conj());
        m
    }

    /// Coefficients `[c0, c1, c2]` of `det(λI - A) = λ³ + c2 λ² + c1 λ + c0`.
    pub fn char_poly(&self) -> [C64; 3] {
        let a = &self.0;
        let minors = (a[0][0] * a[1][1] - a[0][1] * a[1][0])
            + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
            + (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
        [-self.det(), minors, -self.trace()]
    }

    /// Eigenvalues from the characteristic cubic, Newton-polished.
    pub fn eigenvalues(&self) -> [C64; 3] {
        let coeffs = self.char_poly();
        let mut roots = cubic_roots(coeffs);
        for r in roots.iter_mut() {
            *r = polish_root(coeffs, *r);
        }
        roots
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(mut self, rhs: Mat3) -> Mat3 {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(mut self, rhs: Mat3) -> Mat3 {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

/// Bilinear (non-conjugating) dot product.
pub fn dot(a: &Vec3, b: &Vec3) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Hermitian inner product `a† b`.
pub fn inner(a: &Vec3, b: &Vec3) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

pub fn vnorm(v: &Vec3) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

pub fn vadd(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn vsub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn vscale(a: &Vec3, s: C64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Roots of `λ³ + c2 λ² + c1 λ + c0` by Cardano's formula.
pub fn cubic_roots(c: [C64; 3]) -> [C64; 3] {
    let [c0, c1, c2] = c;
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c2 * c2 * c2 * (2.0 / 27.0) - c2 * c1 / 3.0 + c0;
    let disc = (q * q) / 4.0 + (p * p * p) / 27.0;
    let sq = disc.sqrt();
    // pick the branch that avoids cancellation
    let w1 = -q / 2.0 + sq;
    let w2 = -q / 2.0 - sq;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);
    if w.norm() == 0.0 {
        // p = q = 0: triple root
        return [-shift; 3];
    }
    let u = w.cbrt();
    let mut roots = [ZERO; 3];
    let mut uk = u;
    for r in roots.iter_mut() {
        let vk = -p / (3.0 * uk);
        *r = uk + vk - shift;
        uk *= omega;
    }
    roots
}

fn eval_cubic(c: [C64; 3], x: C64) -> (C64, C64) {
    let [c0, c1, c2] = c;
    let f = ((x + c2) * x + c1) * x + c0;
    let df = (3.0 * x + 2.0 * c2) * x + c1;
    (f, df)
}

fn polish_root(c: [C64; 3], mut x: C64) -> C64 {
    for _ in 0..4 {
        let (f, df) = eval_cubic(c, x);
        if df.norm() == 0.0 {
            break;
        }
        let next = x - f / df;
        if eval_cubic(c, next).0.norm() < f.norm() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Discriminant of the monic cubic `λ³ + c2 λ² + c1 λ + c0`.
///
/// For real coefficients it is positive for three distinct real roots and
/// negative when a complex-conjugate pair is present.
pub fn cubic_discriminant(c: [C64; 3]) -> C64 {
    let [d, cc, b] = c;
    // a = 1
    b * b * cc * cc - 4.0 * cc * cc * cc - 4.0 * b * b * b * d - 27.0 * d * d + 18.0 * b * cc * d
}

/// Eigendecomposition `A = V diag(λ) V⁻¹`.
#[derive(Debug, Clone, Copy)]
pub struct Eigen {
    pub values: [C64; 3],
    /// Eigenvectors as columns, each of unit 2-norm.
    pub vectors: Mat3,
    pub inverse: Mat3,
    /// `‖V‖₁ ‖V⁻¹‖₁`
    pub condition: f64,
}

/// Eigendecomposition of a 3×3 matrix, or `None` when the eigenvector basis is
/// numerically singular.
pub fn eigen(a: &Mat3) -> Option<Eigen> {
    let values = a.eigenvalues();
    let mut cols = [[ZERO; 3]; 3];
    for (k, &lam) in values.iter().enumerate() {
        let b = a.shift(-lam);
        let rows = [b.row(0), b.row(1), b.row(2)];
        let candidates = [
            cross(&rows[0], &rows[1]),
            cross(&rows[0], &rows[2]),
            cross(&rows[1], &rows[2]),
        ];
        let best = candidates
            .iter()
            .max_by(|x, y| vnorm(x).total_cmp(&vnorm(y)))
            .copied()?;
        let n = vnorm(&best);
        let v = if n > 0.0 && n.is_finite() {
            vscale(&best, C64::new(1.0 / n, 0.0))
        } else {
            // B has rank ≤ 1: any vector orthogonal to its largest row
            let r = rows.iter().max_by(|x, y| vnorm(x).total_cmp(&vnorm(y))).copied()?;
            if vnorm(&r) == 0.0 {
                let mut e = [ZERO; 3];
                e[k] = ONE;
                e
            } else {
                let mut e = [ZERO; 3];
                let j = (0..3).min_by(|&i, &j| r[i].norm().total_cmp(&r[j].norm()))?;
                e[j] = ONE;
                let v = cross(&r, &e);
                vscale(&v, C64::new(1.0 / vnorm(&v), 0.0))
            }
        };
        cols[k] = v;
    }
    let vectors = Mat3::from_cols(cols);
    let inverse = vectors.inverse()?;
    let condition = vectors.norm1() * inverse.norm1();
    if !condition.is_finite() {
        return None;
    }
    Some(Eigen {
        values,
        vectors,
        inverse,
        condition,
    })
}

/// Matrix exponential by scaling and squaring with a diagonal [6/6] Padé
/// approximant.
pub fn expm_pade(a: &Mat3) -> Mat3 {
    const C: [f64; 7] = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let norm = a.norm1();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new(0.5f64.powi(squarings), 0.0));
    let mut power = Mat3::identity();
    let mut num = Mat3::zeros();
    let mut den = Mat3::zeros();
    for (k, &ck) in C.iter().enumerate() {
        if k > 0 {
            power = power * scaled;
        }
        let term = power.scale(C64::new(ck, 0.0));
        num = num + term;
        den = if k % 2 == 0 { den + term } else { den - term };
    }
    let mut r = den.inverse().expect("Padé denominator is invertible after scaling") * num;
    for _ in 0..squarings {
        r = r * r;
    }
    r
}

/// Dense `n×n` solve by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv();
        for row in col + 1..n {
            let f = a[row][col] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![ZERO; n];
    for row in (0..n).rev() {
        let s: C64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> Mat3 {
        Mat3([
            [c(2.0, 0.1), c(-0.7, 0.0), c(0.3, -0.2)],
            [c(1.1, 0.4), c(0.9, -1.3), c(0.0, 0.5)],
            [c(-0.2, 0.8), c(0.6, 0.0), c(1.4, 2.0)],
        ])
    }

    #[test]
    fn adjugate_inverse() {
        let a = sample();
        let prod = a * a.inverse().unwrap();
        assert!((prod - Mat3::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let a = sample();
        let e = eigen(&a).unwrap();
        for k in 0..3 {
            let v = e.vectors.col(k);
            let av = a.mul_vec(&v);
            let lv = vscale(&v, e.values[k]);
            assert!(vnorm(&vsub(&av, &lv)) < 1e-13);
        }
        let sum: C64 = e.values.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-13);
    }

    #[test]
    fn diagonal_exponential() {
        let a = Mat3::from_real([[-1.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 3.0]]);
        let e = expm_pade(&a);
        let expect = [(-1f64).exp(), 0.5f64.exp(), 3f64.exp()];
        for i in 0..3 {
            assert!((e[(i, i)].re - expect[i]).abs() < 1e-13 * expect[i]);
        }
    }

    #[test]
    fn pade_matches_eigen_route() {
        let a = sample().scale(c(-0.8, 0.0));
        let p = expm_pade(&a);
        let e = eigen(&a).unwrap();
        let mut d = Mat3::zeros();
        for k in 0..3 {
            d[(k, k)] = e.values[k].exp();
        }
        let viaeig = e.vectors * d * e.inverse;
        assert!((p - viaeig).max_abs() < 1e-12);
    }

    #[test]
    fn nilpotent_jordan_block() {
        // exp of a Jordan block: e^λ [[1,1],[0,1]]
        let a = Mat3::from_real([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -1.0]]);
        let e = expm_pade(&a);
        let e2 = 2f64.exp();
        assert!((e[(0, 0)].re - e2).abs() < 1e-12 * e2);
        assert!((e[(0, 1)].re - e2).abs() < 1e-12 * e2);
        assert!(e[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn discriminant_sign() {
        // (λ-1)(λ-2)(λ-3): distinct real roots
        let real = [c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0)];
        assert!(cubic_discriminant(real).re > 0.0);
        // (λ-1)(λ²+1)
        let cplx = [c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        assert!(cubic_discriminant(cplx).re < 0.0);
    }

    #[test]
    fn dense_solver() {
        let a = sample();
        let rows: Vec<Vec<C64>> = (0..3).map(|i| a.row(i).to_vec()).collect();
        let x = solve_dense(rows, vec![ONE, c(0.0, 1.0), c(-2.0, 0.5)]).unwrap();
        let ax = a.mul_vec(&[x[0], x[1], x[2]]);
        assert!((ax[0] - ONE).norm() < 1e-14);
        assert!((ax[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((ax[2] - c(-2.0, 0.5)).norm() < 1e-14);
    }
}
