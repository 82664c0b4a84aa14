use crate::error::{Error, Result};
use crate::linalg::{solve_dense, Mat3, C64};

/// Inverse by column-wise Gaussian elimination with partial pivoting.
pub fn generic_inverse(m: &Mat3) -> Result<Mat3> {
    let rows: Vec<Vec<C64>> = (0..3).map(|i| m.row(i).to_vec()).collect();
    let mut cols = [[C64::new(0.0, 0.0); 3]; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        let mut e = vec![C64::new(0.0, 0.0); 3];
        e[j] = C64::new(1.0, 0.0);
        let x = solve_dense(rows.clone(), e).ok_or(Error::SingularSystem)?;
        col.copy_from_slice(&x);
    }
    Ok(Mat3::from_cols(cols))
}

/// Determinant as the signed sum over all six permutations.
pub fn leibniz_det(m: &Mat3) -> C64 {
    const PERMS: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
        ([1, 0, 2], -1.0),
    ];
    PERMS
        .iter()
        .map(|(p, sign)| m[(0, p[0])] * m[(1, p[1])] * m[(2, p[2])] * *sign)
        .sum()
}
