//! Fixed-size matrix helpers for the planar model.

use crate::scalar::Real;

/// 2×2 matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m: [[T; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn diag(a: T, b: T) -> Self {
        Self::new([[a, T::zero()], [T::zero(), b]])
    }

    /// Rotation taking body-frame coordinates to the world frame for a body
    /// pitched clockwise by `angle`: the body x axis maps to `(cos, −sin)`.
    pub fn clockwise_rotation(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new([[c, s], [-s, c]])
    }

    pub fn transpose(&self) -> Self {
        Self::new([[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        let mut out = [[T::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::new(out)
    }

    /// `R · self · Rᵀ` for a rotation `R` (whose inverse is its transpose).
    pub fn similarity(&self, rotation: &Self) -> Self {
        rotation.mul(self).mul(&rotation.transpose())
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.m[row][col]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Solves `self · x = b`; `None` when the matrix is singular.
    pub fn solve(&self, b: [T; 2]) -> Option<[T; 2]> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let x0 = (b[0] * self.m[1][1] - self.m[0][1] * b[1]) / det;
        let x1 = (self.m[0][0] * b[1] - self.m[1][0] * b[0]) / det;
        Some([x0, x1])
    }
}

/// Solves `a · x = b` for a symmetric positive-definite 3×3 matrix by
/// Cholesky factorization. Returns `None` if a pivot is not strictly positive.
#[allow(clippy::needless_range_loop)]
pub fn solve_spd3<T: Real>(a: &[[T; 3]; 3], b: &[T; 3]) -> Option<[T; 3]> {
    let mut l = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > T::zero()) || !sum.is_finite() {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // forward: L y = b
    let mut y = [T::zero(); 3];
    for i in 0..3 {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    // backward: Lᵀ x = y
    let mut x = [T::zero(); 3];
    for i in (0..3).rev() {
        let mut sum = y[i];
        for k in i + 1..3 {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    Some(x)
}

/// Smallest eigenvalue of a symmetric 3×3 matrix (trigonometric closed form).
pub fn min_eigenvalue_sym3<T: Real>(a: &[[T; 3]; 3]) -> T {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / T::lit(3.0);
    if p1 == T::zero() {
        return a[0][0].min(a[1][1]).min(a[2][2]);
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + T::two() * p1;
    let p = (p2 / T::lit(6.0)).sqrt();
    let mut b = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let shift = if i == j { q } else { T::zero() };
            b[i][j] = (a[i][j] - shift) / p;
        }
    }
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det_b / T::two()).max(-T::one()).min(T::one());
    let phi = r.acos() / T::lit(3.0);
    // eigenvalues: q + 2p cos(phi + 2πk/3); k = 1 gives the smallest
    q + T::two() * p * (phi + T::two() * T::PI() / T::lit(3.0)).cos()
}
