//! Small dense linear algebra: symmetric eigendecomposition by cyclic Jacobi,
//! orthonormal null-space bases, minimal-norm least squares and the isometric
//! flattening of symmetric matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{input, Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this
/// fraction of the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-14;
/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Allowed relative asymmetry of a matrix passed as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vector,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Matrix,
}

impl SymEig {
    /// V diag(f(λ)) Vᵀ.
    pub fn reassemble_with(&self, values: &Vector) -> Matrix {
        let scaled = &self.vectors * Matrix::from_diagonal(values);
        let m = scaled * self.vectors.transpose();
        symmetrize(&m)
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reassemble_with(&self.values)
    }
}

pub(crate) fn check_finite_vec(v: &Vector, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        input(format!("{what} has non-finite entries"))
    }
}

pub(crate) fn check_finite_mat(m: &Matrix, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        input(format!("{what} has non-finite entries"))
    }
}

pub(crate) fn check_dim(v: &Vector, n: usize, what: &str) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        input(format!("{what} has dimension {}, expected {n}", v.len()))
    }
}

/// ½(M + Mᵀ).
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Checks squareness, finiteness and symmetry within [`SYMMETRY_TOL`].
pub fn check_symmetric(s: &Matrix) -> Result<()> {
    if !s.is_square() {
        return input(format!("matrix is {}x{}, expected square", s.nrows(), s.ncols()));
    }
    check_finite_mat(s, "matrix")?;
    let scale = s.amax().max(1.0);
    let n = s.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (s[(i, j)] - s[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return input(format!("matrix is not symmetric at ({i},{j})"));
            }
        }
    }
    Ok(())
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigh(s: &Matrix) -> Result<SymEig> {
    check_symmetric(s)?;
    let n = s.nrows();
    let mut a = symmetrize(s);
    let mut v = Matrix::identity(n, n);
    let target = JACOBI_TOL * a.norm();

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence {
                what: "Jacobi eigensolver".into(),
                iterations: sweeps,
                residual: off_diagonal_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vectors = Matrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(i));
    }
    Ok(SymEig { values, vectors })
}

/// Orthonormal basis of a null space together with the detected rank.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// n × (n − rank) matrix with orthonormal columns.
    pub basis: Matrix,
    pub rank: usize,
}

impl NullSpace {
    pub fn full_row_rank(&self, rows: usize) -> bool {
        self.rank == rows
    }
}

/// Orthonormal basis of null(A) from a full singular value decomposition.
///
/// Rank deficiency is not an error here; the detected rank is returned and the
/// caller decides.
pub fn orthonormal_nullspace(a: &Matrix) -> Result<NullSpace> {
    check_finite_mat(a, "constraint matrix")?;
    let (m, n) = a.shape();
    if n == 0 {
        return input("constraint matrix has no columns");
    }
    if m == 0 || a.amax() == 0.0 {
        return Ok(NullSpace {
            basis: Matrix::identity(n, n),
            rank: 0,
        });
    }
    // Padding with zero rows makes the thin SVD return all n right singular vectors.
    let padded = if m < n {
        let mut p = Matrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Geometry("singular value decomposition failed".into()))?;
    let smax = svd.singular_values.max();
    let cutoff = RANK_TOL * smax;
    let null_rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    let rank = svd.singular_values.len() - null_rows.len();
    let mut basis = Matrix::zeros(n, null_rows.len());
    for (col, &i) in null_rows.iter().enumerate() {
        basis.set_column(col, &vt.row(i).transpose());
    }
    Ok(NullSpace { basis, rank })
}

/// Minimal-norm minimizer of ‖Ax − b‖ through the pseudo-inverse.
pub fn least_squares_min_norm(a: &Matrix, b: &Vector) -> Result<Vector> {
    let (m, n) = a.shape();
    if b.len() != m {
        return input(format!("right-hand side has length {}, expected {m}", b.len()));
    }
    check_finite_mat(a, "matrix")?;
    check_finite_vec(b, "right-hand side")?;
    if m == 0 || n == 0 || a.amax() == 0.0 {
        return Ok(Vector::zeros(n));
    }
    let svd = a.clone().svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| Error::Geometry("singular value decomposition failed".into()))?;
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Geometry("singular value decomposition failed".into()))?;
    let cutoff = RANK_TOL * svd.singular_values.max();
    let mut x = Vector::zeros(n);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let coef = u.column(i).dot(b) / s;
            x += vt.row(i).transpose() * coef;
        }
    }
    Ok(x)
}

/// Length of the flattening of an n × n symmetric matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Order n such that `svec_len(n) == len`.
pub fn svec_order(len: usize) -> Result<usize> {
    let mut n = 0;
    while svec_len(n) < len {
        n += 1;
    }
    if svec_len(n) == len {
        Ok(n)
    } else {
        input(format!("{len} is not the length of a flattened symmetric matrix"))
    }
}

/// Isometric flattening: lower triangle column by column, off-diagonal entries
/// scaled by √2 so that the Euclidean norm equals the Frobenius norm.
pub fn svec(s: &Matrix) -> Vector {
    let n = s.nrows();
    let mut out = Vector::zeros(svec_len(n));
    let mut k = 0;
    for j in 0..n {
        for i in j..n {
            out[k] = if i == j {
                s[(i, i)]
            } else {
                std::f64::consts::SQRT_2 * 0.5 * (s[(i, j)] + s[(j, i)])
            };
            k += 1;
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &Vector) -> Result<Matrix> {
    let n = svec_order(v.len())?;
    let mut s = Matrix::zeros(n, n);
    let mut k = 0;
    for j in 0..n {
        for i in j..n {
            if i == j {
                s[(i, i)] = v[k];
            } else {
                let x = v[k] * std::f64::consts::FRAC_1_SQRT_2;
                s[(i, j)] = x;
                s[(j, i)] = x;
            }
            k += 1;
        }
    }
    Ok(s)
}

/// Flattened identity matrix, i.e. the gradient of the trace.
pub fn svec_identity(n: usize) -> Vector {
    svec(&Matrix::identity(n, n))
}
