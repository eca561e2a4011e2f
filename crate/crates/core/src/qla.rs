//! Small dense complex linear algebra: Kronecker products, a cyclic Jacobi
//! Hermitian eigensolver, trace norm, partial transpose and realignment.
//!
//! Everything here is sized for bipartite systems of at most 9 levels, so
//! matrices are plain row-major `Vec`s and every operation returns a fresh
//! value.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{
    HERMITIAN_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL, PSD_TOL, SVD_ORTHO_TOL, TRACE_TOL,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `|u><v|` for column vectors `u`, `v`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Nested `[re, im]` pairs, row-major.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance; `f64::INFINITY` if the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m_ij - conj(m_ji)|`, or infinity for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows on the right", self.cols),
                got: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * m * self^dagger`.
    pub fn conjugate(&self, m: &Self) -> Result<Self> {
        self.try_mul(m)?.try_mul(&self.adjoint())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "elementwise op on mismatched shapes"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::try_mul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Kronecker product; block `(i, j)` of the result is `a_ij * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |r, c| {
        a.get(r / b.rows, c / b.cols) * b.get(r % b.rows, c % b.cols)
    })
}

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Sum of `|lambda|` over the negative eigenvalues.
    pub fn negative_mass(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|&&l| l < 0.0)
            .map(|l| -l)
            .sum()
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.rows, m.cols),
        });
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(m)?;
    Ok(jacobi(m, false)?.0)
}

/// Eigenvalues (ascending) and the unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Spectrum, ComplexMatrix)> {
    check_hermitian(m)?;
    let (spec, vecs) = jacobi(m, true)?;
    Ok((spec, vecs.expect("eigenvectors requested")))
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on a Hermitian matrix. Each rotation first removes the
/// phase of `a_pq` with a diagonal unitary, then applies the real symmetric
/// rotation that zeroes it.
fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<(Spectrum, Option<ComplexMatrix>)> {
    let n = m.rows;
    let mut a = m.data.clone();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n).data);
    let scale = m.frobenius_norm();
    let threshold = JACOBI_OFF_TOL * scale;

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;

                // a <- a J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * jpp + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * jqq;
                }
                // a <- J^dagger a
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * jpp + vkq * jqp;
                        v[k * n + q] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a, n);
        if off > threshold {
            return Err(Error::NonConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]));
    Ok((Spectrum { eigenvalues }, vectors))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// Singular values by one-sided (Hestenes) Jacobi: columns are rotated in
/// pairs until mutually orthogonal, then their norms are the singular values.
/// Unlike square roots of Gram eigenvalues, small singular values come out
/// with full relative accuracy.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    // Work on the orientation with fewer columns.
    let a = if m.cols <= m.rows {
        m.clone()
    } else {
        m.adjoint()
    };
    let (rows, cols) = (a.rows, a.cols);
    let mut c: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a.data[i * cols + j]).collect())
        .collect();
    let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    // Columns at rounding level of the whole matrix carry no direction worth orthogonalizing.
    let negligible = (SVD_ORTHO_TOL * a.frobenius_norm()).powi(2);

    let mut converged = cols < 2;
    let mut worst = 0.0;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        worst = 0.0_f64;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = norm2(&c[p]);
                let beta = norm2(&c[q]);
                let gamma: Complex64 = c[p].iter().zip(&c[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if alpha <= negligible
                    || beta <= negligible
                    || g <= SVD_ORTHO_TOL * (alpha * beta).sqrt()
                {
                    continue;
                }
                converged = false;
                worst = worst.max(g / (alpha * beta).sqrt());
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (left, right) = c.split_at_mut(q);
                for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (a, b) = (*xp, *xq * phase);
                    *xp = a * cs - b * sn;
                    *xq = a * sn + b * cs;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm: worst,
        });
    }
    Ok(c.iter().map(|v| norm2(v).sqrt()).collect())
}

/// Subsystem dimensions of a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub const QUBIT_QUTRIT: Dims = Dims { a: 2, b: 3 };
    pub const QUTRIT_QUTRIT: Dims = Dims { a: 3, b: 3 };

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    /// Lexicographic index of `|i>_A |j>_B`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.b + j
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// A bipartite density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Dims,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants, including positivity.
    pub fn new(dims: Dims, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(dims, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the shape. For values that are density matrices by construction.
    pub(crate) fn new_unchecked(dims: Dims, matrix: ComplexMatrix) -> Result<Self> {
        let n = dims.total();
        if matrix.rows != n || matrix.cols != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n} for {dims}"),
                got: format!("{}x{}", matrix.rows, matrix.cols),
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Pure product of computational basis states `|i>_A |j>_B`.
    pub fn basis_product(dims: Dims, i: usize, j: usize) -> Result<Self> {
        if i >= dims.a || j >= dims.b {
            return Err(Error::domain(format!("level ({i},{j}) outside {dims}")));
        }
        let k = dims.index(i, j);
        let n = dims.total();
        let m = ComplexMatrix::from_fn(n, n, |r, c| if r == k && c == k { ONE } else { ZERO });
        Ok(Self { dims, matrix: m })
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            dims,
            matrix: ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)),
        }
    }

    pub fn from_pure(dims: Dims, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} amplitudes", dims.total()),
                got: format!("{}", psi.len()),
            });
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::domain("state vector has zero norm"));
        }
        let m = ComplexMatrix::outer(psi, psi).scale(Complex64::new(1.0 / norm, 0.0));
        Ok(Self { dims, matrix: m })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_deviation();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "Hermiticity deviation {herm:e}"
            )));
        }
        let tr = self.matrix.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigenvalues(&self.matrix)?.min();
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min:e} is negative"
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Element in 0-based lexicographic indexing.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.matrix.get(r, c)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `sum_k w_k rho_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::domain("empty mixture"))?
            .1;
        let dims = first.dims;
        let n = dims.total();
        let mut acc = ComplexMatrix::zeros(n, n);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dims != dims {
                return Err(Error::ShapeMismatch {
                    expected: dims.to_string(),
                    got: rho.dims.to_string(),
                });
            }
            if *w < 0.0 {
                return Err(Error::domain("negative mixture weight"));
            }
            acc = &acc + &rho.matrix.scale(Complex64::new(*w, 0.0));
            total += w;
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain(format!("mixture weights sum to {total}")));
        }
        Ok(Self { dims, matrix: acc })
    }

    pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let dims = Dims {
            a: a.rows(),
            b: b.rows(),
        };
        Self::new(dims, kron(a, b))
    }
}

/// Transposes the indices of one subsystem. The result is Hermitian with
/// unit trace but in general not positive.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> ComplexMatrix {
    partial_transpose_matrix(&rho.matrix, rho.dims, subsystem)
}

/// Partial transpose of any `d_A d_B x d_A d_B` operator.
///
/// # Panics
/// If `m` is not of that shape.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    dims: Dims,
    subsystem: Subsystem,
) -> ComplexMatrix {
    let Dims { a: da, b: db } = dims;
    let n = da * db;
    assert!(m.rows == n && m.cols == n, "operator is not {n}x{n}");
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        match subsystem {
            Subsystem::A => m.get(k * db + j, i * db + l),
            Subsystem::B => m.get(i * db + l, k * db + j),
        }
    })
}

/// Realigned matrix of shape `d_A^2 x d_B^2`:
/// entry at row `(m, mu)`, column `(n, nu)` is `<m n| rho |mu nu>`.
pub fn realign(rho: &DensityMatrix) -> ComplexMatrix {
    let Dims { a: da, b: db } = rho.dims;
    let m = &rho.matrix;
    ComplexMatrix::from_fn(da * da, db * db, |r, c| {
        let (am, amu) = (r / da, r % da);
        let (bn, bnu) = (c / db, c % db);
        m.get(am * db + bn, amu * db + bnu)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_2x2() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(Dims { a: 2, b: 2 }, &[c(s), c(0.0), c(0.0), c(s)]).unwrap()
    }

    #[test]
    fn kron_identities() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(k, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_sigma_x_maps_02_to_12() {
        let sx = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let k = kron(&sx, &ComplexMatrix::identity(3));
        let mut e2 = vec![ZERO; 6];
        e2[2] = ONE;
        let col = ComplexMatrix::new(6, 1, e2).unwrap();
        let out = &k * &col;
        for i in 0..6 {
            let want = if i == 5 { ONE } else { ZERO };
            assert_eq!(out.get(i, 0), want);
        }
    }

    #[test]
    fn kron_of_damping_diagonals() {
        let m0 = ComplexMatrix::from_diagonal(&[1.0, (1.0f64 - 0.75).sqrt()]);
        let mm0 = ComplexMatrix::from_diagonal(&[1.0, 0.4f64.sqrt(), 0.55f64.sqrt()]);
        let k = kron(&m0, &mm0);
        let want = [
            1.0,
            0.4f64.sqrt(),
            0.55f64.sqrt(),
            0.25f64.sqrt(),
            0.1f64.sqrt(),
            0.1375f64.sqrt(),
        ];
        for (i, w) in want.iter().enumerate() {
            assert!((k.get(i, i).re - w).abs() < 1e-15);
        }
    }

    #[test]
    fn eigenvalues_of_small_cases() {
        let d = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        assert_eq!(
            hermitian_eigenvalues(&d).unwrap().eigenvalues,
            vec![0.5, 0.5]
        );

        let off = ComplexMatrix::from_real(2, 2, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        let s = hermitian_eigenvalues(&off).unwrap();
        assert!((s.eigenvalues[0] + 0.5).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn complex_offdiagonal_eigenvalues() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                ONE,
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                ONE,
            ],
        )
        .unwrap();
        let (s, v) = hermitian_eigen(&m).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-14);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-14);
        let lam = ComplexMatrix::from_diagonal(&s.eigenvalues);
        let back = &(&v * &lam) * &v.adjoint();
        assert!(back.max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = partial_transpose(&bell_2x2(), Subsystem::A);
        let s = hermitian_eigenvalues(&pt).unwrap();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (got, w) in s.eigenvalues.iter().zip(want) {
            assert!((got - w).abs() < 1e-14, "{:?}", s);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn trace_norm_basics() {
        assert!((trace_norm(&ComplexMatrix::identity(3)).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(4, 9)).unwrap(), 0.0);
        let r = realign(&bell_2x2());
        assert!((trace_norm(&r).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn realign_of_product_and_mixed() {
        let d = Dims { a: 3, b: 3 };
        let r = realign(&DensityMatrix::basis_product(d, 0, 0).unwrap());
        assert_eq!(r.get(0, 0), ONE);
        assert!((trace_norm(&r).unwrap() - 1.0).abs() < 1e-14);
        // Product of two I/3: Frobenius norms multiply to 1/3.
        let mixed = realign(&DensityMatrix::maximally_mixed(d));
        assert!((trace_norm(&mixed).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn realign_shape_for_qubit_qutrit() {
        let rho = DensityMatrix::maximally_mixed(Dims::QUBIT_QUTRIT);
        let r = realign(&rho);
        assert_eq!((r.rows(), r.cols()), (4, 9));
    }

    #[test]
    fn product_state_untouched_by_partial_transpose() {
        let rho = DensityMatrix::basis_product(Dims::QUBIT_QUTRIT, 0, 0).unwrap();
        assert_eq!(&partial_transpose(&rho, Subsystem::A), rho.matrix());
        assert_eq!(&partial_transpose(&rho, Subsystem::B), rho.matrix());
    }

    #[test]
    fn density_validation_catches_bad_input() {
        let bad = ComplexMatrix::from_diagonal(&[0.5, 0.6, 0.0, 0.0, 0.0, 0.0]);
        assert!(DensityMatrix::new(Dims::QUBIT_QUTRIT, bad).is_err());
        let neg = ComplexMatrix::from_diagonal(&[1.5, -0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(DensityMatrix::new(Dims::QUBIT_QUTRIT, neg).is_err());
        assert!(DensityMatrix::new(Dims::QUBIT_QUTRIT, ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert!(ComplexMatrix::from_real(1, 1, &[f64::NAN]).is_err());
        assert!(ComplexMatrix::from_real(1, 2, &[1.0]).is_err());
    }
}
