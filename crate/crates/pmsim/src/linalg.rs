//! Dense complex linear algebra for small multi-qubit systems.
//!
//! Everything here targets 1-4 qubits (matrices up to 16x16), so the
//! representation is a plain row-major `Vec<Complex64>` and the Hermitian
//! eigensolver is a self-contained cyclic Jacobi iteration. Determinism
//! matters more than asymptotics at these sizes.
//!
//! Index convention: qubit 0 is the leftmost tensor factor and the most
//! significant bit of the computational-basis index, so `tensor(a, b)`
//! places `a` on the high bits.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for algebraic identities (traces, Hermiticity,
/// completeness sums).
pub const TOL_ALGEBRAIC: f64 = 1e-10;

/// Absolute tolerance for results that pass through the eigensolver.
pub const TOL_EIGEN: f64 = 1e-8;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        m
    }

    /// Builds a matrix from rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// Convenience constructor from real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&lifted)
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| e * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise absolute deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise equality within an explicit absolute tolerance. Matrix
    /// comparisons never use bitwise equality.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                if (self.get(r, c) - self.get(c, r).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = self.matmul(&self.dagger()).expect("square");
        prod.approx_eq(&Self::identity(self.rows), tol)
    }
}

/// Kronecker product; `a` occupies the high (leftmost) index bits.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let va = a.get(ia, ja);
            if va == ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out.set(ia * b.rows() + ib, ja * b.cols() + jb, va * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Traces out every subsystem not listed in `keep`; kept subsystems retain
/// their original relative order. `dims` lists subsystem dimensions with
/// subsystem 0 on the most significant index bits.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(
            "partial_trace: matrix not square".into(),
        ));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "partial_trace: subsystem dims product {} but matrix dimension {}",
            total,
            m.rows()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial_trace: keep set is empty".into(),
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(
            "partial_trace: keep must be strictly increasing subsystem indices".into(),
        ));
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Decompose a flat basis index into per-subsystem digits (subsystem 0
    // most significant) and recompose full indices from kept/traced digits.
    let compose = |kept_digits: &[usize], traced_digits: &[usize]| -> usize {
        let mut idx = 0;
        let mut ki = 0;
        let mut ti = 0;
        for (s, &d) in dims.iter().enumerate() {
            let digit = if keep.contains(&s) {
                ki += 1;
                kept_digits[ki - 1]
            } else {
                ti += 1;
                traced_digits[ti - 1]
            };
            idx = idx * d + digit;
        }
        idx
    };
    let digits_of = |mut flat: usize, subsys: &[usize]| -> Vec<usize> {
        let mut out = vec![0; subsys.len()];
        for (slot, &s) in subsys.iter().enumerate().rev() {
            out[slot] = flat % dims[s];
            flat /= dims[s];
        }
        out
    };

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for r in 0..keep_dim {
        let rd = digits_of(r, keep);
        for c in 0..keep_dim {
            let cd = digits_of(c, keep);
            let mut acc = ZERO;
            for t in 0..traced_dim {
                let td = digits_of(t, &traced);
                acc += m.get(compose(&rd, &td), compose(&cd, &td));
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Hermitian eigendecomposition by cyclic Jacobi iteration.
///
/// Returns eigenvalues in ascending order and the unitary `v` whose columns
/// are the matching eigenvectors, so `m = v * diag(eigs) * v^dag`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_hermitian(TOL_ALGEBRAIC) {
        return Err(Error::InvalidMatrix(
            "hermitian_eigen: input not Hermitian".into(),
        ));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(1.0);

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a.get(p, q).norm_sqr();
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off(&a) <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let phi = apq / apq.norm();
                let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * apq.norm());
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_pq = s * phi; // R[p][q]
                let s_qp = -s * phi.conj(); // R[q][p]

                // A <- R^dag A R applied to rows/columns p and q only.
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c + aqj * s_qp.conj());
                    a.set(q, j, apj * s_pq.conj() + aqj * c);
                }
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c + aiq * s_qp);
                    a.set(i, q, aip * s_pq + aiq * c);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c + viq * s_qp);
                    v.set(i, q, vip * s_pq + viq * c);
                }
            }
        }
    }

    if off(&a) > TOL_EIGEN * scale {
        return Err(Error::NumericalIntegrity(
            "hermitian_eigen: Jacobi iteration failed to converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eig_raw: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| eig_raw[i].partial_cmp(&eig_raw[j]).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| eig_raw[i]).collect();
    let mut vs = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vs.set(row, col, v.get(row, src));
        }
    }
    Ok((eigs, vs))
}

/// A density matrix: Hermitian, unit trace, positive semidefinite (all
/// checks within explicit tolerances).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace at `TOL_ALGEBRAIC` and positivity at
    /// `TOL_EIGEN` (the eigenvalue route is itself approximate).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TOL_ALGEBRAIC, TOL_EIGEN)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64, eig_tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidMatrix("density matrix must be square".into()));
        }
        if !matrix.is_hermitian(tol) {
            return Err(Error::InvalidMatrix("density matrix not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidMatrix(format!(
                "density matrix trace {} != 1",
                tr
            )));
        }
        let (eigs, _) = hermitian_eigen(&matrix)?;
        if let Some(min) = eigs.first() {
            if *min < -eig_tol {
                return Err(Error::InvalidMatrix(format!(
                    "density matrix has negative eigenvalue {min}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Maximally mixed state on `dim` levels.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self { matrix: m }
    }

    /// Pure state |k><k| in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut m = ComplexMatrix::zeros(dim, dim);
        m.set(k, k, ONE);
        Self { matrix: m }
    }

    /// Pure state from an amplitude vector (normalized internally).
    pub fn from_state_vector(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let dim = amplitudes.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, amplitudes[r] * amplitudes[c].conj() / norm_sq);
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// A unitary matrix (`U U^dag = 1` within tolerance).
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TOL_ALGEBRAIC)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_unitary(tol) {
            return Err(Error::InvalidMatrix("matrix is not unitary".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Re(tr(rho * obs)) for a Hermitian observable; rejects non-Hermitian
/// observables and flags any imaginary residue above tolerance.
pub fn expectation(rho: &DensityMatrix, obs: &ComplexMatrix) -> Result<f64> {
    if obs.rows() != rho.dim() || obs.cols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expectation: state dimension {} vs observable {}x{}",
            rho.dim(),
            obs.rows(),
            obs.cols()
        )));
    }
    if !obs.is_hermitian(TOL_ALGEBRAIC) {
        return Err(Error::InvalidArgument(
            "expectation: observable not Hermitian".into(),
        ));
    }
    // tr(rho * obs) without forming the product matrix.
    let mut tr = ZERO;
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            tr += rho.matrix().get(i, j) * obs.get(j, i);
        }
    }
    if tr.im.abs() > TOL_ALGEBRAIC {
        return Err(Error::NumericalIntegrity(format!(
            "expectation: imaginary residue {}",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// U rho U^dag.
pub fn apply_unitary(rho: &DensityMatrix, u: &UnitaryMatrix) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "apply_unitary: state dimension {} vs unitary {}",
            rho.dim(),
            u.dim()
        )));
    }
    let m = u
        .matrix()
        .matmul(rho.matrix())?
        .matmul(&u.matrix().dagger())?;
    DensityMatrix::new(m)
}

/// Operator-sum channel: sum_k A_k rho A_k^dag. The Kraus set must satisfy
/// the completeness relation sum_k A_k^dag A_k = 1.
pub fn apply_kraus(rho: &DensityMatrix, ops: &[ComplexMatrix]) -> Result<DensityMatrix> {
    if ops.is_empty() {
        return Err(Error::InvalidArgument(
            "apply_kraus: empty Kraus set".into(),
        ));
    }
    let d = rho.dim();
    let mut completeness = ComplexMatrix::zeros(d, d);
    for op in ops {
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "apply_kraus: operator {}x{} on state of dimension {}",
                op.rows(),
                op.cols(),
                d
            )));
        }
        completeness = completeness.add(&op.dagger().matmul(op)?)?;
    }
    if !completeness.approx_eq(&ComplexMatrix::identity(d), TOL_ALGEBRAIC) {
        return Err(Error::InvalidMatrix(
            "apply_kraus: Kraus set is not complete (sum A^dag A != 1)".into(),
        ));
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for op in ops {
        out = out.add(&op.matmul(rho.matrix())?.matmul(&op.dagger())?)?;
    }
    DensityMatrix::new(out)
}

/// exp(-i h t) for Hermitian `h`, via eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<UnitaryMatrix> {
    let (eigs, v) = hermitian_eigen(h)?;
    let phases: Vec<Complex64> = eigs
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    let d = ComplexMatrix::from_diagonal(&phases);
    let m = v.matmul(&d)?.matmul(&v.dagger())?;
    UnitaryMatrix::with_tolerance(m, TOL_EIGEN)
}
