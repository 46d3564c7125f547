//! Small dense complex linear algebra for one- and two-qubit operators.
//!
//! Everything here works on matrices of dimension at most 4, stored row-major.
//! Two-qubit matrices use the basis order `|00>, |01>, |10>, |11>`, i.e. the
//! flat index of `|m mu>` is `2 * m + mu` with `m` the first qubit.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

const MAX_DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix of dimension 1 to 4.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension must be between 1 and {MAX_DIM}, got {dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "unsupported dimension {dim}");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from rows of real numbers.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "row of length {} in a {dim}x{dim} matrix",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::new(dim, entries)
    }

    /// Outer product `|psi><psi|`.
    pub fn projector(psi: &[Complex64]) -> Result<Self> {
        let dim = psi.len();
        let entries = psi
            .iter()
            .flat_map(|a| psi.iter().map(move |b| a * b.conj()))
            .collect();
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Entrywise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Leading `k x k` principal submatrix.
    pub fn leading_minor(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim {
            return Err(Error::InvalidArgument(format!(
                "leading minor of order {k} for a {0}x{0} matrix",
                self.dim
            )));
        }
        let mut out = Self::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] = self[(i, j)];
            }
        }
        Ok(out)
    }

    /// Transpose on the second tensor factor of a 4x4 two-qubit operator:
    /// `out[(m mu),(n nu)] = self[(m nu),(n mu)]`.
    pub fn partial_transpose_b(&self) -> Result<Self> {
        self.require_dim(4, "partial transpose")?;
        let mut out = Self::zeros(4);
        for m in 0..2 {
            for mu in 0..2 {
                for n in 0..2 {
                    for nu in 0..2 {
                        out[(2 * m + mu, 2 * n + nu)] = self[(2 * m + nu, 2 * n + mu)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Trace over the second qubit: `out[(i, j)] = sum_k self[(i k),(j k)]`.
    pub fn partial_trace_b(&self) -> Result<Self> {
        self.require_dim(4, "partial trace")?;
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = (0..2).map(|k| self[(2 * i + k, 2 * j + k)]).sum();
            }
        }
        Ok(out)
    }

    /// Trace over the first qubit: `out[(i, j)] = sum_k self[(k i),(k j)]`.
    pub fn partial_trace_a(&self) -> Result<Self> {
        self.require_dim(4, "partial trace")?;
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = (0..2).map(|k| self[(2 * k + i, 2 * k + j)]).sum();
            }
        }
        Ok(out)
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<Complex64> {
        if psi.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} against a {1}x{1} matrix",
                psi.len(),
                self.dim
            )));
        }
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            let row: Complex64 = (0..n).map(|j| self[(i, j)] * psi[j]).sum();
            acc += psi[i].conj() * row;
        }
        Ok(acc)
    }

    fn require_dim(&self, dim: usize, what: &str) -> Result<()> {
        if self.dim != dim {
            return Err(Error::InvalidArgument(format!(
                "{what} needs a {dim}x{dim} matrix, got {0}x{0}",
                self.dim
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({0}x{0}) [", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of two single-qubit operators.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "kron expects two 2x2 matrices, got {0}x{0} and {1}x{1}",
            a.dim, b.dim
        )));
    }
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    fn det(n: usize, e: &[Complex64]) -> Complex64 {
        match n {
            1 => e[0],
            2 => e[0] * e[3] - e[1] * e[2],
            _ => {
                let mut acc = ZERO;
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for col in 0..n {
                    minor.clear();
                    for r in 1..n {
                        for c in (0..n).filter(|&c| c != col) {
                            minor.push(e[r * n + c]);
                        }
                    }
                    let term = e[col] * det(n - 1, &minor);
                    if col % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc
            }
        }
    }
    det(m.dim, &m.entries)
}

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic complex
/// Jacobi rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > tolerance::EIG_INPUT_HERMITICITY {
        return Err(Error::InvalidArgument(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let n = m.dim;
    let mut h = m.clone();
    // symmetrize so that rotations act on an exactly Hermitian matrix
    for i in 0..n {
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    let threshold = tolerance::EIG_CONVERGENCE * h.frobenius_norm().max(1.0);

    for _ in 0..tolerance::EIG_MAX_SWEEPS {
        if off_diagonal_mass(&h) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut h, p, q);
            }
        }
    }

    let mut values: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn off_diagonal_mass(h: &ComplexMatrix) -> f64 {
    let n = h.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += h[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `h[(p, q)]` with the unitary `diag(.., e^{-i phi} at q, ..)`
/// followed by a real Givens rotation in the (p, q) plane.
fn jacobi_rotate(h: &mut ComplexMatrix, p: usize, q: usize) {
    let n = h.dim;
    let b = h[(p, q)];
    let g = b.norm();
    if g == 0.0 {
        return;
    }
    let phase = b / g;
    for k in 0..n {
        h[(q, k)] *= phase;
    }
    for k in 0..n {
        h[(k, q)] *= phase.conj();
    }

    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = hkp * c - hkq * s;
        h[(k, q)] = hkp * s + hkq * c;
    }
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = hpk * c - hqk * s;
        h[(q, k)] = hpk * s + hqk * c;
    }
    h[(p, q)] = ZERO;
    h[(q, p)] = ZERO;
    h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);
}

/// `<psi| rho |psi>` for a normalized `psi`.
pub fn fidelity_with_pure(psi: &[Complex64], rho: &ComplexMatrix) -> Result<f64> {
    let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > tolerance::NORMALIZATION {
        return Err(Error::InvalidArgument(format!(
            "state vector is not normalized (norm^2 = {norm_sqr})"
        )));
    }
    Ok(rho.expectation(psi)?.re)
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Amplitudes in the `|00>, |01>, |10>, |11>` basis.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |a: f64, b: f64, c: f64, d: f64| [a, b, c, d].map(|x| Complex64::new(x * h, 0.0));
        match self {
            BellState::PhiPlus => r(1.0, 0.0, 0.0, 1.0),
            BellState::PhiMinus => r(1.0, 0.0, 0.0, -1.0),
            BellState::PsiPlus => r(0.0, 1.0, 1.0, 0.0),
            BellState::PsiMinus => r(0.0, 1.0, -1.0, 0.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }
}

/// A validated two-qubit density matrix: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
}

impl TwoQubitState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim != 4 {
            return Err(Error::InvalidState(format!(
                "expected a 4x4 matrix, got {0}x{0}",
                matrix.dim
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tolerance::HERMITICITY {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:e}"
            )));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > tolerance::TRACE {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix)?[0];
        if min_eig < tolerance::PSD_SLACK {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &[Complex64; 4]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(Error::InvalidArgument(format!(
                "state vector is not normalized (norm^2 = {norm_sqr})"
            )));
        }
        Self::new(ComplexMatrix::projector(psi)?)
    }

    pub fn bell(state: BellState) -> Self {
        Self::from_pure(&state.amplitudes()).expect("Bell states are normalized")
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(4).scale(Complex64::new(0.25, 0.0)),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn partial_transpose_b(&self) -> ComplexMatrix {
        self.matrix
            .partial_transpose_b()
            .expect("two-qubit state is 4x4")
    }

    pub fn partial_trace_b(&self) -> ComplexMatrix {
        self.matrix
            .partial_trace_b()
            .expect("two-qubit state is 4x4")
    }

    pub fn partial_trace_a(&self) -> ComplexMatrix {
        self.matrix
            .partial_trace_a()
            .expect("two-qubit state is 4x4")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("validated state is Hermitian")
    }

    /// `<psi| rho |psi>` for a normalized two-qubit vector.
    pub fn overlap(&self, psi: &[Complex64; 4]) -> Result<f64> {
        fidelity_with_pure(psi, &self.matrix)
    }
}
