//! Correlation-matrix analysis and Bell-CHSH violation.
//!
//! Any two-qubit state decomposes as
//! `rho = (I⊗I + r·σ⊗I + I⊗s·σ + Σ c_ij σ_i⊗σ_j) / 4`. With `U = CᵀC`, the
//! largest CHSH expectation value is `2 sqrt(M)` where `M` is the sum of the
//! two largest eigenvalues of `U`; the inequality can be violated iff `M > 1`.
//!
//! [`chsh_max_numeric`] maximizes the CHSH expectation directly over
//! measurement directions and never looks at the eigenvalues of `U`, so it
//! serves as an independent check of that relation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, ComplexMatrix, TwoQubitState};
use crate::machine::MachineParameter;
use crate::tolerance;

/// Pauli operators. `σ1 = X`, `σ2 = Y`, `σ3 = Z` in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const SIGMA: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn entries(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let e = self.entries();
        ComplexMatrix::new(2, vec![e[0][0], e[0][1], e[1][0], e[1][1]]).expect("2x2")
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

/// Local Bloch vectors and the correlation matrix of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationData {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub c: [[f64; 3]; 3],
}

impl CorrelationData {
    /// `Cᵀ C`.
    pub fn u_matrix(&self) -> [[f64; 3]; 3] {
        let mut u = [[0.0; 3]; 3];
        for (i, row) in u.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.c[k][i] * self.c[k][j]).sum();
            }
        }
        u
    }

    /// Eigenvalues of `Cᵀ C`, ascending and clamped at zero.
    pub fn u_eigenvalues(&self) -> [f64; 3] {
        let u = self.u_matrix();
        let m = ComplexMatrix::from_real_rows(&u).expect("3x3");
        let eig = hermitian_eigenvalues(&m).expect("CᵀC is symmetric");
        [eig[0].max(0.0), eig[1].max(0.0), eig[2].max(0.0)]
    }

    fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let c = &self.c;
        [
            c[0][0] * v[0] + c[0][1] * v[1] + c[0][2] * v[2],
            c[1][0] * v[0] + c[1][1] * v[1] + c[1][2] * v[2],
            c[2][0] * v[0] + c[2][1] * v[1] + c[2][2] * v[2],
        ]
    }

    fn apply_transpose(&self, v: [f64; 3]) -> [f64; 3] {
        let c = &self.c;
        [
            c[0][0] * v[0] + c[1][0] * v[1] + c[2][0] * v[2],
            c[0][1] * v[0] + c[1][1] * v[1] + c[2][1] * v[2],
            c[0][2] * v[0] + c[1][2] * v[1] + c[2][2] * v[2],
        ]
    }
}

/// `Tr(a b)` without forming the product.
fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn correlation_data(rho: &TwoQubitState) -> CorrelationData {
    let m = rho.matrix();
    let id = Pauli::I.matrix();
    let expect = |op: ComplexMatrix| {
        let z = trace_of_product(m, &op);
        debug_assert!(
            z.im.abs() <= 1e-12,
            "expectation of Hermitian operator has imaginary part {}",
            z.im
        );
        z.re
    };
    let mut data = CorrelationData {
        r: [0.0; 3],
        s: [0.0; 3],
        c: [[0.0; 3]; 3],
    };
    for (i, si) in Pauli::SIGMA.iter().enumerate() {
        let si = si.matrix();
        data.r[i] = expect(kron(&si, &id).expect("2x2"));
        data.s[i] = expect(kron(&id, &si).expect("2x2"));
        for (j, sj) in Pauli::SIGMA.iter().enumerate() {
            data.c[i][j] = expect(kron(&si, &sj.matrix()).expect("2x2"));
        }
    }
    data
}

/// `{(1 - 4 xi)^2, 4 xi^2, 4 xi^2}` sorted ascending.
pub fn u_eigenvalues_closed_form(m: MachineParameter) -> [f64; 3] {
    let xi = m.xi();
    let mut u = [
        4.0 * xi * xi,
        4.0 * xi * xi,
        1.0 - 8.0 * xi + 16.0 * xi * xi,
    ];
    u.sort_by(f64::total_cmp);
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshStatus {
    Violates,
    NoViolation,
    /// `M` within the sign tolerance of 1; counted as no violation.
    Boundary,
}

/// Correlation-matrix criterion without the numerical optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorodeckiData {
    pub u: [f64; 3],
    pub m_value: f64,
    pub violates: bool,
    pub status: ChshStatus,
}

impl HorodeckiData {
    /// Largest CHSH expectation value predicted by `M`.
    pub fn chsh_analytic(&self) -> f64 {
        2.0 * self.m_value.sqrt()
    }
}

pub fn horodecki(rho: &TwoQubitState) -> HorodeckiData {
    horodecki_from(&correlation_data(rho))
}

pub(crate) fn horodecki_from(corr: &CorrelationData) -> HorodeckiData {
    let u = corr.u_eigenvalues();
    let m_value = u[1] + u[2];
    let status = if m_value > 1.0 + tolerance::SIGN {
        ChshStatus::Violates
    } else if m_value < 1.0 - tolerance::SIGN {
        ChshStatus::NoViolation
    } else {
        ChshStatus::Boundary
    };
    HorodeckiData {
        u,
        m_value,
        violates: status == ChshStatus::Violates,
        status,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellReport {
    pub u: [f64; 3],
    pub m_value: f64,
    pub chsh_max_numeric: f64,
    pub violates: bool,
    pub status: ChshStatus,
}

/// Tolerance used by [`bell_report`] for the numerical CHSH maximum.
pub const REPORT_CHSH_TOL: f64 = 1e-8;

pub fn bell_report(rho: &TwoQubitState) -> Result<BellReport> {
    let corr = correlation_data(rho);
    let h = horodecki_from(&corr);
    let opt = maximize_chsh(&corr, REPORT_CHSH_TOL, &ChshOptions::default())?;
    Ok(BellReport {
        u: h.u,
        m_value: h.m_value,
        chsh_max_numeric: opt.value,
        violates: h.violates,
        status: h.status,
    })
}

/// Grid resolution and iteration limits for the CHSH optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshOptions {
    pub azimuth_steps: usize,
    pub polar_steps: usize,
    pub coordinate_passes: usize,
    pub max_iterations: usize,
}

impl Default for ChshOptions {
    fn default() -> Self {
        Self {
            azimuth_steps: 24,
            polar_steps: 12,
            coordinate_passes: 50,
            max_iterations: 10_000,
        }
    }
}

/// Measurement directions attaining the numerical CHSH maximum
/// `a·C(b + b') + a'·C(b - b')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshOptimum {
    pub value: f64,
    pub a: [f64; 3],
    pub a_prime: [f64; 3],
    pub b: [f64; 3],
    pub b_prime: [f64; 3],
    pub iterations: usize,
}

/// Numerical maximum of `Tr(rho B)` over CHSH operators `B`.
pub fn chsh_max_numeric(rho: &TwoQubitState, tol: f64) -> Result<ChshOptimum> {
    maximize_chsh(&correlation_data(rho), tol, &ChshOptions::default())
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Normalizes `v`, keeping `fallback` when `v` vanishes.
fn normalized_or(v: [f64; 3], fallback: [f64; 3]) -> [f64; 3] {
    let n = norm(v);
    if n > 1e-300 {
        [v[0] / n, v[1] / n, v[2] / n]
    } else {
        fallback
    }
}

/// CHSH value with Alice's directions chosen optimally for fixed `b, b'`.
fn value_for_bob(corr: &CorrelationData, b: [f64; 3], bp: [f64; 3]) -> f64 {
    norm(corr.apply(add(b, bp))) + norm(corr.apply(sub(b, bp)))
}

fn chsh_value(corr: &CorrelationData, a: [f64; 3], ap: [f64; 3], b: [f64; 3], bp: [f64; 3]) -> f64 {
    dot(a, corr.apply(add(b, bp))) + dot(ap, corr.apply(sub(b, bp)))
}

pub fn maximize_chsh(corr: &CorrelationData, tol: f64, opts: &ChshOptions) -> Result<ChshOptimum> {
    if tol.is_nan() || tol < tolerance::CHSH_MIN_TOL {
        return Err(Error::InvalidArgument(format!(
            "CHSH tolerance must be at least {:e}, got {tol}",
            tolerance::CHSH_MIN_TOL
        )));
    }

    // coarse grid over Bob's two directions
    let directions: Vec<(f64, f64)> = (0..opts.polar_steps)
        .flat_map(|p| {
            let theta = PI * (p as f64 + 0.5) / opts.polar_steps as f64;
            (0..opts.azimuth_steps)
                .map(move |q| (theta, 2.0 * PI * q as f64 / opts.azimuth_steps as f64))
        })
        .collect();
    let vectors: Vec<[f64; 3]> = directions.iter().map(|&(t, p)| unit(t, p)).collect();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, &b) in vectors.iter().enumerate() {
        for (j, &bp) in vectors.iter().enumerate() {
            let v = value_for_bob(corr, b, bp);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }

    // coordinate descent on (theta_b, phi_b, theta_b', phi_b')
    let mut params = [
        directions[best.1].0,
        directions[best.1].1,
        directions[best.2].0,
        directions[best.2].1,
    ];
    let eval = |p: &[f64; 4]| value_for_bob(corr, unit(p[0], p[1]), unit(p[2], p[3]));
    let mut value = eval(&params);
    let mut step = PI / opts.polar_steps as f64;
    for _ in 0..opts.coordinate_passes {
        let mut improved = false;
        for k in 0..4 {
            for dir in [1.0, -1.0] {
                let mut trial = params;
                trial[k] += dir * step;
                let v = eval(&trial);
                if v > value {
                    params = trial;
                    value = v;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    // alternating closed-form updates of both parties' directions
    let mut b = unit(params[0], params[1]);
    let mut bp = unit(params[2], params[3]);
    let mut a = normalized_or(corr.apply(add(b, bp)), [0.0, 0.0, 1.0]);
    let mut ap = normalized_or(corr.apply(sub(b, bp)), [1.0, 0.0, 0.0]);
    let mut value = chsh_value(corr, a, ap, b, bp);
    let stop = (tol * 1e-6).max(1e-15);
    for iteration in 1..=opts.max_iterations {
        b = normalized_or(corr.apply_transpose(add(a, ap)), b);
        bp = normalized_or(corr.apply_transpose(sub(a, ap)), bp);
        a = normalized_or(corr.apply(add(b, bp)), a);
        ap = normalized_or(corr.apply(sub(b, bp)), ap);
        let next = chsh_value(corr, a, ap, b, bp);
        let gain = next - value;
        value = value.max(next);
        if gain.abs() <= stop {
            return Ok(ChshOptimum {
                value,
                a,
                a_prime: ap,
                b,
                b_prime: bp,
                iterations: iteration,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        best: value,
    })
}
