//! Teleportation through a two-qubit resource state.
//!
//! The maximal fidelity reachable with a state is `(1 + N/3) / 2` where `N`
//! is the sum of the singular values of its correlation matrix; the classical
//! limit is 2/3. Independently, the standard protocol (Bell measurement on the
//! input and the first resource qubit, Pauli correction on the second) is
//! simulated exactly over a six-state 2-design and by Monte Carlo over
//! Haar-random inputs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{correlation_data, Pauli};
use crate::error::{Error, Result};
use crate::linalg::{BellState, ComplexMatrix, TwoQubitState};
use crate::tolerance;

/// Best average fidelity achievable without entanglement.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

type Qubit = [Complex64; 2];
type Op2 = [[Complex64; 2]; 2];

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Sum of the square roots of the eigenvalues of `CᵀC`.
pub fn n_of_rho(rho: &TwoQubitState) -> f64 {
    correlation_data(rho)
        .u_eigenvalues()
        .iter()
        .map(|u| u.sqrt())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityMax {
    pub n_value: f64,
    pub f_max: f64,
    pub useful: bool,
}

pub fn fidelity_max(rho: &TwoQubitState) -> FidelityMax {
    let n_value = n_of_rho(rho);
    let f_max = 0.5 * (1.0 + n_value / 3.0);
    FidelityMax {
        n_value,
        f_max,
        useful: f_max > CLASSICAL_LIMIT + tolerance::USEFULNESS,
    }
}

/// Pauli correction applied to the output qubit for each Bell outcome, in the
/// order of [`BellState::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CorrectionTable(pub [Pauli; 4]);

impl CorrectionTable {
    /// All 256 assignments in lexicographic order.
    pub fn all() -> impl Iterator<Item = CorrectionTable> {
        (0..256usize).map(|t| {
            CorrectionTable(std::array::from_fn(|k| {
                Pauli::ALL[(t >> (2 * (3 - k))) & 3]
            }))
        })
    }

    pub fn correction(&self, outcome: BellState) -> Pauli {
        let k = BellState::ALL
            .iter()
            .position(|&b| b == outcome)
            .expect("Bell outcome");
        self.0[k]
    }

    /// Labels such as `I,X,Y,Z` per outcome `Phi+, Phi-, Psi+, Psi-`.
    pub fn labels(&self) -> [&'static str; 4] {
        self.0.map(Pauli::label)
    }
}

impl std::fmt::Display for CorrectionTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = BellState::ALL
            .iter()
            .zip(self.0)
            .map(|(b, p)| format!("{}:{}", b.label(), p.label()))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// One branch of the Bell measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome {
    pub bell: BellState,
    pub probability: f64,
    /// Normalized state of the output qubit before correction.
    pub state: ComplexMatrix,
}

fn resource_entries(rho: &TwoQubitState) -> [[Complex64; 4]; 4] {
    let m = rho.matrix();
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Unnormalized output qubit for Bell outcome `bell` and input `psi`:
/// `(<B| ⊗ I)(|psi><psi| ⊗ rho)(|B> ⊗ I)` traced over the measured pair.
fn branch(resource: &[[Complex64; 4]; 4], bell: &[Complex64; 4], psi: Qubit) -> Op2 {
    // v[j] = sum_i conj(B[i j]) psi[i]
    let v: [Complex64; 2] =
        std::array::from_fn(|j| bell[j].conj() * psi[0] + bell[2 + j].conj() * psi[1]);
    let mut out = [[C0; 2]; 2];
    for (b, row) in out.iter_mut().enumerate() {
        for (bp, cell) in row.iter_mut().enumerate() {
            let mut acc = C0;
            for j in 0..2 {
                for jp in 0..2 {
                    acc += v[j] * resource[2 * j + b][2 * jp + bp] * v[jp].conj();
                }
            }
            *cell = acc;
        }
    }
    out
}

/// `<psi| P sigma P |psi>` for a Pauli correction `P`.
fn corrected_overlap(sigma: &Op2, pauli: Pauli, psi: Qubit) -> f64 {
    let p = pauli.entries();
    let w = [
        p[0][0] * psi[0] + p[0][1] * psi[1],
        p[1][0] * psi[0] + p[1][1] * psi[1],
    ];
    let mut acc = C0;
    for i in 0..2 {
        for j in 0..2 {
            acc += w[i].conj() * sigma[i][j] * w[j];
        }
    }
    acc.re
}

/// The four measurement branches for input `psi` (normalized).
pub fn protocol_outcomes(rho: &TwoQubitState, psi: [Complex64; 2]) -> Result<Vec<TeleportOutcome>> {
    let norm_sqr = psi[0].norm_sqr() + psi[1].norm_sqr();
    if (norm_sqr - 1.0).abs() > tolerance::NORMALIZATION {
        return Err(Error::InvalidArgument(format!(
            "input qubit is not normalized (norm^2 = {norm_sqr})"
        )));
    }
    let resource = resource_entries(rho);
    BellState::ALL
        .iter()
        .map(|&bell| {
            let out = branch(&resource, &bell.amplitudes(), psi);
            let probability = (out[0][0] + out[1][1]).re;
            let scale = if probability > 0.0 {
                1.0 / probability
            } else {
                0.0
            };
            let state = ComplexMatrix::new(
                2,
                vec![out[0][0], out[0][1], out[1][0], out[1][1]]
                    .into_iter()
                    .map(|z| z * scale)
                    .collect(),
            )?;
            Ok(TeleportOutcome {
                bell,
                probability,
                state,
            })
        })
        .collect()
}

/// The six Pauli eigenstates.
pub fn six_state_design() -> [Qubit; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = Complex64::new(0.0, h);
    [
        [r(1.0), r(0.0)],
        [r(0.0), r(1.0)],
        [r(h), r(h)],
        [r(h), r(-h)],
        [r(h), i],
        [r(h), -i],
    ]
}

/// Fidelity of one input with a given correction table, summed over outcomes.
fn input_fidelity(resource: &[[Complex64; 4]; 4], table: &CorrectionTable, psi: Qubit) -> f64 {
    BellState::ALL
        .iter()
        .zip(table.0)
        .map(|(bell, pauli)| {
            corrected_overlap(&branch(resource, &bell.amplitudes(), psi), pauli, psi)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub f_protocol: f64,
    pub correction_table: CorrectionTable,
}

/// Average protocol fidelity for a fixed correction table.
pub fn protocol_fidelity(rho: &TwoQubitState, table: &CorrectionTable) -> f64 {
    let resource = resource_entries(rho);
    let design = six_state_design();
    design
        .iter()
        .map(|&psi| input_fidelity(&resource, table, psi))
        .sum::<f64>()
        / design.len() as f64
}

/// Exact average fidelity of the Bell-measurement protocol, maximized over
/// all Pauli correction tables.
pub fn simulate_protocol_exact(rho: &TwoQubitState) -> ProtocolResult {
    let resource = resource_entries(rho);
    let design = six_state_design();
    // overlap[s][k][p]: input s, outcome k, correction p
    let mut overlap = [[[0.0; 4]; 4]; 6];
    for (s, &psi) in design.iter().enumerate() {
        for (k, bell) in BellState::ALL.iter().enumerate() {
            let sigma = branch(&resource, &bell.amplitudes(), psi);
            for (p, &pauli) in Pauli::ALL.iter().enumerate() {
                overlap[s][k][p] = corrected_overlap(&sigma, pauli, psi);
            }
        }
    }
    let pauli_index = |p: Pauli| Pauli::ALL.iter().position(|&q| q == p).expect("Pauli");

    let mut best: Option<ProtocolResult> = None;
    for table in CorrectionTable::all() {
        let total: f64 = (0..6)
            .map(|s| {
                (0..4)
                    .map(|k| overlap[s][k][pauli_index(table.0[k])])
                    .sum::<f64>()
            })
            .sum();
        let f = total / 6.0;
        // earlier tables win ties
        if best.is_none_or(|b| f > b.f_protocol + 1e-14) {
            best = Some(ProtocolResult {
                f_protocol: f,
                correction_table: table,
            });
        }
    }
    best.expect("256 tables")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportReport {
    pub n_value: f64,
    pub f_max: f64,
    pub useful: bool,
    pub f_protocol: f64,
    pub correction_table: CorrectionTable,
}

pub fn teleport_report(rho: &TwoQubitState) -> TeleportReport {
    let fm = fidelity_max(rho);
    let proto = simulate_protocol_exact(rho);
    TeleportReport {
        n_value: fm.n_value,
        f_max: fm.f_max,
        useful: fm.useful,
        f_protocol: proto.f_protocol,
        correction_table: proto.correction_table,
    }
}

/// Monte-Carlo estimate of the protocol fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub samples: usize,
    pub correction_table: CorrectionTable,
}

/// Samples per random stream; stream `k` of a run always covers samples
/// `k * MC_BATCH ..`, independent of the thread count.
pub const MC_BATCH: usize = 4096;

fn haar_qubit(rng: &mut ChaCha8Rng) -> Qubit {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return [
                Complex64::new(g[0] / n, g[1] / n),
                Complex64::new(g[2] / n, g[3] / n),
            ];
        }
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n * other.n) as f64 / n as f64,
        }
    }
}

/// Mean protocol fidelity over Haar-random inputs, using the best correction
/// table found by [`simulate_protocol_exact`]. Reproducible for a fixed seed.
pub fn simulate_protocol_mc(rho: &TwoQubitState, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let table = simulate_protocol_exact(rho).correction_table;
    let resource = resource_entries(rho);
    let batches = samples.div_ceil(MC_BATCH);
    let partial: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64);
            let count = MC_BATCH.min(samples - batch * MC_BATCH);
            let mut m = Moments {
                n: 0,
                mean: 0.0,
                m2: 0.0,
            };
            for _ in 0..count {
                let f = input_fidelity(&resource, &table, haar_qubit(&mut rng));
                m.n += 1;
                let delta = f - m.mean;
                m.mean += delta / m.n as f64;
                m.m2 += delta * (f - m.mean);
            }
            m
        })
        .collect();
    let total = partial.into_iter().fold(
        Moments {
            n: 0,
            mean: 0.0,
            m2: 0.0,
        },
        Moments::merge,
    );
    let variance = if total.n > 1 {
        (total.m2 / (total.n - 1) as f64).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean: total.mean,
        std_error: (variance / total.n as f64).sqrt(),
        samples: total.n,
        correction_table: table,
    })
}
