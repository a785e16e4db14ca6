//! Mutual information, concurrence and projective quantum discord.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, partial_trace, pauli, von_neumann_entropy, ComplexMatrix, DensityMatrix, C64,
};
use crate::model::{permutation_unitary, Qubit, PAIR};
use crate::output::{format_float, json_f64};
use crate::thermo::{system_bath_information, Snapshot};

/// `I = S(ρ_{O1}) + S(ρ_{O2}) − S(ρ)` where `O1` holds the slots in
/// `first` and `O2` the rest.
pub fn mutual_information(rho: &DensityMatrix, layout: &[usize], first: &[usize]) -> Result<f64> {
    let n = layout.len();
    let mut seen = vec![false; n];
    for &s in first {
        if s >= n || seen[s] {
            return Err(Error::BadIndex { index: s, expected: "distinct slots of the layout" });
        }
        seen[s] = true;
    }
    if first.is_empty() || first.len() == n {
        return Err(Error::Dimension("bipartition needs two non-empty parts".into()));
    }
    let second: Vec<usize> = (0..n).filter(|s| !seen[*s]).collect();
    let a = rho.partial_trace(first, layout)?;
    let b = rho.partial_trace(&second, layout)?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho))
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!("two-qubit state required, got dimension {}", rho.dim())));
    }
    Ok(())
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, with `λᵢ²` the
/// eigenvalues of `√ρ ρ̃ √ρ` and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = kron(&pauli::y(), &pauli::y());
    let flipped = &yy * &rho.matrix().conj() * &yy;
    let root = hermitian_eig(rho.matrix())?.apply(|x| C64::new(x.max(0.0).sqrt(), 0.0));
    let r = (&root * &flipped * &root).hermitian_part();
    let mut lambdas: Vec<f64> = hermitian_eig(&r)?.values.iter().map(|x| x.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Spherical grid plus local refinement used to search measurement
/// directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSearch {
    pub polar_points: usize,
    pub azimuth_points: usize,
    pub refine: bool,
    /// Objective spread at which the simplex stops.
    pub tolerance: f64,
}

impl Default for MeasurementSearch {
    fn default() -> Self {
        Self { polar_points: 60, azimuth_points: 120, refine: true, tolerance: 1e-8 }
    }
}

impl MeasurementSearch {
    pub fn grid_only(polar_points: usize, azimuth_points: usize) -> Self {
        Self { polar_points, azimuth_points, refine: false, tolerance: 1e-8 }
    }

    /// Polar grid includes both poles; azimuth grid spans `[0, 2π]`
    /// inclusive so that halving the spacing nests the grids.
    fn angles(&self) -> (Vec<f64>, Vec<f64>) {
        let spread = |n: usize, span: f64| -> Vec<f64> {
            if n <= 1 {
                vec![0.0]
            } else {
                (0..n).map(|k| span * k as f64 / (n - 1) as f64).collect()
            }
        };
        (spread(self.polar_points, std::f64::consts::PI), spread(self.azimuth_points, std::f64::consts::TAU))
    }
}

/// The unmeasured qubit's reduced state and the correlation blocks
/// `Tᵢ = Tr_m[(σᵢ ⊗ 𝟙) ρ]`, with the measured qubit moved to the front.
struct MeasurementData {
    reduced: [[C64; 2]; 2],
    blocks: [[[C64; 2]; 2]; 3],
}

impl MeasurementData {
    fn new(rho: &DensityMatrix, measured: Qubit) -> Result<Self> {
        let m = match measured {
            Qubit::First => rho.matrix().clone(),
            Qubit::Second => permutation_unitary([0, 2, 1, 3])?.conjugate_matrix(rho.matrix()),
        };
        let one = pauli::identity();
        let block = |op: &ComplexMatrix| -> Result<[[C64; 2]; 2]> {
            let t = partial_trace(&(&kron(op, &one) * &m), &[1], &PAIR)?;
            Ok([[t[(0, 0)], t[(0, 1)]], [t[(1, 0)], t[(1, 1)]]])
        };
        Ok(Self { reduced: block(&one)?, blocks: [block(&pauli::x())?, block(&pauli::y())?, block(&pauli::z())?] })
    }

    /// `Σ± q± S(ρ±)` after projecting the measured qubit on `±n̂(θ, φ)`.
    fn conditional_entropy(&self, theta: f64, phi: f64) -> f64 {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let mut total = 0.0;
        for sign in [1.0, -1.0] {
            let mut m = [[C64::new(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    let corr = n[0] * self.blocks[0][r][c] + n[1] * self.blocks[1][r][c] + n[2] * self.blocks[2][r][c];
                    m[r][c] = 0.5 * (self.reduced[r][c] + sign * corr);
                }
            }
            total += weighted_entropy(m);
        }
        total
    }
}

/// `q S(M/q)` for a 2x2 positive block `M` of trace `q`.
fn weighted_entropy(m: [[C64; 2]; 2]) -> f64 {
    let (a, d) = (m[0][0].re, m[1][1].re);
    let q = a + d;
    if q <= 0.0 {
        return 0.0;
    }
    let split = ((a - d).powi(2) + 4.0 * m[0][1].norm_sqr()).sqrt();
    [(q + split) / 2.0, (q - split) / 2.0]
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * (l / q).ln())
        .sum()
}

/// Two-dimensional Nelder–Mead minimization from an initial simplex.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, tolerance: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&f);
    for _ in 0..2000 {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let size = (simplex[1][0] - simplex[0][0]).abs().max((simplex[2][1] - simplex[0][1]).abs())
            .max((simplex[1][1] - simplex[0][1]).abs())
            .max((simplex[2][0] - simplex[0][0]).abs());
        if values[2] - values[0] <= tolerance && size <= 1e-10_f64.max(tolerance) {
            break;
        }
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let along = |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            (simplex[2], values[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < values[1] {
            (simplex[2], values[2]) = (reflected, fr);
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                (simplex[2], values[2]) = (contracted, fc);
            } else {
                for k in 1..3 {
                    simplex[k] = [(simplex[0][0] + simplex[k][0]) / 2.0, (simplex[0][1] + simplex[k][1]) / 2.0];
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    (simplex[best], values[best])
}

/// Smallest post-measurement conditional entropy of the unmeasured qubit.
fn minimal_conditional_entropy(data: &MeasurementData, search: &MeasurementSearch) -> f64 {
    let (thetas, phis) = search.angles();
    let mut candidates: Vec<(f64, [f64; 2])> = Vec::with_capacity(thetas.len() * phis.len());
    for &t in &thetas {
        for &p in &phis {
            candidates.push((data.conditional_entropy(t, p), [t, p]));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = candidates[0].0;
    if search.refine {
        let step = std::f64::consts::PI / search.polar_points.max(2) as f64;
        // a few distinct seeds guard against a shallow local basin
        for (_, start) in candidates.iter().take(3) {
            let (_, value) = nelder_mead(|x| data.conditional_entropy(x[0], x[1]), *start, step, search.tolerance);
            best = best.min(value);
        }
    }
    best
}

/// `J = S(ρ_{O2}) − min Σ qᵢ S(ρ̃ᵢ)` over projective measurements on the
/// `measured` qubit.
pub fn classical_information_with(rho: &DensityMatrix, measured: Qubit, search: &MeasurementSearch) -> Result<f64> {
    require_two_qubits(rho)?;
    let data = MeasurementData::new(rho, measured)?;
    let unmeasured = rho.partial_trace(&[measured.other().slot()], &PAIR)?;
    Ok(von_neumann_entropy(&unmeasured) - minimal_conditional_entropy(&data, search))
}

pub fn classical_information(rho: &DensityMatrix, measured: Qubit) -> Result<f64> {
    classical_information_with(rho, measured, &MeasurementSearch::default())
}

/// `D = I − J`. Restricting to projective measurements makes this an upper
/// bound on the measurement-optimal discord.
pub fn quantum_discord_with(rho: &DensityMatrix, measured: Qubit, search: &MeasurementSearch) -> Result<f64> {
    Ok(mutual_information(rho, &PAIR, &[0])? - classical_information_with(rho, measured, search)?)
}

pub fn quantum_discord(rho: &DensityMatrix, measured: Qubit) -> Result<f64> {
    quantum_discord_with(rho, measured, &MeasurementSearch::default())
}

/// Correlations between the parts of the machine at steady state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationRecord {
    /// Between the system qubits at steady state.
    #[serde(serialize_with = "json_f64")]
    pub mi_s1s2: f64,
    /// Between the flying qubits as prepared.
    #[serde(serialize_with = "json_f64")]
    pub mi_a1a2: f64,
    /// Between system and flying qubits after the collision.
    #[serde(serialize_with = "json_f64")]
    pub mi_as: f64,
    /// Measured on the first system qubit.
    #[serde(serialize_with = "json_f64")]
    pub discord_s1s2: f64,
    #[serde(serialize_with = "json_f64")]
    pub concurrence_a1a2: f64,
}

pub const CSV_HEADER: [&str; 5] = ["I_S1S2", "I_A1A2", "I_AS", "D_S1S2", "C_A1A2"];

impl CorrelationRecord {
    pub fn from_snapshot(snap: &Snapshot) -> Result<Self> {
        Ok(Self {
            mi_s1s2: mutual_information(&snap.steady, &PAIR, &[0])?,
            mi_a1a2: mutual_information(&snap.bath_prepared, &PAIR, &[0])?,
            mi_as: system_bath_information(snap)?,
            discord_s1s2: quantum_discord(&snap.steady, Qubit::First)?,
            concurrence_a1a2: concurrence(&snap.bath_prepared)?,
        })
    }

    pub fn csv_fields(&self) -> Vec<String> {
        [self.mi_s1s2, self.mi_a1a2, self.mi_as, self.discord_s1s2, self.concurrence_a1a2]
            .map(format_float)
            .to_vec()
    }
}
