//! Work, heat and entropy production of the steady-state machine.
//!
//! Positive work or heat is energy flowing into the system. In the partial
//! scenario the prepared bath state `ρ'_B` is free; the complete scenario
//! charges the work of the correlating unitary and measures heat against
//! the original thermal baths.

use std::fmt;

use serde::Serialize;

use crate::dynamics::{steady_state, CollisionChannel, Collider, STEADY_RESIDUAL};
use crate::error::{Error, Result};
use crate::linalg::{kron, relative_entropy, von_neumann_entropy, ComplexMatrix, DensityMatrix, UnitaryMatrix};
use crate::output::{format_float, json_f64};
use crate::model::{
    bath_hamiltonian, correlated_bath_state, interaction_hamiltonian, product_bath_state, system_hamiltonian,
    ModelParams, Qubit, REGISTER,
};

/// Threshold below which work and heat count as zero when classifying.
pub const MODE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Partial,
    Complete,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Partial => "partial",
            Scenario::Complete => "complete",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Engine,
    Refrigerator,
    Accelerator,
    Heater,
    Degenerate,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Engine, Mode::Refrigerator, Mode::Accelerator, Mode::Heater, Mode::Degenerate];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Engine => "engine",
            Mode::Refrigerator => "refrigerator",
            Mode::Accelerator => "accelerator",
            Mode::Heater => "heater",
            Mode::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every state entering the bookkeeping for one configuration.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub params: ModelParams,
    /// `ρ_S`, the fixed point of the collision map.
    pub steady: DensityMatrix,
    pub residual: f64,
    pub spectral_gap: Option<f64>,
    /// `ρ_B`
    pub bath_thermal: DensityMatrix,
    /// `ρ'_B`
    pub bath_prepared: DensityMatrix,
    /// `ρ'_SB`
    pub joint_after: DensityMatrix,
    /// `ρ''_B = Tr_S ρ'_SB`
    pub bath_after: DensityMatrix,
}

impl Snapshot {
    /// Rejects `steady` unless it is a fixed point of `ch`.
    pub fn new(p: &ModelParams, ch: &CollisionChannel, steady: DensityMatrix) -> Result<Self> {
        let residual = ch.residual(&steady)?;
        if residual > STEADY_RESIDUAL {
            return Err(Error::NotSteady { residual });
        }
        let joint_after = ch.joint_output(&steady)?;
        let bath_after = joint_after.partial_trace(&[2, 3], &REGISTER)?;
        Ok(Self {
            params: *p,
            steady,
            residual,
            spectral_gap: None,
            bath_thermal: product_bath_state(p)?,
            bath_prepared: ch.bath_state.clone(),
            joint_after,
            bath_after,
        })
    }

    /// Solves for the steady state of `ρ'_B = u ρ_B u†`.
    pub fn solve(collider: &Collider, p: &ModelParams, u: &UnitaryMatrix) -> Result<Self> {
        let ch = collider.channel(&correlated_bath_state(p, u)?)?;
        let ss = steady_state(&ch)?;
        let mut snap = Self::new(p, &ch, ss.state)?;
        snap.spectral_gap = Some(ss.spectral_gap);
        Ok(snap)
    }

    /// `ρ_SB = ρ_S ⊗ ρ'_B`
    pub fn joint_before(&self) -> DensityMatrix {
        self.steady.tensor(&self.bath_prepared)
    }

    /// `ρ''_S = Tr_B ρ'_SB`
    pub fn system_after(&self) -> Result<DensityMatrix> {
        self.joint_after.partial_trace(&[0, 1], &REGISTER)
    }
}

fn bath_energy_change(h: &ComplexMatrix, after: &DensityMatrix, before: &DensityMatrix) -> f64 {
    h.trace_product(&(after.matrix() - before.matrix())).re
}

/// `W_partial = Tr[(H_S + H_B)(ρ'_SB − ρ_SB)]`
pub fn partial_work(snap: &Snapshot) -> Result<f64> {
    let p = &snap.params;
    let system = bath_energy_change(&system_hamiltonian(p), &snap.system_after()?, &snap.steady);
    let bath = bath_energy_change(&bath_hamiltonian(p).h_b, &snap.bath_after, &snap.bath_prepared);
    Ok(system + bath)
}

/// `−Tr[H_SB(ρ'_SB − ρ_SB)]`, equal to [`partial_work`] because the
/// collision conserves `H_S + H_B + H_SB`.
pub fn partial_work_from_interaction(snap: &Snapshot) -> Result<f64> {
    let h_sb = interaction_hamiltonian(&snap.params)?;
    let delta = snap.joint_after.matrix() - snap.joint_before().matrix();
    Ok(-h_sb.trace_product(&delta).re)
}

/// `Q⁽ⁱ⁾ = −Tr[H_Bi(ρ'_SB − ρ_SB)]`
pub fn partial_heat(snap: &Snapshot, q: Qubit) -> f64 {
    -bath_energy_change(bath_hamiltonian(&snap.params).local(q), &snap.bath_after, &snap.bath_prepared)
}

/// `W_U = Tr[H_B(ρ'_B − ρ_B)]`, the cost of preparing the correlated bath.
pub fn unitary_work(p: &ModelParams, u: &UnitaryMatrix) -> Result<f64> {
    let prepared = correlated_bath_state(p, u)?;
    Ok(bath_energy_change(&bath_hamiltonian(p).h_b, &prepared, &product_bath_state(p)?))
}

/// `Q⁽ⁱ⁾_complete = −Tr[H_Bi(ρ'_SB − ρ_S ⊗ ρ_B)]`
pub fn complete_heat(snap: &Snapshot, q: Qubit) -> f64 {
    -bath_energy_change(bath_hamiltonian(&snap.params).local(q), &snap.bath_after, &snap.bath_thermal)
}

/// `I(S:B)` of `ρ'_SB`. The joint entropy is that of `ρ_S ⊗ ρ'_B`, since
/// the collision is unitary.
pub fn system_bath_information(snap: &Snapshot) -> Result<f64> {
    let joint = von_neumann_entropy(&snap.steady) + von_neumann_entropy(&snap.bath_prepared);
    Ok(von_neumann_entropy(&snap.system_after()?) + von_neumann_entropy(&snap.bath_after) - joint)
}

/// `Σ = I(ρ'_SB) + D(ρ''_B‖ρ_ref)` with `ρ_ref = ρ'_B` (partial) or `ρ_B`
/// (complete). Infinite when `ρ''_B` leaves the support of the reference.
pub fn entropy_production(snap: &Snapshot, scenario: Scenario) -> Result<f64> {
    let reference = match scenario {
        Scenario::Partial => &snap.bath_prepared,
        Scenario::Complete => &snap.bath_thermal,
    };
    Ok(system_bath_information(snap)? + relative_entropy(&snap.bath_after, reference)?)
}

/// Per-collision thermodynamics of one configuration in both scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoRecord {
    #[serde(serialize_with = "json_f64")]
    pub w_partial: f64,
    #[serde(serialize_with = "json_f64")]
    pub q1_partial: f64,
    #[serde(serialize_with = "json_f64")]
    pub q2_partial: f64,
    #[serde(serialize_with = "json_f64")]
    pub w_u: f64,
    #[serde(serialize_with = "json_f64")]
    pub w_complete: f64,
    #[serde(serialize_with = "json_f64")]
    pub q1_complete: f64,
    #[serde(serialize_with = "json_f64")]
    pub q2_complete: f64,
    #[serde(serialize_with = "json_f64")]
    pub sigma_partial: f64,
    #[serde(serialize_with = "json_f64")]
    pub sigma_complete: f64,
    pub mode_partial: Mode,
    pub mode_complete: Mode,
}

pub const CSV_HEADER: [&str; 13] = [
    "scenario",
    "phi_or_seed",
    "W_partial",
    "Q1_partial",
    "Q2_partial",
    "W_U",
    "W_complete",
    "Q1_complete",
    "Q2_complete",
    "Sigma_partial",
    "Sigma_complete",
    "mode",
    "mode_complete",
];

impl ThermoRecord {
    pub fn from_snapshot(snap: &Snapshot, w_u: f64) -> Result<Self> {
        let w_partial = partial_work(snap)?;
        let [q1_partial, q2_partial] = Qubit::BOTH.map(|q| partial_heat(snap, q));
        let [q1_complete, q2_complete] = Qubit::BOTH.map(|q| complete_heat(snap, q));
        let mut rec = Self {
            w_partial,
            q1_partial,
            q2_partial,
            w_u,
            w_complete: w_partial + w_u,
            q1_complete,
            q2_complete,
            sigma_partial: entropy_production(snap, Scenario::Partial)?,
            sigma_complete: entropy_production(snap, Scenario::Complete)?,
            mode_partial: Mode::Degenerate,
            mode_complete: Mode::Degenerate,
        };
        let hot = snap.params.hot_bath();
        rec.mode_partial = classify_mode(&rec, Scenario::Partial, hot);
        rec.mode_complete = classify_mode(&rec, Scenario::Complete, hot);
        Ok(rec)
    }

    /// `(W, Q⁽¹⁾, Q⁽²⁾)`
    pub fn balance(&self, scenario: Scenario) -> (f64, f64, f64) {
        match scenario {
            Scenario::Partial => (self.w_partial, self.q1_partial, self.q2_partial),
            Scenario::Complete => (self.w_complete, self.q1_complete, self.q2_complete),
        }
    }

    pub fn heat(&self, scenario: Scenario, q: Qubit) -> f64 {
        let (_, q1, q2) = self.balance(scenario);
        match q {
            Qubit::First => q1,
            Qubit::Second => q2,
        }
    }

    pub fn first_law_residual(&self, scenario: Scenario) -> f64 {
        let (w, q1, q2) = self.balance(scenario);
        w + q1 + q2
    }

    pub fn mode(&self, scenario: Scenario) -> Mode {
        match scenario {
            Scenario::Partial => self.mode_partial,
            Scenario::Complete => self.mode_complete,
        }
    }

    /// Row matching [`CSV_HEADER`].
    pub fn csv_fields(&self, scenario: &str, phi_or_seed: &str) -> Vec<String> {
        let mut row = vec![scenario.to_string(), phi_or_seed.to_string()];
        row.extend(
            [
                self.w_partial,
                self.q1_partial,
                self.q2_partial,
                self.w_u,
                self.w_complete,
                self.q1_complete,
                self.q2_complete,
                self.sigma_partial,
                self.sigma_complete,
            ]
            .map(format_float),
        );
        row.push(self.mode_partial.to_string());
        row.push(self.mode_complete.to_string());
        row
    }
}

/// Operating mode from the signs of work and the bath heats; `hot` is the
/// bath with the higher temperature.
pub fn classify_mode(rec: &ThermoRecord, scenario: Scenario, hot: Qubit) -> Mode {
    let (w, _, _) = rec.balance(scenario);
    let q_hot = rec.heat(scenario, hot);
    let q_cold = rec.heat(scenario, hot.other());
    if w < -MODE_EPS {
        Mode::Engine
    } else if w <= MODE_EPS {
        Mode::Degenerate
    } else if q_cold > MODE_EPS {
        Mode::Refrigerator
    } else if q_hot > MODE_EPS {
        Mode::Accelerator
    } else if q_hot < -MODE_EPS {
        Mode::Heater
    } else {
        Mode::Degenerate
    }
}

/// `1 − B_min/B_max`
pub fn otto_efficiency(p: &ModelParams) -> f64 {
    let (lo, hi) = (p.b1.abs().min(p.b2.abs()), p.b1.abs().max(p.b2.abs()));
    1.0 - lo / hi
}

/// `B_min/|B₂ − B₁|`; absent for equal fields.
pub fn otto_cop(p: &ModelParams) -> Option<f64> {
    let gap = (p.b2 - p.b1).abs();
    (gap > 0.0).then(|| p.b1.abs().min(p.b2.abs()) / gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum OttoFigure {
    Efficiency(f64),
    Cop(f64),
}

/// Engine efficiency `|W|/Q_hot` or refrigerator COP `Q_cold/W` as
/// realized by `rec`. Absent in other modes and for a refrigerator with
/// equal fields.
pub fn otto_figures(p: &ModelParams, rec: &ThermoRecord, scenario: Scenario) -> Option<OttoFigure> {
    let hot = p.hot_bath();
    let (w, _, _) = rec.balance(scenario);
    match rec.mode(scenario) {
        Mode::Engine => Some(OttoFigure::Efficiency(w.abs() / rec.heat(scenario, hot))),
        Mode::Refrigerator if p.b1 != p.b2 => Some(OttoFigure::Cop(rec.heat(scenario, hot.other()) / w)),
        _ => None,
    }
}

/// Steady state plus bookkeeping for one bath unitary.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub snapshot: Snapshot,
    pub record: ThermoRecord,
}

pub fn evaluate_with(collider: &Collider, p: &ModelParams, u: &UnitaryMatrix) -> Result<Evaluation> {
    let snapshot = Snapshot::solve(collider, p, u)?;
    let record = ThermoRecord::from_snapshot(&snapshot, unitary_work(p, u)?)?;
    Ok(Evaluation { snapshot, record })
}

pub fn evaluate(p: &ModelParams, u: &UnitaryMatrix) -> Result<Evaluation> {
    evaluate_with(&Collider::new(p)?, p, u)
}

/// `H_S ⊗ 𝟙_B + 𝟙_S ⊗ H_B` on the register.
pub fn local_hamiltonian(p: &ModelParams) -> ComplexMatrix {
    kron(&system_hamiltonian(p), &ComplexMatrix::identity(4)) + kron(&ComplexMatrix::identity(4), &bath_hamiltonian(p).h_b)
}
