use std::path::PathBuf;

use qcollide::correlations::{mutual_information, CorrelationRecord};
use qcollide::dynamics::{build_channel, lindblad_steady_state, steady_state as collision_steady_state, Collider, LindbladGenerator};
use qcollide::ensemble::{
    containment_check, mode_fractions, octagon_analysis, partial_extremes, records_csv, run_ensemble, summarize,
    EnsembleConfig, Field, Histogram1D, Histogram2D,
};
use qcollide::linalg::{trace_distance, ComplexMatrix};
use qcollide::model::{correlated_bath_state, effective_population, partial_swap, ModelParams, Qubit, SwapAngle, PAIR};
use qcollide::output::{csv_text, format_float, json_f64, json_f64_seq, F17};
use qcollide::thermo::{evaluate_with, otto_cop, otto_efficiency, otto_figures, Mode, OttoFigure, Scenario, ThermoRecord, CSV_HEADER};
use serde::Serialize;

use crate::output_dir::OutputDir;
use crate::spec::UnitarySpec;
use crate::{CliError, Common};

fn open(common: &Common, p: &ModelParams) -> Result<OutputDir, CliError> {
    let mut out = OutputDir::create(&common.outdir)?;
    out.write("config.toml", p.to_config_string().as_bytes())?;
    Ok(out)
}

#[derive(Serialize)]
struct Discord {
    measurement: &'static str,
    measured: &'static str,
    note: &'static str,
}

const DISCORD: Discord = Discord {
    measurement: "projective",
    measured: "S1",
    note: "optimized over projective measurements only; an upper bound on the POVM discord",
};

#[derive(Serialize)]
struct Bracket {
    #[serde(serialize_with = "json_f64")]
    lo: f64,
    #[serde(serialize_with = "json_f64")]
    hi: f64,
}

#[derive(Serialize)]
struct SignChanges {
    quantity: &'static str,
    brackets: Vec<Bracket>,
}

#[derive(Serialize)]
struct ModeChange {
    scenario: Scenario,
    #[serde(serialize_with = "json_f64")]
    lo: f64,
    #[serde(serialize_with = "json_f64")]
    hi: f64,
    from: Mode,
    to: Mode,
}

#[derive(Serialize)]
struct SweepSummary {
    params: ModelParams,
    #[serde(serialize_with = "json_f64")]
    phi_min: f64,
    #[serde(serialize_with = "json_f64")]
    phi_max: f64,
    steps: usize,
    sign_changes: Vec<SignChanges>,
    mode_changes: Vec<ModeChange>,
    #[serde(serialize_with = "json_f64")]
    min_w_complete_phi: f64,
    #[serde(serialize_with = "json_f64")]
    min_w_complete: f64,
}

fn brackets(phis: &[f64], ys: &[f64]) -> Vec<Bracket> {
    (1..ys.len())
        .filter(|&i| ys[i - 1] * ys[i] < 0.0)
        .map(|i| Bracket { lo: phis[i - 1], hi: phis[i] })
        .collect()
}

pub fn swap_sweep(common: &Common, p: &ModelParams, phi_min: f64, phi_max: f64, steps: usize) -> Result<PathBuf, CliError> {
    if steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if !(phi_max > phi_min) {
        return Err(CliError::Usage("--phi-max must exceed --phi-min".into()));
    }
    let collider = Collider::new(p)?;
    let mut phis = Vec::with_capacity(steps);
    let mut records: Vec<ThermoRecord> = Vec::with_capacity(steps);
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let phi = if i == steps - 1 { phi_max } else { phi_min + (phi_max - phi_min) * i as f64 / (steps - 1) as f64 };
        let ev = evaluate_with(&collider, p, &partial_swap(SwapAngle(phi)))?;
        let i_a1a2 = mutual_information(&ev.snapshot.bath_prepared, &PAIR, &[0])?;
        let mut row = vec![format_float(phi)];
        row.extend(ev.record.csv_fields("swap", "").into_iter().skip(2));
        row.push(format_float(effective_population(p, SwapAngle(phi), Qubit::First)));
        row.push(format_float(effective_population(p, SwapAngle(phi), Qubit::Second)));
        row.push(format_float(i_a1a2));
        rows.push(row);
        phis.push(phi);
        records.push(ev.record);
    }
    let mut header = vec!["phi"];
    header.extend(&CSV_HEADER[2..]);
    header.extend(["N1", "N2", "I_A1A2"]);

    let column = |f: fn(&ThermoRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let sign_changes = [
        ("W_partial", column(|r| r.w_partial)),
        ("Q1_partial", column(|r| r.q1_partial)),
        ("Q2_partial", column(|r| r.q2_partial)),
        ("W_complete", column(|r| r.w_complete)),
        ("Q1_complete", column(|r| r.q1_complete)),
        ("Q2_complete", column(|r| r.q2_complete)),
    ]
    .into_iter()
    .map(|(quantity, ys)| SignChanges { quantity, brackets: brackets(&phis, &ys) })
    .collect();
    let mut mode_changes = Vec::new();
    for scenario in [Scenario::Partial, Scenario::Complete] {
        for i in 1..steps {
            let (from, to) = (records[i - 1].mode(scenario), records[i].mode(scenario));
            if from != to {
                mode_changes.push(ModeChange { scenario, lo: phis[i - 1], hi: phis[i], from, to });
            }
        }
    }
    let (k_min, _) = records
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.w_complete.total_cmp(&b.1.w_complete))
        .expect("at least two steps");

    let summary = SweepSummary {
        params: *p,
        phi_min,
        phi_max,
        steps,
        sign_changes,
        mode_changes,
        min_w_complete_phi: phis[k_min],
        min_w_complete: records[k_min].w_complete,
    };
    let mut out = open(common, p)?;
    out.write("sweep.csv", csv_text(&header, rows).as_bytes())?;
    out.write_json("summary.json", &summary)?;
    out.finish("swap-sweep", None, p)
}

#[derive(Serialize)]
struct NamedStats {
    field: &'static str,
    #[serde(flatten)]
    stats: qcollide::ensemble::SummaryStats,
}

#[derive(Serialize)]
struct ModeFraction {
    mode: Mode,
    #[serde(serialize_with = "json_f64")]
    fraction: f64,
}

#[derive(Serialize)]
struct Excluded {
    index: u64,
    error: String,
}

#[derive(Serialize)]
struct EnsembleSummary {
    params: ModelParams,
    seed: u64,
    samples: u64,
    evaluated: usize,
    excluded: Vec<Excluded>,
    stats: Vec<NamedStats>,
    modes_partial: Vec<ModeFraction>,
    modes_complete: Vec<ModeFraction>,
    containment_violations: Vec<qcollide::ensemble::Violation>,
    partial_extremes: qcollide::ensemble::PartialExtremes,
    #[serde(skip_serializing_if = "Option::is_none")]
    discord: Option<Discord>,
}

fn fractions(v: Vec<(Mode, f64)>) -> Vec<ModeFraction> {
    v.into_iter().map(|(mode, fraction)| ModeFraction { mode, fraction }).collect()
}

pub fn random_ensemble(common: &Common, p: &ModelParams, samples: u64, bins: usize, correlations: bool) -> Result<PathBuf, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let mut cfg = EnsembleConfig::new(*p, samples, common.seed);
    cfg.workers = common.workers();
    cfg.compute_correlations = correlations;
    let run = run_ensemble(&cfg)?;
    if run.records.is_empty() {
        return Err(CliError::Numerical("every sample was excluded".into()));
    }
    let records = &run.records;
    let report = octagon_analysis(p)?;

    let mut fields = Field::THERMO.to_vec();
    if correlations {
        fields.extend(Field::CORRELATIONS);
    }
    let stats = fields
        .iter()
        .map(|&f| Ok(NamedStats { field: f.name(), stats: summarize(records, f)? }))
        .collect::<Result<Vec<_>, qcollide::Error>>()?;
    let summary = EnsembleSummary {
        params: *p,
        seed: common.seed,
        samples,
        evaluated: records.len(),
        excluded: run.excluded.iter().map(|e| Excluded { index: e.index, error: e.error.to_string() }).collect(),
        stats,
        modes_partial: fractions(mode_fractions(records, Scenario::Partial)?),
        modes_complete: fractions(mode_fractions(records, Scenario::Complete)?),
        containment_violations: containment_check(&report, records),
        partial_extremes: partial_extremes(p, records)?,
        discord: correlations.then_some(DISCORD),
    };

    let mut out = open(common, p)?;
    out.write("records.csv", records_csv(records, correlations).as_bytes())?;
    for f in [Field::WPartial, Field::WComplete, Field::Q1Complete, Field::Q2Complete] {
        let h = Histogram1D::new(records, f, bins, None)?;
        out.write(&format!("hist_{}.csv", f.name()), h.to_csv().as_bytes())?;
    }
    let h2 = Histogram2D::new(records, (Field::Q2Complete, Field::WComplete), (bins, bins))?;
    out.write("hist_Q2_complete_W_complete.csv", h2.to_csv().as_bytes())?;
    out.write_json("octagon.json", &report)?;
    out.write_json("summary.json", &summary)?;
    out.finish("random-ensemble", Some(common.seed), p)
}

#[derive(Serialize)]
struct LindbladSummary {
    params: ModelParams,
    #[serde(serialize_with = "json_f64")]
    phi: f64,
    #[serde(serialize_with = "json_f64_seq")]
    taus: Vec<f64>,
    #[serde(serialize_with = "json_f64_seq")]
    trace_distances: Vec<f64>,
    /// Distances shrink strictly as `tau` decreases.
    monotone: bool,
    #[serde(serialize_with = "json_f64")]
    equilibrium_distance: f64,
}

fn lindblad_distance(p: &ModelParams, phi: f64) -> Result<f64, CliError> {
    let bath = correlated_bath_state(p, &partial_swap(SwapAngle(phi)))?;
    let discrete = collision_steady_state(&build_channel(p, &bath)?)?.state;
    let continuous = lindblad_steady_state(&LindbladGenerator::new(p, SwapAngle(phi)))?;
    Ok(trace_distance(&discrete, &continuous)?)
}

pub fn lindblad_check(common: &Common, p: &ModelParams, taus: &[f64], phi: f64) -> Result<PathBuf, CliError> {
    if taus.is_empty() {
        return Err(CliError::Usage("--tau-list must not be empty".into()));
    }
    if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::Usage(format!("collision times must be positive, got {t}")));
    }
    let mut distances = Vec::with_capacity(taus.len());
    for &tau in taus {
        distances.push(lindblad_distance(&ModelParams { tau, ..*p }, phi)?);
    }
    let mut by_tau: Vec<(f64, f64)> = taus.iter().copied().zip(distances.iter().copied()).collect();
    by_tau.sort_by(|a, b| b.0.total_cmp(&a.0));
    let monotone = by_tau.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let equilibrium_distance = lindblad_distance(&ModelParams { b2: p.b1, n2: p.n1, ..*p }, 0.0)?;

    let rows = taus.iter().zip(&distances).map(|(t, d)| vec![format_float(*t), format_float(*d)]);
    let mut out = open(common, p)?;
    out.write("lindblad.csv", csv_text(&["tau", "trace_distance"], rows).as_bytes())?;
    out.write_json(
        "summary.json",
        &LindbladSummary { params: *p, phi, taus: taus.to_vec(), trace_distances: distances, monotone, equilibrium_distance },
    )?;
    out.finish("lindblad-check", None, p)
}

#[derive(Serialize)]
struct Matrix {
    re: Vec<Vec<F17>>,
    im: Vec<Vec<F17>>,
}

impl Matrix {
    fn new(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let part = |f: fn(qcollide::linalg::C64) -> f64| (0..d).map(|r| (0..d).map(|c| F17(f(m[(r, c)]))).collect()).collect();
        Self { re: part(|z| z.re), im: part(|z| z.im) }
    }
}

#[derive(Serialize)]
struct Otto {
    #[serde(serialize_with = "json_f64")]
    efficiency: f64,
    cop: Option<F17>,
    partial: Option<OttoFigure>,
    complete: Option<OttoFigure>,
}

#[derive(Serialize)]
struct SteadyReport {
    params: ModelParams,
    unitary: String,
    unitary_matrix: Matrix,
    rho: Matrix,
    #[serde(serialize_with = "json_f64")]
    residual: f64,
    spectral_gap: Option<F17>,
    thermo: ThermoRecord,
    correlations: CorrelationRecord,
    otto: Otto,
    discord: Discord,
}

pub fn steady_state(common: &Common, p: &ModelParams, spec: &UnitarySpec) -> Result<PathBuf, CliError> {
    let u = spec.unitary();
    let ev = evaluate_with(&Collider::new(p)?, p, &u)?;
    let snap = &ev.snapshot;
    let report = SteadyReport {
        params: *p,
        unitary: spec.to_string(),
        unitary_matrix: Matrix::new(u.matrix()),
        rho: Matrix::new(snap.steady.matrix()),
        residual: snap.residual,
        spectral_gap: snap.spectral_gap.map(F17),
        thermo: ev.record,
        correlations: CorrelationRecord::from_snapshot(snap)?,
        otto: Otto {
            efficiency: otto_efficiency(p),
            cop: otto_cop(p).map(F17),
            partial: otto_figures(p, &ev.record, Scenario::Partial),
            complete: otto_figures(p, &ev.record, Scenario::Complete),
        },
        discord: DISCORD,
    };
    let seed = match spec {
        UnitarySpec::Haar(s) => Some(*s),
        _ => None,
    };
    let mut out = open(common, p)?;
    out.write_json("steady_state.json", &report)?;
    out.finish("steady-state", seed, p)
}

pub fn octagon(common: &Common, p: &ModelParams) -> Result<PathBuf, CliError> {
    let report = octagon_analysis(p)?;
    let mut out = open(common, p)?;
    out.write_json("octagon.json", &report)?;
    out.finish("octagon", None, p)
}
