//! Haar-random bath unitaries: per-sample thermodynamics, statistics, and
//! the octagon spanned by the non-correlating operations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{self, CorrelationRecord};
use crate::dynamics::Collider;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, UnitaryMatrix, C64};
use crate::model::{permutation_unitary, ModelParams, NoncorrelatingOp};
use crate::output::{csv_text, format_float, json_f64, json_f64_pairs};
use crate::thermo::{self, evaluate_with, Mode, Scenario, ThermoRecord};

/// Outward distance beyond which a point counts as outside the hull.
pub const HULL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub compute_correlations: bool,
    /// Debug hook: use this unitary for every sample instead of drawing one.
    pub force_unitary: Option<UnitaryMatrix>,
}

impl EnsembleConfig {
    pub fn new(params: ModelParams, samples: u64, seed: u64) -> Self {
        Self { params, samples, seed, workers: 1, compute_correlations: false, force_unitary: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        if let Some(u) = &self.force_unitary {
            if u.dim() != 4 {
                return Err(Error::Dimension(format!("forced unitary must be 4x4, got {}", u.dim())));
            }
        }
        Ok(())
    }
}

/// Independent random stream for sample `k`, derived from `seed` without
/// reference to any other sample.
pub fn sample_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Haar-distributed 4x4 unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix {
    let g = DMatrix::<C64>::from_fn(4, 4, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let (mut q, r) = g.qr().unpack();
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..4 {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_matrix_unchecked(ComplexMatrix::from_nalgebra(q).expect("square"))
}

/// First-row entries as `(re, im)` pairs.
pub fn fingerprint(u: &UnitaryMatrix) -> [f64; 8] {
    let m = u.matrix();
    let mut out = [0.0; 8];
    for c in 0..4 {
        out[2 * c] = m[(0, c)].re;
        out[2 * c + 1] = m[(0, c)].im;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleRecord {
    pub index: u64,
    pub fingerprint: [f64; 8],
    pub thermo: ThermoRecord,
    pub correlations: Option<CorrelationRecord>,
}

/// Samples dropped from the statistics, with the reason.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcludedSample {
    pub index: u64,
    pub error: Error,
}

#[derive(Clone, Debug)]
pub struct EnsembleRun {
    pub records: Vec<EnsembleRecord>,
    pub excluded: Vec<ExcludedSample>,
}

fn run_sample(cfg: &EnsembleConfig, collider: &Collider, k: u64) -> std::result::Result<EnsembleRecord, ExcludedSample> {
    let u = match &cfg.force_unitary {
        Some(u) => u.clone(),
        None => haar_unitary(&mut sample_rng(cfg.seed, k)),
    };
    let outcome = evaluate_with(collider, &cfg.params, &u).and_then(|ev| {
        let correlations = if cfg.compute_correlations {
            Some(CorrelationRecord::from_snapshot(&ev.snapshot)?)
        } else {
            None
        };
        Ok(EnsembleRecord { index: k, fingerprint: fingerprint(&u), thermo: ev.record, correlations })
    });
    outcome.map_err(|error| ExcludedSample { index: k, error })
}

/// Evaluates every sample on a pool of `cfg.workers` threads. Records come
/// back in sample order whatever the scheduling. Samples without a unique
/// steady state are excluded and listed, never redrawn.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleRun> {
    cfg.validate()?;
    let collider = Collider::new(&cfg.params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let results: Vec<_> =
        pool.install(|| (0..cfg.samples).into_par_iter().map(|k| run_sample(cfg, &collider, k)).collect());
    let mut run = EnsembleRun { records: Vec::with_capacity(results.len()), excluded: Vec::new() };
    for r in results {
        match r {
            Ok(rec) => run.records.push(rec),
            Err(ex) => run.excluded.push(ex),
        }
    }
    Ok(run)
}

/// A scalar column of [`EnsembleRecord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    WPartial,
    Q1Partial,
    Q2Partial,
    WU,
    WComplete,
    Q1Complete,
    Q2Complete,
    SigmaPartial,
    SigmaComplete,
    MiS1S2,
    MiA1A2,
    MiAS,
    DiscordS1S2,
    ConcurrenceA1A2,
}

impl Field {
    pub const THERMO: [Field; 9] = [
        Field::WPartial,
        Field::Q1Partial,
        Field::Q2Partial,
        Field::WU,
        Field::WComplete,
        Field::Q1Complete,
        Field::Q2Complete,
        Field::SigmaPartial,
        Field::SigmaComplete,
    ];

    pub const CORRELATIONS: [Field; 5] =
        [Field::MiS1S2, Field::MiA1A2, Field::MiAS, Field::DiscordS1S2, Field::ConcurrenceA1A2];

    pub fn name(self) -> &'static str {
        match self {
            Field::WPartial => "W_partial",
            Field::Q1Partial => "Q1_partial",
            Field::Q2Partial => "Q2_partial",
            Field::WU => "W_U",
            Field::WComplete => "W_complete",
            Field::Q1Complete => "Q1_complete",
            Field::Q2Complete => "Q2_complete",
            Field::SigmaPartial => "Sigma_partial",
            Field::SigmaComplete => "Sigma_complete",
            Field::MiS1S2 => "I_S1S2",
            Field::MiA1A2 => "I_A1A2",
            Field::MiAS => "I_AS",
            Field::DiscordS1S2 => "D_S1S2",
            Field::ConcurrenceA1A2 => "C_A1A2",
        }
    }

    pub fn get(self, r: &EnsembleRecord) -> Option<f64> {
        let t = &r.thermo;
        let c = r.correlations.as_ref();
        match self {
            Field::WPartial => Some(t.w_partial),
            Field::Q1Partial => Some(t.q1_partial),
            Field::Q2Partial => Some(t.q2_partial),
            Field::WU => Some(t.w_u),
            Field::WComplete => Some(t.w_complete),
            Field::Q1Complete => Some(t.q1_complete),
            Field::Q2Complete => Some(t.q2_complete),
            Field::SigmaPartial => Some(t.sigma_partial),
            Field::SigmaComplete => Some(t.sigma_complete),
            Field::MiS1S2 => c.map(|c| c.mi_s1s2),
            Field::MiA1A2 => c.map(|c| c.mi_a1a2),
            Field::MiAS => c.map(|c| c.mi_as),
            Field::DiscordS1S2 => c.map(|c| c.discord_s1s2),
            Field::ConcurrenceA1A2 => c.map(|c| c.concurrence_a1a2),
        }
    }
}

fn column(records: &[EnsembleRecord], field: Field) -> Result<Vec<f64>> {
    let values: Vec<f64> = records.iter().filter_map(|r| field.get(r)).collect();
    if values.is_empty() {
        return Err(Error::Empty);
    }
    Ok(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: usize,
    #[serde(serialize_with = "json_f64")]
    pub mean: f64,
    /// Sample standard deviation (`N − 1` normalization).
    #[serde(serialize_with = "json_f64")]
    pub std: f64,
    #[serde(serialize_with = "json_f64")]
    pub skewness: f64,
    #[serde(serialize_with = "json_f64")]
    pub min: f64,
    #[serde(serialize_with = "json_f64")]
    pub max: f64,
}

pub fn summarize(records: &[EnsembleRecord], field: Field) -> Result<SummaryStats> {
    let xs = column(records, field)?;
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (m2, m3) = xs.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = x - mean;
        (a + d * d, b + d * d * d)
    });
    let std = if xs.len() > 1 { (m2 / (n - 1.0)).sqrt() } else { 0.0 };
    let pop_var = m2 / n;
    let skewness = if pop_var > 0.0 { (m3 / n) / pop_var.powf(1.5) } else { 0.0 };
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats { count: xs.len(), mean, std, skewness, min, max })
}

/// Fraction of records in each mode, in [`Mode::ALL`] order.
pub fn mode_fractions(records: &[EnsembleRecord], scenario: Scenario) -> Result<Vec<(Mode, f64)>> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let n = records.len() as f64;
    Ok(Mode::ALL
        .iter()
        .map(|&m| (m, records.iter().filter(|r| r.thermo.mode(scenario) == m).count() as f64 / n))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram1D {
    pub field: Field,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

fn edges_for(values: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Vec<f64>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be at least 1".into()));
    }
    let (mut lo, mut hi) = range.unwrap_or_else(|| {
        values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
    });
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidParameter(format!("invalid histogram range [{lo}, {hi}]")));
    }
    if lo == hi {
        let pad = 0.5 * lo.abs().max(1e-300);
        lo -= pad;
        hi += pad;
    }
    let mut edges: Vec<f64> = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
    // pin the outer edges so the extreme values are never lost to rounding
    edges[bins] = hi;
    Ok(edges)
}

/// Bin of `x`; the last bin is closed on the right.
fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    if !(x >= lo && x <= hi) {
        return None;
    }
    let k = (((x - lo) / (hi - lo)) * bins as f64).floor() as usize;
    Some(k.min(bins - 1))
}

impl Histogram1D {
    pub fn new(records: &[EnsembleRecord], field: Field, bins: usize, range: Option<(f64, f64)>) -> Result<Self> {
        let xs = column(records, field)?;
        let edges = edges_for(&xs, bins, range)?;
        let mut counts = vec![0; bins];
        for x in xs {
            if let Some(k) = bin_of(&edges, x) {
                counts[k] += 1;
            }
        }
        Ok(Self { field, edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Adds counts from a histogram with identical edges.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::Dimension("histogram edges differ".into()));
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let rows = self.counts.iter().enumerate().map(|(k, c)| {
            vec![format_float(self.edges[k]), format_float(self.edges[k + 1]), c.to_string()]
        });
        csv_text(&["bin_lo", "bin_hi", "count"], rows)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram2D {
    pub fields: (Field, Field),
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major, `counts[ix][iy]`.
    pub counts: Vec<Vec<u64>>,
}

impl Histogram2D {
    pub fn new(records: &[EnsembleRecord], fields: (Field, Field), bins: (usize, usize)) -> Result<Self> {
        let pairs: Vec<(f64, f64)> =
            records.iter().filter_map(|r| Some((fields.0.get(r)?, fields.1.get(r)?))).collect();
        if pairs.is_empty() {
            return Err(Error::Empty);
        }
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let x_edges = edges_for(&xs, bins.0, None)?;
        let y_edges = edges_for(&ys, bins.1, None)?;
        let mut counts = vec![vec![0; bins.1]; bins.0];
        for (x, y) in pairs {
            if let (Some(i), Some(j)) = (bin_of(&x_edges, x), bin_of(&y_edges, y)) {
                counts[i][j] += 1;
            }
        }
        Ok(Self { fields, x_edges, y_edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        for (i, row) in self.counts.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                rows.push(vec![
                    format_float(self.x_edges[i]),
                    format_float(self.x_edges[i + 1]),
                    format_float(self.y_edges[j]),
                    format_float(self.y_edges[j + 1]),
                    c.to_string(),
                ]);
            }
        }
        csv_text(&["x_lo", "x_hi", "y_lo", "y_hi", "count"], rows)
    }
}

/// Column names of `records.csv`.
pub fn records_csv_header(with_correlations: bool) -> Vec<&'static str> {
    let mut h = vec!["sample", "u00_re", "u00_im", "u01_re", "u01_im", "u02_re", "u02_im", "u03_re", "u03_im"];
    h.extend(thermo::CSV_HEADER);
    if with_correlations {
        h.extend(correlations::CSV_HEADER);
    }
    h
}

pub fn records_csv(records: &[EnsembleRecord], with_correlations: bool) -> String {
    let rows = records.iter().map(|r| {
        let mut row = vec![r.index.to_string()];
        row.extend(r.fingerprint.map(format_float));
        row.extend(r.thermo.csv_fields("haar", &r.index.to_string()));
        if with_correlations {
            match &r.correlations {
                Some(c) => row.extend(c.csv_fields()),
                None => row.extend(std::iter::repeat_n(String::new(), correlations::CSV_HEADER.len())),
            }
        }
        row
    });
    csv_text(&records_csv_header(with_correlations), rows)
}

/// One of the 24 population permutations of the thermal bath pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermutationPoint {
    pub permutation: [usize; 4],
    /// Set when the permutation is one of the eight labeled operations.
    pub label: Option<&'static str>,
    #[serde(serialize_with = "json_f64")]
    pub q2_complete: f64,
    #[serde(serialize_with = "json_f64")]
    pub w_complete: f64,
    #[serde(serialize_with = "json_f64")]
    pub w_partial: f64,
    pub mode_complete: Mode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OctagonVertex {
    pub label: &'static str,
    pub permutation: [usize; 4],
    pub record: ThermoRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OctagonReport {
    pub params: ModelParams,
    pub vertices: Vec<OctagonVertex>,
    pub permutation_points: Vec<PermutationPoint>,
    /// Hull of the permutation points, counter-clockwise in the
    /// `(Q2_complete, W_complete)` plane.
    pub hull: Vec<[usize; 4]>,
    #[serde(serialize_with = "json_f64_pairs")]
    pub hull_points: Vec<[f64; 2]>,
    pub hull_labels: Vec<Option<&'static str>>,
    /// True when the hull vertices are exactly the eight labeled points.
    pub labeled_hull: bool,
    /// `(Q2_complete, W_complete)` of vertices I and II.
    #[serde(serialize_with = "json_f64_pairs")]
    pub otto_endpoints: Vec<[f64; 2]>,
    /// Largest `|W + η_Otto Q2|` over the two endpoints.
    #[serde(serialize_with = "json_f64")]
    pub otto_line_deviation: f64,
    /// Vertex with the most negative complete work.
    pub min_work_vertex: &'static str,
}

fn all_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Signed distance of `p` to the left of the directed line `a → b`.
fn left_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    if len == 0.0 {
        return (p[0] - a[0]).hypot(p[1] - a[1]);
    }
    cross(a, b, p) / len
}

/// Indices of the convex hull, counter-clockwise, by monotone chain. Points
/// within `tol` of an edge are not vertices.
pub fn convex_hull(points: &[[f64; 2]], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points[i][0].total_cmp(&points[j][0]).then(points[i][1].total_cmp(&points[j][1])));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let build = |order: &mut dyn Iterator<Item = usize>| {
        let mut chain: Vec<usize> = Vec::new();
        for i in order {
            while chain.len() >= 2
                && left_distance(points[chain[chain.len() - 2]], points[i], points[chain[chain.len() - 1]]) >= -tol
            {
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
        chain
    };
    let mut hull = build(&mut idx.clone().into_iter());
    hull.extend(build(&mut idx.into_iter().rev()));
    hull
}

/// Largest outward distance of `p` from the hull edges; non-positive when
/// `p` is inside.
pub fn hull_excess(hull: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = hull.len();
    (0..n).map(|k| -left_distance(hull[k], hull[(k + 1) % n], p)).fold(f64::NEG_INFINITY, f64::max)
}

pub fn octagon_analysis(p: &ModelParams) -> Result<OctagonReport> {
    let collider = Collider::new(p)?;
    let mut vertices = Vec::with_capacity(8);
    for op in NoncorrelatingOp::ALL {
        let record = evaluate_with(&collider, p, &op.unitary())?.record;
        vertices.push(OctagonVertex { label: op.label(), permutation: op.permutation(), record });
    }
    let mut permutation_points = Vec::with_capacity(24);
    for perm in all_permutations() {
        let record = evaluate_with(&collider, p, &permutation_unitary(perm)?)?.record;
        let label = NoncorrelatingOp::ALL.iter().find(|op| op.permutation() == perm).map(|op| op.label());
        permutation_points.push(PermutationPoint {
            permutation: perm,
            label,
            q2_complete: record.q2_complete,
            w_complete: record.w_complete,
            w_partial: record.w_partial,
            mode_complete: record.mode_complete,
        });
    }
    let plane: Vec<[f64; 2]> = permutation_points.iter().map(|q| [q.q2_complete, q.w_complete]).collect();
    let hull_idx = convex_hull(&plane, HULL_TOL);
    let hull: Vec<[usize; 4]> = hull_idx.iter().map(|&i| permutation_points[i].permutation).collect();
    let hull_labels: Vec<Option<&'static str>> = hull_idx.iter().map(|&i| permutation_points[i].label).collect();
    let labeled_hull = hull_labels.len() == 8 && hull_labels.iter().all(Option::is_some);

    let eta = thermo::otto_efficiency(p);
    let otto_endpoints: Vec<[f64; 2]> =
        vertices[..2].iter().map(|v| [v.record.q2_complete, v.record.w_complete]).collect();
    let otto_line_deviation = otto_endpoints.iter().map(|e| (e[1] + eta * e[0]).abs()).fold(0.0, f64::max);
    let min_work_vertex = vertices
        .iter()
        .min_by(|a, b| a.record.w_complete.total_cmp(&b.record.w_complete))
        .map(|v| v.label)
        .expect("eight vertices");
    Ok(OctagonReport {
        params: *p,
        vertices,
        hull_points: hull_idx.iter().map(|&i| plane[i]).collect(),
        permutation_points,
        hull,
        hull_labels,
        labeled_hull,
        otto_endpoints,
        otto_line_deviation,
        min_work_vertex,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub index: u64,
    #[serde(serialize_with = "json_f64")]
    pub excess: f64,
}

/// Points `(index, Q2_complete, W_complete)` lying more than [`HULL_TOL`]
/// outside the report's hull.
pub fn containment_violations(report: &OctagonReport, points: impl IntoIterator<Item = (u64, f64, f64)>) -> Vec<Violation> {
    points
        .into_iter()
        .filter_map(|(index, q2, w)| {
            let excess = hull_excess(&report.hull_points, [q2, w]);
            (excess > HULL_TOL).then_some(Violation { index, excess })
        })
        .collect()
}

pub fn containment_check(report: &OctagonReport, records: &[EnsembleRecord]) -> Vec<Violation> {
    containment_violations(report, records.iter().map(|r| (r.index, r.thermo.q2_complete, r.thermo.w_complete)))
}

/// Bounds on the partial work from the non-correlating operations, and the
/// samples that reach furthest toward them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialExtremes {
    pub lower_op: &'static str,
    #[serde(serialize_with = "json_f64")]
    pub lower: f64,
    pub upper_op: &'static str,
    #[serde(serialize_with = "json_f64")]
    pub upper: f64,
    pub sample_min: u64,
    #[serde(serialize_with = "json_f64")]
    pub sample_min_value: f64,
    pub sample_max: u64,
    #[serde(serialize_with = "json_f64")]
    pub sample_max_value: f64,
    /// Samples outside `[lower, upper]` by more than [`HULL_TOL`].
    pub outside: Vec<u64>,
}

pub fn partial_extremes(p: &ModelParams, records: &[EnsembleRecord]) -> Result<PartialExtremes> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let collider = Collider::new(p)?;
    let mut bounds = Vec::with_capacity(8);
    for op in NoncorrelatingOp::ALL {
        bounds.push((op.label(), evaluate_with(&collider, p, &op.unitary())?.record.w_partial));
    }
    let lo = *bounds.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("eight operations");
    let hi = *bounds.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("eight operations");
    let smin = records.iter().min_by(|a, b| a.thermo.w_partial.total_cmp(&b.thermo.w_partial)).expect("non-empty");
    let smax = records.iter().max_by(|a, b| a.thermo.w_partial.total_cmp(&b.thermo.w_partial)).expect("non-empty");
    let outside = records
        .iter()
        .filter(|r| r.thermo.w_partial < lo.1 - HULL_TOL || r.thermo.w_partial > hi.1 + HULL_TOL)
        .map(|r| r.index)
        .collect();
    Ok(PartialExtremes {
        lower_op: lo.0,
        lower: lo.1,
        upper_op: hi.0,
        upper: hi.1,
        sample_min: smin.index,
        sample_min_value: smin.thermo.w_partial,
        sample_max: smax.index,
        sample_max_value: smax.thermo.w_partial,
        outside,
    })
}
