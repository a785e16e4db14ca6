//! Hamiltonians, bath preparations and the special bath unitaries.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::json_f64;
use crate::linalg::{embed, kron, pauli, unitary_exp, ComplexMatrix, DensityMatrix, UnitaryMatrix, ONE, ZERO};

/// Slot dimensions of the full register `(S₁, S₂, A₁, A₂)`.
pub const REGISTER: [usize; 4] = [2, 2, 2, 2];
/// Slot dimensions of a two-qubit subsystem.
pub const PAIR: [usize; 2] = [2, 2];

/// Physical parameters of the machine. Occupations, not temperatures, are
/// the primary bath inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(rename = "J", serialize_with = "json_f64")]
    pub j: f64,
    #[serde(rename = "Delta", serialize_with = "json_f64")]
    pub delta: f64,
    #[serde(rename = "B1", serialize_with = "json_f64")]
    pub b1: f64,
    #[serde(rename = "B2", serialize_with = "json_f64")]
    pub b2: f64,
    #[serde(serialize_with = "json_f64")]
    pub gamma: f64,
    #[serde(serialize_with = "json_f64")]
    pub n1: f64,
    #[serde(serialize_with = "json_f64")]
    pub n2: f64,
    #[serde(serialize_with = "json_f64")]
    pub tau: f64,
}

impl Default for ModelParams {
    /// The partial-swap working point: an engine at `φ = 0`.
    fn default() -> Self {
        Self { j: 1.0, delta: 1.0, b1: 0.1, b2: 0.3, gamma: 1.0, n1: 0.1, n2: 2.0, tau: 0.1 }
    }
}

impl ModelParams {
    /// Working point of the random-unitary study (`B₂ = 0.15`).
    pub fn random_unitary_point() -> Self {
        Self { b2: 0.15, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("J", self.j),
            ("Delta", self.delta),
            ("B1", self.b1),
            ("B2", self.b2),
            ("gamma", self.gamma),
            ("n1", self.n1),
            ("n2", self.n2),
            ("tau", self.tau),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be finite")));
        }
        if self.tau <= 0.0 {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        // gamma = 0 is the decoupled limit; it is allowed and surfaces later as
        // a degenerate steady state.
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if self.n1 < 0.0 || self.n2 < 0.0 {
            return Err(Error::InvalidParameter("occupations must be non-negative".into()));
        }
        Ok(())
    }

    pub fn field(&self, q: Qubit) -> f64 {
        match q {
            Qubit::First => self.b1,
            Qubit::Second => self.b2,
        }
    }

    pub fn occupation(&self, q: Qubit) -> f64 {
        match q {
            Qubit::First => self.n1,
            Qubit::Second => self.n2,
        }
    }

    /// `β_i = ln(1 + 1/n_i) / (2 B_i)`; absent when `B_i = 0` or `n_i = 0`.
    pub fn beta(&self, q: Qubit) -> Option<f64> {
        let (b, n) = (self.field(q), self.occupation(q));
        (b != 0.0 && n > 0.0).then(|| (1.0 + 1.0 / n).ln() / (2.0 * b))
    }

    pub fn temperature(&self, q: Qubit) -> Option<f64> {
        self.beta(q).map(|b| 1.0 / b)
    }

    /// The bath with the higher temperature; falls back to the larger
    /// occupation when a temperature is undefined.
    pub fn hot_bath(&self) -> Qubit {
        match (self.temperature(Qubit::First), self.temperature(Qubit::Second)) {
            (Some(t1), Some(t2)) if t1 > t2 => Qubit::First,
            (Some(_), Some(_)) => Qubit::Second,
            _ if self.n1 > self.n2 => Qubit::First,
            _ => Qubit::Second,
        }
    }

    /// Flat `key = value` text, one parameter per line.
    pub fn to_config_string(&self) -> String {
        format!(
            "J = {}\nDelta = {}\nB1 = {}\nB2 = {}\ngamma = {}\nn1 = {}\nn2 = {}\ntau = {}\n",
            self.j, self.delta, self.b1, self.b2, self.gamma, self.n1, self.n2, self.tau
        )
    }

    /// Parses a config file. Missing keys keep their default value.
    pub fn from_config_str(text: &str) -> Result<Self> {
        Self::default().merge_config_str(text)
    }

    /// Like [`ModelParams::from_config_str`], but missing keys keep their
    /// value in `self`.
    pub fn merge_config_str(&self, text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        let mut p = *self;
        for (key, value) in table {
            let v = match value {
                toml::Value::Float(f) => f,
                toml::Value::Integer(i) => i as f64,
                other => return Err(Error::Parse(format!("{key}: expected a number, got {other}"))),
            };
            let slot = match key.as_str() {
                "J" => &mut p.j,
                "Delta" => &mut p.delta,
                "B1" => &mut p.b1,
                "B2" => &mut p.b2,
                "gamma" => &mut p.gamma,
                "n1" => &mut p.n1,
                "n2" => &mut p.n2,
                "tau" => &mut p.tau,
                _ => return Err(Error::Parse(format!("unknown config key `{key}`"))),
            };
            *slot = v;
        }
        p.validate()?;
        Ok(p)
    }
}

/// Which of the two qubits (system or bath) a quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Qubit {
    First,
    Second,
}

impl Qubit {
    pub const BOTH: [Qubit; 2] = [Qubit::First, Qubit::Second];

    /// Zero-based slot within a pair.
    pub fn slot(self) -> usize {
        match self {
            Qubit::First => 0,
            Qubit::Second => 1,
        }
    }

    pub fn other(self) -> Qubit {
        match self {
            Qubit::First => Qubit::Second,
            Qubit::Second => Qubit::First,
        }
    }
}

impl TryFrom<usize> for Qubit {
    type Error = Error;

    /// One-based physical label.
    fn try_from(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Qubit::First),
            2 => Ok(Qubit::Second),
            _ => Err(Error::BadIndex { index: i, expected: "1 or 2" }),
        }
    }
}

/// Partial-swap angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapAngle(pub f64);

impl SwapAngle {
    /// Angle reduced to `[0, π)`; the bath state is π-periodic in the angle.
    pub fn canonical(self) -> f64 {
        self.0.rem_euclid(std::f64::consts::PI)
    }
}

/// `H_S = J(σx₁σx₂ + σy₁σy₂ + Δσz₁σz₂) + B₁σz₁ + B₂σz₂`
pub fn system_hamiltonian(p: &ModelParams) -> ComplexMatrix {
    let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
    let one = pauli::identity();
    let exchange = kron(&x, &x) + kron(&y, &y) + kron(&z, &z).scale(p.delta);
    exchange.scale(p.j) + kron(&z, &one).scale(p.b1) + kron(&one, &z).scale(p.b2)
}

/// `σz₁ + σz₂`
pub fn total_magnetization() -> ComplexMatrix {
    kron(&pauli::z(), &pauli::identity()) + kron(&pauli::identity(), &pauli::z())
}

/// Local bath Hamiltonians on the bath-pair space.
#[derive(Clone, Debug)]
pub struct BathHamiltonians {
    pub h_b1: ComplexMatrix,
    pub h_b2: ComplexMatrix,
    pub h_b: ComplexMatrix,
}

impl BathHamiltonians {
    pub fn local(&self, q: Qubit) -> &ComplexMatrix {
        match q {
            Qubit::First => &self.h_b1,
            Qubit::Second => &self.h_b2,
        }
    }
}

pub fn bath_hamiltonian(p: &ModelParams) -> BathHamiltonians {
    let h_b1 = kron(&pauli::z(), &pauli::identity()).scale(p.b1);
    let h_b2 = kron(&pauli::identity(), &pauli::z()).scale(p.b2);
    let h_b = &h_b1 + &h_b2;
    BathHamiltonians { h_b1, h_b2, h_b }
}

/// `√(γ(2nᵢ+1)/(2τ))`
pub fn coupling_strength(p: &ModelParams, q: Qubit) -> Result<f64> {
    if p.tau <= 0.0 {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {}", p.tau)));
    }
    Ok((p.gamma * (2.0 * p.occupation(q) + 1.0) / (2.0 * p.tau)).sqrt())
}

/// Flip-flop coupling between each system qubit and its flying qubit, on
/// the full register.
pub fn interaction_hamiltonian(p: &ModelParams) -> Result<ComplexMatrix> {
    let mut h = ComplexMatrix::zeros(16);
    for q in Qubit::BOTH {
        let g = coupling_strength(p, q)?;
        let (s, a) = (q.slot(), 2 + q.slot());
        for op in [pauli::x(), pauli::y()] {
            let term = &embed(&op, s, &REGISTER)? * &embed(&op, a, &REGISTER)?;
            h = h + term.scale(g);
        }
    }
    Ok(h)
}

/// `H_S + H_B + H_SB` on the full register.
pub fn total_hamiltonian(p: &ModelParams) -> Result<ComplexMatrix> {
    let hs = kron(&system_hamiltonian(p), &ComplexMatrix::identity(4));
    let hb = kron(&ComplexMatrix::identity(4), &bath_hamiltonian(p).h_b);
    Ok(hs + hb + interaction_hamiltonian(p)?)
}

/// `½[𝟙 − σ_z/(1+2n)]`: populations `n/(1+2n)` on `σ_z=+1` and
/// `(1+n)/(1+2n)` on `σ_z=−1`.
pub fn thermal_qubit(n: f64) -> Result<DensityMatrix> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("occupation must be a finite non-negative number, got {n}")));
    }
    let z = 1.0 + 2.0 * n;
    DensityMatrix::diagonal(&[n / z, (1.0 + n) / z])
}

/// `ρ_B = ρ_th(n₁) ⊗ ρ_th(n₂)`
pub fn product_bath_state(p: &ModelParams) -> Result<DensityMatrix> {
    Ok(thermal_qubit(p.n1)?.tensor(&thermal_qubit(p.n2)?))
}

/// `S_φ = exp{−i(φ/2)(σx₁σy₂ − σy₁σx₂)}` on the bath pair.
pub fn partial_swap(phi: SwapAngle) -> UnitaryMatrix {
    let generator = kron(&pauli::x(), &pauli::y()) - kron(&pauli::y(), &pauli::x());
    unitary_exp(&generator.scale(0.5), phi.0).expect("swap generator is Hermitian")
}

/// `ρ'_B = U ρ_B U†`
pub fn correlated_bath_state(p: &ModelParams, u: &UnitaryMatrix) -> Result<DensityMatrix> {
    if u.dim() != 4 {
        return Err(Error::Dimension(format!("bath unitary must be 4x4, got {}x{}", u.dim(), u.dim())));
    }
    u.conjugate(&product_bath_state(p)?)
}

/// Thermal occupation of flying qubit `q`'s marginal after `S_φ`.
pub fn effective_population(p: &ModelParams, phi: SwapAngle, q: Qubit) -> f64 {
    let sign = match q {
        Qubit::First => -1.0,
        Qubit::Second => 1.0,
    };
    let (n1, n2) = (p.n1, p.n2);
    let shift = sign * (n2 - n1) * (2.0 * phi.0).cos();
    0.5 * (n1 + n2 + 4.0 * n1 * n2 + shift) / (1.0 + n1 + n2 - shift)
}

/// Unitary that maps `diag(p)` to `diag(p[perm[0]], …, p[perm[3]])`.
pub fn permutation_unitary(perm: [usize; 4]) -> Result<UnitaryMatrix> {
    let mut seen = [false; 4];
    for &k in &perm {
        if k >= 4 || seen[k] {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..4")));
        }
        seen[k] = true;
    }
    Ok(UnitaryMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(4, |r, c| {
        if perm[r] == c {
            ONE
        } else {
            ZERO
        }
    })))
}

/// The eight population-permuting bath unitaries that leave the bath pair
/// uncorrelated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NoncorrelatingOp {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl NoncorrelatingOp {
    pub const ALL: [NoncorrelatingOp; 8] = [
        NoncorrelatingOp::I,
        NoncorrelatingOp::II,
        NoncorrelatingOp::III,
        NoncorrelatingOp::IV,
        NoncorrelatingOp::V,
        NoncorrelatingOp::VI,
        NoncorrelatingOp::VII,
        NoncorrelatingOp::VIII,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NoncorrelatingOp::I => "I",
            NoncorrelatingOp::II => "II",
            NoncorrelatingOp::III => "III",
            NoncorrelatingOp::IV => "IV",
            NoncorrelatingOp::V => "V",
            NoncorrelatingOp::VI => "VI",
            NoncorrelatingOp::VII => "VII",
            NoncorrelatingOp::VIII => "VIII",
        }
    }

    /// Entry `k` is the index of the original population that ends up in
    /// basis state `k`.
    pub fn permutation(self) -> [usize; 4] {
        match self {
            NoncorrelatingOp::I => [0, 1, 2, 3],
            NoncorrelatingOp::II => [0, 2, 1, 3],
            NoncorrelatingOp::III => [1, 0, 3, 2],
            NoncorrelatingOp::IV => [1, 3, 0, 2],
            NoncorrelatingOp::V => [2, 0, 3, 1],
            NoncorrelatingOp::VI => [2, 3, 0, 1],
            NoncorrelatingOp::VII => [3, 1, 2, 0],
            NoncorrelatingOp::VIII => [3, 2, 1, 0],
        }
    }

    /// The operation applying the total swap after this one lands on the
    /// opposite octagon vertex.
    pub fn opposite(self) -> NoncorrelatingOp {
        match self {
            NoncorrelatingOp::I => NoncorrelatingOp::II,
            NoncorrelatingOp::II => NoncorrelatingOp::I,
            NoncorrelatingOp::III => NoncorrelatingOp::IV,
            NoncorrelatingOp::IV => NoncorrelatingOp::III,
            NoncorrelatingOp::V => NoncorrelatingOp::VI,
            NoncorrelatingOp::VI => NoncorrelatingOp::V,
            NoncorrelatingOp::VII => NoncorrelatingOp::VIII,
            NoncorrelatingOp::VIII => NoncorrelatingOp::VII,
        }
    }

    /// Products of `𝟙`, `σx₁`, `σx₂` and the total swap `S_{π/2}`.
    pub fn unitary(self) -> UnitaryMatrix {
        let one = UnitaryMatrix::identity(2);
        let x = UnitaryMatrix::from_matrix_unchecked(pauli::x());
        let swap = partial_swap(SwapAngle(FRAC_PI_2));
        let flip2 = one.tensor(&x);
        let flip1 = x.tensor(&one);
        let flip12 = x.tensor(&x);
        match self {
            NoncorrelatingOp::I => UnitaryMatrix::identity(4),
            NoncorrelatingOp::II => swap,
            NoncorrelatingOp::III => flip2,
            NoncorrelatingOp::IV => swap.then_after(&flip2),
            NoncorrelatingOp::V => swap.then_after(&flip1),
            NoncorrelatingOp::VI => flip1,
            NoncorrelatingOp::VII => swap.then_after(&flip12),
            NoncorrelatingOp::VIII => flip12,
        }
    }
}

impl fmt::Display for NoncorrelatingOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NoncorrelatingOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|op| op.label() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown operation label `{s}` (expected I..VIII)")))
    }
}
