//! Single-collision map, its fixed point, and the continuous-time limit.

use nalgebra::{DMatrix, DVector, Schur};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    kron, pauli, unitary_exp, ComplexMatrix, DensityMatrix, UnitaryMatrix, C64, ONE, ZERO,
};
use crate::model::{system_hamiltonian, total_hamiltonian, ModelParams, SwapAngle, REGISTER};

/// Eigenvalues within this distance of unit modulus count as fixed points.
pub const UNIT_MODULUS_TOL: f64 = 1e-8;
/// Largest accepted `‖Φ(ρ) − ρ‖_max` for a steady state.
pub const STEADY_RESIDUAL: f64 = 1e-10;
/// Iteration cap for the power-iteration cross-check.
pub const POWER_ITERATION_CAP: usize = 1_000_000;

/// Precomputed collision unitary for one parameter set. Channels for
/// different bath preparations share it.
#[derive(Clone, Debug)]
pub struct Collider {
    collision_unitary: UnitaryMatrix,
}

impl Collider {
    pub fn new(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        Self::from_hamiltonian(&total_hamiltonian(p)?, p.tau)
    }

    /// Collision generated by an arbitrary Hermitian `h_tot` on the full
    /// register.
    pub fn from_hamiltonian(h_tot: &ComplexMatrix, tau: f64) -> Result<Self> {
        if h_tot.dim() != 16 {
            return Err(Error::Dimension(format!("collision Hamiltonian must be 16x16, got {}", h_tot.dim())));
        }
        Ok(Self { collision_unitary: unitary_exp(h_tot, tau)? })
    }

    pub fn collision_unitary(&self) -> &UnitaryMatrix {
        &self.collision_unitary
    }

    pub fn channel(&self, bath: &DensityMatrix) -> Result<CollisionChannel> {
        if bath.dim() != 4 {
            return Err(Error::Dimension(format!("bath state must be 4x4, got {}", bath.dim())));
        }
        let superoperator = assemble_superoperator(self.collision_unitary.matrix(), bath.matrix());
        Ok(CollisionChannel {
            collision_unitary: self.collision_unitary.clone(),
            bath_state: bath.clone(),
            superoperator,
        })
    }
}

/// The map `ρ_S ↦ Tr_B[U (ρ_S ⊗ ρ'_B) U†]` together with its matrix on
/// column-stacked system states.
#[derive(Clone, Debug)]
pub struct CollisionChannel {
    pub collision_unitary: UnitaryMatrix,
    pub bath_state: DensityMatrix,
    pub superoperator: ComplexMatrix,
}

pub fn build_channel(p: &ModelParams, bath: &DensityMatrix) -> Result<CollisionChannel> {
    Collider::new(p)?.channel(bath)
}

/// Image of each system basis matrix `|j⟩⟨k|`, using only the 16x4 column
/// blocks of `U` that the product input touches.
fn assemble_superoperator(u: &ComplexMatrix, bath: &ComplexMatrix) -> ComplexMatrix {
    let u = u.as_nalgebra();
    let r = bath.as_nalgebra();
    let blocks: Vec<DMatrix<C64>> = (0..4).map(|j| u.columns(4 * j, 4).into_owned()).collect();
    let weighted: Vec<DMatrix<C64>> = blocks.iter().map(|b| b * r).collect();
    let mut sup = DMatrix::<C64>::zeros(16, 16);
    for j in 0..4 {
        for k in 0..4 {
            let (left, right) = (&weighted[j], &blocks[k]);
            let col = j + 4 * k;
            for a in 0..4 {
                for b in 0..4 {
                    let mut acc = ZERO;
                    for g in 0..4 {
                        let (ra, rb) = (4 * a + g, 4 * b + g);
                        for m in 0..4 {
                            acc += left[(ra, m)] * right[(rb, m)].conj();
                        }
                    }
                    sup[(a + 4 * b, col)] = acc;
                }
            }
        }
    }
    ComplexMatrix::from_nalgebra(sup).expect("square")
}

impl CollisionChannel {
    /// One collision via the superoperator.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 4 {
            return Err(Error::Dimension(format!("system state must be 4x4, got {}", rho.dim())));
        }
        let v = self.superoperator.as_nalgebra() * rho.matrix().vectorize();
        Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_vectorized(&v)?))
    }

    /// `ρ'_SB = U (ρ_S ⊗ ρ'_B) U†`
    pub fn joint_output(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 4 {
            return Err(Error::Dimension(format!("system state must be 4x4, got {}", rho.dim())));
        }
        self.collision_unitary.conjugate(&rho.tensor(&self.bath_state))
    }

    /// One collision by forming the joint state and tracing out the bath.
    pub fn apply_direct(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.joint_output(rho)?.partial_trace(&[0, 1], &REGISTER)
    }

    /// `Σ_jk |j⟩⟨k| ⊗ Φ(|j⟩⟨k|)`
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let sup = self.superoperator.as_nalgebra();
        let mut choi = ComplexMatrix::zeros(16);
        for j in 0..4 {
            for k in 0..4 {
                let image = ComplexMatrix::from_vectorized(&sup.column(j + 4 * k).into_owned()).expect("16 entries");
                let unit = ComplexMatrix::from_fn(4, |r, c| if (r, c) == (j, k) { ONE } else { ZERO });
                choi = choi + kron(&unit, &image);
            }
        }
        choi
    }

    /// `‖Φ(ρ) − ρ‖_max`
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok((self.apply(rho)?.matrix() - rho.matrix()).max_abs())
    }

    /// Superoperator eigenvalues, largest modulus first.
    pub fn spectrum(&self) -> Result<Vec<C64>> {
        let mut ev = eigenvalues(self.superoperator.as_nalgebra())?;
        ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        Ok(ev)
    }
}

pub fn apply_channel(ch: &CollisionChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::NonConvergence { residual: f64::NAN, iterations: 10_000 })?;
    // complex Schur form is upper triangular
    let t = schur.unpack().1;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Solves `A v = 0` for a trace-preserving generator `A`, fixing the gauge
/// with `Tr ρ = 1` in place of the first (redundant) row.
fn kernel_state(a: &DMatrix<C64>, dim: usize) -> Result<ComplexMatrix> {
    let mut system = a.clone();
    let mut rhs = DVector::<C64>::zeros(dim * dim);
    for c in 0..dim * dim {
        system[(0, c)] = ZERO;
    }
    for i in 0..dim {
        system[(0, i + dim * i)] = ONE;
    }
    rhs[0] = ONE;
    let v = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::DegenerateSteadyState { count: 2 })?;
    let m = ComplexMatrix::from_vectorized(&v)?.hermitian_part();
    let tr = m.trace().re;
    Ok(m.scale(1.0 / tr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyMethod {
    Spectral,
    PowerIteration,
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub state: DensityMatrix,
    /// `‖Φ(ρ) − ρ‖_max`
    pub residual: f64,
    /// `1 − |λ₂|` of the superoperator.
    pub spectral_gap: f64,
    pub method: SteadyMethod,
}

/// Spectral gap, or an error when more than one eigenvalue sits on the
/// unit circle.
fn unique_fixed_point_gap(ch: &CollisionChannel) -> Result<f64> {
    let spectrum = ch.spectrum()?;
    let on_circle = spectrum.iter().filter(|z| (z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL).count();
    if on_circle != 1 {
        return Err(Error::DegenerateSteadyState { count: on_circle });
    }
    Ok(1.0 - spectrum.get(1).map_or(0.0, |z| z.norm()))
}

/// Fixed point of the collision map: the eigenvector of eigenvalue one,
/// Hermitized and trace-normalized.
pub fn steady_state(ch: &CollisionChannel) -> Result<SteadyStateResult> {
    let spectral_gap = unique_fixed_point_gap(ch)?;
    let mut a = ch.superoperator.as_nalgebra().clone();
    for i in 0..16 {
        a[(i, i)] -= ONE;
    }
    let mut state = DensityMatrix::from_matrix_unchecked(kernel_state(&a, 4)?);
    let mut residual = ch.residual(&state)?;
    // a few collisions tidy up the last digits of an ill-conditioned solve
    let mut polish = 0;
    while residual > STEADY_RESIDUAL && polish < 1000 {
        state = normalize(ch.apply(&state)?);
        residual = ch.residual(&state)?;
        polish += 1;
    }
    if residual > STEADY_RESIDUAL {
        return Err(Error::NonConvergence { residual, iterations: polish });
    }
    let state = DensityMatrix::new(state.into_matrix())?;
    Ok(SteadyStateResult { state, residual, spectral_gap, method: SteadyMethod::Spectral })
}

fn normalize(rho: DensityMatrix) -> DensityMatrix {
    let h = rho.matrix().hermitian_part();
    let tr = h.trace().re;
    DensityMatrix::from_matrix_unchecked(h.scale(1.0 / tr))
}

/// Repeated collisions from `𝟙/4` until the residual drops below
/// `STEADY_RESIDUAL`. Used to cross-check [`steady_state`].
pub fn power_iteration_steady_state(ch: &CollisionChannel, max_iterations: usize) -> Result<SteadyStateResult> {
    let spectral_gap = unique_fixed_point_gap(ch)?;
    let sup = ch.superoperator.as_nalgebra();
    let mut v = DensityMatrix::maximally_mixed(4).matrix().vectorize();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        let next = sup * &v;
        residual = (&next - &v).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        v = next;
        if residual <= STEADY_RESIDUAL {
            let m = ComplexMatrix::from_vectorized(&v)?.hermitian_part();
            let tr = m.trace().re;
            let state = DensityMatrix::new(m.scale(1.0 / tr))?;
            let residual = ch.residual(&state)?;
            return Ok(SteadyStateResult { state, residual, spectral_gap, method: SteadyMethod::PowerIteration });
        }
    }
    Err(Error::NonConvergence { residual, iterations: max_iterations })
}

/// Continuous-limit generator: local thermal dissipators on each system
/// qubit plus the collective term sourced by bath correlations, valid to
/// first order in the swap angle.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    pub hamiltonian: ComplexMatrix,
    pub gamma: f64,
    pub occupations: [f64; 2],
    /// `γφ(n₂−n₁)/√((1+2n₁)(1+2n₂))`
    pub cross_coefficient: f64,
    lowering: [ComplexMatrix; 2],
    raising: [ComplexMatrix; 2],
}

impl LindbladGenerator {
    pub fn new(p: &ModelParams, phi: SwapAngle) -> Self {
        let one = pauli::identity();
        let lowering = [kron(&pauli::minus(), &one), kron(&one, &pauli::minus())];
        let raising = [kron(&pauli::plus(), &one), kron(&one, &pauli::plus())];
        let cross = p.gamma * phi.0 * (p.n2 - p.n1) / ((1.0 + 2.0 * p.n1) * (1.0 + 2.0 * p.n2)).sqrt();
        Self {
            hamiltonian: system_hamiltonian(p),
            gamma: p.gamma,
            occupations: [p.n1, p.n2],
            cross_coefficient: cross,
            lowering,
            raising,
        }
    }

    /// `dρ/dt`
    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.hamiltonian.commutator(rho).scale_complex(C64::new(0.0, -1.0));
        for i in 0..2 {
            let n = self.occupations[i];
            out = out
                + dissipator(&self.lowering[i], rho).scale(self.gamma * (1.0 + n))
                + dissipator(&self.raising[i], rho).scale(self.gamma * n);
        }
        if self.cross_coefficient != 0.0 {
            // the Hermitian-conjugate partner is written out linearly so the
            // generator matrix is also right on non-Hermitian inputs
            let (up1, down2) = (&self.raising[0], &self.lowering[1]);
            let (down1, up2) = (&self.lowering[0], &self.raising[1]);
            let m = collective(up1, down2, rho)
                + collective(down2, up1, rho)
                + collective(up2, down1, rho)
                + collective(down1, up2, rho);
            out = out + m.scale(self.cross_coefficient);
        }
        out
    }

    /// Generator matrix on column-stacked states.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut g = DMatrix::<C64>::zeros(16, 16);
        for col in 0..16 {
            let unit = ComplexMatrix::from_fn(4, |r, c| if r + 4 * c == col { ONE } else { ZERO });
            g.set_column(col, &self.rhs(&unit).vectorize());
        }
        ComplexMatrix::from_nalgebra(g).expect("square")
    }
}

/// `2aρa† − a†aρ − ρa†a`
fn dissipator(a: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let ad = a.adjoint();
    let ada = &ad * a;
    (a * rho * &ad).scale(2.0) - &ada * rho - rho * &ada
}

/// `2aρb − baρ − ρba`
fn collective(a: &ComplexMatrix, b: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let ba = b * a;
    (a * rho * b).scale(2.0) - &ba * rho - rho * &ba
}

pub fn lindblad_rhs(g: &LindbladGenerator, rho: &DensityMatrix) -> ComplexMatrix {
    g.rhs(rho.matrix())
}

/// Null vector of the generator, Hermitized and normalized.
pub fn lindblad_steady_state(g: &LindbladGenerator) -> Result<DensityMatrix> {
    let l = g.matrix();
    let scale = l.max_abs().max(1.0);
    let null_dim = eigenvalues(l.as_nalgebra())?
        .iter()
        .filter(|z| z.norm() <= UNIT_MODULUS_TOL * scale)
        .count();
    if null_dim != 1 {
        return Err(Error::DegenerateSteadyState { count: null_dim });
    }
    let rho = kernel_state(l.as_nalgebra(), 4)?;
    let residual = g.rhs(&rho).max_abs();
    if residual > STEADY_RESIDUAL {
        return Err(Error::NonConvergence { residual, iterations: 0 });
    }
    DensityMatrix::new(rho)
}

/// Fixed-step fourth-order Runge–Kutta integration. The step never exceeds
/// `0.01/γ`.
pub fn evolve_lindblad(g: &LindbladGenerator, rho0: &DensityMatrix, duration: f64, max_step: f64) -> Result<DensityMatrix> {
    if !(duration >= 0.0) || !(max_step > 0.0) {
        return Err(Error::InvalidParameter("duration must be non-negative and step positive".into()));
    }
    let cap = if g.gamma > 0.0 { 0.01 / g.gamma } else { max_step };
    let step_bound = max_step.min(cap);
    let steps = (duration / step_bound).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let mut rho = rho0.matrix().clone();
    for _ in 0..steps {
        let k1 = g.rhs(&rho);
        let k2 = g.rhs(&(&rho + k1.scale(h / 2.0)));
        let k3 = g.rhs(&(&rho + k2.scale(h / 2.0)));
        let k4 = g.rhs(&(&rho + k3.scale(h)));
        rho = rho + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
    }
    DensityMatrix::normalized(&rho)
}

/// Checks the unique-fixed-point tolerance against a state that is
/// claimed to be stationary.
pub fn assert_stationary(ch: &CollisionChannel, rho: &DensityMatrix) -> Result<f64> {
    let residual = ch.residual(rho)?;
    if residual > STEADY_RESIDUAL {
        return Err(Error::NotSteady { residual });
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, trace_distance};
    use crate::model::{correlated_bath_state, partial_swap, product_bath_state, thermal_qubit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
        let a = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        DensityMatrix::normalized(&(&a * &a.adjoint())).unwrap()
    }

    fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> UnitaryMatrix {
        let a = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        unitary_exp(&a.hermitian_part(), 2.0).unwrap()
    }

    fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
        ModelParams {
            j: rng.random_range(0.2..1.5),
            delta: rng.random_range(-1.0..1.5),
            b1: rng.random_range(0.05..0.8),
            b2: rng.random_range(0.05..0.8),
            gamma: rng.random_range(0.2..2.0),
            n1: rng.random_range(0.0..3.0),
            n2: rng.random_range(0.0..3.0),
            tau: rng.random_range(0.02..0.5),
        }
    }

    fn working_point_channel(phi: f64) -> CollisionChannel {
        let p = ModelParams::default();
        build_channel(&p, &correlated_bath_state(&p, &partial_swap(SwapAngle(phi))).unwrap()).unwrap()
    }

    #[test]
    fn decoupled_channel_is_unitary_conjugation() {
        let p = ModelParams { gamma: 0.0, ..ModelParams::default() };
        let ch = build_channel(&p, &product_bath_state(&p).unwrap()).unwrap();
        let v = unitary_exp(&system_hamiltonian(&p), p.tau).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let rho = random_state(&mut rng, 4);
            let out = ch.apply(&rho).unwrap();
            assert!((out.matrix() - v.conjugate(&rho).unwrap().matrix()).max_abs() < 1e-13);
        }
        assert!(matches!(steady_state(&ch), Err(Error::DegenerateSteadyState { .. })));
    }

    #[test]
    fn trivial_channel_is_identity() {
        let p = ModelParams { j: 0.0, b1: 0.0, b2: 0.0, gamma: 0.0, ..ModelParams::default() };
        let ch = build_channel(&p, &product_bath_state(&p).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_state(&mut rng, 4);
        assert!((ch.apply(&rho).unwrap().matrix() - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn superoperator_matches_direct_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_params(&mut rng);
        let bath = random_unitary(&mut rng, 4).conjugate(&product_bath_state(&p).unwrap()).unwrap();
        let ch = build_channel(&p, &bath).unwrap();
        for _ in 0..100 {
            let rho = random_state(&mut rng, 4);
            let a = ch.apply(&rho).unwrap();
            let b = ch.apply_direct(&rho).unwrap();
            assert!((a.matrix() - b.matrix()).max_abs() <= 1e-12);
            assert!((a.matrix().trace() - rho.matrix().trace()).norm() <= 1e-12);
            assert!(a.eigenvalues()[0] >= -1e-10);
        }
    }

    #[test]
    fn choi_matrix_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let bath = random_unitary(&mut rng, 4).conjugate(&product_bath_state(&p).unwrap()).unwrap();
            let ch = build_channel(&p, &bath).unwrap();
            assert!(hermitian_eigenvalues(&ch.choi_matrix())[0] >= -1e-10);
        }
    }

    #[test]
    fn steady_state_exists_and_methods_agree() {
        let ch = working_point_channel(0.0);
        let spectral = steady_state(&ch).unwrap();
        assert!(spectral.spectral_gap > 0.0);
        assert!(spectral.residual <= STEADY_RESIDUAL);
        let power = power_iteration_steady_state(&ch, POWER_ITERATION_CAP).unwrap();
        assert_eq!(power.method, SteadyMethod::PowerIteration);
        assert!((spectral.state.matrix() - power.state.matrix()).max_abs() <= 1e-9);
    }

    #[test]
    fn equilibrium_fixed_point_is_local_gibbs() {
        // equal baths: the product of bath-temperature thermal qubits is invariant
        let p = ModelParams { b1: 0.2, b2: 0.2, n1: 0.7, n2: 0.7, ..ModelParams::default() };
        let ch = build_channel(&p, &product_bath_state(&p).unwrap()).unwrap();
        let gibbs = thermal_qubit(0.7).unwrap().tensor(&thermal_qubit(0.7).unwrap());
        assert!(ch.residual(&gibbs).unwrap() <= 1e-8);
        let ss = steady_state(&ch).unwrap();
        assert!(trace_distance(&ss.state, &gibbs).unwrap() <= 1e-8);
        assert!(ss.state.matrix().commutator(&system_hamiltonian(&p)).max_abs() <= 1e-8);
    }

    #[test]
    fn steady_state_is_basis_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = ModelParams::random_unitary_point();
        let bath = random_unitary(&mut rng, 4).conjugate(&product_bath_state(&p).unwrap()).unwrap();
        let base = steady_state(&build_channel(&p, &bath).unwrap()).unwrap();

        let local = random_unitary(&mut rng, 2).tensor(&random_unitary(&mut rng, 2));
        let global = local.tensor(&local);
        let h_rot = global.conjugate_matrix(&total_hamiltonian(&p).unwrap());
        let collider = Collider::from_hamiltonian(&h_rot, p.tau).unwrap();
        let rotated = steady_state(&collider.channel(&local.conjugate(&bath).unwrap()).unwrap()).unwrap();
        let expected = local.conjugate(&base.state).unwrap();
        assert!((rotated.state.matrix() - expected.matrix()).max_abs() <= 1e-9);
    }

    #[test]
    fn collision_conserves_total_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let p = random_params(&mut rng);
            let h = total_hamiltonian(&p).unwrap();
            let bath = random_unitary(&mut rng, 4).conjugate(&product_bath_state(&p).unwrap()).unwrap();
            let ch = build_channel(&p, &bath).unwrap();
            let rho = random_state(&mut rng, 4);
            let before = rho.tensor(&bath);
            let after = ch.joint_output(&rho).unwrap();
            let delta = after.matrix() - before.matrix();
            assert!(delta.trace_product(&h).norm() <= 1e-11);
        }
    }

    #[test]
    fn stationarity_guard() {
        let ch = working_point_channel(0.3);
        let ss = steady_state(&ch).unwrap();
        assert!(assert_stationary(&ch, &ss.state).is_ok());
        assert!(matches!(
            assert_stationary(&ch, &DensityMatrix::maximally_mixed(4)),
            Err(Error::NotSteady { .. })
        ));
    }

    #[test]
    fn lindblad_dark_state() {
        let p = ModelParams { j: 0.0, b1: 0.0, b2: 0.0, n1: 0.0, n2: 0.0, ..ModelParams::default() };
        let g = LindbladGenerator::new(&p, SwapAngle(0.0));
        let ground = DensityMatrix::diagonal(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(lindblad_rhs(&g, &ground).max_abs() < 1e-15);
    }

    #[test]
    fn lindblad_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = LindbladGenerator::new(&ModelParams::default(), SwapAngle(0.3));
        for _ in 0..100 {
            let rho = random_state(&mut rng, 4);
            let out = lindblad_rhs(&g, &rho);
            assert!(out.trace().norm() <= 1e-12);
            assert!(out.hermitian_deviation() <= 1e-12);
        }
    }

    #[test]
    fn lindblad_cross_term_needs_unequal_occupations() {
        let p = ModelParams { n1: 1.3, n2: 1.3, ..ModelParams::default() };
        for phi in [0.0, 0.1, 0.7] {
            assert_eq!(LindbladGenerator::new(&p, SwapAngle(phi)).cross_coefficient, 0.0);
        }
    }

    #[test]
    fn lindblad_equilibrium_steady_state() {
        let p = ModelParams { b1: 0.25, b2: 0.25, n1: 0.4, n2: 0.4, ..ModelParams::default() };
        let g = LindbladGenerator::new(&p, SwapAngle(0.0));
        let rho = lindblad_steady_state(&g).unwrap();
        let gibbs = thermal_qubit(0.4).unwrap().tensor(&thermal_qubit(0.4).unwrap());
        assert!(lindblad_rhs(&g, &gibbs).max_abs() <= 1e-8);
        assert!(trace_distance(&rho, &gibbs).unwrap() <= 1e-8);
    }

    #[test]
    fn lindblad_qubit_exchange_symmetry() {
        let p = ModelParams::default();
        let swapped = ModelParams { b1: p.b2, b2: p.b1, n1: p.n2, n2: p.n1, ..p };
        let a = lindblad_steady_state(&LindbladGenerator::new(&p, SwapAngle(0.05))).unwrap();
        // relabelling the qubits flips the sign of the bath coherence
        let b = lindblad_steady_state(&LindbladGenerator::new(&swapped, SwapAngle(-0.05))).unwrap();
        let exchange = crate::model::permutation_unitary([0, 2, 1, 3]).unwrap();
        assert!((exchange.conjugate(&b).unwrap().matrix() - a.matrix()).max_abs() <= 1e-10);
    }

    #[test]
    fn lindblad_converges_to_collision_model() {
        let phi = 0.05;
        let mut last = f64::INFINITY;
        for tau in [0.1, 0.05, 0.025] {
            let p = ModelParams { tau, ..ModelParams::default() };
            let discrete = steady_state(&swap_channel(&p, phi)).unwrap().state;
            let continuous = lindblad_steady_state(&LindbladGenerator::new(&p, SwapAngle(phi))).unwrap();
            let d = trace_distance(&discrete, &continuous).unwrap();
            assert!(d < last, "distance {d} did not shrink below {last} at tau={tau}");
            last = d;
        }
    }

    fn swap_channel(p: &ModelParams, phi: f64) -> CollisionChannel {
        build_channel(p, &correlated_bath_state(p, &partial_swap(SwapAngle(phi))).unwrap()).unwrap()
    }

    #[test]
    fn rk4_relaxes_to_null_space_state() {
        let p = ModelParams::default();
        let g = LindbladGenerator::new(&p, SwapAngle(0.05));
        let target = lindblad_steady_state(&g).unwrap();
        let evolved = evolve_lindblad(&g, &DensityMatrix::maximally_mixed(4), 40.0, 0.01).unwrap();
        assert!(trace_distance(&evolved, &target).unwrap() < 1e-8);
    }
}
