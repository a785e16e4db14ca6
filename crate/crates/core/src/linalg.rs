//! Dense complex linear algebra for qubit registers of dimension 2, 4 and 16.
//!
//! Tensor factors follow the usual convention: in `kron(a, b)` the left factor
//! is the most significant index. Qubit basis state 0 is the `σ_z = +1`
//! eigenstate, so `σ_+ = |0⟩⟨1|` raises the energy when the local field is
//! positive.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Numerical tolerances shared by every module.
pub mod tol {
    /// Max-norm deviation from Hermiticity accepted for states and generators.
    pub const HERMITIAN: f64 = 1e-12;
    /// Deviation of a density matrix trace from one.
    pub const TRACE: f64 = 1e-12;
    /// Most negative eigenvalue accepted for a density matrix.
    pub const PSD: f64 = 1e-10;
    /// Max-norm deviation of `U†U` from the identity.
    pub const UNITARY: f64 = 1e-10;
    /// Eigenvalues below this contribute nothing to an entropy.
    pub const ENTROPY_CLAMP: f64 = 1e-14;
    /// A reference-state eigenvalue below this is outside the support.
    pub const SUPPORT_SIGMA: f64 = 1e-12;
    /// Weight of the first argument that makes a relative entropy diverge.
    pub const SUPPORT_RHO: f64 = 1e-10;
}

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.inner[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { inner: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { inner: DMatrix::from_fn(dim, dim, |r, c| f(r, c)) }
    }

    /// Builds a matrix from row slices. All rows must have the same length as
    /// the number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("rows do not form a non-empty square matrix".into()));
        }
        Ok(Self::from_fn(dim, |r, c| rows[r][c]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { c64(diag[r]) } else { ZERO })
    }

    pub fn from_nalgebra(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        Ok(Self { inner })
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    /// Bounds-checked entry access.
    pub fn get(&self, row: usize, col: usize) -> Option<C64> {
        self.inner.get((row, col)).copied()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { inner: self.inner.transpose() }
    }

    pub fn conj(&self) -> Self {
        Self { inner: self.inner.map(|z| z.conj()) }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { inner: &self.inner * c64(s) }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { inner: &self.inner * s }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self.inner[(r, c)] - self.inner[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Hermiticity check with a tolerance relative to the matrix scale.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.max_abs().max(1.0)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.dim();
        assert_eq!(n, other.dim(), "trace_product dimension mismatch");
        let mut acc = ZERO;
        for r in 0..n {
            for k in 0..n {
                acc += self.inner[(r, k)] * other.inner[(k, r)];
            }
        }
        acc
    }

    /// Column-stacking vectorization: entry `(r, c)` lands at `r + c·dim`.
    pub fn vectorize(&self) -> DVector<C64> {
        DVector::from_column_slice(self.inner.as_slice())
    }

    pub fn from_vectorized(v: &DVector<C64>) -> Result<Self> {
        let dim = (v.len() as f64).sqrt().round() as usize;
        if dim * dim != v.len() {
            return Err(Error::Dimension(format!("vector of length {} is not a square matrix", v.len())));
        }
        Ok(Self { inner: DMatrix::from_column_slice(dim, dim, v.as_slice()) })
    }

    /// `(self + self†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self { inner: (&self.inner + self.inner.adjoint()) * c64(0.5) }
    }
}

fn c64(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { inner: &self.inner $op &rhs.inner }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { inner: self.inner $op rhs.inner }
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { inner: self.inner $op &rhs.inner }
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { inner: &self.inner $op rhs.inner }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        ComplexMatrix { inner: self.inner * c64(rhs) }
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix { inner: self.inner * rhs }
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { inner: -self.inner }
    }
}

/// Single-qubit operators in the `σ_z = +1 ↦ index 0` basis.
pub mod pauli {
    use super::{c, ComplexMatrix, ONE, ZERO};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |r, col| if r != col { ONE } else { ZERO })
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |r, col| match (r, col) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => ZERO,
        })
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// `σ_+ = (σ_x + iσ_y)/2 = |0⟩⟨1|`
    pub fn plus() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |r, col| if (r, col) == (0, 1) { ONE } else { ZERO })
    }

    /// `σ_- = (σ_x − iσ_y)/2 = |1⟩⟨0|`
    pub fn minus() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |r, col| if (r, col) == (1, 0) { ONE } else { ZERO })
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix { inner: a.inner.kronecker(&b.inner) }
}

/// Places `op` on `slot` of a register with the given slot dimensions,
/// padding every other slot with the identity.
pub fn embed(op: &ComplexMatrix, slot: usize, layout: &[usize]) -> Result<ComplexMatrix> {
    if slot >= layout.len() {
        return Err(Error::BadIndex { index: slot, expected: "a slot of the layout" });
    }
    if layout[slot] != op.dim() {
        return Err(Error::Dimension(format!(
            "operator of dim {} placed on slot of dim {}",
            op.dim(),
            layout[slot]
        )));
    }
    let mut out = ComplexMatrix::identity(1);
    for (s, &d) in layout.iter().enumerate() {
        let factor = if s == slot { op.clone() } else { ComplexMatrix::identity(d) };
        out = kron(&out, &factor);
    }
    Ok(out)
}

/// Traces out every slot not listed in `keep`. Kept slots appear in the
/// result in ascending slot order.
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize], layout: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = layout.iter().product();
    if total != m.dim() {
        return Err(Error::Dimension(format!(
            "layout {:?} has dimension {} but matrix has {}",
            layout,
            total,
            m.dim()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&s| s >= layout.len()) {
        return Err(Error::Dimension(format!("invalid kept slots {:?} for layout {:?}", keep, layout)));
    }
    let traced: Vec<usize> = (0..layout.len()).filter(|s| !kept.contains(s)).collect();
    let kept_dim: usize = kept.iter().map(|&s| layout[s]).product();
    let traced_dim: usize = traced.iter().map(|&s| layout[s]).product();

    // strides of each slot in the full index
    let mut strides = vec![1usize; layout.len()];
    for s in (0..layout.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * layout[s + 1];
    }
    let offsets = |slots: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &s in slots.iter().rev() {
            off += (idx % layout[s]) * strides[s];
            idx /= layout[s];
        }
        off
    };
    let kept_off: Vec<usize> = (0..kept_dim).map(|i| offsets(&kept, i)).collect();
    let traced_off: Vec<usize> = (0..traced_dim).map(|i| offsets(&traced, i)).collect();

    Ok(ComplexMatrix::from_fn(kept_dim, |r, c| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[r] + t, kept_off[c] + t)])
            .sum()
    }))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: UnitaryMatrix,
}

impl HermitianEig {
    /// `V f(Λ) V†` for a real function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.vectors.matrix();
        let n = v.dim();
        let mut scaled = v.clone().into_nalgebra();
        for (col, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for r in 0..n {
                scaled[(r, col)] *= w;
            }
        }
        ComplexMatrix { inner: scaled * v.as_nalgebra().adjoint() }
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_hermitian(tol::HERMITIAN) {
        return Err(Error::NotHermitian { deviation: m.hermitian_deviation() });
    }
    let eig = SymmetricEigen::new(m.hermitian_part().inner);
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(HermitianEig { values, vectors: UnitaryMatrix(ComplexMatrix { inner: vectors }) })
}

/// Eigenvalues only, ascending. The input is Hermitized first.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = m.hermitian_part().inner.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// `exp(−i h t)` for Hermitian `h`.
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> Result<UnitaryMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(UnitaryMatrix(eig.apply(|lam| C64::from_polar(1.0, -lam * t))))
}

/// Quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let dev = m.hermitian_deviation();
        if dev > tol::HERMITIAN {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from one")));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -tol::PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(m))
    }

    /// Hermitizes and trace-normalizes a matrix that is a state up to
    /// rounding, then validates it.
    pub fn normalized(m: &ComplexMatrix) -> Result<Self> {
        let h = m.hermitian_part();
        let tr = h.trace().re;
        if !(tr.abs() > 0.0) {
            return Err(Error::InvalidState("zero trace".into()));
        }
        Self::new(h.scale(1.0 / tr))
    }

    /// For results of trace- and positivity-preserving maps on valid states.
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::from_fn(v.len(), |r, col| v[r] * v[col].conj()))
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(populations))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0)
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn partial_trace(&self, keep: &[usize], layout: &[usize]) -> Result<Self> {
        partial_trace(&self.0, keep, layout).map(Self)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(kron(&self.0, &other.0))
    }

    /// `Tr[ρ A]`, real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.0.trace_product(op).re
    }
}

/// `‖U†U − 𝟙‖_max ≤ 1e-10`
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let dev = (&m.adjoint() * &m - ComplexMatrix::identity(m.dim())).max_abs();
        if dev > tol::UNITARY {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · other`
    pub fn then_after(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(kron(&self.0, &other.0))
    }

    /// `U ρ U†`
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "unitary of dim {} applied to state of dim {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(DensityMatrix(self.conjugate_matrix(rho.matrix())))
    }

    pub fn conjugate_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.0 * m) * &self.0.adjoint()
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (&self.0.adjoint() * &self.0 - ComplexMatrix::identity(self.dim())).max_abs()
    }
}

/// `S(ρ) = −Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&p| p > tol::ENTROPY_CLAMP)
        .map(|&p| -p * p.ln())
        .sum()
}

/// `D(ρ‖σ) = Tr ρ ln ρ − Tr ρ ln σ`; `+∞` when the support of `ρ` is not
/// contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "relative entropy of states with dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_entropy = -von_neumann_entropy(rho);
    let eig = hermitian_eig(&sigma.matrix().hermitian_part())?;
    let v = eig.vectors.matrix();
    let r = rho.matrix();
    let n = rho.dim();
    let mut cross = 0.0;
    for (j, &s) in eig.values.iter().enumerate() {
        // ⟨v_j|ρ|v_j⟩
        let mut w = ZERO;
        for a in 0..n {
            for b in 0..n {
                w += v[(a, j)].conj() * r[(a, b)] * v[(b, j)];
            }
        }
        let w = w.re;
        if s < tol::SUPPORT_SIGMA {
            if w > tol::SUPPORT_RHO {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * s.ln();
    }
    Ok(neg_entropy - cross)
}

/// `½ ‖a − b‖₁`
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension("trace distance of states with different dims".into()));
    }
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

    fn random_hermitian(dim: usize, entries: &[f64]) -> ComplexMatrix {
        let mut k = 0;
        let mut next = || {
            let v = entries[k % entries.len()];
            k += 1;
            v
        };
        let a = ComplexMatrix::from_fn(dim, |_, _| c(next(), next()));
        (&a + &a.adjoint()).scale(0.5)
    }

    fn random_state(dim: usize, entries: &[f64]) -> DensityMatrix {
        let mut k = 0;
        let mut next = || {
            let v = entries[k % entries.len()];
            k += 1;
            v
        };
        let a = ComplexMatrix::from_fn(dim, |_, _| c(next(), next()));
        let m = &a * &a.adjoint() + ComplexMatrix::identity(dim).scale(1e-3);
        DensityMatrix::normalized(&m).unwrap()
    }

    fn random_unitary(dim: usize, entries: &[f64]) -> UnitaryMatrix {
        unitary_exp(&random_hermitian(dim, entries), 1.0).unwrap()
    }

    fn bell() -> DensityMatrix {
        DensityMatrix::pure(&[ONE, ZERO, ZERO, ONE]).unwrap()
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&pauli::identity(), &pauli::identity()), ComplexMatrix::identity(4));
        assert_eq!(
            kron(&pauli::z(), &pauli::identity()),
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0])
        );
    }

    #[test]
    fn kron_bit_flip_both() {
        let xx = kron(&pauli::x(), &pauli::x());
        // column 0 is the image of |00⟩
        for r in 0..4 {
            let expected = if r == 3 { ONE } else { ZERO };
            assert_eq!(xx[(r, 0)], expected);
        }
    }

    #[test]
    fn ladder_operators_match_pauli_combinations() {
        let plus = (pauli::x() + pauli::y().scale_complex(I)).scale(0.5);
        assert_eq!(plus, pauli::plus());
        let minus = (pauli::x() - pauli::y().scale_complex(I)).scale(0.5);
        assert_eq!(minus, pauli::minus());
    }

    #[test]
    fn entry_access_is_bounds_checked() {
        let m = ComplexMatrix::identity(2);
        assert_eq!(m.get(1, 1), Some(ONE));
        assert_eq!(m.get(2, 0), None);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let sigma = random_state(2, &[0.3, -0.1, 0.7, 0.2]);
        let prod = rho.tensor(&sigma);
        let left = prod.partial_trace(&[0], &[2, 2]).unwrap();
        let right = prod.partial_trace(&[1], &[2, 2]).unwrap();
        assert!((left.matrix() - rho.matrix()).max_abs() < 1e-15);
        assert!((right.matrix() - sigma.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let red = bell().partial_trace(&[0], &[2, 2]).unwrap();
        assert!((red.matrix() - DensityMatrix::maximally_mixed(2).matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_layout() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(rho.partial_trace(&[0], &[2, 3]), Err(Error::Dimension(_))));
        assert!(matches!(rho.partial_trace(&[2], &[2, 2]), Err(Error::Dimension(_))));
        assert!(matches!(rho.partial_trace(&[0, 0], &[2, 2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn partial_trace_middle_slots_of_four() {
        // keep slots {1, 3} of a 4-qubit product and recover their tensor product
        let a = random_state(2, &[0.1, 0.4]);
        let b = random_state(2, &[0.9, -0.3, 0.2]);
        let cst = random_state(2, &[0.5, 0.5, -0.6]);
        let d = random_state(2, &[-0.2, 0.8, 0.1, 0.3]);
        let full = a.tensor(&b).tensor(&cst).tensor(&d);
        let kept = full.partial_trace(&[1, 3], &[2, 2, 2, 2]).unwrap();
        assert!((kept.matrix() - b.tensor(&d).matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn eig_of_paulis() {
        let ez = hermitian_eig(&pauli::z()).unwrap();
        assert_eq!(ez.values, vec![-1.0, 1.0]);
        let ex = hermitian_eig(&pauli::x()).unwrap();
        assert_abs_diff_eq!(ex.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ex.values[1], 1.0, epsilon = 1e-14);
        let v = ex.vectors.matrix();
        // λ = −1 ↔ (|0⟩ − |1⟩)/√2 up to a global phase
        let ratio = v[(1, 0)] / v[(0, 0)];
        assert_abs_diff_eq!(ratio.re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[(0, 0)].norm(), FRAC_1_SQRT_2, epsilon = 1e-12);
        let ratio = v[(1, 1)] / v[(0, 1)];
        assert_abs_diff_eq!(ratio.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        assert!(matches!(hermitian_eig(&pauli::plus()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn unitary_exp_cases() {
        let u = unitary_exp(&pauli::x(), 0.0).unwrap();
        assert!((u.matrix() - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        let u = unitary_exp(&pauli::z(), PI).unwrap();
        assert!((u.matrix() + &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        assert!(unitary_exp(&pauli::minus(), 1.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&bell()), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_entropy(&DensityMatrix::maximally_mixed(2)), LN_2, epsilon = 1e-15);
        let th = DensityMatrix::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        // −Σ p ln p evaluated by hand
        let expected = -(1.0f64 / 3.0) * (1.0f64 / 3.0).ln() - (2.0f64 / 3.0) * (2.0f64 / 3.0).ln();
        assert_abs_diff_eq!(von_neumann_entropy(&th), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 3.0f64.ln() - 2.0 / 3.0 * LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.6365141682948128, epsilon = 1e-15);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = random_state(4, &[0.3, 0.1, -0.4, 0.8, 0.5]);
        assert_abs_diff_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-12);

        let half = DensityMatrix::maximally_mixed(2);
        let sigma = DensityMatrix::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        // commuting diagonals: Σ p (ln p − ln q)
        let expected = 0.5 * (0.5f64.ln() - (1.0f64 / 3.0).ln()) + 0.5 * (0.5f64.ln() - (2.0f64 / 3.0).ln());
        assert_abs_diff_eq!(relative_entropy(&half, &sigma).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 0.0589, epsilon = 1e-4);

        let up = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let down = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(relative_entropy(&up, &down).unwrap(), f64::INFINITY);
        assert_eq!(relative_entropy(&down, &half).unwrap().is_finite(), true);
        assert!(relative_entropy(&up, &DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::new(pauli::plus()).is_err());
        assert!(UnitaryMatrix::new(pauli::plus()).is_err());
        assert!(UnitaryMatrix::new(pauli::y()).is_ok());
    }

    #[test]
    fn trace_distance_orthogonal_states() {
        let up = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let down = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(trace_distance(&up, &down).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let m = ComplexMatrix::from_fn(2, |r, col| c((r + 2 * col) as f64, 0.0));
        let v = m.vectorize();
        assert_eq!(v[1], m[(1, 0)]);
        assert_eq!(v[2], m[(0, 1)]);
        assert_eq!(ComplexMatrix::from_vectorized(&v).unwrap(), m);
    }

    #[test]
    fn klein_inequality_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let ea: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
            let eb: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rho = random_state(4, &ea);
            let sigma = random_state(4, &eb);
            assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eig_reconstructs_hermitian(entries in prop::collection::vec(-2.0f64..2.0, 8..64), dim in prop::sample::select(vec![2usize, 4, 16])) {
            let m = random_hermitian(dim, &entries);
            let eig = hermitian_eig(&m).unwrap();
            let rebuilt = eig.apply(|l| c(l, 0.0));
            prop_assert!((rebuilt - &m).max_abs() <= 1e-10);
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn partial_traces_preserve_trace(entries in prop::collection::vec(-1.0f64..1.0, 8..64)) {
            let rho = random_state(16, &entries);
            let layout = [2, 2, 2, 2];
            let s = rho.partial_trace(&[0, 1], &layout).unwrap();
            let b = rho.partial_trace(&[2, 3], &layout).unwrap();
            prop_assert!((s.matrix().trace() - ONE).norm() <= 1e-12);
            prop_assert!((b.matrix().trace() - ONE).norm() <= 1e-12);
        }

        #[test]
        fn entropy_is_unitarily_invariant(e1 in prop::collection::vec(-1.0f64..1.0, 8..40), e2 in prop::collection::vec(-1.0f64..1.0, 8..40)) {
            let rho = random_state(4, &e1);
            let u = random_unitary(4, &e2);
            let rotated = u.conjugate(&rho).unwrap();
            prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() <= 1e-10);
        }

        #[test]
        fn unitary_exp_is_unitary(entries in prop::collection::vec(-3.0f64..3.0, 8..64), t in -5.0f64..5.0) {
            let u = unitary_exp(&random_hermitian(16, &entries), t).unwrap();
            prop_assert!(u.unitarity_deviation() <= 1e-10);
        }
    }
}
