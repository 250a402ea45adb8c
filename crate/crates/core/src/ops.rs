//! Truncated bosonic and spin operators on a labeled tensor-product space.
//!
//! Every operator and ket carries a [`SpaceLayout`] describing its factors in
//! the fixed order atom ⊗ photon ⊗ phonon. Matrices are dense and complex; the
//! Kronecker ordering makes the first factor the most significant index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dimension of a truncated Fock space: states `|0⟩ … |n_max − 1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ModeCutoff(usize);

impl TryFrom<usize> for ModeCutoff {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ModeCutoff> for usize {
    fn from(c: ModeCutoff) -> usize {
        c.0
    }
}

impl ModeCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidCutoff("a mode needs at least one state".into()));
        }
        Ok(Self(n_max))
    }

    pub fn dim(self) -> usize {
        self.0
    }

    /// Smallest cutoff that keeps a displacement by `nu` trustworthy.
    pub fn for_displacement(nu: f64) -> Self {
        Self(safe_displacement_cutoff(nu))
    }
}

impl fmt::Display for ModeCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `n_max ≥ 4ν² + 20`, the coherent-state tail rule for `D(ν)`.
pub fn safe_displacement_cutoff(nu: f64) -> usize {
    (4.0 * nu * nu + 20.0).ceil() as usize
}

/// Photon and phonon truncation of the hybrid space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Cutoffs {
    pub photon: ModeCutoff,
    pub phonon: ModeCutoff,
}

impl Cutoffs {
    pub fn new(photon: usize, phonon: usize) -> Result<Self> {
        if photon < 2 || phonon < 2 {
            return Err(Error::InvalidCutoff(format!("both cutoffs must be >= 2, got ({photon}, {phonon})")));
        }
        Ok(Self { photon: ModeCutoff(photon), phonon: ModeCutoff(phonon) })
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::hybrid(self.photon, self.phonon)
    }

    pub fn dim(&self) -> usize {
        2 * self.photon.dim() * self.phonon.dim()
    }
}

impl fmt::Display for Cutoffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "photon={} phonon={}", self.photon, self.phonon)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Atom,
    Photon,
    Phonon,
}

/// A bosonic mode of the hybrid system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Photon,
    Phonon,
}

impl From<Mode> for Role {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Photon => Role::Photon,
            Mode::Phonon => Role::Phonon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub role: Role,
    pub dim: usize,
}

/// Ordered factor list of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    /// Builds a layout, enforcing atom ⊗ photon ⊗ phonon ordering with each
    /// role at most once and a two-dimensional atom.
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            if f.dim == 0 {
                return Err(Error::LayoutMismatch(format!("{:?} factor has dimension 0", f.role)));
            }
            if f.role == Role::Atom && f.dim != 2 {
                return Err(Error::LayoutMismatch(format!(
                    "atom factor must have dimension 2, got {}",
                    f.dim
                )));
            }
        }
        if factors.windows(2).any(|w| w[0].role >= w[1].role) {
            return Err(Error::LayoutMismatch(
                "factors must appear once each, ordered atom, photon, phonon".into(),
            ));
        }
        Ok(Self { factors })
    }

    /// The zero-factor layout of a scalar.
    pub fn scalar() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn atom() -> Self {
        Self { factors: vec![Factor { role: Role::Atom, dim: 2 }] }
    }

    pub fn mode(mode: Mode, cutoff: ModeCutoff) -> Self {
        Self { factors: vec![Factor { role: mode.into(), dim: cutoff.dim() }] }
    }

    /// atom ⊗ photon
    pub fn atom_photon(photon: ModeCutoff) -> Self {
        Self::atom().concat(&Self::mode(Mode::Photon, photon)).expect("ordered")
    }

    /// atom ⊗ photon ⊗ phonon
    pub fn hybrid(photon: ModeCutoff, phonon: ModeCutoff) -> Self {
        Self::atom_photon(photon)
            .concat(&Self::mode(Mode::Phonon, phonon))
            .expect("ordered")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn concat(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SpaceLayout::new(factors)
    }

    /// Layout restricted to the listed factor indices (kept in layout order).
    pub fn select(&self, keep: &[usize]) -> Result<SpaceLayout> {
        let keep = self.validate_keep(keep)?;
        Ok(SpaceLayout { factors: keep.iter().map(|&i| self.factors[i]).collect() })
    }

    fn validate_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        let count = self.factors.len();
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::LayoutMismatch("duplicate factor index".into()));
        }
        if let Some(&index) = sorted.iter().find(|&&i| i >= count) {
            return Err(Error::InvalidFactor { index, count });
        }
        Ok(sorted)
    }

    /// For every full index, its (kept, traced) multi-index pair flattened
    /// within the kept and traced sub-layouts.
    fn split_indices(&self, keep: &[usize]) -> (usize, usize, Vec<(usize, usize)>) {
        let dims: Vec<usize> = self.factors.iter().map(|f| f.dim).collect();
        let is_kept: Vec<bool> = (0..dims.len()).map(|i| keep.contains(&i)).collect();
        let dim_keep: usize = dims.iter().zip(&is_kept).filter(|(_, &k)| k).map(|(d, _)| d).product();
        let dim_trace: usize = dims.iter().zip(&is_kept).filter(|(_, &k)| !k).map(|(d, _)| d).product();
        let total = self.dim();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; dims.len()];
        for _ in 0..total {
            let (mut k, mut t) = (0, 0);
            for (i, &d) in digits.iter().enumerate() {
                if is_kept[i] {
                    k = k * dims[i] + d;
                } else {
                    t = t * dims[i] + d;
                }
            }
            map.push((k, t));
            for i in (0..dims.len()).rev() {
                digits[i] += 1;
                if digits[i] < dims[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        (dim_keep, dim_trace, map)
    }
}

/// Dense complex operator on a [`SpaceLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: SpaceLayout,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::LayoutMismatch(format!(
                "matrix is {}x{}, layout dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { layout, matrix })
    }

    pub fn from_real(layout: SpaceLayout, matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(layout, matrix.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let d = layout.dim();
        Self { layout, matrix: DMatrix::identity(d, d) }
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let d = layout.dim();
        Self { layout, matrix: DMatrix::zeros(d, d) }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { layout: self.layout.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |H − H†|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { layout: self.layout.clone(), matrix: &self.matrix * factor }
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        assert_eq!(self.layout, ket.layout, "operator and ket layouts differ");
        Ket { layout: self.layout.clone(), amplitudes: &self.matrix * &ket.amplitudes }
    }

    /// `⟨ψ|O|ψ⟩`
    pub fn expectation(&self, ket: &Ket) -> C64 {
        ket.inner(&self.apply(ket))
    }

    /// Sub-block of the leading `n` basis states of a single-factor operator.
    pub fn leading_block(&self, n: usize) -> DMatrix<C64> {
        self.matrix.view((0, 0), (n, n)).into_owned()
    }
}

fn check_same(a: &SpaceLayout, b: &SpaceLayout) {
    assert_eq!(a, b, "operator layouts differ");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        check_same(&self.layout, &rhs.layout);
        Operator { layout: self.layout.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        check_same(&self.layout, &rhs.layout);
        Operator { layout: self.layout.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        check_same(&self.layout, &rhs.layout);
        Operator { layout: self.layout.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(C64::new(rhs, 0.0))
    }
}

/// State vector on a [`SpaceLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    layout: SpaceLayout,
    amplitudes: DVector<C64>,
}

impl Ket {
    pub fn new(layout: SpaceLayout, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::LayoutMismatch(format!(
                "ket has {} amplitudes, layout dimension is {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn from_real(layout: SpaceLayout, amplitudes: &[f64]) -> Result<Self> {
        Self::new(layout, DVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| C64::new(x, 0.0))))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: SpaceLayout, index: usize) -> Result<Self> {
        let d = layout.dim();
        if index >= d {
            return Err(Error::LayoutMismatch(format!("basis index {index} out of range {d}")));
        }
        let mut amplitudes = DVector::from_element(d, ZERO);
        amplitudes[index] = ONE;
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Self {
        Self { layout: self.layout.clone(), amplitudes: self.amplitudes.normalize() }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.layout, other.layout, "ket layouts differ");
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap_sq(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `|ψ⟩⟨ψ|`
    pub fn density(&self) -> Operator {
        Operator { layout: self.layout.clone(), matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { layout: self.layout.clone(), amplitudes: &self.amplitudes * factor }
    }

    /// Amplitudes arranged as a (kept × traced) matrix; `X X†` is the reduced
    /// density matrix on the kept factors.
    pub fn schmidt_matrix(&self, keep: &[usize]) -> Result<DMatrix<C64>> {
        let keep = self.layout.validate_keep(keep)?;
        let (dk, dt, map) = self.layout.split_indices(&keep);
        let mut x = DMatrix::from_element(dk, dt, ZERO);
        for (full, &(k, t)) in map.iter().enumerate() {
            x[(k, t)] = self.amplitudes[full];
        }
        Ok(x)
    }

    /// Reduced density matrix of this pure state on the kept factors.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<Operator> {
        let layout = self.layout.select(keep)?;
        let x = self.schmidt_matrix(keep)?;
        Operator::new(layout, &x * x.adjoint())
    }

    /// `Tr ρ̃²` of the reduced state on the kept factors, computed from the
    /// smaller of the two Gram matrices.
    pub fn reduced_purity(&self, keep: &[usize]) -> Result<f64> {
        let x = self.schmidt_matrix(keep)?;
        let gram = if x.nrows() <= x.ncols() { &x * x.adjoint() } else { x.adjoint() * &x };
        Ok(gram.iter().map(|z| z.norm_sqr()).sum())
    }
}

impl Add for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        assert_eq!(self.layout, rhs.layout, "ket layouts differ");
        Ket { layout: self.layout.clone(), amplitudes: &self.amplitudes + &rhs.amplitudes }
    }
}

impl Sub for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        assert_eq!(self.layout, rhs.layout, "ket layouts differ");
        Ket { layout: self.layout.clone(), amplitudes: &self.amplitudes - &rhs.amplitudes }
    }
}

impl Mul<f64> for &Ket {
    type Output = Ket;
    fn mul(self, rhs: f64) -> Ket {
        self.scaled(C64::new(rhs, 0.0))
    }
}

/// Tensor product respecting the layout ordering.
pub trait Kron: Sized {
    fn kron(&self, other: &Self) -> Result<Self>;
}

impl Kron for Operator {
    fn kron(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Operator { layout, matrix: self.matrix.kronecker(&other.matrix) })
    }
}

impl Kron for Ket {
    fn kron(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Ket { layout, amplitudes: self.amplitudes.kronecker(&other.amplitudes) })
    }
}

pub fn kron<T: Kron>(a: &T, b: &T) -> Result<T> {
    a.kron(b)
}

/// Real annihilation matrix with `⟨n−1|a|n⟩ = √n`.
pub fn annihilation_matrix(n_max: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n_max, n_max);
    for n in 1..n_max {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Annihilation operator `â` (or `b̂`) on a single truncated mode.
pub fn annihilation_op(mode: Mode, cutoff: ModeCutoff) -> Operator {
    Operator::from_real(SpaceLayout::mode(mode, cutoff), &annihilation_matrix(cutoff.dim()))
        .expect("square by construction")
}

/// Creation operator `â†`.
pub fn creation_op(mode: Mode, cutoff: ModeCutoff) -> Operator {
    annihilation_op(mode, cutoff).adjoint()
}

/// Number operator `â†â`, exactly diagonal.
pub fn number_op(mode: Mode, cutoff: ModeCutoff) -> Operator {
    let d = cutoff.dim();
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { i as f64 } else { 0.0 });
    Operator::from_real(SpaceLayout::mode(mode, cutoff), &diag).expect("square by construction")
}

/// Pauli matrices `(σx, σy, σz)` in the basis `(|+z⟩, |−z⟩)`.
pub fn pauli_ops() -> (Operator, Operator, Operator) {
    let i = C64::new(0.0, 1.0);
    let sx = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let sy = DMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]);
    let sz = DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    let wrap = |m| Operator::new(SpaceLayout::atom(), m).expect("2x2");
    (wrap(sx), wrap(sy), wrap(sz))
}

/// Atomic eigenkets of σz and σx.
pub mod spin {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn plus_z() -> Ket {
        Ket::basis(SpaceLayout::atom(), 0).expect("dim 2")
    }

    pub fn minus_z() -> Ket {
        Ket::basis(SpaceLayout::atom(), 1).expect("dim 2")
    }

    pub fn plus_x() -> Ket {
        Ket::from_real(SpaceLayout::atom(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).expect("dim 2")
    }

    pub fn minus_x() -> Ket {
        Ket::from_real(SpaceLayout::atom(), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).expect("dim 2")
    }
}

/// Real matrix of `D(ν) = exp[ν(a† − a)]` on `n_max` Fock states, by
/// scaling-and-squaring Padé exponentiation of the truncated generator.
pub fn displacement_matrix(nu: f64, n_max: usize) -> DMatrix<f64> {
    if nu == 0.0 {
        return DMatrix::identity(n_max, n_max);
    }
    let a = annihilation_matrix(n_max);
    let generator = (a.transpose() - a) * nu;
    generator.exp()
}

/// Displacement operator `D(ν)` on one mode.
///
/// Logs a warning when the leading half block of `D†D` departs from the
/// identity by more than 1e-10, or when the cutoff is below the `4ν² + 20`
/// safety rule.
pub fn displacement_op(mode: Mode, nu: f64, cutoff: ModeCutoff) -> Operator {
    let n = cutoff.dim();
    if n < safe_displacement_cutoff(nu) {
        log::warn!(
            "displacement by {nu} on {n} states is below the {}-state safety rule",
            safe_displacement_cutoff(nu)
        );
    }
    let d = displacement_matrix(nu, n);
    let half = (n / 2).max(1);
    let gram = d.transpose() * &d;
    let dev = (0..half)
        .flat_map(|i| (0..half).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    if dev > 1e-10 {
        log::warn!("displacement operator not unitary on its leading block: {dev:e}");
    }
    Operator::from_real(SpaceLayout::mode(mode, cutoff), &d).expect("square by construction")
}

/// Reduced density matrix `Tr_{traced}(ρ)` keeping the listed factors.
pub fn partial_trace(rho: &Operator, keep: &[usize]) -> Result<Operator> {
    let keep = rho.layout.validate_keep(keep)?;
    let layout = rho.layout.select(&keep)?;
    let (dk, dt, map) = rho.layout.split_indices(&keep);
    let mut by_trace: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dt];
    for (full, &(k, t)) in map.iter().enumerate() {
        by_trace[t].push((k, full));
    }
    let mut out = DMatrix::from_element(dk, dk, ZERO);
    for group in &by_trace {
        for &(k1, f1) in group {
            for &(k2, f2) in group {
                out[(k1, k2)] += rho.matrix[(f1, f2)];
            }
        }
    }
    Operator::new(layout, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cut(n: usize) -> ModeCutoff {
        ModeCutoff::new(n).unwrap()
    }

    #[test]
    fn annihilation_two_states() {
        let a = annihilation_op(Mode::Photon, cut(2));
        assert_eq!(a.matrix()[(0, 1)], ONE);
        assert_eq!(a.matrix()[(0, 0)], ZERO);
        assert_eq!(a.matrix()[(1, 0)], ZERO);
        assert_eq!(a.matrix()[(1, 1)], ZERO);
    }

    #[test]
    fn number_operator_from_ladder() {
        let a = annihilation_op(Mode::Photon, cut(4));
        let n = &a.adjoint() * &a;
        for i in 0..4 {
            assert_abs_diff_eq!(n.matrix()[(i, i)].re, i as f64, epsilon = 1e-15);
        }
        assert!((&n - &number_op(Mode::Photon, cut(4))).max_abs() < 1e-15);
    }

    #[test]
    fn canonical_commutator_except_last_entry() {
        let a = annihilation_op(Mode::Photon, cut(40));
        let comm = a.commutator(&a.adjoint());
        for i in 0..39 {
            for j in 0..39 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(comm.matrix()[(i, j)].re, expect, epsilon = 1e-13);
            }
        }
        assert_abs_diff_eq!(comm.matrix()[(39, 39)].re, -39.0, epsilon = 1e-12);
    }

    #[test]
    fn creation_is_exact_adjoint() {
        let a = annihilation_op(Mode::Phonon, cut(9));
        assert_eq!(creation_op(Mode::Phonon, cut(9)).matrix(), &a.matrix().adjoint());
    }

    #[test]
    fn pauli_eigenkets() {
        let (sx, sy, sz) = pauli_ops();
        let px = spin::plus_x();
        assert_abs_diff_eq!((&sx.apply(&px) - &px).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(sz.matrix()[(0, 0)], ONE);
        assert_eq!(sz.matrix()[(1, 1)], -ONE);
        // σ+ = (σx + iσy)/2 raises |−z⟩ to |+z⟩ and annihilates |+z⟩
        let sp = (&sx + &sy.scaled(C64::new(0.0, 1.0))).scaled(C64::new(0.5, 0.0));
        assert_abs_diff_eq!((&sp.apply(&spin::minus_z()) - &spin::plus_z()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sp.apply(&spin::plus_z()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn displacement_zero_is_identity() {
        let d = displacement_op(Mode::Photon, 0.0, cut(12));
        assert_eq!(d, Operator::identity(SpaceLayout::mode(Mode::Photon, cut(12))));
    }

    #[test]
    fn displacement_vacuum_amplitude() {
        // ⟨0|D(ν)|0⟩ = exp(−ν²/2)
        for nu in [0.3, 1.0, 1.7] {
            let d = displacement_matrix(nu, 60);
            assert_abs_diff_eq!(d[(0, 0)], (-nu * nu / 2.0).exp(), epsilon = 1e-13);
        }
        assert_abs_diff_eq!(displacement_matrix(1.0, 40)[(0, 0)], 0.606_530_659_712_633_4, epsilon = 1e-12);
    }

    #[test]
    fn displacement_inverse_on_leading_block() {
        let nu = 1.3;
        let n = 50;
        let prod = displacement_matrix(nu, n) * displacement_matrix(-nu, n);
        let lead = n - (8.0 * nu * nu).ceil() as usize;
        for i in 0..lead {
            for j in 0..lead {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(i, j)], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn kron_identities_and_dimensions() {
        let i2 = Operator::identity(SpaceLayout::atom());
        let i3 = Operator::identity(SpaceLayout::mode(Mode::Photon, cut(3)));
        let i6 = i2.kron(&i3).unwrap();
        assert_eq!(i6, Operator::identity(SpaceLayout::atom_photon(cut(3))));

        let big = SpaceLayout::hybrid(cut(5), cut(7));
        assert_eq!(big.dim(), 70);

        let (_, _, sz) = pauli_ops();
        let szi = sz.kron(&i3).unwrap();
        let inn = i2.kron(&number_op(Mode::Photon, cut(3))).unwrap();
        assert_eq!(szi.commutator(&inn).max_abs(), 0.0);
    }

    #[test]
    fn kron_rejects_bad_order() {
        let ph = Operator::identity(SpaceLayout::mode(Mode::Photon, cut(3)));
        let at = Operator::identity(SpaceLayout::atom());
        assert!(matches!(ph.kron(&at), Err(Error::LayoutMismatch(_))));
        assert!(matches!(ph.kron(&ph), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn kron_is_associative() {
        let (sx, _, _) = pauli_ops();
        let a = annihilation_op(Mode::Photon, cut(3));
        let b = displacement_op(Mode::Phonon, 0.4, cut(4));
        let left = sx.kron(&a).unwrap().kron(&b).unwrap();
        let right = sx.kron(&a.kron(&b).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn partial_trace_of_product_state_is_pure() {
        let psi = spin::plus_x();
        let phi = Ket::from_real(SpaceLayout::mode(Mode::Photon, cut(3)), &[0.6, 0.0, 0.8]).unwrap();
        let rho = psi.kron(&phi).unwrap().density();
        for keep in [[0usize], [1]] {
            let red = partial_trace(&rho, &keep).unwrap();
            let purity = (red.matrix() * red.matrix()).trace().re;
            assert_abs_diff_eq!(purity, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let layout = SpaceLayout::atom_photon(cut(2));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_real(layout, &[s, 0.0, 0.0, s]).unwrap();
        for keep in [[0usize], [1]] {
            let red = partial_trace(&bell.density(), &keep).unwrap();
            assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
            let purity = (red.matrix() * red.matrix()).trace().re;
            assert_abs_diff_eq!(1.0 / purity, 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn partial_trace_errors_and_scalar() {
        let layout = SpaceLayout::hybrid(cut(2), cut(3));
        let rho = Ket::basis(layout, 5).unwrap().density();
        assert!(matches!(partial_trace(&rho, &[3]), Err(Error::InvalidFactor { index: 3, count: 3 })));
        let scalar = partial_trace(&rho, &[]).unwrap();
        assert_eq!(scalar.dim(), 1);
        assert_abs_diff_eq!(scalar.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_middle_factor_matches_pure_state_route() {
        let layout = SpaceLayout::hybrid(cut(3), cut(2));
        let amps: Vec<f64> = (0..12).map(|i| ((i * 7 % 5) as f64 - 1.7) * 0.3).collect();
        let ket = Ket::from_real(layout, &amps).unwrap().normalized();
        for keep in [vec![1usize], vec![0, 2], vec![0, 1], vec![2]] {
            let direct = partial_trace(&ket.density(), &keep).unwrap();
            let schmidt = ket.reduced_density(&keep).unwrap();
            assert_abs_diff_eq!((direct.matrix() - schmidt.matrix()).norm(), 0.0, epsilon = 1e-14);
        }
    }
}
