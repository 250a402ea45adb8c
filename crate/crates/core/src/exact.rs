//! Exact diagonalization of the truncated hybrid Hamiltonian.
//!
//! The Hamiltonian is real and commutes with the parity `σ_z(−1)^{a†a}` for
//! every coupling, so it is solved as two real symmetric blocks. Basis index
//! of `|s, n, m⟩` is `(s·P + n)·F + m`, with `s = 0` for `|+z⟩`.

use std::collections::HashMap;
use std::sync::Once;

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::{AnalyticStateLabel, QrmLabel, Sign};
use crate::ops::{displacement_matrix, Cutoffs, Ket, ModeCutoff, Operator, SpaceLayout, C64};
use crate::params::SystemParams;
use crate::qrm::{adiabatic_vector, Embedded};

/// Residual bound relative to the spectral norm of the solved matrix.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest `‖H − H†‖` accepted by [`eigendecompose`].
pub const HERMITIAN_TOL: f64 = 1e-10;

static SEQUENTIAL: Once = Once::new();

/// Pin the dense eigensolver to one thread so results are bit-stable.
fn sequential_backend() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

#[derive(Clone, Debug, PartialEq)]
pub enum EigenStates {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

/// Lowest eigenpairs of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Ascending.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors, one per column.
    pub states: EigenStates,
    pub layout: SpaceLayout,
    pub params: Option<SystemParams>,
    pub cutoffs: Option<Cutoffs>,
    /// Largest `‖Hv − Ev‖/‖H‖` over the retained pairs.
    pub max_residual: f64,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn state(&self, i: usize) -> Ket {
        let amps = match &self.states {
            EigenStates::Real(v) => v.column(i).map(|x| C64::new(x, 0.0)),
            EigenStates::Complex(v) => v.column(i).into_owned(),
        };
        Ket::new(self.layout.clone(), amps).expect("layout matches")
    }

    /// Real eigenvector `i`, if the solution is real.
    pub fn real_state(&self, i: usize) -> Option<DVector<f64>> {
        match &self.states {
            EigenStates::Real(v) => Some(v.column(i).into_owned()),
            EigenStates::Complex(_) => None,
        }
    }

    /// `|⟨v_i|a⟩|²` for every retained eigenvector.
    pub fn overlaps_real(&self, a: &DVector<f64>) -> Vec<f64> {
        match &self.states {
            EigenStates::Real(v) => (v.transpose() * a).iter().map(|x| x * x).collect(),
            EigenStates::Complex(v) => {
                let ac = a.map(|x| C64::new(x, 0.0));
                (v.adjoint() * ac).iter().map(|z| z.norm_sqr()).collect()
            }
        }
    }

    pub fn overlaps(&self, a: &Ket) -> Vec<f64> {
        let ac = a.amplitudes();
        match &self.states {
            EigenStates::Real(v) => {
                let vc = v.map(|x| C64::new(x, 0.0));
                (vc.adjoint() * ac).iter().map(|z| z.norm_sqr()).collect()
            }
            EigenStates::Complex(v) => (v.adjoint() * ac).iter().map(|z| z.norm_sqr()).collect(),
        }
    }
}

fn push_sym(h: &mut Mat<f64>, i: usize, j: usize, x: f64) {
    h[(i, j)] += x;
    if i != j {
        h[(j, i)] += x;
    }
}

/// Real matrix elements of the hybrid Hamiltonian restricted to the basis
/// states listed in `basis` (full indices), emitted as `(row, col, value)`
/// with `row ≤ col` in the restricted numbering.
fn hybrid_entries(p: &SystemParams, c: &Cutoffs, basis: &[usize], mut emit: impl FnMut(usize, usize, f64)) {
    let (pp, ff) = (c.photon.dim(), c.phonon.dim());
    let full = c.dim();
    let mut pos = vec![usize::MAX; full];
    for (i, &b) in basis.iter().enumerate() {
        pos[b] = i;
    }
    let index = |s: usize, n: usize, m: usize| (s * pp + n) * ff + m;
    for (i, &b) in basis.iter().enumerate() {
        let (s, rest) = (b / (pp * ff), b % (pp * ff));
        let (n, m) = (rest / ff, rest % ff);
        let sz = if s == 0 { 1.0 } else { -1.0 };
        emit(i, i, 0.5 * p.omega_a * sz + p.omega_c * n as f64 + p.omega_m * m as f64);
        if n + 1 < pp && p.g_ac != 0.0 {
            let j = pos[index(1 - s, n + 1, m)];
            if j != usize::MAX {
                emit(i.min(j), i.max(j), p.g_ac * ((n + 1) as f64).sqrt());
            }
        }
        if m + 1 < ff && p.g_om != 0.0 && n > 0 {
            let j = pos[index(s, n, m + 1)];
            if j != usize::MAX {
                emit(i.min(j), i.max(j), -p.g_om * n as f64 * ((m + 1) as f64).sqrt());
            }
        }
    }
}

/// Full basis indices of the even (`parity = 0`) or odd block.
pub fn parity_basis(c: &Cutoffs, parity: usize) -> Vec<usize> {
    let (pp, ff) = (c.photon.dim(), c.phonon.dim());
    (0..c.dim()).filter(|&b| (b / (pp * ff) + (b % (pp * ff)) / ff) % 2 == parity).collect()
}

fn block_matrix(p: &SystemParams, c: &Cutoffs, basis: &[usize]) -> Mat<f64> {
    let d = basis.len();
    let mut h = Mat::<f64>::zeros(d, d);
    hybrid_entries(p, c, basis, |i, j, x| push_sym(&mut h, i, j, x));
    h
}

/// Real matrix of the hybrid Hamiltonian on the full truncated space.
pub fn hybrid_matrix(p: &SystemParams, c: &Cutoffs) -> DMatrix<f64> {
    let basis: Vec<usize> = (0..c.dim()).collect();
    let mut h = DMatrix::zeros(c.dim(), c.dim());
    hybrid_entries(p, c, &basis, |i, j, x| {
        h[(i, j)] += x;
        if i != j {
            h[(j, i)] += x;
        }
    });
    h
}

/// `(ω_a/2)σ_z + ω_c a†a + g_ac σ_x(a+a†) + ω_m b†b − g_om a†a(b+b†)` on
/// atom ⊗ photon ⊗ phonon.
pub fn build_hybrid_hamiltonian(p: &SystemParams, c: &Cutoffs) -> Operator {
    Operator::from_real(c.layout(), &hybrid_matrix(p, c)).expect("dimension matches layout")
}

/// The Rabi-model Hamiltonian `(ω_a/2)σ_z + ω_c a†a + g_ac σ_x(a+a†)` on
/// atom ⊗ photon.
pub fn build_qrm_hamiltonian(p: &SystemParams, photon: ModeCutoff) -> Operator {
    Operator::from_real(SpaceLayout::atom_photon(photon), &qrm_matrix(p, photon.dim())).expect("dimension matches")
}

fn qrm_matrix(p: &SystemParams, pp: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(2 * pp, 2 * pp);
    for s in 0..2 {
        let sz = if s == 0 { 1.0 } else { -1.0 };
        for n in 0..pp {
            h[(s * pp + n, s * pp + n)] = 0.5 * p.omega_a * sz + p.omega_c * n as f64;
            if n + 1 < pp {
                let (i, j) = (s * pp + n, (1 - s) * pp + n + 1);
                let x = p.g_ac * ((n + 1) as f64).sqrt();
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
    }
    h
}

struct BlockEigen {
    values: Vec<f64>,
    vectors: Mat<f64>,
    norm: f64,
}

fn solve_block(h: &Mat<f64>) -> Result<BlockEigen> {
    sequential_backend();
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..h.nrows()).map(|i| s[i]).collect();
    let norm = values.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    Ok(BlockEigen { values, vectors: evd.U().to_owned(), norm })
}

fn block_values(h: &Mat<f64>) -> Result<Vec<f64>> {
    sequential_backend();
    h.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Largest relative residual of the listed eigenpairs.
fn residual(h: &Mat<f64>, eig: &BlockEigen, cols: &[usize]) -> f64 {
    if cols.is_empty() {
        return 0.0;
    }
    let d = h.nrows();
    let v = Mat::<f64>::from_fn(d, cols.len(), |i, j| eig.vectors[(i, cols[j])]);
    let hv = h * &v;
    let mut worst = 0.0f64;
    for (j, &c) in cols.iter().enumerate() {
        let e = eig.values[c];
        let r: f64 = (0..d).map(|i| (hv[(i, j)] - e * v[(i, j)]).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(r / eig.norm);
    }
    worst
}

/// Merge the lowest `k` pairs of parity blocks into full-space vectors.
fn merge_blocks(
    full_dim: usize,
    blocks: &[(Vec<usize>, Mat<f64>, BlockEigen)],
    k: usize,
) -> Result<(Vec<f64>, DMatrix<f64>, f64)> {
    let mut all: Vec<(f64, usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, (_, _, e))| e.values.iter().enumerate().map(move |(i, &x)| (x, b, i)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    all.truncate(k);
    let mut states = DMatrix::zeros(full_dim, all.len());
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for (col, &(_, b, i)) in all.iter().enumerate() {
        let (basis, _, eig) = &blocks[b];
        for (r, &full) in basis.iter().enumerate() {
            states[(full, col)] = eig.vectors[(r, i)];
        }
        used[b].push(i);
    }
    let mut worst = 0.0f64;
    for (b, (_, h, eig)) in blocks.iter().enumerate() {
        worst = worst.max(residual(h, eig, &used[b]));
    }
    if worst > RESIDUAL_TOL {
        return Err(Error::Eigensolver(format!("residual {worst:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok((all.iter().map(|t| t.0).collect(), states, worst))
}

/// Lowest `k` eigenpairs of a Hermitian operator.
///
/// Real operators take a real symmetric path; complex ones a Hermitian path.
pub fn eigendecompose(h: &Operator, k: usize) -> Result<EigenSolution> {
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let d = h.dim();
    let k = k.min(d);
    sequential_backend();
    if h.is_real() {
        let m = Mat::<f64>::from_fn(d, d, |i, j| 0.5 * (h.matrix()[(i, j)].re + h.matrix()[(j, i)].re));
        let eig = solve_block(&m)?;
        let blocks = vec![((0..d).collect(), m, eig)];
        let (energies, states, max_residual) = merge_blocks(d, &blocks, k)?;
        return Ok(EigenSolution {
            energies,
            states: EigenStates::Real(states),
            layout: h.layout().clone(),
            params: None,
            cutoffs: None,
            max_residual,
        });
    }
    let m = Mat::<faer::c64>::from_fn(d, d, |i, j| 0.5 * (h.matrix()[(i, j)] + h.matrix()[(j, i)].conj()));
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let energies: Vec<f64> = (0..k).map(|i| s[i].re).collect();
    let norm = (0..d).fold(0.0f64, |a, i| a.max(s[i].re.abs())).max(f64::MIN_POSITIVE);
    let states = DMatrix::from_fn(d, k, |i, j| u[(i, j)]);
    let hv = h.matrix() * &states;
    let mut max_residual = 0.0f64;
    for j in 0..k {
        let r = (hv.column(j) - states.column(j) * C64::new(energies[j], 0.0)).norm() / norm;
        max_residual = max_residual.max(r);
    }
    if max_residual > RESIDUAL_TOL {
        return Err(Error::Eigensolver(format!("residual {max_residual:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(EigenSolution {
        energies,
        states: EigenStates::Complex(states),
        layout: h.layout().clone(),
        params: None,
        cutoffs: None,
        max_residual,
    })
}

/// Lowest `k` eigenpairs of the hybrid Hamiltonian, solved per parity block.
pub fn solve_hybrid(p: &SystemParams, c: &Cutoffs, k: usize) -> Result<EigenSolution> {
    p.validate()?;
    let blocks: Vec<_> = (0..2)
        .map(|parity| {
            let basis = parity_basis(c, parity);
            let h = block_matrix(p, c, &basis);
            let eig = solve_block(&h)?;
            Ok((basis, h, eig))
        })
        .collect::<Result<_>>()?;
    let (energies, states, max_residual) = merge_blocks(c.dim(), &blocks, k.min(c.dim()))?;
    Ok(EigenSolution {
        energies,
        states: EigenStates::Real(states),
        layout: c.layout(),
        params: Some(*p),
        cutoffs: Some(*c),
        max_residual,
    })
}

/// Lowest `k` eigenvalues of the hybrid Hamiltonian (no eigenvectors).
pub fn hybrid_energies(p: &SystemParams, c: &Cutoffs, k: usize) -> Result<Vec<f64>> {
    let mut all = Vec::with_capacity(c.dim());
    for parity in 0..2 {
        let basis = parity_basis(c, parity);
        all.extend(block_values(&block_matrix(p, c, &basis))?);
    }
    all.sort_by(f64::total_cmp);
    all.truncate(k);
    Ok(all)
}

/// Lowest `k` eigenpairs of the Rabi model on `photon` Fock states.
pub fn solve_qrm(p: &SystemParams, photon: ModeCutoff, k: usize) -> Result<EigenSolution> {
    let pp = photon.dim();
    let full = qrm_matrix(p, pp);
    let blocks: Vec<_> = (0..2)
        .map(|parity| {
            let basis: Vec<usize> = (0..2 * pp).filter(|&b| (b / pp + b % pp) % 2 == parity).collect();
            let h = Mat::<f64>::from_fn(basis.len(), basis.len(), |i, j| full[(basis[i], basis[j])]);
            let eig = solve_block(&h)?;
            Ok((basis, h, eig))
        })
        .collect::<Result<_>>()?;
    let (energies, states, max_residual) = merge_blocks(2 * pp, &blocks, k.min(2 * pp))?;
    Ok(EigenSolution {
        energies,
        states: EigenStates::Real(states),
        layout: SpaceLayout::atom_photon(photon),
        params: Some(*p),
        cutoffs: None,
        max_residual,
    })
}

/// Limits of the cutoff search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceOptions {
    /// Largest cutoff per mode.
    pub ceiling: usize,
    /// Largest total dimension ever diagonalized.
    pub max_dim: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self { ceiling: 256, max_dim: 10_000 }
    }
}

/// Outcome of a cutoff search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub cutoffs: Cutoffs,
    /// Largest energy change when both cutoffs grow by 50%.
    pub max_change: f64,
    pub tolerance: f64,
    pub evaluations: usize,
}

/// `⌈1.5 n⌉`
pub fn grow(n: usize) -> usize {
    (3 * n).div_ceil(2)
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Cutoff search for any list of tracked energies.
///
/// Starting from `start`, each factor is doubled until raising it alone by
/// 50% moves every tracked energy by less than `tol/2`; each factor is then
/// bisected back to the smallest passing value, and finally both factors grow
/// together until a joint 50% increase moves every energy by less than `tol`.
pub fn converge_with<F>(start: Cutoffs, tol: f64, opts: ConvergenceOptions, mut eval: F) -> Result<ConvergenceReport>
where
    F: FnMut(&Cutoffs) -> Result<Vec<f64>>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be > 0, got {tol}")));
    }
    let mut cache: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    let mut evaluations = 0;
    let mut energies = |p: usize, f: usize| -> Result<Vec<f64>> {
        if p > opts.ceiling || f > opts.ceiling || 2 * p * f > opts.max_dim {
            return Err(Error::CutoffCeiling(format!(
                "needed photon={p} phonon={f} (ceiling {} per mode, max dimension {})",
                opts.ceiling, opts.max_dim
            )));
        }
        if let Some(e) = cache.get(&(p, f)) {
            return Ok(e.clone());
        }
        evaluations += 1;
        let e = eval(&Cutoffs::new(p, f)?)?;
        cache.insert((p, f), e.clone());
        Ok(e)
    };
    let (mut p, mut f) = (start.photon.dim(), start.phonon.dim());
    let photon_ok = |e: &mut dyn FnMut(usize, usize) -> Result<Vec<f64>>, p: usize, f: usize| -> Result<bool> {
        Ok(max_change(&e(p, f)?, &e(grow(p), f)?) < tol / 2.0)
    };
    let phonon_ok = |e: &mut dyn FnMut(usize, usize) -> Result<Vec<f64>>, p: usize, f: usize| -> Result<bool> {
        Ok(max_change(&e(p, f)?, &e(p, grow(f))?) < tol / 2.0)
    };
    let (mut p_fail, mut f_fail) = (None, None);
    loop {
        let po = photon_ok(&mut energies, p, f)?;
        let fo = phonon_ok(&mut energies, p, f)?;
        if po && fo {
            break;
        }
        if !po {
            p_fail = Some(p);
            p *= 2;
        }
        if !fo {
            f_fail = Some(f);
            f *= 2;
        }
    }
    if let Some(mut lo) = p_fail {
        while p - lo > 1 {
            let mid = (lo + p) / 2;
            if photon_ok(&mut energies, mid, f)? {
                p = mid;
            } else {
                lo = mid;
            }
        }
    }
    if let Some(mut lo) = f_fail {
        while f - lo > 1 {
            let mid = (lo + f) / 2;
            if phonon_ok(&mut energies, p, mid)? {
                f = mid;
            } else {
                lo = mid;
            }
        }
    }
    loop {
        let change = max_change(&energies(p, f)?, &energies(grow(p), grow(f))?);
        if change < tol {
            return Ok(ConvergenceReport { cutoffs: Cutoffs::new(p, f)?, max_change: change, tolerance: tol, evaluations });
        }
        p = grow(p);
        f = grow(f);
    }
}

/// Smallest cutoffs for which each of the `k` lowest energies moves by less
/// than `tol` when both cutoffs increase by 50%, with the converged solution.
pub fn converge_cutoffs(p: &SystemParams, k: usize, tol: f64) -> Result<(Cutoffs, EigenSolution)> {
    converge_cutoffs_with(p, k, tol, ConvergenceOptions::default())
}

pub fn converge_cutoffs_with(
    p: &SystemParams,
    k: usize,
    tol: f64,
    opts: ConvergenceOptions,
) -> Result<(Cutoffs, EigenSolution)> {
    if k == 0 {
        return Err(Error::Empty("level count"));
    }
    let (mut pc, mut fc) = (2usize, 2usize);
    while 2 * pc * fc < k {
        if pc <= fc {
            pc *= 2;
        } else {
            fc *= 2;
        }
    }
    let report = converge_with(Cutoffs::new(pc, fc)?, tol, opts, |c| hybrid_energies(p, c, k))?;
    let sol = solve_hybrid(p, &report.cutoffs, k)?;
    Ok((report.cutoffs, sol))
}

/// Conserved GRWA excitation number on atom ⊗ photon, built from the
/// truncated displacement matrix so that it stays exactly integer-valued.
pub fn conserved_number_polariton(p: &SystemParams, photon: ModeCutoff) -> DMatrix<f64> {
    let pp = photon.dim();
    let d = displacement_matrix(p.nu(), pp); // D(ν)
    let dt = d.transpose(); // D(−ν) = D†(ν)
    let n = DMatrix::from_fn(pp, pp, |i, j| if i == j { i as f64 } else { 0.0 });
    let a = &dt * &n * &d; // D†(ν) a†a D(ν)
    let b = &d * &n * &dt; // D(ν) a†a D†(ν)
    let mut out = DMatrix::zeros(2 * pp, 2 * pp);
    for (s, t) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        // |+x⟩⟨+x| = ½[[1,1],[1,1]], |−x⟩⟨−x| = ½[[1,−1],[−1,1]]
        let sign = if s == t { 1.0 } else { -1.0 };
        let blk = (&a + &b * sign) * 0.5;
        out.view_mut((s * pp, t * pp), (pp, pp)).copy_from(&blk);
    }
    // Σ_N |ψ^ad_{+,N}⟩⟨ψ^ad_{+,N}| with the truncated displaced columns
    for col in 0..pp {
        let (u, w) = (dt.column(col), d.column(col)); // |N_+⟩, |N_−⟩
        let mut v = DVector::zeros(2 * pp);
        for k in 0..pp {
            v[k] = 0.5 * (u[k] + w[k]);
            v[pp + k] = 0.5 * (u[k] - w[k]);
        }
        out += &v * v.transpose();
    }
    out
}

/// The conserved number tensored with the phonon identity.
pub fn conserved_number_grwa(p: &SystemParams, c: &Cutoffs) -> Operator {
    let pol = conserved_number_polariton(p, c.photon);
    let full = pol.kronecker(&DMatrix::<f64>::identity(c.phonon.dim(), c.phonon.dim()));
    Operator::from_real(c.layout(), &full).expect("dimension matches")
}

/// `⟨v|(O ⊗ I)|v⟩` for a polariton operator `O` and a hybrid vector `v`.
pub fn polariton_expectation(op: &DMatrix<f64>, v: &DVector<f64>, phonon: usize) -> f64 {
    let rows = op.nrows();
    let xt = DMatrix::from_column_slice(phonon, rows, v.as_slice()); // Xᵀ
    let y = &xt * op; // (O X)ᵀ since O is symmetric
    xt.component_mul(&y).sum()
}

/// Analytic `|ψ^ad_{±,N}⟩` on atom ⊗ photon, exposed for diagnostics.
pub fn adiabatic_state(n: usize, sign: Sign, p: &SystemParams, photon: ModeCutoff) -> Result<Embedded> {
    let (v, loss) = adiabatic_vector(n, sign, p.nu(), photon.dim());
    Embedded::finish(SpaceLayout::atom_photon(photon), v, loss, "photon")
}

/// One label's match.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Assignment {
    pub index: usize,
    /// `|⟨analytic|numerical⟩|²`
    pub fidelity: f64,
}

/// Greedy maximum-overlap assignment of labels to numerical eigenstates.
#[derive(Clone, Debug, PartialEq)]
pub struct StateAssignment<L> {
    pub entries: Vec<(L, Option<Assignment>)>,
}

impl<L: PartialEq> StateAssignment<L> {
    pub fn get(&self, label: &L) -> Option<Assignment> {
        self.entries.iter().find(|(l, _)| l == label).and_then(|(_, a)| *a)
    }
}

pub const MATCH_TIE: f64 = 1e-9;

/// Greedy assignment on a `labels × states` table of squared overlaps: the
/// globally largest remaining entry is taken first; ties go to the lower
/// numerical index, then the lower label index.
///
/// Overlaps equal to within `MATCH_TIE` count as ties. Exact 50/50 splits
/// (resonant doublets at zero coupling) otherwise get decided by rounding
/// noise, which changes with the cutoffs.
pub fn greedy_assign(table: &[Vec<f64>]) -> Vec<Option<Assignment>> {
    let key = |x: f64| (x / MATCH_TIE).round() as i64;
    let mut cells: Vec<(f64, usize, usize)> = table
        .iter()
        .enumerate()
        .flat_map(|(l, row)| row.iter().enumerate().map(move |(i, &x)| (x, i, l)))
        .collect();
    cells.sort_by(|a, b| key(b.0).cmp(&key(a.0)).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![None; table.len()];
    let mut taken = vec![false; table.first().map_or(0, Vec::len)];
    let mut left = out.len().min(taken.len());
    for (x, i, l) in cells {
        if left == 0 {
            break;
        }
        if out[l].is_none() && !taken[i] {
            out[l] = Some(Assignment { index: i, fidelity: x.clamp(0.0, 1.0) });
            taken[i] = true;
            left -= 1;
        }
    }
    out
}

/// Match analytic kets to the eigenvectors of `solution`.
pub fn match_states<L: Clone>(solution: &EigenSolution, analytic: &[(L, Ket)]) -> Result<StateAssignment<L>> {
    if analytic.is_empty() {
        return Err(Error::Empty("analytic states"));
    }
    if solution.is_empty() {
        return Err(Error::Empty("numerical states"));
    }
    if let Some((_, k)) = analytic.iter().find(|(_, k)| k.layout() != &solution.layout) {
        return Err(Error::LayoutMismatch(format!("ket of dimension {} vs solution layout", k.dim())));
    }
    let table: Vec<Vec<f64>> = analytic.iter().map(|(_, k)| solution.overlaps(k)).collect();
    let picks = greedy_assign(&table);
    Ok(StateAssignment { entries: analytic.iter().map(|(l, _)| l.clone()).zip(picks).collect() })
}

/// Match embedded real analytic states to the eigenvectors of `solution`.
pub fn match_embedded(
    solution: &EigenSolution,
    analytic: &[(AnalyticStateLabel, &Embedded)],
) -> Result<StateAssignment<AnalyticStateLabel>> {
    if analytic.is_empty() {
        return Err(Error::Empty("analytic states"));
    }
    if solution.is_empty() {
        return Err(Error::Empty("numerical states"));
    }
    let table: Vec<Vec<f64>> = analytic
        .iter()
        .map(|(_, e)| {
            if e.layout != solution.layout {
                return Err(Error::LayoutMismatch("embedded state layout differs from the solution".into()));
            }
            Ok(solution.overlaps_real(&e.amplitudes))
        })
        .collect::<Result<_>>()?;
    let picks = greedy_assign(&table);
    Ok(StateAssignment { entries: analytic.iter().map(|(l, _)| *l).zip(picks).collect() })
}

/// Match Rabi-model GRWA or JC states on atom ⊗ photon.
pub fn match_qrm(solution: &EigenSolution, analytic: &[(QrmLabel, &Embedded)]) -> Result<StateAssignment<QrmLabel>> {
    if analytic.is_empty() {
        return Err(Error::Empty("analytic states"));
    }
    if solution.is_empty() {
        return Err(Error::Empty("numerical states"));
    }
    let table: Vec<Vec<f64>> = analytic.iter().map(|(_, e)| solution.overlaps_real(&e.amplitudes)).collect();
    let picks = greedy_assign(&table);
    Ok(StateAssignment { entries: analytic.iter().map(|(l, _)| *l).zip(picks).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{number_op, pauli_ops, Kron, Mode};
    use approx::assert_abs_diff_eq;

    fn params(wa: f64, wc: f64, wm: f64, g: f64, gom: f64) -> SystemParams {
        SystemParams::new(wa, wc, wm, g, gom).unwrap()
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let (sx, _, _) = pauli_ops();
        let sol = eigendecompose(&sx, 2).unwrap();
        assert_abs_diff_eq!(sol.energies[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.energies[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn complex_hermitian_path() {
        let (_, sy, _) = pauli_ops();
        let sol = eigendecompose(&sy, 2).unwrap();
        assert!(matches!(sol.states, EigenStates::Complex(_)));
        assert_abs_diff_eq!(sol.energies[0], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn oscillator_ladder_is_exact() {
        let h = &number_op(Mode::Phonon, ModeCutoff::new(30).unwrap()) * 0.7;
        let sol = eigendecompose(&h, 30).unwrap();
        for (i, e) in sol.energies.iter().enumerate() {
            assert_abs_diff_eq!(*e, 0.7 * i as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = crate::ops::annihilation_op(Mode::Photon, ModeCutoff::new(3).unwrap());
        assert!(matches!(eigendecompose(&a, 2), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn hamiltonian_is_exactly_symmetric() {
        let c = Cutoffs::new(6, 5).unwrap();
        let h = build_hybrid_hamiltonian(&params(1.3, 0.9, 1.0, 0.4, 0.2), &c);
        assert_eq!(h.hermitian_deviation(), 0.0);
    }

    #[test]
    fn parity_blocks_match_full_solve() {
        let p = params(1.3, 0.9, 1.0, 0.7, 0.3);
        let c = Cutoffs::new(10, 8).unwrap();
        let full = eigendecompose(&build_hybrid_hamiltonian(&p, &c), 40).unwrap();
        let blocks = solve_hybrid(&p, &c, 40).unwrap();
        let vals = hybrid_energies(&p, &c, 40).unwrap();
        for i in 0..40 {
            assert_abs_diff_eq!(full.energies[i], blocks.energies[i], epsilon = 1e-11);
            assert_abs_diff_eq!(vals[i], blocks.energies[i], epsilon = 1e-11);
        }
    }

    #[test]
    fn parity_commutes_with_hamiltonian() {
        let c = Cutoffs::new(7, 4).unwrap();
        let h = build_hybrid_hamiltonian(&params(1.0, 1.0, 1.0, 0.8, 0.0), &c);
        let (_, _, sz) = pauli_ops();
        let pp = c.photon.dim();
        let flip = Operator::from_real(
            SpaceLayout::mode(Mode::Photon, c.photon),
            &DMatrix::from_fn(pp, pp, |i, j| if i == j { if i % 2 == 0 { 1.0 } else { -1.0 } } else { 0.0 }),
        )
        .unwrap();
        let ph = Operator::identity(SpaceLayout::mode(Mode::Phonon, c.phonon));
        let parity = sz.kron(&flip).unwrap().kron(&ph).unwrap();
        assert!(h.commutator(&parity).max_abs() < 1e-12);
    }

    #[test]
    fn uncoupled_spectrum() {
        let p = params(3.3, 5.7, 1.0, 0.0, 0.0);
        let c = Cutoffs::new(4, 6).unwrap();
        let sol = solve_hybrid(&p, &c, 48).unwrap();
        let mut expect: Vec<f64> = (0..2)
            .flat_map(|s| (0..4).flat_map(move |n| (0..6).map(move |m| (s, n, m))))
            .map(|(s, n, m)| if s == 0 { 1.65 } else { -1.65 } + 5.7 * n as f64 + m as f64)
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in sol.energies.iter().zip(&expect) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn energies_even_in_coupling_sign() {
        let c = Cutoffs::new(12, 6).unwrap();
        let p = params(1.0, 1.0, 1.0, 0.6, 0.2);
        let mut q = p;
        q.g_ac = -0.6;
        let a = hybrid_energies(&p, &c, 20).unwrap();
        let b = hybrid_energies(&q, &c, 20).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-11);
        }
    }

    #[test]
    fn greedy_ties_prefer_lower_index() {
        let picks = greedy_assign(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(picks[0].unwrap().index, 0);
        assert_eq!(picks[1].unwrap().index, 1);
        let picks = greedy_assign(&[vec![0.9, 0.1], vec![0.95, 0.0]]);
        assert_eq!(picks[1].unwrap().index, 0);
        assert_eq!(picks[0].unwrap().index, 1);
    }

    #[test]
    fn convergence_immediate_when_uncoupled() {
        let p = params(3.3, 5.7, 1.0, 0.0, 0.0);
        let (c, sol) = converge_cutoffs(&p, 4, 1e-8).unwrap();
        assert!(c.photon.dim() <= 4 && c.phonon.dim() <= 4, "{c}");
        assert_abs_diff_eq!(sol.energies[0], -1.65, epsilon = 1e-12);
    }

    #[test]
    fn conserved_number_is_integer_at_zero_coupling() {
        let p = params(1.0, 1.0, 1.0, 0.0, 0.0);
        let op = conserved_number_polariton(&p, ModeCutoff::new(6).unwrap());
        let sol = eigendecompose(&Operator::from_real(SpaceLayout::atom_photon(ModeCutoff::new(6).unwrap()), &op).unwrap(), 12).unwrap();
        for e in sol.energies {
            assert_abs_diff_eq!(e, e.round(), epsilon = 1e-12);
        }
    }
}
