//! Atom-cavity (Rabi model) approximations: displaced-oscillator overlaps,
//! the adiabatic basis, the GRWA doublets and the Jaynes-Cummings baseline.

use nalgebra::DVector;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::label::{QrmLabel, Sign};
use crate::ops::{Ket, ModeCutoff, SpaceLayout};
use crate::params::{mixing_angle, SystemParams};

/// Largest truncation loss tolerated when embedding an analytic state.
pub const EMBED_LOSS_LIMIT: f64 = 1e-6;

/// `ln n!` by direct summation (exact to rounding for the sizes used here).
pub fn log_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Generalized Laguerre polynomial `L_n^α(x)` by upward recurrence in `n`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Overlap `⟨M_−|N_+⟩ = ⟨M|D(−2ν)|N⟩` of two oppositely displaced Fock states.
///
/// For `M ≤ N` this is `e^{−2ν²}(2ν)^{N−M}√(M!/N!) L_M^{N−M}(4ν²)`; for
/// `M > N` the sign rule `(−1)^{M−N}⟨N_−|M_+⟩` applies. The prefactor is
/// assembled in the log domain so large indices neither overflow nor
/// underflow prematurely.
pub fn displaced_overlap(m: usize, n: usize, nu: f64) -> f64 {
    if m > n {
        let flip = if (m - n).is_multiple_of(2) { 1.0 } else { -1.0 };
        return flip * displaced_overlap(n, m, nu);
    }
    let k = n - m;
    if nu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let x = 4.0 * nu * nu;
    let lag = laguerre(m, k as f64, x);
    if lag == 0.0 {
        return 0.0;
    }
    let two_nu = 2.0 * nu;
    let mut sign = lag.signum();
    if two_nu < 0.0 && k % 2 == 1 {
        sign = -sign;
    }
    let log_mag = -2.0 * nu * nu + k as f64 * two_nu.abs().ln()
        + 0.5 * (log_factorial(m) - log_factorial(n))
        + lag.abs().ln();
    sign * log_mag.exp()
}

/// Amplitudes `⟨k|D(μ)|n⟩` for `k < dim`, and the probability lost beyond
/// the cutoff, `1 − Σ_k |⟨k|D(μ)|n⟩|²`.
pub fn displaced_fock(n: usize, mu: f64, dim: usize) -> (DVector<f64>, f64) {
    let v = DVector::from_fn(dim, |k, _| displaced_overlap(k, n, -mu / 2.0));
    let loss = (1.0 - v.norm_squared()).max(0.0);
    (v, loss)
}

/// Adiabatic energies `(E^ad_{+,N}, E^ad_{−,N})`.
pub fn adiabatic_spectrum(n: usize, p: &SystemParams) -> (f64, f64) {
    let nu = p.nu();
    let base = p.omega_c * (n as f64 - nu * nu);
    let split = 0.5 * p.omega_a * displaced_overlap(n, n, nu);
    (base + split, base - split)
}

/// Per-sector scalars of the GRWA doublet built on `ψ^ad_{+,N}`, `ψ^ad_{−,N+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QrmGrwaQuantities {
    pub n: usize,
    /// `⟨N_−|N_+⟩`
    pub overlap_nn: f64,
    /// `⟨N+1_−|N+1_+⟩`
    pub overlap_n1n1: f64,
    /// `⟨N_−|N+1_+⟩`
    pub overlap_nn1: f64,
    /// `Ω_N = 2 g_ac √(N+1)`
    pub omega_n: f64,
    /// `Ω_{N,N} = ω_a⟨N_−|N_+⟩`
    pub omega_nn: f64,
    /// `Ω_{N+1,N+1}`
    pub omega_n1n1: f64,
    /// `Ω_{N,N+1}`
    pub omega_nnp: f64,
    pub delta_n: f64,
    pub t_n: f64,
    pub alpha_n: f64,
    /// Set when `Δ_N = Ω_{N,N+1} = 0` and `α_N` took the π/2 convention.
    pub degenerate: bool,
}

impl QrmGrwaQuantities {
    /// Centre of the doublet, `ω_c(N+½) − g²/ω_c + ¼(Ω_{N,N} − Ω_{N+1,N+1})`.
    pub fn centre(&self, p: &SystemParams) -> f64 {
        let nu = p.nu();
        p.omega_c * (self.n as f64 + 0.5 - nu * nu) + 0.25 * (self.omega_nn - self.omega_n1n1)
    }
}

pub fn grwa_frequencies(n: usize, p: &SystemParams) -> QrmGrwaQuantities {
    let nu = p.nu();
    let overlap_nn = displaced_overlap(n, n, nu);
    let overlap_n1n1 = displaced_overlap(n + 1, n + 1, nu);
    let overlap_nn1 = displaced_overlap(n, n + 1, nu);
    let omega_nnp = p.omega_a * overlap_nn1;
    let delta_n = 0.5 * p.omega_a * (overlap_nn + overlap_n1n1) - p.omega_c;
    let (alpha_n, degenerate) = mixing_angle(omega_nnp, delta_n);
    if degenerate {
        log::debug!("sector {n}: vanishing GRWA block, alpha set to pi/2");
    }
    QrmGrwaQuantities {
        n,
        overlap_nn,
        overlap_n1n1,
        overlap_nn1,
        omega_n: 2.0 * p.g_ac * ((n + 1) as f64).sqrt(),
        omega_nn: p.omega_a * overlap_nn,
        omega_n1n1: p.omega_a * overlap_n1n1,
        omega_nnp,
        delta_n,
        t_n: delta_n.hypot(omega_nnp),
        alpha_n,
        degenerate,
    }
}

/// Energies associated with one sector `N` of the Rabi model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QrmEnergyRecord {
    pub n: usize,
    /// Level of the `ω_a = 0` model, `ω_c(N − g²/ω_c²)`.
    pub e_n: f64,
    pub e_ad_plus: f64,
    pub e_ad_minus: f64,
    pub e_grwa_g: f64,
    pub e_grwa_plus: f64,
    pub e_grwa_minus: f64,
}

/// GRWA ground energy `−g²/ω_c − Ω_{0,0}/2`.
pub fn grwa_ground_energy(p: &SystemParams) -> f64 {
    -p.g_ac * p.g_ac / p.omega_c - 0.5 * p.omega_a * displaced_overlap(0, 0, p.nu())
}

/// GRWA doublet energy `E^grwa_{±,N}`.
pub fn grwa_energy(n: usize, sign: Sign, p: &SystemParams) -> f64 {
    let q = grwa_frequencies(n, p);
    q.centre(p) + sign.as_f64() * 0.5 * q.t_n
}

pub fn grwa_qrm_spectrum(p: &SystemParams, n_max: usize) -> Vec<QrmEnergyRecord> {
    let e_g = grwa_ground_energy(p);
    let nu = p.nu();
    (0..=n_max)
        .map(|n| {
            let q = grwa_frequencies(n, p);
            let (e_ad_plus, e_ad_minus) = adiabatic_spectrum(n, p);
            QrmEnergyRecord {
                n,
                e_n: p.omega_c * (n as f64 - nu * nu),
                e_ad_plus,
                e_ad_minus,
                e_grwa_g: e_g,
                e_grwa_plus: q.centre(p) + 0.5 * q.t_n,
                e_grwa_minus: q.centre(p) - 0.5 * q.t_n,
            }
        })
        .collect()
}

/// A state vector with real amplitudes together with the probability its
/// constituents lost to the cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedded {
    pub layout: SpaceLayout,
    pub amplitudes: DVector<f64>,
    /// Largest truncation loss of any displaced Fock column used.
    pub truncation_loss: f64,
    /// `|‖v‖ − 1|` before renormalization.
    pub norm_deviation: f64,
}

impl Embedded {
    pub(crate) fn finish(layout: SpaceLayout, v: DVector<f64>, loss: f64, mode: &'static str) -> Result<Self> {
        let norm = v.norm();
        let norm_deviation = (norm - 1.0).abs();
        let worst = loss.max(norm_deviation);
        if !(worst <= EMBED_LOSS_LIMIT) {
            return Err(Error::Truncation { mode, loss: worst, limit: EMBED_LOSS_LIMIT });
        }
        Ok(Self { layout, amplitudes: v / norm, truncation_loss: loss, norm_deviation })
    }

    pub fn ket(&self) -> Ket {
        Ket::from_real(self.layout.clone(), self.amplitudes.as_slice()).expect("layout matches")
    }

    pub fn dot(&self, other: &Embedded) -> f64 {
        self.amplitudes.dot(&other.amplitudes)
    }
}

/// `|ψ^ad_{±,N}⟩` on atom ⊗ photon as a raw vector (index `s·P + k`, `s = 0`
/// for `|+z⟩`), plus the truncation loss of its displaced columns.
pub(crate) fn adiabatic_vector(n: usize, sign: Sign, nu: f64, dim: usize) -> (DVector<f64>, f64) {
    let (u, lu) = displaced_fock(n, -nu, dim); // |N_+⟩
    let (w, lw) = displaced_fock(n, nu, dim); // |N_−⟩
    let s = sign.as_f64();
    let mut v = DVector::zeros(2 * dim);
    for k in 0..dim {
        v[k] = 0.5 * (u[k] + s * w[k]);
        v[dim + k] = 0.5 * (u[k] - s * w[k]);
    }
    (v, lu.max(lw))
}

/// Raw GRWA eigenvector of the Rabi model and its truncation loss.
pub(crate) fn grwa_vector(label: QrmLabel, p: &SystemParams, dim: usize) -> (DVector<f64>, f64) {
    let nu = p.nu();
    match label {
        QrmLabel::Ground => adiabatic_vector(0, Sign::Minus, nu, dim),
        QrmLabel::Doublet { n, sign } => {
            let q = grwa_frequencies(n, p);
            let (a, la) = adiabatic_vector(n, Sign::Plus, nu, dim);
            let (b, lb) = adiabatic_vector(n + 1, Sign::Minus, nu, dim);
            let (s, c) = ((q.alpha_n / 2.0).sin(), (q.alpha_n / 2.0).cos());
            let v = match sign {
                Sign::Plus => a * s + b * c,
                Sign::Minus => a * c - b * s,
            };
            (v, la.max(lb))
        }
    }
}

/// GRWA eigenstate of the Rabi model embedded on atom ⊗ photon.
///
/// Fails with [`Error::Truncation`] when the photon cutoff loses more than
/// [`EMBED_LOSS_LIMIT`] of any displaced constituent.
pub fn grwa_state_embed(label: QrmLabel, p: &SystemParams, photon: ModeCutoff) -> Result<Embedded> {
    let (v, loss) = grwa_vector(label, p, photon.dim());
    Embedded::finish(SpaceLayout::atom_photon(photon), v, loss, "photon")
}

/// Jaynes-Cummings scalars of sector `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JcQuantities {
    pub n: usize,
    pub beta_n: f64,
    pub r_n: f64,
    pub degenerate: bool,
}

pub fn jc_quantities(n: usize, p: &SystemParams) -> JcQuantities {
    let omega_n = 2.0 * p.g_ac * ((n + 1) as f64).sqrt();
    let (beta_n, degenerate) = mixing_angle(omega_n, p.detuning());
    JcQuantities { n, beta_n, r_n: p.detuning().hypot(omega_n), degenerate }
}

/// JC energy: `−ω_a/2` for the ground state, `ω_c(N+½) ± R_N/2` otherwise.
pub fn jc_energy(label: QrmLabel, p: &SystemParams) -> f64 {
    match label {
        QrmLabel::Ground => -0.5 * p.omega_a,
        QrmLabel::Doublet { n, sign } => {
            p.omega_c * (n as f64 + 0.5) + sign.as_f64() * 0.5 * jc_quantities(n, p).r_n
        }
    }
}

pub(crate) fn jc_vector(label: QrmLabel, p: &SystemParams, dim: usize) -> Result<DVector<f64>> {
    let mut v = DVector::zeros(2 * dim);
    match label {
        QrmLabel::Ground => v[dim] = 1.0,
        QrmLabel::Doublet { n, sign } => {
            if n + 2 > dim {
                return Err(Error::InvalidCutoff(format!("JC sector {n} needs {} photon states", n + 2)));
            }
            let beta = jc_quantities(n, p).beta_n;
            let (s, c) = ((beta / 2.0).sin(), (beta / 2.0).cos());
            let (up, down) = match sign {
                Sign::Plus => (s, c),
                Sign::Minus => (c, -s),
            };
            v[n] = up;
            v[dim + n + 1] = down;
        }
    }
    Ok(v)
}

/// JC energy and embedded eigenstate.
#[derive(Clone, Debug)]
pub struct JcLevel {
    pub label: QrmLabel,
    pub energy: f64,
    pub state: Embedded,
}

/// Ground state plus both doublet members for `N = 0..=n_max`.
pub fn jc_spectrum_and_states(p: &SystemParams, n_max: usize, photon: ModeCutoff) -> Result<Vec<JcLevel>> {
    let labels = std::iter::once(QrmLabel::Ground).chain(
        (0..=n_max).flat_map(|n| Sign::BOTH.into_iter().map(move |sign| QrmLabel::Doublet { n, sign })),
    );
    labels
        .map(|label| {
            let v = jc_vector(label, p, photon.dim())?;
            let state = Embedded::finish(SpaceLayout::atom_photon(photon), v, 0.0, "photon")?;
            Ok(JcLevel { label, energy: jc_energy(label, p), state })
        })
        .collect()
}

/// `(|+x⟩ ± |−x⟩)/√2` helper shared with the hybrid embedding.
pub(crate) fn x_combination(a: &DVector<f64>, b: &DVector<f64>, sign: Sign) -> DVector<f64> {
    (a + b * sign.as_f64()) * FRAC_1_SQRT_2
}
