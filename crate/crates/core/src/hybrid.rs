//! Sector decomposition of the atom-photon-phonon Hamiltonian: the GRWA-GRWA
//! energies and eigenstates of the three spectral families, and the RWA-RWA
//! baseline obtained by the same pipeline with Jaynes-Cummings polaritons.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::Result;
use crate::label::{AnalyticStateLabel, Family, QrmLabel, Scheme, Sign};
use crate::ops::Cutoffs;
use crate::params::{mixing_angle, SystemParams};
use crate::qrm::{
    displaced_fock, displaced_overlap, grwa_frequencies, grwa_ground_energy, grwa_vector, jc_quantities,
    jc_vector, x_combination, Embedded, JcQuantities, QrmGrwaQuantities,
};

/// Per-sector constants of the displaced-frame polariton-phonon model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridSectorParams {
    pub n: usize,
    pub k_n: f64,
    pub q_n: f64,
    pub q_g: f64,
    pub c_n: f64,
    pub g_shift: f64,
    pub g_eff: f64,
    /// Magnitude `2 q_N g_eff / ω_m` of the dropped off-diagonal shift.
    pub stark_shift: f64,
    pub qrm: QrmGrwaQuantities,
}

pub fn sector_params(n: usize, p: &SystemParams) -> HybridSectorParams {
    let qrm = grwa_frequencies(n, p);
    let nu2 = p.nu() * p.nu();
    let ratio = qrm.omega_n / p.omega_c;
    let (sa, ca) = qrm.alpha_n.sin_cos();
    let k_n = qrm.centre(p);
    let q_n = p.g_om * (n as f64 + 0.5 + nu2);
    let g_eff = 0.5 * p.g_om * (sa + ratio * ca);
    HybridSectorParams {
        n,
        k_n,
        q_n,
        q_g: p.g_om * nu2,
        c_n: k_n - q_n * q_n / p.omega_m,
        g_shift: 0.5 * p.g_om * (ratio * sa - ca),
        g_eff,
        stark_shift: 2.0 * q_n * g_eff / p.omega_m,
        qrm,
    }
}

/// `⟨M^{(q_N)}_{−′}|Mp^{(q_N)}_{+′}⟩ = ⟨M|D(−2 g_eff/ω_m)|Mp⟩`; the `q_N`
/// displacement cancels.
pub fn phonon_displaced_overlap(m: usize, mp: usize, n: usize, p: &SystemParams) -> f64 {
    displaced_overlap(m, mp, sector_params(n, p).g_eff / p.omega_m)
}

/// Polariton-phonon doublet scalars for the pair `(M, M+1)` of sector `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolaritonPhononQuantities {
    pub n: usize,
    pub m: usize,
    pub overlap_mm: f64,
    pub overlap_m1m1: f64,
    pub overlap_mm1: f64,
    /// `Ω′_{M,M+1} = T_N⟨M_{−′}|M+1_{+′}⟩`
    pub omega_p_mm1: f64,
    /// `Ω′_{M,M} = T_N⟨M_{−′}|M_{+′}⟩`
    pub omega_p_mm: f64,
    pub omega_p_m1m1: f64,
    pub delta_p: f64,
    pub phi: f64,
    pub degenerate: bool,
}

fn polariton_phonon(sector: &HybridSectorParams, m: usize, p: &SystemParams) -> PolaritonPhononQuantities {
    let x = sector.g_eff / p.omega_m;
    let t = sector.qrm.t_n;
    let overlap_mm = displaced_overlap(m, m, x);
    let overlap_m1m1 = displaced_overlap(m + 1, m + 1, x);
    let overlap_mm1 = displaced_overlap(m, m + 1, x);
    let omega_p_mm1 = t * overlap_mm1;
    let delta_p = 0.5 * t * (overlap_mm + overlap_m1m1) - p.omega_m;
    let (phi, degenerate) = mixing_angle(omega_p_mm1, delta_p);
    PolaritonPhononQuantities {
        n: sector.n,
        m,
        overlap_mm,
        overlap_m1m1,
        overlap_mm1,
        omega_p_mm1,
        omega_p_mm: t * overlap_mm,
        omega_p_m1m1: t * overlap_m1m1,
        delta_p,
        phi,
        degenerate,
    }
}

pub fn polariton_phonon_quantities(n: usize, m: usize, p: &SystemParams) -> PolaritonPhononQuantities {
    polariton_phonon(&sector_params(n, p), m, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridEnergyRecord {
    pub label: AnalyticStateLabel,
    pub energy: f64,
    pub params: SystemParams,
}

/// `E_M = ω_m M − q_G²/ω_m + E^grwa_G`
pub fn energy_zero_polariton(m: usize, p: &SystemParams) -> HybridEnergyRecord {
    let q_g = p.g_om * p.nu() * p.nu();
    let energy = p.omega_m * m as f64 - q_g * q_g / p.omega_m + grwa_ground_energy(p);
    HybridEnergyRecord { label: AnalyticStateLabel::grwa(Family::ZeroPolariton { m }), energy, params: *p }
}

/// `E_G^{(N)} = C_N − g_eff²/ω_m − (T_N/2)⟨0_{−′}|0_{+′}⟩`
pub fn energy_isolated(n: usize, p: &SystemParams) -> HybridEnergyRecord {
    let s = sector_params(n, p);
    let o = displaced_overlap(0, 0, s.g_eff / p.omega_m);
    let energy = s.c_n - s.g_eff * s.g_eff / p.omega_m - 0.5 * s.qrm.t_n * o;
    HybridEnergyRecord { label: AnalyticStateLabel::grwa(Family::Isolated { n }), energy, params: *p }
}

/// `E^{(N)}_{±,M} = C_N + ω_m(M+½) − g_eff²/ω_m + ¼(Ω′_{M,M} − Ω′_{M+1,M+1}) ± ½√(Δ′² + Ω′²)`
pub fn energy_doublet(n: usize, m: usize, sign: Sign, p: &SystemParams) -> HybridEnergyRecord {
    let s = sector_params(n, p);
    let q = polariton_phonon(&s, m, p);
    let centre = s.c_n + p.omega_m * (m as f64 + 0.5) - s.g_eff * s.g_eff / p.omega_m
        + 0.25 * (q.omega_p_mm - q.omega_p_m1m1);
    let energy = centre + sign.as_f64() * 0.5 * q.delta_p.hypot(q.omega_p_mm1);
    HybridEnergyRecord { label: AnalyticStateLabel::grwa(Family::Doublet { n, m, sign }), energy, params: *p }
}

/// Analytic energy of any label under its own scheme.
pub fn analytic_energy(label: AnalyticStateLabel, p: &SystemParams) -> f64 {
    match label.scheme {
        Scheme::Grwa => match label.family {
            Family::ZeroPolariton { m } => energy_zero_polariton(m, p).energy,
            Family::Isolated { n } => energy_isolated(n, p).energy,
            Family::Doublet { n, m, sign } => energy_doublet(n, m, sign, p).energy,
        },
        Scheme::Rwa => rwa_energy(label.family, p),
    }
}

/// Row-major product `a ⊗ b`.
pub(crate) fn kron_vec(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        if x != 0.0 {
            out.rows_mut(i * b.len(), b.len()).axpy(x, b, 0.0);
        }
    }
    out
}

/// `|Ψ^ad_{±,N,M}⟩ = (χ_+|M_{+′}⟩ ± χ_−|M_{−′}⟩)/√2` from the σ_x-polariton
/// kets `chi = (χ_+, χ_−)`.
fn hybrid_adiabatic(
    chi: &(DVector<f64>, DVector<f64>),
    s: &HybridSectorParams,
    m: usize,
    sign: Sign,
    p: &SystemParams,
    phonon: usize,
) -> (DVector<f64>, f64) {
    let (plus, lp) = displaced_fock(m, (s.q_n - s.g_eff) / p.omega_m, phonon);
    let (minus, lm) = displaced_fock(m, (s.q_n + s.g_eff) / p.omega_m, phonon);
    let v = x_combination(&kron_vec(&chi.0, &plus), &kron_vec(&chi.1, &minus), sign);
    (v, lp.max(lm))
}

fn polariton_x_basis(n: usize, p: &SystemParams, photon: usize) -> ((DVector<f64>, DVector<f64>), f64) {
    let (up, lu) = grwa_vector(QrmLabel::Doublet { n, sign: Sign::Plus }, p, photon);
    let (down, ld) = grwa_vector(QrmLabel::Doublet { n, sign: Sign::Minus }, p, photon);
    let chi = (x_combination(&up, &down, Sign::Plus), x_combination(&up, &down, Sign::Minus));
    (chi, lu.max(ld))
}

fn grwa_hybrid_vector(family: Family, p: &SystemParams, c: &Cutoffs) -> (DVector<f64>, f64) {
    let (photon, phonon) = (c.photon.dim(), c.phonon.dim());
    match family {
        Family::ZeroPolariton { m } => {
            let (g, lg) = grwa_vector(QrmLabel::Ground, p, photon);
            let q_g = p.g_om * p.nu() * p.nu();
            let (ph, lph) = displaced_fock(m, q_g / p.omega_m, phonon);
            (kron_vec(&g, &ph), lg.max(lph))
        }
        Family::Isolated { n } => {
            let s = sector_params(n, p);
            let (chi, lc) = polariton_x_basis(n, p, photon);
            let (v, lv) = hybrid_adiabatic(&chi, &s, 0, Sign::Minus, p, phonon);
            (v, lc.max(lv))
        }
        Family::Doublet { n, m, sign } => {
            let s = sector_params(n, p);
            let q = polariton_phonon(&s, m, p);
            let (chi, lc) = polariton_x_basis(n, p, photon);
            let (a, la) = hybrid_adiabatic(&chi, &s, m, Sign::Plus, p, phonon);
            let (b, lb) = hybrid_adiabatic(&chi, &s, m + 1, Sign::Minus, p, phonon);
            let (sn, cs) = ((q.phi / 2.0).sin(), (q.phi / 2.0).cos());
            let v = match sign {
                Sign::Plus => a * sn + b * cs,
                Sign::Minus => a * cs - b * sn,
            };
            (v, lc.max(la).max(lb))
        }
    }
}

/// Analytic eigenstate embedded on atom ⊗ photon ⊗ phonon.
///
/// Fails when either cutoff loses more than the embedding limit of a displaced
/// constituent.
pub fn hybrid_state_embed(label: AnalyticStateLabel, p: &SystemParams, cutoffs: &Cutoffs) -> Result<Embedded> {
    let (v, loss) = match label.scheme {
        Scheme::Grwa => grwa_hybrid_vector(label.family, p, cutoffs),
        Scheme::Rwa => rwa_hybrid_vector(label.family, p, cutoffs)?,
    };
    Embedded::finish(cutoffs.layout(), v, loss, "photon/phonon")
}

/// RWA-RWA sector constants built on Jaynes-Cummings polaritons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RwaSectorParams {
    pub n: usize,
    pub k_n: f64,
    pub q_n: f64,
    pub c_n: f64,
    pub jc: JcQuantities,
}

pub fn rwa_sector_params(n: usize, p: &SystemParams) -> RwaSectorParams {
    let k_n = p.omega_c * (n as f64 + 0.5);
    let q_n = p.g_om * (n as f64 + 0.5);
    RwaSectorParams { n, k_n, q_n, c_n: k_n - q_n * q_n / p.omega_m, jc: jc_quantities(n, p) }
}

/// Mixing angle θ^{(N)}_M of the RWA polariton-phonon doublet, from
/// `tan θ = −g_om√(M+1)/(R_N − ω_m)`.
pub fn rwa_theta(n: usize, m: usize, p: &SystemParams) -> (f64, bool) {
    let r = jc_quantities(n, p).r_n;
    mixing_angle(p.g_om * ((m + 1) as f64).sqrt(), r - p.omega_m)
}

pub fn rwa_energy(family: Family, p: &SystemParams) -> f64 {
    match family {
        Family::ZeroPolariton { m } => -0.5 * p.omega_a + p.omega_m * m as f64,
        Family::Isolated { n } => {
            let s = rwa_sector_params(n, p);
            s.c_n - 0.5 * s.jc.r_n
        }
        Family::Doublet { n, m, sign } => {
            let s = rwa_sector_params(n, p);
            let split = (s.jc.r_n - p.omega_m).hypot(p.g_om * ((m + 1) as f64).sqrt());
            s.c_n + p.omega_m * (m as f64 + 0.5) + sign.as_f64() * 0.5 * split
        }
    }
}

fn rwa_hybrid_vector(family: Family, p: &SystemParams, c: &Cutoffs) -> Result<(DVector<f64>, f64)> {
    let (photon, phonon) = (c.photon.dim(), c.phonon.dim());
    Ok(match family {
        Family::ZeroPolariton { m } => {
            let g = jc_vector(QrmLabel::Ground, p, photon)?;
            let (ph, l) = displaced_fock(m, 0.0, phonon);
            (kron_vec(&g, &ph), l)
        }
        Family::Isolated { n } => {
            let s = rwa_sector_params(n, p);
            let pol = jc_vector(QrmLabel::Doublet { n, sign: Sign::Minus }, p, photon)?;
            let (ph, l) = displaced_fock(0, s.q_n / p.omega_m, phonon);
            (kron_vec(&pol, &ph), l)
        }
        Family::Doublet { n, m, sign } => {
            let s = rwa_sector_params(n, p);
            let up = jc_vector(QrmLabel::Doublet { n, sign: Sign::Plus }, p, photon)?;
            let down = jc_vector(QrmLabel::Doublet { n, sign: Sign::Minus }, p, photon)?;
            let (pm, lm) = displaced_fock(m, s.q_n / p.omega_m, phonon);
            let (pm1, lm1) = displaced_fock(m + 1, s.q_n / p.omega_m, phonon);
            let theta = rwa_theta(n, m, p).0;
            let (sn, cs) = ((theta / 2.0).sin(), (theta / 2.0).cos());
            let (a, b) = (kron_vec(&up, &pm), kron_vec(&down, &pm1));
            let v = match sign {
                Sign::Plus => a * sn + b * cs,
                Sign::Minus => a * cs - b * sn,
            };
            (v, lm.max(lm1))
        }
    })
}

/// An analytic level: energy and embedded eigenstate.
#[derive(Clone, Debug)]
pub struct HybridLevel {
    pub record: HybridEnergyRecord,
    pub state: Embedded,
}

/// Labels of every family with `N ≤ n_max`, `M ≤ m_max`, in canonical order.
pub fn all_families(n_max: usize, m_max: usize) -> Vec<Family> {
    let mut out: Vec<Family> = (0..=m_max).map(|m| Family::ZeroPolariton { m }).collect();
    out.extend((0..=n_max).map(|n| Family::Isolated { n }));
    for n in 0..=n_max {
        for m in 0..=m_max {
            for sign in Sign::BOTH {
                out.push(Family::Doublet { n, m, sign });
            }
        }
    }
    out
}

/// RWA-RWA energies and embedded states for all families up to the bounds.
pub fn rwa_hybrid_spectrum(p: &SystemParams, n_max: usize, m_max: usize, cutoffs: &Cutoffs) -> Result<Vec<HybridLevel>> {
    all_families(n_max, m_max)
        .into_iter()
        .map(|family| {
            let label = AnalyticStateLabel::rwa(family);
            let state = hybrid_state_embed(label, p, cutoffs)?;
            Ok(HybridLevel { record: HybridEnergyRecord { label, energy: rwa_energy(family, p), params: *p }, state })
        })
        .collect()
}

/// GRWA-GRWA energies and embedded states for all families up to the bounds.
pub fn grwa_hybrid_spectrum(p: &SystemParams, n_max: usize, m_max: usize, cutoffs: &Cutoffs) -> Result<Vec<HybridLevel>> {
    all_families(n_max, m_max)
        .into_iter()
        .map(|family| {
            let label = AnalyticStateLabel::grwa(family);
            let state = hybrid_state_embed(label, p, cutoffs)?;
            Ok(HybridLevel { record: HybridEnergyRecord { label, energy: analytic_energy(label, p), params: *p }, state })
        })
        .collect()
}

/// Truncation loss tolerated by [`embedding_cutoffs`].
pub const EMBED_SCAN_LOSS: f64 = 1e-10;

/// Smallest dimension keeping `D(μ)|n⟩` for every `n ≤ top` and every listed
/// shift within [`EMBED_SCAN_LOSS`].
fn scan_cutoff(shifts: &[f64], top: usize) -> usize {
    let fits = |dim: usize| {
        shifts.iter().all(|&mu| (0..=top).all(|n| displaced_fock(n, mu, dim).1 <= EMBED_SCAN_LOSS))
    };
    let mut dim = top + 2;
    while !fits(dim) {
        dim += 1;
    }
    dim
}

/// Smallest cutoffs that embed every analytic state with `N ≤ n_max`,
/// `M ≤ m_max` at these parameters, in both schemes.
pub fn embedding_cutoffs(p: &SystemParams, n_max: usize, m_max: usize) -> Cutoffs {
    let nu = p.nu();
    let photon = scan_cutoff(&[nu, -nu], n_max + 1);
    let mut shifts = vec![p.g_om * nu * nu / p.omega_m];
    for n in 0..=n_max {
        let s = sector_params(n, p);
        shifts.push((s.q_n - s.g_eff) / p.omega_m);
        shifts.push((s.q_n + s.g_eff) / p.omega_m);
        shifts.push(rwa_sector_params(n, p).q_n / p.omega_m);
    }
    let phonon = scan_cutoff(&shifts, m_max + 1);
    Cutoffs::new(photon, phonon).expect("at least two levels")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrm::grwa_energy;
    use approx::assert_abs_diff_eq;

    fn p(wa: f64, wc: f64, g: f64, gom: f64) -> SystemParams {
        SystemParams::new(wa, wc, 1.0, g, gom).unwrap()
    }

    #[test]
    fn sector_constants_uncoupled() {
        let s = sector_params(0, &p(5.0, 5.0, 0.0, 0.3));
        assert_abs_diff_eq!(s.q_n, 0.15, epsilon = 1e-15);
        assert_eq!(s.q_g, 0.0);
        assert_abs_diff_eq!(s.c_n, s.k_n - s.q_n * s.q_n, epsilon = 1e-15);
    }

    #[test]
    fn weak_resonant_coupling_gives_rwa_phonon_coupling() {
        let s = sector_params(1, &p(5.0, 5.0, 1e-4, 0.2));
        assert_abs_diff_eq!(s.g_eff, 0.1, epsilon = 1e-4);
    }

    #[test]
    fn phonon_overlap_ignores_static_shift() {
        let pp = p(5.0, 5.0, 3.0, 0.4);
        let s = sector_params(2, &pp);
        let x = s.g_eff;
        for q in [s.q_n, 2.0 * s.q_n] {
            let (a, _) = displaced_fock(1, q + x, 60);
            let (b, _) = displaced_fock(3, q - x, 60);
            assert_abs_diff_eq!(a.dot(&b), phonon_displaced_overlap(1, 3, 2, &pp), epsilon = 1e-12);
        }
        assert_eq!(phonon_displaced_overlap(2, 4, 1, &p(5.0, 5.0, 1.0, 0.0)), 0.0);
    }

    #[test]
    fn zero_polariton_ladder_spacing() {
        let pp = p(5.0, 5.0, 4.0, 0.1);
        for m in 0..5 {
            let d = energy_zero_polariton(m + 1, &pp).energy - energy_zero_polariton(m, &pp).energy;
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(energy_zero_polariton(3, &p(5.0, 5.0, 0.0, 0.1)).energy, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn no_optomechanics_reduces_to_rabi_ladder() {
        let pp = p(4.0, 5.0, 3.3, 0.0);
        for n in 0..4 {
            assert_abs_diff_eq!(energy_isolated(n, &pp).energy, grwa_energy(n, Sign::Minus, &pp), epsilon = 1e-10);
            for m in 0..4 {
                // with no phonon coupling the pair is (+ polariton, M) and (− polariton, M+1)
                let lo = grwa_energy(n, Sign::Minus, &pp) + (m + 1) as f64;
                let hi = grwa_energy(n, Sign::Plus, &pp) + m as f64;
                let (a, b) = (lo.min(hi), lo.max(hi));
                assert_abs_diff_eq!(energy_doublet(n, m, Sign::Minus, &pp).energy, a, epsilon = 1e-10);
                assert_abs_diff_eq!(energy_doublet(n, m, Sign::Plus, &pp).energy, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn doublet_ordering() {
        for g in [0.0, 0.7, 2.0, 6.0] {
            let pp = p(5.0, 5.0, g, 0.5);
            for (n, m) in [(0, 0), (1, 3), (3, 1)] {
                assert!(energy_doublet(n, m, Sign::Plus, &pp).energy >= energy_doublet(n, m, Sign::Minus, &pp).energy);
            }
        }
    }

    #[test]
    fn rwa_theta_crosses_at_resonant_rabi_frequency() {
        let pp = p(1.0, 1.0, 3f64.sqrt() / 6.0, 0.05);
        let (theta, _) = rwa_theta(2, 2, &pp);
        assert_abs_diff_eq!(theta, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn uncoupled_states_are_products() {
        let pp = p(3.3, 5.7, 0.0, 0.0);
        let c = Cutoffs::new(6, 6).unwrap();
        // ω_a < ω_c: the lower polariton is |+z,0⟩, the pair partner carries M+1 phonons
        let minus = hybrid_state_embed(AnalyticStateLabel::grwa(Family::Doublet { n: 0, m: 1, sign: Sign::Minus }), &pp, &c).unwrap();
        assert_abs_diff_eq!(minus.amplitudes[2].abs(), 1.0, epsilon = 1e-12);
        let plus = hybrid_state_embed(AnalyticStateLabel::grwa(Family::Doublet { n: 0, m: 1, sign: Sign::Plus }), &pp, &c).unwrap();
        let idx = (6 + 1) * 6 + 1; // |−z,1⟩|1⟩
        assert_abs_diff_eq!(plus.amplitudes[idx].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sector_labels_are_orthogonal() {
        let pp = p(5.0, 5.0, 4.0, 0.3);
        let c = embedding_cutoffs(&pp, 3, 3);
        for scheme in [Scheme::Grwa, Scheme::Rwa] {
            let mut states = Vec::new();
            let mut families = vec![Family::Isolated { n: 1 }];
            for m in 0..3 {
                for sign in Sign::BOTH {
                    families.push(Family::Doublet { n: 1, m, sign });
                }
            }
            for f in families {
                states.push(hybrid_state_embed(AnalyticStateLabel { family: f, scheme }, &pp, &c).unwrap());
            }
            for i in 0..states.len() {
                for j in 0..i {
                    assert!(states[i].dot(&states[j]).abs() < 1e-8, "{scheme:?} {i} {j}");
                }
            }
        }
    }
}
