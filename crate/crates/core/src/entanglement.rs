//! Participation ratios `ξ = 1/Tr ρ̃²`: closed forms for the analytic
//! states and a numerical path through the reduced density matrix.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hybrid::{polariton_phonon_quantities, rwa_theta, sector_params};
use crate::label::{AnalyticStateLabel, Family, QrmLabel, Scheme, Sign};
use crate::ops::Ket;
use crate::params::SystemParams;
use crate::qrm::{displaced_overlap, grwa_frequencies, jc_quantities};

/// Normalization tolerance accepted by the numerical participation ratio.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EntanglementLabel {
    Qrm(QrmLabel),
    Hybrid(AnalyticStateLabel),
}

/// Coherence (`λ` or `Λ`) of the two-level reduced state and its `ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntanglementRecord {
    pub label: EntanglementLabel,
    pub lambda: f64,
    pub xi: f64,
}

fn xi_from(lambda: f64) -> f64 {
    2.0 / (1.0 + lambda * lambda)
}

/// `ξ = 1/Tr ρ̃²` of a normalized pure state, tracing out all but `keep`.
pub fn participation_ratio_numerical(state: &Ket, keep: &[usize]) -> Result<f64> {
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(1.0 / state.reduced_purity(keep)?)
}

/// `ξ` of a real bipartite vector laid out as `rows × cols` in row-major
/// order, using the smaller Gram matrix.
pub fn participation_ratio_split(v: &DVector<f64>, rows: usize, cols: usize) -> Result<f64> {
    if v.len() != rows * cols {
        return Err(Error::LayoutMismatch(format!("{} amplitudes cannot split as {rows}x{cols}", v.len())));
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    // column-major storage of the transpose equals row-major storage of X
    let xt = DMatrix::from_column_slice(cols, rows, v.as_slice());
    let gram = if rows <= cols { xt.transpose() * &xt } else { &xt * xt.transpose() };
    Ok(1.0 / gram.iter().map(|g| g * g).sum::<f64>())
}

/// Weights `(f_±², f_∓², ±2 f_± f_∓)` of the closed-form coherence.
fn weights(angle: f64, sign: Sign) -> (f64, f64, f64) {
    let (s, c) = ((angle / 2.0).sin(), (angle / 2.0).cos());
    match sign {
        Sign::Plus => (s * s, c * c, 2.0 * s * c),
        Sign::Minus => (c * c, s * s, -2.0 * s * c),
    }
}

/// `ξ^grwa_{±,N}` of the atom in a GRWA Rabi-model state.
pub fn xi_qrm_grwa(n: usize, sign: Sign, p: &SystemParams) -> EntanglementRecord {
    let q = grwa_frequencies(n, p);
    let (a, b, c) = weights(q.alpha_n, sign);
    let lambda = a * q.overlap_nn - b * q.overlap_n1n1 + c * q.overlap_nn1;
    EntanglementRecord { label: EntanglementLabel::Qrm(QrmLabel::Doublet { n, sign }), lambda, xi: xi_from(lambda) }
}

/// `ξ` of the GRWA Rabi ground state `ψ^ad_{−,0}`: `λ = ⟨0_−|0_+⟩`.
pub fn xi_qrm_ground(p: &SystemParams) -> EntanglementRecord {
    let lambda = displaced_overlap(0, 0, p.nu());
    EntanglementRecord { label: EntanglementLabel::Qrm(QrmLabel::Ground), lambda, xi: xi_from(lambda) }
}

/// `ξ^rwa_N = 2/(1 + cos²β_N)`
pub fn xi_qrm_rwa(n: usize, p: &SystemParams) -> EntanglementRecord {
    let lambda = jc_quantities(n, p).beta_n.cos();
    EntanglementRecord {
        label: EntanglementLabel::Qrm(QrmLabel::Doublet { n, sign: Sign::Plus }),
        lambda,
        xi: xi_from(lambda),
    }
}

/// `ξ^{(N)}_{±,M}` of a GRWA-GRWA dressed state, polariton vs phonon.
pub fn xi_hybrid_grwa(n: usize, m: usize, sign: Sign, p: &SystemParams) -> EntanglementRecord {
    let q = polariton_phonon_quantities(n, m, p);
    let (a, b, c) = weights(q.phi, sign);
    let lambda = a * q.overlap_mm - b * q.overlap_m1m1 + c * q.overlap_mm1;
    EntanglementRecord {
        label: EntanglementLabel::Hybrid(AnalyticStateLabel::grwa(Family::Doublet { n, m, sign })),
        lambda,
        xi: xi_from(lambda),
    }
}

/// `ξ^rwa_{N,M} = 2/(1 + cos²θ^{(N)}_M)`
pub fn xi_hybrid_rwa(n: usize, m: usize, p: &SystemParams) -> EntanglementRecord {
    let lambda = rwa_theta(n, m, p).0.cos();
    EntanglementRecord {
        label: EntanglementLabel::Hybrid(AnalyticStateLabel::rwa(Family::Doublet { n, m, sign: Sign::Plus })),
        lambda,
        xi: xi_from(lambda),
    }
}

/// `ξ^{(N)}_G = 2/(1 + ⟨0_{−′}|0_{+′}⟩²)` of the isolated state.
pub fn xi_isolated(n: usize, p: &SystemParams) -> EntanglementRecord {
    let lambda = displaced_overlap(0, 0, sector_params(n, p).g_eff / p.omega_m);
    EntanglementRecord {
        label: EntanglementLabel::Hybrid(AnalyticStateLabel::grwa(Family::Isolated { n })),
        lambda,
        xi: xi_from(lambda),
    }
}

/// Closed-form polariton-phonon `ξ` of any hybrid label.
pub fn xi_analytic(label: AnalyticStateLabel, p: &SystemParams) -> f64 {
    match (label.scheme, label.family) {
        (_, Family::ZeroPolariton { .. }) | (Scheme::Rwa, Family::Isolated { .. }) => 1.0,
        (Scheme::Grwa, Family::Isolated { n }) => xi_isolated(n, p).xi,
        (Scheme::Grwa, Family::Doublet { n, m, sign }) => xi_hybrid_grwa(n, m, sign, p).xi,
        (Scheme::Rwa, Family::Doublet { n, m, .. }) => xi_hybrid_rwa(n, m, p).xi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{Kron, ModeCutoff, Mode, SpaceLayout};
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_and_bell_states() {
        let a = Ket::from_real(SpaceLayout::atom(), &[0.6, 0.8]).unwrap();
        let b = Ket::from_real(SpaceLayout::mode(Mode::Photon, ModeCutoff::new(3).unwrap()), &[0.0, 1.0, 0.0]).unwrap();
        let prod = a.kron(&b).unwrap();
        assert_abs_diff_eq!(participation_ratio_numerical(&prod, &[0]).unwrap(), 1.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_real(SpaceLayout::atom_photon(ModeCutoff::new(2).unwrap()), &[s, 0.0, 0.0, s]).unwrap();
        assert_abs_diff_eq!(participation_ratio_numerical(&bell, &[1]).unwrap(), 2.0, epsilon = 1e-14);
        let v = DVector::from_vec(vec![s, 0.0, 0.0, s]);
        assert_abs_diff_eq!(participation_ratio_split(&v, 2, 2).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_unnormalized() {
        let k = Ket::from_real(SpaceLayout::atom(), &[1.0, 1.0]).unwrap();
        assert!(matches!(participation_ratio_numerical(&k, &[0]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn uncoupled_values() {
        let p = SystemParams::new(3.3, 5.7, 1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(xi_qrm_grwa(2, Sign::Plus, &p).xi, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xi_qrm_rwa(2, &p).xi, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xi_hybrid_grwa(1, 1, Sign::Minus, &p).xi, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xi_isolated(3, &p).xi, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn resonant_jc_is_maximally_entangled() {
        for g in [0.01, 0.5, 3.0] {
            let p = SystemParams::new(1.0, 1.0, 1.0, g, 0.0).unwrap();
            assert_abs_diff_eq!(xi_qrm_rwa(3, &p).xi, 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn weak_optomechanics_limit() {
        let p = SystemParams::new(1.0, 1.0, 1.0, 0.4, 1e-7).unwrap();
        let q = polariton_phonon_quantities(2, 2, &p);
        let r = xi_hybrid_grwa(2, 2, Sign::Plus, &p);
        assert_abs_diff_eq!(r.lambda.abs(), q.phi.cos().abs(), epsilon = 1e-6);
        assert_abs_diff_eq!(r.xi, 2.0 / (1.0 + q.phi.cos().powi(2)), epsilon = 1e-6);
    }
}
