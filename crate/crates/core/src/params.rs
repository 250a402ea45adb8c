use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the hybrid Hamiltonian, with ħ = 1.
///
/// Frequencies are conventionally quoted in units of `omega_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_a: f64,
    pub omega_c: f64,
    pub omega_m: f64,
    pub g_ac: f64,
    pub g_om: f64,
}

impl SystemParams {
    pub fn new(omega_a: f64, omega_c: f64, omega_m: f64, g_ac: f64, g_om: f64) -> Result<Self> {
        let p = Self { omega_a, omega_c, omega_m, g_ac, g_om };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_a", self.omega_a), ("omega_c", self.omega_c), ("omega_m", self.omega_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [("g_ac", self.g_ac), ("g_om", self.g_om)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Photon displacement `ν = g_ac/ω_c`.
    pub fn nu(&self) -> f64 {
        self.g_ac / self.omega_c
    }

    /// Atom-cavity detuning `ω_a − ω_c`.
    pub fn detuning(&self) -> f64 {
        self.omega_a - self.omega_c
    }

    pub fn with_g_ac(mut self, g_ac: f64) -> Self {
        self.g_ac = g_ac;
        self
    }

    pub fn with_g_om(mut self, g_om: f64) -> Self {
        self.g_om = g_om;
        self
    }
}

/// Mixing angle of a two-level block with off-diagonal `coupling/2` and
/// diagonal difference `detuning`: `atan2(coupling, −detuning)`.
///
/// The upper eigenvector is `(sin(θ/2), cos(θ/2))`. Returns `(π/2, true)` when
/// both inputs vanish.
pub fn mixing_angle(coupling: f64, detuning: f64) -> (f64, bool) {
    if coupling == 0.0 && detuning == 0.0 {
        (std::f64::consts::FRAC_PI_2, true)
    } else {
        (coupling.atan2(-detuning), false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(SystemParams::new(1.0, 1.0, 1.0, 0.0, 0.0).is_ok());
        assert!(SystemParams::new(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, -1.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, -0.1, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn angle_places_upper_state_first() {
        // block [[d/2, c/2], [c/2, -d/2]], upper eigvec (sin θ/2, cos θ/2)
        for (c, d) in [(0.3, 1.0), (0.3, -1.0), (1.0, 0.0), (-0.4, 0.2), (0.0, 2.0), (0.0, -2.0)] {
            let (theta, _) = mixing_angle(c, d);
            let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
            let t = (c * c + d * d).sqrt();
            let hv0 = d / 2.0 * s + c / 2.0 * co;
            let hv1 = c / 2.0 * s - d / 2.0 * co;
            assert!((hv0 - t / 2.0 * s).abs() < 1e-14 && (hv1 - t / 2.0 * co).abs() < 1e-14);
        }
        assert_eq!(mixing_angle(0.0, 0.0), (std::f64::consts::FRAC_PI_2, true));
    }
}
