use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Sign;
use crate::ops::Cutoffs;
use crate::params::SystemParams;

/// Which Hamiltonian a sweep diagonalizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Atom, photon and phonon.
    #[default]
    Hybrid,
    /// Atom and photon only.
    Rabi,
}

/// Parameter an axis drives. `detuning` sets `omega_a = omega_c + value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    GAc,
    GOm,
    OmegaA,
    OmegaC,
    Detuning,
}

impl Variable {
    pub fn apply(self, p: &mut SystemParams, value: f64) {
        match self {
            Variable::GAc => p.g_ac = value,
            Variable::GOm => p.g_om = value,
            Variable::OmegaA => p.omega_a = value,
            Variable::OmegaC => p.omega_c = value,
            Variable::Detuning => p.omega_a = p.omega_c + value,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn linear(variable: Variable, start: f64, stop: f64, count: usize) -> Self {
        Self { variable, start, stop, count, scale: Scale::Linear }
    }

    /// Grid values; both end points are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == self.count {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Config(format!("axis {:?} needs count >= 2, got {}", self.variable, self.count)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!("axis {:?} has a non-finite bound", self.variable)));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::Config(format!("log axis {:?} needs positive bounds", self.variable)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Exact,
    Grwa,
    Rwa,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Exact => "exact",
            Solver::Grwa => "grwa",
            Solver::Rwa => "rwa",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Solver::Exact),
            "grwa" => Ok(Solver::Grwa),
            "rwa" => Ok(Solver::Rwa),
            other => Err(Error::Config(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Energies,
    Fidelities,
    Xi,
}

/// Row family. The first five name eigenstates; the last three name scalar
/// couplings reported in the energy column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    ZeroPolariton,
    Isolated,
    Doublet,
    QrmGround,
    QrmDoublet,
    RabiFrequency,
    ShiftCoupling,
    EffectiveCoupling,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::ZeroPolariton => "zero_polariton",
            FamilyKind::Isolated => "isolated",
            FamilyKind::Doublet => "doublet",
            FamilyKind::QrmGround => "qrm_ground",
            FamilyKind::QrmDoublet => "qrm_doublet",
            FamilyKind::RabiFrequency => "rabi_frequency",
            FamilyKind::ShiftCoupling => "shift_coupling",
            FamilyKind::EffectiveCoupling => "effective_coupling",
        }
    }

    pub fn is_quantity(self) -> bool {
        matches!(self, FamilyKind::RabiFrequency | FamilyKind::ShiftCoupling | FamilyKind::EffectiveCoupling)
    }

    pub fn is_hybrid_state(self) -> bool {
        matches!(self, FamilyKind::ZeroPolariton | FamilyKind::Isolated | FamilyKind::Doublet)
    }

    pub fn is_rabi_state(self) -> bool {
        matches!(self, FamilyKind::QrmGround | FamilyKind::QrmDoublet)
    }

    fn uses_n(self) -> bool {
        !matches!(self, FamilyKind::ZeroPolariton | FamilyKind::QrmGround)
    }

    fn uses_m(self) -> bool {
        matches!(self, FamilyKind::ZeroPolariton | FamilyKind::Doublet)
    }

    fn uses_sign(self) -> bool {
        matches!(self, FamilyKind::Doublet | FamilyKind::QrmDoublet)
    }
}

/// Index set: an inclusive range or an explicit list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexRange {
    Range { min: usize, max: usize },
    List(Vec<usize>),
}

impl IndexRange {
    pub fn new(min: usize, max: usize) -> Self {
        Self::Range { min, max }
    }

    pub fn single(i: usize) -> Self {
        Self::Range { min: i, max: i }
    }

    pub fn values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = match self {
            Self::Range { min, max } => (*min..=*max).collect(),
            Self::List(v) => v.clone(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn both_signs() -> Vec<Sign> {
    Sign::BOTH.to_vec()
}

/// The tracked labels: every requested family crossed with the index ranges
/// that apply to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelSpec {
    pub families: Vec<FamilyKind>,
    pub n: IndexRange,
    pub m: IndexRange,
    #[serde(default = "both_signs")]
    pub signs: Vec<Sign>,
}

/// One tracked label as it appears in the output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RowLabel {
    pub family: FamilyKind,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub sign: Option<Sign>,
}

impl RowLabel {
    fn key(&self) -> (&'static str, Option<usize>, Option<usize>, Option<Sign>) {
        (self.family.name(), self.n, self.m, self.sign)
    }
}

impl PartialOrd for RowLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Family name, then `N`, `M`, and sign with `−` first.
impl Ord for RowLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl LabelSpec {
    pub fn expand(&self) -> Vec<RowLabel> {
        let mut out = Vec::new();
        for &family in &self.families {
            let ns: Vec<Option<usize>> = if family.uses_n() { self.n.values().into_iter().map(Some).collect() } else { vec![None] };
            let ms: Vec<Option<usize>> = if family.uses_m() { self.m.values().into_iter().map(Some).collect() } else { vec![None] };
            let ss: Vec<Option<Sign>> =
                if family.uses_sign() { self.signs.iter().copied().map(Some).collect() } else { vec![None] };
            for &n in &ns {
                for &m in &ms {
                    for &sign in &ss {
                        out.push(RowLabel { family, n, m, sign });
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Explicit cutoffs or `"auto"` for the convergence protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CutoffSpec {
    Explicit(Cutoffs),
    Keyword(CutoffKeyword),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKeyword {
    Auto,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec::Keyword(CutoffKeyword::Auto)
    }
}

fn all_outputs() -> Vec<Output> {
    vec![Output::Energies, Output::Fidelities, Output::Xi]
}

fn default_tolerance() -> f64 {
    1e-8
}

fn one() -> usize {
    1
}

/// A complete sweep description, read from a single JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub model: Model,
    /// Values of every parameter not driven by an axis.
    pub params: SystemParams,
    /// Outer axis first.
    pub axes: Vec<Axis>,
    pub solvers: Vec<Solver>,
    pub labels: LabelSpec,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub cutoffs: CutoffSpec,
    /// Energy tolerance of the `"auto"` cutoff search, in units of `omega_m`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Number of lowest exact levels kept for state matching; all by default.
    #[serde(default)]
    pub levels: Option<usize>,
    #[serde(default = "one")]
    pub workers: usize,
    /// Free-form remarks copied into the manifest.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    pub fn runs(&self, s: Solver) -> bool {
        self.solvers.contains(&s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!("need 1 or 2 axes, got {}", self.axes.len())));
        }
        for a in &self.axes {
            a.validate()?;
        }
        if self.axes.len() == 2 && self.axes[0].variable == self.axes[1].variable {
            return Err(Error::Config("both axes drive the same variable".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("no solvers selected".into()));
        }
        let mut s = self.solvers.clone();
        s.sort();
        s.dedup();
        if s.len() != self.solvers.len() {
            return Err(Error::Config("duplicate solver".into()));
        }
        if self.labels.families.is_empty() {
            return Err(Error::Config("no label families selected".into()));
        }
        if self.labels.n.values().is_empty() || self.labels.m.values().is_empty() {
            return Err(Error::Config("empty index range".into()));
        }
        if let CutoffSpec::Explicit(c) = self.cutoffs {
            Cutoffs::new(c.photon.dim(), c.phonon.dim()).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.labels.signs.is_empty() {
            return Err(Error::Config("no signs selected".into()));
        }
        for &f in &self.labels.families {
            if f.is_quantity() && self.solvers != [Solver::Grwa] {
                return Err(Error::Config(format!("family {} is only produced by the grwa solver", f.name())));
            }
            if f.is_hybrid_state() && self.model != Model::Hybrid {
                return Err(Error::Config(format!("family {} needs the hybrid model", f.name())));
            }
            if f.is_rabi_state() && self.model != Model::Rabi {
                return Err(Error::Config(format!("family {} needs the rabi model", f.name())));
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no outputs selected".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.levels == Some(0) {
            return Err(Error::Config("levels must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        for point in self.grid() {
            self.params_at(&point).validate().map_err(|e| Error::Config(format!("at grid point {point:?}: {e}")))?;
        }
        Ok(())
    }

    /// Grid points, outer axis varying slowest.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        match values.as_slice() {
            [a] => a.iter().map(|&x| vec![x]).collect(),
            [a, b] => a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect(),
            _ => Vec::new(),
        }
    }

    pub fn params_at(&self, point: &[f64]) -> SystemParams {
        let mut p = self.params;
        for (axis, &v) in self.axes.iter().zip(point) {
            axis.variable.apply(&mut p, v);
        }
        p
    }

    pub fn row_labels(&self) -> Vec<RowLabel> {
        self.labels.expand()
    }

    /// Largest `N` and `M` among the tracked eigenstate labels.
    pub fn index_bounds(&self) -> (usize, usize) {
        let labels = self.row_labels();
        let n = labels.iter().filter_map(|l| l.n).max().unwrap_or(0);
        let m = labels.iter().filter_map(|l| l.m).max().unwrap_or(0);
        (n, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_hits_end_points() {
        let a = Axis { variable: Variable::GAc, start: 0.1, stop: 10.0, count: 5, scale: Scale::Log };
        let v = a.values();
        assert_eq!(v[0], 0.1);
        assert_eq!(v[4], 10.0);
        assert!((v[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn label_order_is_lexicographic() {
        let spec = LabelSpec {
            families: vec![FamilyKind::ZeroPolariton, FamilyKind::Doublet, FamilyKind::Isolated],
            n: IndexRange::new(0, 1),
            m: IndexRange::single(0),
            signs: both_signs(),
        };
        let names: Vec<_> = spec.expand().iter().map(|l| l.family.name()).collect();
        assert_eq!(names, ["doublet", "doublet", "doublet", "doublet", "isolated", "isolated", "zero_polariton"]);
        assert_eq!(spec.expand()[0].sign, Some(Sign::Minus));
    }

    #[test]
    fn cutoff_spec_parses_both_forms() {
        let a: CutoffSpec = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(a, CutoffSpec::default());
        let e: CutoffSpec = serde_json::from_str(r#"{"photon": 10, "phonon": 6}"#).unwrap();
        assert_eq!(e, CutoffSpec::Explicit(Cutoffs::new(10, 6).unwrap()));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = r#"{"params":{"omega_a":1,"omega_c":1,"omega_m":1,"g_ac":0,"g_om":0},
            "axes":[{"variable":"g_ac","start":0,"stop":1,"count":COUNT}],
            "solvers":["grwa"],"labels":{"families":["doublet"],"n":{"min":0,"max":0},"m":{"min":0,"max":0}}}"#;
        assert!(SweepConfig::from_json(&base.replace("COUNT", "3")).is_ok());
        assert!(matches!(SweepConfig::from_json(&base.replace("COUNT", "1")), Err(Error::Config(_))));
        assert!(SweepConfig::from_json(&base.replace("COUNT", "3").replace("\"grwa\"", "\"qrm\"")).is_err());
    }
}
