use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];
}

/// Approximation pipeline that produced an analytic state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Grwa,
    Rwa,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Grwa => "grwa",
            Scheme::Rwa => "rwa",
        }
    }
}

/// Spectral family of a hybrid eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Ground polariton dressed by a displaced phonon ladder.
    ZeroPolariton { m: usize },
    /// Lowest state of sector N, with no partner in a doublet.
    Isolated { n: usize },
    /// Dressed polariton-phonon pair of sector N.
    Doublet { n: usize, m: usize, sign: Sign },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::ZeroPolariton { .. } => "zero_polariton",
            Family::Isolated { .. } => "isolated",
            Family::Doublet { .. } => "doublet",
        }
    }

    pub fn n(&self) -> Option<usize> {
        match *self {
            Family::ZeroPolariton { .. } => None,
            Family::Isolated { n } | Family::Doublet { n, .. } => Some(n),
        }
    }

    pub fn m(&self) -> Option<usize> {
        match *self {
            Family::ZeroPolariton { m } | Family::Doublet { m, .. } => Some(m),
            Family::Isolated { .. } => None,
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        match *self {
            Family::Doublet { sign, .. } => Some(sign),
            _ => None,
        }
    }

    /// Polariton count the state carries in the GRWA picture.
    pub fn polariton_number(&self) -> usize {
        match *self {
            Family::ZeroPolariton { .. } => 0,
            Family::Isolated { n } | Family::Doublet { n, .. } => n + 1,
        }
    }
}

/// Symbolic identity of an approximate hybrid eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnalyticStateLabel {
    pub family: Family,
    pub scheme: Scheme,
}

impl AnalyticStateLabel {
    pub fn grwa(family: Family) -> Self {
        Self { family, scheme: Scheme::Grwa }
    }

    pub fn rwa(family: Family) -> Self {
        Self { family, scheme: Scheme::Rwa }
    }
}

impl fmt::Display for AnalyticStateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.scheme.name();
        match self.family {
            Family::ZeroPolariton { m } => write!(f, "{s}:Psi_M[M={m}]"),
            Family::Isolated { n } => write!(f, "{s}:Psi_G[N={n}]"),
            Family::Doublet { n, m, sign } => write!(f, "{s}:Psi[N={n},{},M={m}]", sign.symbol()),
        }
    }
}

/// Eigenstate of the bare atom-cavity (Rabi) model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QrmLabel {
    Ground,
    Doublet { n: usize, sign: Sign },
}

impl fmt::Display for QrmLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QrmLabel::Ground => write!(f, "G"),
            QrmLabel::Doublet { n, sign } => write!(f, "{}{n}", sign.symbol()),
        }
    }
}
