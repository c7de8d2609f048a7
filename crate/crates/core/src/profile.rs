use alloc::vec::Vec;

/// Where a rate profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Provenance {
    Oracle,
    Approximation,
    Simulation,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::Approximation => "approximation",
            Self::Simulation => "simulation",
        }
    }
}

/// Rates for states beyond the explicitly listed ones.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Tail {
    /// No arrivals: the chain stops at the last listed state.
    Zero,
    /// Nothing is known beyond the listed states; they are absent.
    Unknown,
    Constant(f64),
    /// `rate(n) = period[n % period.len()]`, indexed by the absolute state.
    Periodic(Vec<f64>),
}

/// Conditional arrival rates `n -> lambda_i(n)` of one server.
///
/// `values[n]` is `None` when the state was not observed or carries too
/// little probability mass for a meaningful ratio.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateProfile {
    pub provenance: Provenance,
    pub values: Vec<Option<f64>>,
    /// Standard errors aligned with `values`, when the source has them.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub stderr: Option<Vec<Option<f64>>>,
    pub tail: Tail,
}

impl RateProfile {
    pub fn new(provenance: Provenance, values: Vec<Option<f64>>, tail: Tail) -> Self {
        RateProfile {
            provenance,
            values,
            stderr: None,
            tail,
        }
    }

    /// The rate in state `n`; `None` for absent states.
    pub fn rate(&self, n: usize) -> Option<f64> {
        if n < self.values.len() {
            return self.values[n];
        }
        match &self.tail {
            Tail::Zero => Some(0.0),
            Tail::Unknown => None,
            Tail::Constant(c) => Some(*c),
            Tail::Periodic(p) if !p.is_empty() => Some(p[n % p.len()]),
            Tail::Periodic(_) => Some(0.0),
        }
    }

    pub fn stderr(&self, n: usize) -> Option<f64> {
        self.stderr.as_ref().and_then(|v| v.get(n).copied().flatten())
    }

    /// Explicitly listed states.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rates for `n = 0..n_max`, absent states as `None`.
    pub fn series(&self, n_max: usize) -> Vec<Option<f64>> {
        (0..n_max).map(|n| self.rate(n)).collect()
    }
}
