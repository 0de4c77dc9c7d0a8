//! Symmetric FIR interpolation filters with exact rational taps.
//!
//! Coefficients are designed in exact rational arithmetic (Lagrange basis
//! evaluation) so the unit-DC-gain and polynomial-reproduction properties are
//! identities, not tolerances. Conversion to `f64` happens only when a filter
//! is applied to samples.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used for all coefficient math.
pub type Rational = BigRational;

/// Parses "num/den" or "num" into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, FilterError> {
    Rational::from_str(text.trim()).map_err(|_| FilterError::BadRational {
        text: text.to_owned(),
    })
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("taps ({taps}) and offsets ({offsets}) must have equal length >= 2")]
    BadShape { taps: usize, offsets: usize },
    #[error("filter taps sum to {gain}, expected DC gain exactly 1")]
    NonUnitGain { gain: String },
    #[error("offsets must be strictly increasing consecutive integers")]
    NonConsecutiveOffsets,
    #[error("duplicate interpolation node {node}")]
    DuplicateNode { node: i64 },
    #[error("need at least 2 interpolation nodes, got {got}")]
    TooFewNodes { got: usize },
    #[error("evaluation point {x} outside the open node interval ({min}, {max})")]
    PointOutsideNodes { x: String, min: i64, max: i64 },
    #[error("tap count must be a positive even number, got {got}")]
    OddTapCount { got: usize },
    #[error("insertion phase {phase} must lie strictly inside (0, 1)")]
    PhaseOutOfRange { phase: String },
    #[error("cannot parse {text:?} as a rational (expected \"num\" or \"num/den\")")]
    BadRational { text: String },
    #[error("filter {name} is defined only for half-sample insertion (N = 1), requested N = {n}")]
    NotGeneralizable { name: String, n: usize },
}

/// A one-phase FIR interpolation filter: exact rational taps applied at
/// integer offsets relative to the insertion interval's left-hand sample.
///
/// Invariants, checked at construction: taps and offsets have equal
/// length of at least 2, offsets are consecutive increasing integers, and
/// the taps sum to exactly 1 (unit DC gain).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    name: String,
    taps: Vec<Rational>,
    offsets: Vec<i64>,
}

impl FilterSpec {
    pub fn new(
        name: impl Into<String>,
        taps: Vec<Rational>,
        offsets: Vec<i64>,
    ) -> Result<Self, FilterError> {
        if taps.len() != offsets.len() || taps.len() < 2 {
            return Err(FilterError::BadShape {
                taps: taps.len(),
                offsets: offsets.len(),
            });
        }
        if offsets.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(FilterError::NonConsecutiveOffsets);
        }
        let gain = dc_gain(&taps);
        if !gain.is_one() {
            return Err(FilterError::NonUnitGain {
                gain: gain.to_string(),
            });
        }
        Ok(Self {
            name: name.into(),
            taps,
            offsets,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn taps(&self) -> &[Rational] {
        &self.taps
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Taps sum, exactly 1 for any constructed filter.
    pub fn dc_gain(&self) -> Rational {
        dc_gain(&self.taps)
    }

    /// Tap values widened to `f64` for convolution.
    pub fn taps_f64(&self) -> Vec<f64> {
        self.taps
            .iter()
            .map(|t| t.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Rewrites the taps over their least common denominator, as
    /// `(numerators, denominator)`.
    pub fn common_denominator(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self.taps.iter().fold(BigInt::one(), |acc, t| {
            num_integer::lcm(acc, t.denom().clone())
        });
        let numers = self
            .taps
            .iter()
            .map(|t| t.numer() * (&lcm / t.denom()))
            .collect();
        (numers, lcm)
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (numers, denom) = self.common_denominator();
        let parts: Vec<String> = numers.iter().map(|n| n.to_string()).collect();
        write!(
            f,
            "{}: ({}) / {} at offsets {:?}",
            self.name,
            parts.join(", "),
            denom,
            self.offsets
        )
    }
}

/// The four built-in half-sample interpolation filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterKind {
    LinearAverage,
    Avs4,
    H264Six,
    Grid4,
}

impl FilterKind {
    /// Canonical report ordering (also the column order of benchmark tables).
    pub const ALL: [FilterKind; 4] = [
        FilterKind::LinearAverage,
        FilterKind::Avs4,
        FilterKind::H264Six,
        FilterKind::Grid4,
    ];

    /// Numeric identity used when a filter becomes a model input:
    /// grid4 -> 1, linear_average -> 2, avs4 -> 3, h264_6 -> 4.
    pub fn numeric_id(self) -> u8 {
        match self {
            FilterKind::Grid4 => 1,
            FilterKind::LinearAverage => 2,
            FilterKind::Avs4 => 3,
            FilterKind::H264Six => 4,
        }
    }

    pub fn from_numeric_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(FilterKind::Grid4),
            2 => Some(FilterKind::LinearAverage),
            3 => Some(FilterKind::Avs4),
            4 => Some(FilterKind::H264Six),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FilterKind::LinearAverage => "Linear Average",
            FilterKind::Avs4 => "AVS 4-tap",
            FilterKind::H264Six => "H.264 6-tap",
            FilterKind::Grid4 => "Grid Adaptive 4-tap",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FilterKind::LinearAverage => "linear_average",
            FilterKind::Avs4 => "avs4",
            FilterKind::H264Six => "h264_6",
            FilterKind::Grid4 => "grid4",
        };
        f.write_str(s)
    }
}

impl serde::Serialize for FilterKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear_average" => Ok(FilterKind::LinearAverage),
            "avs4" => Ok(FilterKind::Avs4),
            "h264_6" => Ok(FilterKind::H264Six),
            "grid4" => Ok(FilterKind::Grid4),
            other => Err(format!(
                "unknown filter {other:?} (expected linear_average, avs4, h264_6, or grid4)"
            )),
        }
    }
}

/// Builds one of the built-in half-sample filters.
///
/// Note the 6-tap set is the standard H.264 half-pel filter
/// (1, -5, 20, 20, -5, 1)/32; a leading -1 would break unit DC gain and is
/// rejected by [`FilterSpec::new`].
pub fn builtin_filter(kind: FilterKind) -> FilterSpec {
    let (name, numers, denom, offsets): (_, &[i64], i64, &[i64]) = match kind {
        FilterKind::LinearAverage => ("linear_average", &[1, 1], 2, &[0, 1]),
        FilterKind::Avs4 => ("avs4", &[-1, 5, 5, -1], 8, &[-1, 0, 1, 2]),
        FilterKind::H264Six => ("h264_6", &[1, -5, 20, 20, -5, 1], 32, &[-2, -1, 0, 1, 2, 3]),
        FilterKind::Grid4 => ("grid4", &[-1, 9, 9, -1], 16, &[-1, 0, 1, 2]),
    };
    let taps = numers.iter().map(|&n| rational(n, denom)).collect();
    FilterSpec::new(name, taps, offsets.to_vec()).expect("built-in filter is valid")
}

/// Sum of a tap set, in exact arithmetic. Usable on raw tap lists that may
/// violate the [`FilterSpec`] unit-gain invariant.
pub fn dc_gain(taps: &[Rational]) -> Rational {
    taps.iter().fold(Rational::zero(), |acc, t| acc + t)
}

/// Lagrange basis values `L_k(x)` over the given integer nodes, as exact
/// rationals. They sum to exactly 1 (partition of unity), and weighting node
/// samples of any polynomial with degree < nodes.len() by them reproduces the
/// polynomial's value at `x`.
pub fn lagrange_coefficients(nodes: &[i64], x: &Rational) -> Result<Vec<Rational>, FilterError> {
    if nodes.len() < 2 {
        return Err(FilterError::TooFewNodes { got: nodes.len() });
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(FilterError::DuplicateNode { node: w[0] });
    }
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let min_r = Rational::from_integer(BigInt::from(min));
    let max_r = Rational::from_integer(BigInt::from(max));
    if *x <= min_r || *x >= max_r {
        return Err(FilterError::PointOutsideNodes {
            x: x.to_string(),
            min,
            max,
        });
    }

    let node_r: Vec<Rational> = nodes
        .iter()
        .map(|&n| Rational::from_integer(BigInt::from(n)))
        .collect();
    let coeffs = (0..nodes.len())
        .map(|k| {
            let mut acc = Rational::one();
            for j in 0..nodes.len() {
                if j != k {
                    acc *= (x - &node_r[j]) / (&node_r[k] - &node_r[j]);
                }
            }
            acc
        })
        .collect();
    Ok(coeffs)
}

/// Designs a grid-adaptive interpolation filter: for an insertion fraction
/// `phase` in (0, 1) and an even tap count `2L`, fits the Lagrange basis on
/// the nodes `[-L+1 ..= L]` around the insertion interval. The half-sample
/// 4-tap design is exactly `(-1, 9, 9, -1) / 16`.
pub fn lagrange_filter(tap_count: usize, phase: &Rational) -> Result<FilterSpec, FilterError> {
    if tap_count < 2 || tap_count % 2 != 0 {
        return Err(FilterError::OddTapCount { got: tap_count });
    }
    if *phase <= Rational::zero() || *phase >= Rational::one() {
        return Err(FilterError::PhaseOutOfRange {
            phase: phase.to_string(),
        });
    }
    let half = (tap_count / 2) as i64;
    let nodes: Vec<i64> = (1 - half..=half).collect();
    let taps = lagrange_coefficients(&nodes, phase)?;
    let name = format!("lagrange{}@{}", tap_count, phase);
    FilterSpec::new(name, taps, nodes)
}

/// Per-phase filters for inserting `n_insert` samples per interval. Built-in
/// kinds other than the Lagrange-derived ones (linear average and grid
/// adaptive) are half-sample only.
pub fn phase_filters(kind: FilterKind, n_insert: usize) -> Result<Vec<FilterSpec>, FilterError> {
    if n_insert == 0 {
        return Ok(Vec::new());
    }
    if n_insert == 1 {
        return Ok(vec![builtin_filter(kind)]);
    }
    let tap_count = match kind {
        FilterKind::LinearAverage => 2,
        FilterKind::Grid4 => 4,
        FilterKind::Avs4 | FilterKind::H264Six => {
            return Err(FilterError::NotGeneralizable {
                name: kind.to_string(),
                n: n_insert,
            })
        }
    };
    (1..=n_insert)
        .map(|m| {
            let phase = rational(m as i64, (n_insert + 1) as i64);
            lagrange_filter(tap_count, &phase)
        })
        .collect()
}
