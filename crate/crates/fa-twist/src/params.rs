//! Parameter containers for the Lauricella F_A family.
//!
//! A parameter set is a complex scalar `a` together with length-`m` vectors
//! `b` and `c`. The series and all intersection formulas require the
//! non-integrality conditions
//!
//! ```text
//! b_k, c_k - b_k, c_k not in Z,    a - sum_{i in I} c_i not in Z
//! ```
//!
//! for every subset `I` of `{1, ..., m}` (including the empty one, i.e. `a`
//! itself). [`Parameters::validate`] checks all of them with a configurable
//! tolerance and reports every failure instead of stopping at the first.
//!
//! The `2^m` local solutions near the origin are indexed by subsets
//! `I = {i_1 < ... < i_r}` of `{1, ..., m}` ([`MultiIndex`]); the parameter
//! shift attached to such a subset is
//!
//! ```text
//! a_I = a + r - sum_p c_{i_p},
//! b^I_k = b_k - c_k + 1  (k in I),   b_k      (k not in I),
//! c^I_k = 2 - c_k        (k in I),   c_k      (k not in I),
//! ```
//!
//! see [`Parameters::shifted`]. Intersection numbers only depend on the
//! exponentials `alpha = e^{2 pi i a}`, `beta_k = e^{2 pi i b_k}`,
//! `gamma_k = e^{2 pi i c_k}` ([`Parameters::exponentials`]).

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported number of variables. Basis-indexed matrices have
/// `2^m` rows and the series cost grows like `N^m`, so this stays small.
pub const MAX_VARIABLES: usize = 6;

/// Default tolerance for the distance-to-integer checks in [`Parameters::validate`].
pub const DEFAULT_INTEGER_TOLERANCE: f64 = 1e-9;

/// Conditions closer to an integer than this (but not failing) are reported
/// as conditioning warnings: gamma factors and resonance denominators degrade
/// long before the conditions are violated outright.
pub const CONDITIONING_WARNING_TOLERANCE: f64 = 1e-6;

/// The parameters `(a, b_1..b_m, c_1..c_m)` of an m-variable F_A.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    a: Complex64,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
}

impl Parameters {
    /// Builds a parameter set, checking `len(b) = len(c)`, `m >= 1` and
    /// `m <= MAX_VARIABLES`.
    pub fn new(a: Complex64, b: Vec<Complex64>, c: Vec<Complex64>) -> Result<Self> {
        if b.len() != c.len() || b.is_empty() {
            return Err(Error::DimensionMismatch {
                b_len: b.len(),
                c_len: c.len(),
            });
        }
        if b.len() > MAX_VARIABLES {
            return Err(Error::TooManyVariables {
                m: b.len(),
                max: MAX_VARIABLES,
            });
        }
        Ok(Self { a, b, c })
    }

    /// Convenience constructor for real parameters.
    pub fn real(a: f64, b: &[f64], c: &[f64]) -> Result<Self> {
        Self::new(
            Complex64::new(a, 0.0),
            b.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            c.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn c(&self) -> &[Complex64] {
        &self.c
    }

    /// 1-based accessors; `k` must be in `1..=m`.
    pub fn b_at(&self, k: usize) -> Complex64 {
        self.b[k - 1]
    }

    pub fn c_at(&self, k: usize) -> Complex64 {
        self.c[k - 1]
    }

    /// Checks every non-integrality condition with tolerance `eps_int` and
    /// reports all failures. A value counts as integral when its real part is
    /// within `eps_int` of an integer and its imaginary part is at most
    /// `eps_int` in magnitude. Conditions that pass but come within
    /// [`CONDITIONING_WARNING_TOLERANCE`] of an integer are listed in
    /// `warnings`.
    pub fn validate(&self, eps_int: f64) -> ValidationReport {
        let mut violations = Vec::new();
        let mut warnings = Vec::new();
        let warn_eps = CONDITIONING_WARNING_TOLERANCE.max(eps_int);

        let mut check = |condition: Condition, value: Complex64| {
            if is_near_integer(value, eps_int) {
                violations.push(Violation { condition, value });
            } else if is_near_integer(value, warn_eps) {
                warnings.push(Violation { condition, value });
            }
        };

        for k in 1..=self.m() {
            check(Condition::BIntegral { k }, self.b_at(k));
            check(Condition::CMinusBIntegral { k }, self.c_at(k) - self.b_at(k));
            check(Condition::CIntegral { k }, self.c_at(k));
        }
        for subset in subset_order(self.m()).expect("m validated at construction") {
            let sum: Complex64 = subset.elements().iter().map(|&i| self.c_at(i)).sum();
            check(Condition::AMinusCSumIntegral { subset }, self.a - sum);
        }

        ValidationReport {
            ok: violations.is_empty(),
            violations,
            warnings,
        }
    }

    /// The shifted parameter set `(a_I, b^I, c^I)` attached to the local
    /// solution indexed by `index`.
    pub fn shifted(&self, index: &MultiIndex) -> Result<ShiftedParameters> {
        index.check_range(self.m())?;
        let r = index.cardinality();
        let c_sum: Complex64 = index.elements().iter().map(|&i| self.c_at(i)).sum();
        let a_shifted = self.a + Complex64::new(r as f64, 0.0) - c_sum;
        let mut b_shifted = self.b.clone();
        let mut c_shifted = self.c.clone();
        for &i in index.elements() {
            b_shifted[i - 1] = self.b[i - 1] - self.c[i - 1] + Complex64::new(1.0, 0.0);
            c_shifted[i - 1] = Complex64::new(2.0, 0.0) - self.c[i - 1];
        }
        Ok(ShiftedParameters {
            base: self.clone(),
            index: index.clone(),
            params: Parameters {
                a: a_shifted,
                b: b_shifted,
                c: c_shifted,
            },
        })
    }

    /// The dual parameter set `(-a, -b, (2,...,2) - c)`, the weight of the
    /// reciprocal multivalued function. An involution.
    pub fn dual(&self) -> Parameters {
        Parameters {
            a: -self.a,
            b: self.b.iter().map(|&v| -v).collect(),
            c: self
                .c
                .iter()
                .map(|&v| Complex64::new(2.0, 0.0) - v)
                .collect(),
        }
    }

    /// `alpha = e^{2 pi i a}`, `beta_k = e^{2 pi i b_k}`, `gamma_k = e^{2 pi i c_k}`.
    pub fn exponentials(&self) -> ExponentialParams {
        let turn = |z: Complex64| (Complex64::i() * TAU * z).exp();
        ExponentialParams {
            alpha: turn(self.a),
            beta: self.b.iter().copied().map(turn).collect(),
            gamma: self.c.iter().copied().map(turn).collect(),
        }
    }
}

fn is_near_integer(z: Complex64, eps: f64) -> bool {
    (z.re - z.re.round()).abs() <= eps && z.im.abs() <= eps
}

/// A subset `{i_1 < ... < i_r}` of `{1, ..., m}`, the index of a local
/// solution / twisted cycle. Stored sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    elements: Vec<usize>,
}

impl MultiIndex {
    /// Builds a multi-index from strictly increasing entries `>= 1`.
    pub fn new(elements: Vec<usize>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) || elements.first() == Some(&0) {
            return Err(Error::MalformedMultiIndex);
        }
        Ok(Self { elements })
    }

    /// Builds a multi-index from entries in any order, sorting them.
    /// Duplicates are rejected.
    pub fn from_elements(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        Self::new(elements)
    }

    pub fn empty() -> Self {
        Self {
            elements: Vec::new(),
        }
    }

    /// The full set `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        Self {
            elements: (1..=m).collect(),
        }
    }

    /// Decodes a bitmask: bit `k-1` set means index `k` is a member.
    pub fn from_bitmask(mask: u64) -> Self {
        let elements = (0..64).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect();
        Self { elements }
    }

    /// Encodes the subset as a bitmask, bit `k-1` for index `k`.
    pub fn bitmask(&self) -> u64 {
        self.elements.iter().map(|&i| 1u64 << (i - 1)).sum()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    /// Cardinality `r` of the subset.
    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.elements.binary_search(&k).is_ok()
    }

    /// The complement `{j_1 < ... < j_{m-r}}` inside `{1, ..., m}`.
    pub fn complement(&self, m: usize) -> Result<MultiIndex> {
        self.check_range(m)?;
        Ok(MultiIndex {
            elements: (1..=m).filter(|&k| !self.contains(k)).collect(),
        })
    }

    /// Removes one element; no-op if absent.
    pub fn without(&self, k: usize) -> MultiIndex {
        MultiIndex {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|&i| i != k)
                .collect(),
        }
    }

    pub fn check_range(&self, m: usize) -> Result<()> {
        match self.elements.last() {
            Some(&max) if max > m => Err(Error::IndexOutOfRange { index: max, m }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in &self.elements {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        Ok(())
    }
}

/// All `2^m` subsets of `{1, ..., m}` in increasing bitmask order. This is
/// the basis order used by every matrix and by the CLI output.
pub fn subset_order(m: usize) -> Result<Vec<MultiIndex>> {
    if m == 0 || m > MAX_VARIABLES {
        return Err(Error::TooManyVariables {
            m,
            max: MAX_VARIABLES,
        });
    }
    Ok((0..1u64 << m).map(MultiIndex::from_bitmask).collect())
}

/// A base parameter set together with the shift attached to one subset.
#[derive(Debug, Clone)]
pub struct ShiftedParameters {
    base: Parameters,
    index: MultiIndex,
    params: Parameters,
}

impl ShiftedParameters {
    pub fn base(&self) -> &Parameters {
        &self.base
    }

    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    /// The shifted set `(a_I, b^I, c^I)` as plain parameters.
    pub fn parameters(&self) -> &Parameters {
        &self.params
    }

    pub fn a_shifted(&self) -> Complex64 {
        self.params.a
    }

    pub fn b_shifted(&self) -> &[Complex64] {
        &self.params.b
    }

    pub fn c_shifted(&self) -> &[Complex64] {
        &self.params.c
    }
}

/// `alpha = e^{2 pi i a}`, `beta_k = e^{2 pi i b_k}`, `gamma_k = e^{2 pi i c_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialParams {
    pub alpha: Complex64,
    pub beta: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
}

impl ExponentialParams {
    pub fn m(&self) -> usize {
        self.beta.len()
    }
}

/// One failed (or nearly failed) non-integrality condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub value: Complex64,
}

/// The condition that failed, with the offending index or subset.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    BIntegral { k: usize },
    CMinusBIntegral { k: usize },
    CIntegral { k: usize },
    AMinusCSumIntegral { subset: MultiIndex },
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::BIntegral { k } => write!(f, "b_{k} integral"),
            Condition::CMinusBIntegral { k } => write!(f, "c_{k} - b_{k} integral"),
            Condition::CIntegral { k } => write!(f, "c_{k} integral"),
            Condition::AMinusCSumIntegral { subset } => {
                if subset.is_empty() {
                    write!(f, "a integral")
                } else {
                    write!(f, "a")?;
                    for i in subset.elements() {
                        write!(f, " - c_{i}")?;
                    }
                    write!(f, " integral")
                }
            }
        }
    }
}

/// The outcome of [`Parameters::validate`]: `ok` holds exactly when
/// `violations` is empty; `warnings` flags near-integral conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    /// One-line summary of all violated conditions.
    pub fn describe(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.condition.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}
