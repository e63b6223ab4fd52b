//! Truncated power-series evaluation of F_A and of its 2^m local solutions.
//!
//! The m-variable series
//!
//! ```text
//! F_A(a, b, c; x) = sum_n  (a, n_1+..+n_m) prod_k (b_k, n_k)
//!                   ------------------------------------------  prod_k x_k^{n_k}
//!                      prod_k (c_k, n_k) prod_k n_k!
//! ```
//!
//! converges for `sum_k |x_k| < 1`. Coefficients are generated along total-
//! degree shells by the one-step recurrence
//!
//! ```text
//! A_{n+e_k} = A_n (a + |n|)(b_k + n_k) / ((c_k + n_k)(n_k + 1)),
//! ```
//!
//! which doubles as a cheap exactness check: rebuilding the table from
//! direct Pochhammer products and measuring the recurrence residual detects
//! any corruption of either route (see
//! [`coefficient_recurrence_residual`]).
//!
//! Summation runs in increasing total degree, lexicographic inside a shell,
//! with compensated accumulation, so results are deterministic.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{pochhammer, pow_pos, ComplexSum};
use crate::params::{MultiIndex, Parameters};

/// Tolerance below which a denominator `c_k + n_k` counts as a pole.
const COEFFICIENT_POLE_TOLERANCE: f64 = 1e-12;

/// An evaluation point inside the convergence domain `sum |x_k| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPoint {
    x: Vec<Complex64>,
}

impl EvaluationPoint {
    pub fn new(x: Vec<Complex64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Precondition("evaluation point must be non-empty".into()));
        }
        let sum_abs: f64 = x.iter().map(|v| v.norm()).sum();
        if !(sum_abs < 1.0) {
            return Err(Error::OutsideConvergenceDomain { sum_abs });
        }
        Ok(Self { x })
    }

    pub fn real(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero(m: usize) -> Self {
        Self {
            x: vec![Complex64::new(0.0, 0.0); m.max(1)],
        }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.x
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn sum_abs(&self) -> f64 {
        self.x.iter().map(|v| v.norm()).sum()
    }

    pub fn is_real(&self) -> bool {
        self.x.iter().all(|v| v.im == 0.0)
    }

    pub fn is_real_nonnegative(&self) -> bool {
        self.x.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }

    pub fn is_real_positive(&self) -> bool {
        self.x.iter().all(|v| v.im == 0.0 && v.re > 0.0)
    }
}

/// A truncated series evaluation: all terms of total degree `<= order`,
/// with a rigorous tail bound when one could be certified.
#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: Complex64,
    pub order: usize,
    pub tail_bound: Option<f64>,
    pub terms: usize,
}

/// Series coefficients indexed by multi-degree, total degree `<= max_degree`,
/// stored in shell-then-lexicographic order.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    m: usize,
    max_degree: usize,
    degrees: Vec<u16>,
    coeffs: Vec<Complex64>,
    position: HashMap<Vec<u16>, usize>,
}

impl CoefficientTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self, i: usize) -> &[u16] {
        &self.degrees[i * self.m..(i + 1) * self.m]
    }

    pub fn coefficient(&self, i: usize) -> Complex64 {
        self.coeffs[i]
    }

    pub fn get(&self, degree: &[u16]) -> Option<Complex64> {
        self.position.get(degree).map(|&i| self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u16], Complex64)> {
        (0..self.len()).map(move |i| (self.degree(i), self.coeffs[i]))
    }

    /// Returns a copy with one coefficient offset by `delta`. Diagnostic
    /// helper for exercising the recurrence-residual detector.
    pub fn perturbed(&self, i: usize, delta: Complex64) -> CoefficientTable {
        let mut out = self.clone();
        out.coeffs[i] += delta;
        out
    }
}

fn enumerate_degrees(m: usize, max_degree: usize) -> Vec<u16> {
    fn fill(degree: &mut Vec<u16>, remaining: usize, position: usize, m: usize, out: &mut Vec<u16>) {
        if position == m - 1 {
            degree.push(remaining as u16);
            out.extend_from_slice(degree);
            degree.pop();
            return;
        }
        for v in 0..=remaining {
            degree.push(v as u16);
            fill(degree, remaining - v, position + 1, m, out);
            degree.pop();
        }
    }

    let mut out = Vec::new();
    let mut scratch = Vec::with_capacity(m);
    for shell in 0..=max_degree {
        fill(&mut scratch, shell, 0, m, &mut out);
    }
    out
}

/// Coefficient table built by the one-step recurrence along a fixed
/// total-degree sweep.
pub fn fa_coefficients(p: &Parameters, max_degree: usize) -> Result<CoefficientTable> {
    let m = p.m();
    let degrees = enumerate_degrees(m, max_degree);
    let count = degrees.len() / m;
    let mut coeffs = Vec::with_capacity(count);
    let mut position = HashMap::with_capacity(count);
    let mut parent = vec![0u16; m];

    for i in 0..count {
        let degree = &degrees[i * m..(i + 1) * m];
        let shell: usize = degree.iter().map(|&v| v as usize).sum();
        let value = if shell == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            let k = degree.iter().position(|&v| v > 0).expect("nonzero shell");
            parent.clear();
            parent.extend_from_slice(degree);
            parent[k] -= 1;
            let parent_coeff =
                coeffs[*position.get(&parent).expect("parent precedes child in sweep order")];
            let nk = (degree[k] - 1) as f64;
            let denom_c = p.c()[k] + nk;
            if denom_c.norm() <= COEFFICIENT_POLE_TOLERANCE {
                return Err(Error::CoefficientPole {
                    k: k + 1,
                    n: degree[k] as u32 - 1,
                });
            }
            parent_coeff * (p.a() + (shell - 1) as f64) * (p.b()[k] + nk)
                / (denom_c * degree[k] as f64)
        };
        coeffs.push(value);
        position.insert(degree.to_vec(), i);
    }

    Ok(CoefficientTable {
        m,
        max_degree,
        degrees,
        coeffs,
        position,
    })
}

/// Coefficient table built entrywise from Pochhammer products, independent
/// of the recurrence sweep. Test oracle for [`fa_coefficients`].
pub fn fa_coefficients_direct(p: &Parameters, max_degree: usize) -> Result<CoefficientTable> {
    let m = p.m();
    // Per-variable Pochhammer ladders and factorials up to the max degree.
    let mut poch_a = Vec::with_capacity(max_degree + 1);
    let mut running = Complex64::new(1.0, 0.0);
    for s in 0..=max_degree {
        poch_a.push(running);
        running *= p.a() + s as f64;
    }
    let mut poch_b = vec![vec![Complex64::new(1.0, 0.0)]; m];
    let mut poch_c = vec![vec![Complex64::new(1.0, 0.0)]; m];
    for k in 0..m {
        for j in 0..max_degree {
            let jb = p.b()[k] + j as f64;
            let jc = p.c()[k] + j as f64;
            if jc.norm() <= COEFFICIENT_POLE_TOLERANCE {
                return Err(Error::CoefficientPole { k: k + 1, n: j as u32 });
            }
            let prev_b = *poch_b[k].last().unwrap();
            let prev_c = *poch_c[k].last().unwrap();
            poch_b[k].push(prev_b * jb);
            poch_c[k].push(prev_c * jc);
        }
    }
    let mut factorial = vec![1.0f64; max_degree + 1];
    for j in 1..=max_degree {
        factorial[j] = factorial[j - 1] * j as f64;
    }

    let degrees = enumerate_degrees(m, max_degree);
    let count = degrees.len() / m;
    let mut coeffs = Vec::with_capacity(count);
    let mut position = HashMap::with_capacity(count);
    for i in 0..count {
        let degree = &degrees[i * m..(i + 1) * m];
        let shell: usize = degree.iter().map(|&v| v as usize).sum();
        let mut value = poch_a[shell];
        for k in 0..m {
            let nk = degree[k] as usize;
            value *= poch_b[k][nk] / (poch_c[k][nk] * factorial[nk]);
        }
        coeffs.push(value);
        position.insert(degree.to_vec(), i);
    }

    Ok(CoefficientTable {
        m,
        max_degree,
        degrees,
        coeffs,
        position,
    })
}

/// Largest scaled residual of the one-step recurrence over all edges of
/// `table`:
///
/// ```text
/// max |A_{n+e_k} (c_k+n_k)(n_k+1) - A_n (a+|n|)(b_k+n_k)| / (1 + |A_n|).
/// ```
pub fn recurrence_residual(table: &CoefficientTable, p: &Parameters) -> f64 {
    let m = table.m();
    let mut worst = 0.0f64;
    let mut child = vec![0u16; m];
    for i in 0..table.len() {
        let degree = table.degree(i);
        let shell: usize = degree.iter().map(|&v| v as usize).sum();
        if shell >= table.max_degree() {
            continue;
        }
        let a_n = table.coefficient(i);
        for k in 0..m {
            child.clear();
            child.extend_from_slice(degree);
            child[k] += 1;
            let a_child = table.get(&child).expect("full shells below max degree");
            let nk = degree[k] as f64;
            let lhs = a_child * (p.c()[k] + nk) * (nk + 1.0);
            let rhs = a_n * (p.a() + shell as f64) * (p.b()[k] + nk);
            let residual = (lhs - rhs).norm() / (1.0 + a_n.norm());
            worst = worst.max(residual);
        }
    }
    worst
}

/// Recurrence residual of an independently built (direct Pochhammer)
/// coefficient table, over every edge with parent total degree `<= max_degree`.
/// Near zero exactly when the coefficients satisfy the contiguity structure
/// that encodes the rank-2^m holonomic system annihilating the series.
pub fn coefficient_recurrence_residual(p: &Parameters, max_degree: usize) -> Result<f64> {
    let table = fa_coefficients_direct(p, max_degree + 1)?;
    Ok(recurrence_residual(&table, p))
}

/// Rigorous bound on the truncation tail after total degree `order`, when a
/// geometric majorant certifies one; `None` otherwise.
///
/// Writing `q_k(j) = |b_k+j| / |c_k+j|` and `D_k >= sup_j q_k(j)` (computed
/// by scanning small `j` and capping the monotone tail), every term obeys
/// `|(b_k, n)| / |(c_k, n)| <= D_k^n`, so by the multinomial theorem the
/// shell sums satisfy
///
/// ```text
/// T_s = sum_{|n| = s} |A_n x^n| <= U_s := |(a, s)| X^s / s!,
/// X := sum_k D_k |x_k|.
/// ```
///
/// For `s >= order + 1` the majorant contracts by
/// `rho = X max(1, (order + 1 + |a|) / (order + 2))`; when `rho < 1` the tail
/// is at most `U_{order+1} / (1 - rho)`.
pub fn fa_tail_bound(p: &Parameters, x: &EvaluationPoint, order: usize) -> Option<f64> {
    let mut big_x = 0.0f64;
    for k in 0..p.m() {
        let b_norm = p.b()[k].norm();
        let c_norm = p.c()[k].norm();
        let scan_to = (2.0 * (b_norm + c_norm) + c_norm).ceil() as usize + 8;
        let mut d_k = 0.0f64;
        for j in 0..=scan_to {
            let denom = (p.c()[k] + j as f64).norm();
            if denom < 1e-14 {
                return None;
            }
            d_k = d_k.max((p.b()[k] + j as f64).norm() / denom);
        }
        let j1 = (scan_to + 1) as f64;
        d_k = d_k.max((j1 + b_norm) / (j1 - c_norm));
        big_x += d_k * x.coords()[k].norm();
    }

    let a_norm = p.a().norm();
    let rho = big_x * (1.0f64).max((order as f64 + 1.0 + a_norm) / (order as f64 + 2.0));
    if !(rho < 1.0) {
        return None;
    }
    // U_{order+1} = |(a, order+1)| X^{order+1} / (order+1)!
    let mut head = 1.0f64;
    for j in 0..=order {
        head *= (p.a() + j as f64).norm() * big_x / (j as f64 + 1.0);
    }
    Some(head / (1.0 - rho))
}

/// Evaluates F_A by summing all terms of total degree `<= order`.
pub fn fa_eval(p: &Parameters, x: &EvaluationPoint, order: usize) -> Result<SeriesValue> {
    if x.m() != p.m() {
        return Err(Error::Precondition(format!(
            "point has {} coordinates but parameters have m = {}",
            x.m(),
            p.m()
        )));
    }
    let table = fa_coefficients(p, order)?;
    let mut powers: Vec<Vec<Complex64>> = Vec::with_capacity(p.m());
    for k in 0..p.m() {
        let mut ladder = Vec::with_capacity(order + 1);
        let mut value = Complex64::new(1.0, 0.0);
        for _ in 0..=order {
            ladder.push(value);
            value *= x.coords()[k];
        }
        powers.push(ladder);
    }

    let mut acc = ComplexSum::new();
    for (degree, coeff) in table.iter() {
        let mut term = coeff;
        for k in 0..p.m() {
            term *= powers[k][degree[k] as usize];
        }
        acc.add(term);
    }

    Ok(SeriesValue {
        value: acc.value(),
        order,
        tail_bound: fa_tail_bound(p, x, order),
        terms: table.len(),
    })
}

/// Raises the truncation order until the certified tail bound drops below
/// `target`, or an internal order cap is reached (the best evaluation so far
/// is returned either way; inspect `tail_bound`).
pub fn fa_eval_to_tolerance(
    p: &Parameters,
    x: &EvaluationPoint,
    target: f64,
) -> Result<SeriesValue> {
    const ORDER_CAP: usize = 400;
    let mut order = 8;
    loop {
        let value = fa_eval(p, x, order)?;
        match value.tail_bound {
            Some(bound) if bound <= target => return Ok(value),
            _ if order >= ORDER_CAP => return Ok(value),
            _ => order = (order + (order / 2).max(8)).min(ORDER_CAP),
        }
    }
}

/// The local solution attached to a subset `I`:
///
/// ```text
/// f_I = prod_{i in I} x_i^{1 - c_i} * F_A(a_I, b^I, c^I; x),
/// ```
///
/// with the power on the principal branch. Coordinates indexed by `I` must
/// be positive reals; for `I` empty this is exactly [`fa_eval`].
pub fn local_solution_eval(
    p: &Parameters,
    index: &MultiIndex,
    x: &EvaluationPoint,
    order: usize,
) -> Result<SeriesValue> {
    index.check_range(p.m())?;
    let mut prefactor = Complex64::new(1.0, 0.0);
    for &i in index.elements() {
        let xi = x.coords()[i - 1];
        if xi.im != 0.0 || xi.re <= 0.0 {
            return Err(Error::BranchPoint { k: i, x: xi });
        }
        prefactor *= pow_pos(xi.re, Complex64::new(1.0, 0.0) - p.c_at(i));
    }
    let shifted = p.shifted(index)?;
    let inner = fa_eval(shifted.parameters(), x, order)?;
    Ok(SeriesValue {
        value: prefactor * inner.value,
        order,
        tail_bound: inner.tail_bound.map(|t| t * prefactor.norm()),
        terms: inner.terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn log_series_params() -> Parameters {
        // 2F1(1, 1; 2; x) = -ln(1-x)/x has coefficients 1/(n+1).
        Parameters::real(1.0, &[1.0], &[2.0]).unwrap()
    }

    #[test]
    fn constant_coefficient_is_one() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        let table = fa_coefficients(&p, 6).unwrap();
        assert_eq!(table.get(&[0, 0]), Some(c(1.0, 0.0)));
    }

    #[test]
    fn log_series_coefficients() {
        let table = fa_coefficients(&log_series_params(), 20).unwrap();
        for n in 0..=20u16 {
            let expected = 1.0 / (n as f64 + 1.0);
            let got = table.get(&[n]).unwrap();
            assert!((got - c(expected, 0.0)).norm() < 1e-15 * expected);
        }
    }

    #[test]
    fn recurrence_matches_direct_pochhammer() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        let rec = fa_coefficients(&p, 12).unwrap();
        let direct = fa_coefficients_direct(&p, 12).unwrap();
        assert_eq!(rec.len(), direct.len());
        for i in 0..rec.len() {
            let (r, d) = (rec.coefficient(i), direct.coefficient(i));
            assert!(
                (r - d).norm() <= 1e-13 * d.norm().max(1.0),
                "degree {:?}: {r} vs {d}",
                rec.degree(i)
            );
        }
        // Spot value at (1,1): (a,2) b_1 b_2 / (c_1 c_2).
        let expected = pochhammer(p.a(), 2) * p.b()[0] * p.b()[1] / (p.c()[0] * p.c()[1]);
        assert!((rec.get(&[1, 1]).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn residual_is_machine_small_for_direct_tables() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        let residual = coefficient_recurrence_residual(&p, 20).unwrap();
        assert!(residual <= 1e-12, "residual {residual:e}");
        // One-variable log series: the identity (n+2)(n+1) A_{n+1} = (n+1)^2 A_n
        // holds exactly in real arithmetic.
        let residual = coefficient_recurrence_residual(&log_series_params(), 20).unwrap();
        assert!(residual <= 1e-13, "residual {residual:e}");
    }

    #[test]
    fn residual_detects_an_injected_fault() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        let table = fa_coefficients_direct(&p, 8).unwrap();
        let clean = recurrence_residual(&table, &p);
        assert!(clean <= 1e-13);
        let broken = table.perturbed(5, c(1e-6, 0.0));
        assert!(recurrence_residual(&broken, &p) >= 1e-7);
    }

    #[test]
    fn eval_at_origin_is_exactly_one() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        for order in [0, 3, 17] {
            let v = fa_eval(&p, &EvaluationPoint::zero(2), order).unwrap();
            assert_eq!(v.value, c(1.0, 0.0));
            assert_eq!(v.tail_bound, Some(0.0));
        }
    }

    #[test]
    fn gauss_log_closed_form() {
        let x = EvaluationPoint::real(&[0.3]).unwrap();
        let v = fa_eval_to_tolerance(&log_series_params(), &x, 1e-12).unwrap();
        let expected = 1.1889164797957746; // -ln(0.7)/0.3
        assert!((v.value.re - expected).abs() < 1e-10 * expected);
        assert!(v.value.im == 0.0);
        assert!(v.tail_bound.unwrap() <= 1e-12);
    }

    #[test]
    fn vanishing_b_reduces_dimension() {
        let p2 = Parameters::real(0.3, &[0.4, 0.0], &[0.7, 0.8]).unwrap();
        let p1 = Parameters::real(0.3, &[0.4], &[0.7]).unwrap();
        let x2 = EvaluationPoint::real(&[0.2, 0.3]).unwrap();
        let x1 = EvaluationPoint::real(&[0.2]).unwrap();
        let v2 = fa_eval(&p2, &x2, 30).unwrap();
        let v1 = fa_eval(&p1, &x1, 30).unwrap();
        assert!((v2.value - v1.value).norm() < 1e-14);
    }

    #[test]
    fn tail_bound_none_when_majorant_fails() {
        // |a| = 3 makes the shell growth factor exceed 1 at small order.
        let p = Parameters::real(3.3, &[0.4], &[0.7]).unwrap();
        let x = EvaluationPoint::real(&[0.9]).unwrap();
        assert_eq!(fa_tail_bound(&p, &x, 3), None);
        // The same parameters certify once the order is large enough.
        assert!(fa_tail_bound(&p, &x, 60).is_none() || fa_tail_bound(&p, &x, 60).unwrap() > 0.0);
    }

    #[test]
    fn tail_bound_dominates_true_remainder() {
        let p = log_series_params();
        let x = EvaluationPoint::real(&[0.3]).unwrap();
        let order = 30;
        let v = fa_eval(&p, &x, order).unwrap();
        let exact = 1.1889164797957746;
        let true_err = (v.value.re - exact).abs();
        let bound = v.tail_bound.expect("certifiable at x = 0.3");
        assert!(bound >= true_err, "bound {bound:e} < true error {true_err:e}");
    }

    #[test]
    fn local_solution_empty_index_matches_fa() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        let x = EvaluationPoint::real(&[0.1, 0.2]).unwrap();
        let a = local_solution_eval(&p, &MultiIndex::empty(), &x, 25).unwrap();
        let b = fa_eval(&p, &x, 25).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn local_solution_prefactor_structure() {
        let p = Parameters::real(0.3, &[0.4], &[0.7]).unwrap();
        let index = MultiIndex::full(1);
        let x = EvaluationPoint::real(&[0.2]).unwrap();
        let f1 = local_solution_eval(&p, &index, &x, 30).unwrap();
        let shifted = p.shifted(&index).unwrap();
        let inner = fa_eval(shifted.parameters(), &x, 30).unwrap();
        let prefactor = pow_pos(0.2, c(1.0, 0.0) - p.c_at(1));
        assert!((f1.value - prefactor * inner.value).norm() < 1e-15);
    }

    #[test]
    fn local_solution_rejects_branch_points() {
        let p = Parameters::real(0.3, &[0.4, 0.5], &[0.7, 0.8]).unwrap();
        let index = MultiIndex::new(vec![2]).unwrap();
        let on_cut = EvaluationPoint::new(vec![c(0.1, 0.0), c(-0.2, 0.0)]).unwrap();
        assert!(matches!(
            local_solution_eval(&p, &index, &on_cut, 10),
            Err(Error::BranchPoint { k: 2, .. })
        ));
        let complex_coord = EvaluationPoint::new(vec![c(0.1, 0.0), c(0.2, 0.1)]).unwrap();
        assert!(local_solution_eval(&p, &index, &complex_coord, 10).is_err());
        // The offending coordinate only matters when indexed by I.
        let fine = local_solution_eval(&p, &MultiIndex::new(vec![1]).unwrap(), &complex_coord, 10);
        assert!(fine.is_ok());
    }

    #[test]
    fn point_outside_domain_is_rejected() {
        assert!(matches!(
            EvaluationPoint::real(&[0.6, 0.5]),
            Err(Error::OutsideConvergenceDomain { .. })
        ));
    }
}
