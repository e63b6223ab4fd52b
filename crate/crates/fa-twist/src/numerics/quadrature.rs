//! Tensor-product double-exponential (tanh-sinh) quadrature on `(0,1)^d`.
//!
//! The substitution `t = 1/(1 + exp(-pi sinh u))` maps the real line onto
//! `(0,1)` and crushes endpoint algebraic singularities double-exponentially,
//! so integrands like `t^(b-1) (1-t)^(c-b-1)` with exponents above -1 need no
//! special treatment. The weight takes the stable form
//! `dt/du = pi cosh(u) t (1-t)`.
//!
//! Refinement halves the step `h` per level; the error estimate is the
//! difference between the last two levels, which for this rule is a
//! (strongly conservative) upper bound on the remaining error once the
//! node count resolves the integrand.
//!
//! Integrands receive, for each coordinate, the node position together with
//! a stably computed distance to 1: near the endpoints `t` and `1 - t`
//! underflow the naive expressions long before they stop mattering.

use num_complex::Complex64;

use super::sum::ComplexSum;
use crate::error::{Error, Result};

/// Truncation of the `u` axis: nodes with `|u| > U_MAX` contribute below
/// 1e-25 even for endpoint exponents as strong as -0.9.
const U_MAX: f64 = 6.0;

/// Cost ceiling per refinement level across all tensor dimensions.
const MAX_POINTS_PER_LEVEL: f64 = 3e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    DoubleExponential,
}

#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Maximum refinement level; level `l` uses step `h = 2^-l`.
    pub levels: usize,
    pub target_abs_err: f64,
    pub transform: Transform,
}

impl QuadratureConfig {
    pub fn new(levels: usize, target_abs_err: f64) -> Result<Self> {
        if levels < 1 {
            return Err(Error::Precondition("quadrature levels must be >= 1".into()));
        }
        if !(target_abs_err > 0.0) {
            return Err(Error::Precondition(
                "quadrature target error must be > 0".into(),
            ));
        }
        Ok(Self {
            levels,
            target_abs_err,
            transform: Transform::DoubleExponential,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            levels: 9,
            target_abs_err: 1e-10,
            transform: Transform::DoubleExponential,
        }
    }
}

/// One quadrature node on `(0,1)`: position, stable distance to 1, and the
/// step-scaled weight.
#[derive(Debug, Clone, Copy)]
pub struct DeNode {
    pub t: f64,
    pub one_minus_t: f64,
    pub weight: f64,
}

/// Quadrature outcome; `converged` is false when the error estimate still
/// exceeded the target at the last computed level.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub err_est: f64,
    pub converged: bool,
    pub levels_used: usize,
}

fn nodes_for_level(level: usize) -> Vec<DeNode> {
    let h = 0.5f64.powi(level as i32);
    let k_max = (U_MAX / h).floor() as i64;
    let mut nodes = Vec::with_capacity((2 * k_max + 1) as usize);
    for k in -k_max..=k_max {
        let u = k as f64 * h;
        let s = std::f64::consts::PI * u.sinh();
        let t = 1.0 / (1.0 + (-s).exp());
        let one_minus_t = 1.0 / (1.0 + s.exp());
        let density = t * one_minus_t;
        if density < 1e-280 {
            continue;
        }
        nodes.push(DeNode {
            t,
            one_minus_t,
            weight: h * std::f64::consts::PI * u.cosh() * density,
        });
    }
    nodes
}

/// Integrates `f` over `(0,1)^dim`, refining until the successive-level
/// difference drops below `cfg.target_abs_err` or `cfg.levels` is reached.
/// Accumulation order is fixed (ascending node index), so results are
/// reproducible bit for bit.
pub fn integrate_de<F>(dim: usize, cfg: &QuadratureConfig, f: F) -> Result<Quadrature>
where
    F: Fn(&[DeNode]) -> Complex64,
{
    if dim == 0 || dim > 3 {
        return Err(Error::UnsupportedDimension { dim });
    }

    let mut previous: Option<Complex64> = None;
    let mut err_est = f64::INFINITY;
    let mut value = Complex64::new(0.0, 0.0);
    let mut level = 1;
    while level <= cfg.levels {
        let nodes = nodes_for_level(level);
        if (nodes.len() as f64).powi(dim as i32) > MAX_POINTS_PER_LEVEL {
            break;
        }
        value = tensor_sum(dim, &nodes, &f);
        if let Some(prev) = previous {
            err_est = (value - prev).norm();
            if err_est <= cfg.target_abs_err {
                return Ok(Quadrature {
                    value,
                    err_est,
                    converged: true,
                    levels_used: level,
                });
            }
        }
        previous = Some(value);
        level += 1;
    }

    Ok(Quadrature {
        value,
        err_est,
        converged: false,
        levels_used: level - 1,
    })
}

fn tensor_sum<F>(dim: usize, nodes: &[DeNode], f: &F) -> Complex64
where
    F: Fn(&[DeNode]) -> Complex64,
{
    let mut acc = ComplexSum::new();
    match dim {
        1 => {
            for &n1 in nodes {
                acc.add(f(&[n1]) * n1.weight);
            }
        }
        2 => {
            for &n1 in nodes {
                for &n2 in nodes {
                    acc.add(f(&[n1, n2]) * (n1.weight * n2.weight));
                }
            }
        }
        3 => {
            for &n1 in nodes {
                for &n2 in nodes {
                    for &n3 in nodes {
                        acc.add(f(&[n1, n2, n3]) * (n1.weight * n2.weight * n3.weight));
                    }
                }
            }
        }
        _ => unreachable!("dimension checked by integrate_de"),
    }
    acc.value()
}

/// `base^e` for a positive real base and complex exponent, on the principal
/// branch. Stable for bases all the way down to the subnormal range.
pub fn pow_pos(base: f64, exponent: Complex64) -> Complex64 {
    debug_assert!(base > 0.0);
    (exponent * base.ln()).exp()
}
