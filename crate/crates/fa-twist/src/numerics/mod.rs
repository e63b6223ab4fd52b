//! Scalar kernels shared by the evaluators: complex gamma/Pochhammer,
//! compensated summation, and double-exponential quadrature.

mod gamma;
mod quadrature;
mod sum;

pub use gamma::{beta, gamma, pochhammer};
pub use quadrature::{integrate_de, pow_pos, DeNode, Quadrature, QuadratureConfig, Transform};
pub use sum::{CompensatedSum, ComplexSum};
