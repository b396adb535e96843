//! Numerical kernel: special functions, quadrature, transform inversion and
//! truncated sums.

pub mod laplace;
pub mod quadrature;
pub mod series;
pub mod special;

pub use laplace::{invert_laplace, invert_laplace_ccdf, InversionConfig};
pub use quadrature::{integrate, integrate_real, QuadConfig, QuadResult, QuadValue};
pub use series::truncated_sum;
pub use special::{gamma, gaussian_pdf, ln_gamma, one_minus_exp_neg, q_function, truncated_lognormal_moment, LognormalParams, Side};
