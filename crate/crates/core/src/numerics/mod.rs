//! Numerical kernels shared by the models and the fitters.

mod diff;
mod gamma;
mod minimize;
mod summation;
mod wls;

pub use diff::{central_derivative, central_second_derivative, loglog_slope, FD_STEP_FLOOR};
pub use gamma::{chi2_p_value, ln_gamma, regularized_gamma_q};
pub use minimize::{minimize_scalar, Minimum, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use summation::{compensated_sum, NeumaierSum, SeriesResult};
pub use wls::{weighted_linear_least_squares, WlsSolution};
