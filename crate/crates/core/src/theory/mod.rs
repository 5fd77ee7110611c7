//! Closed-form rates, implicit equations, height constants and exact
//! probability oracles.

mod constants;
mod functions;
mod inequality;
mod oracles;
pub mod roots;
mod suite;

pub use constants::{
    c_l, c_u, c_u_variational, s_equation_residual, solve_p0, solve_s, TheoryProfile,
    VariationalSolution,
};
pub use functions::{
    big_phi, f, g_l, g_u, g_u_prime, h, log_f, phi_fn, phi_inverse, upsilon, Rates, ROOT_XTOL,
};
pub use inequality::{
    midpoint_grid, right_grid, technical_inequality_check, technical_margin, InequalityReport,
};
pub use oracles::{
    chernoff_bound, erlang_lower_tail, geo_plus_one_upper_tail, hat_x_sum_bound, hat_x_sum_tail,
    hat_y_sum_tail, x_sum_bound, x_sum_tail, y_sum_point_mass, y_sum_tail, ChernoffKind,
};
pub use suite::{
    chernoff_suite, CalibratedConstant, ChernoffGrid, ChernoffReport, FamilyReport,
};
