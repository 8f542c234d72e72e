//! Theory tooling: constants and bounds of the oracle inequality, and
//! empirical checks of the lemmas it rests on.

mod bounds;
mod dv;
mod mgf;
mod oracle;

pub use bounds::{
    ball_remainder, closed_form_remainder, closed_form_report, is_convex_on_grid, kappa, kl_uniform_balls,
    log_grid, minimize_oracle_remainder, oracle_remainder, oracle_report, BoundRegime, BoundReport,
    KlConvention, TheoryConstants,
};
pub use dv::{dv_batch, dv_check, variational_objective, DvBatchReport, DvReport};
pub use mgf::{
    rio_mgf_check, risk_deviation_check, MgfCell, MgfProcess, MgfReport, RiskDeviationConfig,
    RiskDeviationReport, Verdict, DEFAULT_Z, MAX_RELATIVE_ERROR,
};
pub use oracle::{oracle_experiment, OracleConfig, OracleReport, OracleTauReport};
