use std::path::{Path, PathBuf};

use qgibbs::series::{gen_synthetic, write_csv};
use qgibbs::SyntheticSpec;

use super::{create_out_dir, Artifact};
use crate::config::RunConfig;
use crate::error::CliError;

/// Bounded AR(1) path written as `period,value`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let s = &cfg.simulate;
    let series = gen_synthetic(&SyntheticSpec::ar1(s.a, s.b, s.n, cfg.seed))?;
    create_out_dir(out)?;
    let mut f = Artifact::csv(out.join("synthetic.csv"), cfg)?;
    write_csv(&series, &mut f)?;
    Ok(vec![f.finish()?])
}
