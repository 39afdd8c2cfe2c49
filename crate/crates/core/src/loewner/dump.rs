//! Per-replica trajectory dumps.

use std::io::{self, Write};

use super::FlowState;
use crate::params::SleParams;
use crate::real::Real;

pub const TRAJECTORY_HEADER: &str = "t,X,Y,log_abs_deriv,upsilon,lambda";

/// Writes one CSV row per state with the columns of [`TRAJECTORY_HEADER`].
pub fn write_trajectory_csv<T: Real, W: Write>(out: &mut W, params: &SleParams<T>, states: &[FlowState<T>]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in states {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t.to_f64_lossy(),
            s.z.re.to_f64_lossy(),
            s.z.im.to_f64_lossy(),
            s.log_abs_deriv(params).to_f64_lossy(),
            s.upsilon.to_f64_lossy(),
            s.lambda.to_f64_lossy()
        )?;
    }
    Ok(())
}
