//! Library side of the command-line tool: state files, reports, sweeps and self-checks.

pub mod analyze;
pub mod format;
pub mod selfcheck;
pub mod state_file;
pub mod sweep;

pub use analyze::{analyze, AnalyzeReport};
pub use selfcheck::{selfcheck, Fault, SelfcheckOptions, SelfcheckReport};
pub use state_file::StateFile;
pub use sweep::{run_sweep, write_csv, GridRange, SweepRow, SweepSpec};

use crate::error::Result;
use crate::fano::DensityMatrix;
use crate::states::{channel_mixed, pure_two_spinor, ChannelParams};

/// `theta` is the polar angle of each spinor from the bisector.
pub fn make_pure(theta: f64) -> StateFile {
    StateFile::new(&pure_two_spinor(2.0 * theta))
        .with_label(format!("pure two-spinor theta={theta}"))
        .with_source("make-state pure")
}

/// Equal polarisations `p`, each at polar angle `theta` from the bisector.
pub fn make_mixed(p: f64, theta: f64) -> Result<StateFile> {
    let rho: DensityMatrix = channel_mixed(ChannelParams::equal(p, theta)?)?;
    Ok(StateFile::new(&rho)
        .with_label(format!("channel p={p} theta={theta}"))
        .with_source("make-state mixed"))
}
