//! One module per subcommand; each writes its artifacts before reporting failure.

pub mod build_end;
pub mod dualize;
pub mod foliate;
pub mod graft;
pub mod schwarzian;
pub mod verify;

use crate::error::CliError;

/// A solved leaf that the duality map rejects violates convexity mid-run,
/// so the failure is an invariant violation rather than bad input.
pub(crate) fn dual_rejected(e: cone_ends::Error) -> CliError {
    match e {
        cone_ends::Error::RejectedInput(_) | cone_ends::Error::SingularMorphism { .. } => {
            CliError::invariant("foliation/dual-rejected", e)
        }
        other => CliError::from(other),
    }
}
