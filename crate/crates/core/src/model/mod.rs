//! Problem instances, the mixed-integer program built from them, and
//! solution validation.

mod file;
mod instance;
mod program;
mod solution;

pub use file::InstanceFile;
pub use instance::{build_instance, Geometry, NetworkInstance, Point};
pub use program::{
    build_program, MixedIntegerConvexProgram, ObjectiveKind, ProblemSpec, ProgramObjective, Row,
    RowKind, Sense, Variable,
};
pub use solution::{check_solution, Solution, SolveStats, SolveStatus, Violation, RATE_TOLERANCE};
