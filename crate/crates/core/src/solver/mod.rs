//! Resolvent solvers: pointwise symbols, the non-rotating per-mode solve,
//! the rotating-frame solve, time-periodic assembly and multiplier probes.

mod aux;
mod probe;
mod rotating;
mod symbol;
mod tp;

pub use aux::{aux_at, solve_aux_mode, AuxSolution};
pub use probe::{marcinkiewicz_probe, ProbeBox, ProbePoint, ProbeReport};
pub use rotating::{
    required_time_nodes, solve_resolvent_rotating, RotatingSolve, SolveFlags, SolveReport,
};
pub use symbol::{denominator, eval_symbol, Symbol};
pub use tp::{assemble_tp, split_modes, ModeReport, TPSeries, TpAssembly, TpOptions};
