//! Coordinator/worker machinery for solving a QUBO by decomposition.
//!
//! A coordinator decomposes the problem each cycle, ships one framed task
//! per sub-problem to a pool of workers, folds the returned sub-solutions
//! back into the working assignment, and repeats until the approximation
//! ratio plateaus. Workers are plain threads — either on in-process queues
//! or behind loopback TCP sockets speaking the length-prefixed frame
//! protocol — so the whole distributed path runs, and is tested, on one
//! machine.
//!
//! Layering, bottom to top:
//!
//! * [`protocol`] — framed messages and their wire encoding,
//! * [`worker`] — the loop a single worker runs over any channel,
//! * [`pool`] — fan-out, retry, and shutdown across many workers,
//! * [`run`] — the decompose → solve → aggregate cycle driver.

pub mod pool;
pub mod protocol;
pub mod run;
pub mod worker;

pub use pool::{PoolError, Transport, WorkerPool};
pub use protocol::{Frame, ResultEnvelope, TaskEnvelope};
pub use run::{
    approx_ratio_pct, check_convergence, cycle_decomposition_config, initial_assignment,
    resolve_reference, run_dqaoa, task_seed, CycleReport, DqaoaConfig, ReferenceKind, RunError,
    RunOutcome,
};
pub use worker::{run_socket_worker, worker_loop, MessageChannel, QueueChannel, SocketChannel};
