//! The coordinator's worker pool: task fan-out, result collection, retry,
//! and shutdown.
//!
//! All workers of a pool pull from one shared task queue, so scheduling is
//! first-free. Replies come back on one shared stream. Because every task
//! is solved deterministically from its envelope alone, the set of results
//! for a dispatch — and their order after the final sort — is independent
//! of worker count, scheduling, and transport.

use crate::protocol::{Frame, ResultEnvelope, TaskEnvelope};
use crate::worker::{run_socket_worker, worker_loop, QueueChannel};
use crossbeam_channel::{unbounded, Receiver, Sender};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::io;
use std::net::{TcpListener, TcpStream};
use std::str::FromStr;
use std::thread::JoinHandle;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("worker pool has no live workers")]
    Exhausted,
    #[error("task {task_id} failed on both attempts: {message}")]
    TaskFailed { task_id: u64, message: String },
    #[error("result for unknown or already-completed task {task_id}")]
    UnexpectedResult { task_id: u64 },
    #[error("task id {0} appears twice in one dispatch")]
    DuplicateTaskId(u64),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("could not start workers: {0}")]
    Spawn(#[from] io::Error),
}

/// How the coordinator talks to its workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transport {
    /// Workers are threads sharing a pair of in-process queues.
    InProcess,
    /// Workers are threads talking length-prefixed frames over loopback
    /// TCP, exercising the full wire path.
    LocalSocket,
}

impl fmt::Display for Transport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transport::InProcess => "in-process",
            Transport::LocalSocket => "local-socket",
        })
    }
}

impl FromStr for Transport {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "in-process" | "inprocess" | "channel" => Ok(Transport::InProcess),
            "local-socket" | "localsocket" | "socket" => Ok(Transport::LocalSocket),
            other => Err(format!(
                "unknown transport {other:?} (expected in-process or local-socket)"
            )),
        }
    }
}

pub struct WorkerPool {
    size: usize,
    /// `None` once the pool has been shut down.
    task_tx: Option<Sender<Frame>>,
    reply_rx: Receiver<Frame>,
    threads: Vec<JoinHandle<()>>,
}

impl WorkerPool {
    pub fn new(size: usize, transport: Transport) -> Result<Self, PoolError> {
        match transport {
            Transport::InProcess => Ok(Self::in_process(size)),
            Transport::LocalSocket => Self::local_socket(size),
        }
    }

    /// `size` worker threads on shared in-process queues.
    pub fn in_process(size: usize) -> Self {
        assert!(size >= 1, "a pool needs at least one worker");
        let (task_tx, task_rx) = unbounded::<Frame>();
        let (reply_tx, reply_rx) = unbounded::<Frame>();
        let threads = (0..size)
            .map(|_| {
                let channel = QueueChannel {
                    tasks: task_rx.clone(),
                    replies: reply_tx.clone(),
                };
                std::thread::spawn(move || worker_loop(channel))
            })
            .collect();
        // The workers own the only queue ends now; holding extras here would
        // stop disconnection from ever signalling "all workers gone".
        drop(task_rx);
        drop(reply_tx);
        WorkerPool {
            size,
            task_tx: Some(task_tx),
            reply_rx,
            threads,
        }
    }

    /// `size` worker threads connected over loopback TCP. The coordinator
    /// side runs one forwarder thread per connection, which pulls from the
    /// shared task queue, writes the frame to its socket, and pushes the
    /// reply back; a transport failure is folded into the reply stream as
    /// an error frame for the task that was in flight, and that lane dies.
    pub fn local_socket(size: usize) -> Result<Self, PoolError> {
        assert!(size >= 1, "a pool needs at least one worker");
        let listener = TcpListener::bind("127.0.0.1:0").map_err(PoolError::Spawn)?;
        let addr = listener.local_addr().map_err(PoolError::Spawn)?;

        let mut threads: Vec<JoinHandle<()>> = Vec::with_capacity(2 * size);
        for _ in 0..size {
            threads.push(std::thread::spawn(move || {
                if let Err(e) = run_socket_worker(addr) {
                    log::warn!("socket worker could not connect: {e}");
                }
            }));
        }

        let (task_tx, task_rx) = unbounded::<Frame>();
        let (reply_tx, reply_rx) = unbounded::<Frame>();
        for _ in 0..size {
            let (stream, _) = listener.accept().map_err(PoolError::Spawn)?;
            stream.set_nodelay(true).map_err(PoolError::Spawn)?;
            let tasks = task_rx.clone();
            let replies = reply_tx.clone();
            threads.push(std::thread::spawn(move || {
                forward_lane(stream, tasks, replies)
            }));
        }
        drop(task_rx);
        drop(reply_tx);
        Ok(WorkerPool {
            size,
            task_tx: Some(task_tx),
            reply_rx,
            threads,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Send every task out, wait for every one to complete, and return the
    /// results sorted by task id.
    ///
    /// A task that comes back as an error is retried once with its original
    /// envelope; a second failure aborts the dispatch. Results for tasks
    /// that are not in flight — duplicates, or leftovers from an aborted
    /// dispatch — are protocol errors.
    pub fn dispatch_cycle(
        &mut self,
        tasks: Vec<TaskEnvelope>,
    ) -> Result<Vec<ResultEnvelope>, PoolError> {
        let task_tx = self.task_tx.as_ref().ok_or(PoolError::Exhausted)?;
        let mut in_flight: HashMap<u64, (TaskEnvelope, u8)> = HashMap::with_capacity(tasks.len());
        for t in &tasks {
            if in_flight.insert(t.task_id, (t.clone(), 1)).is_some() {
                return Err(PoolError::DuplicateTaskId(t.task_id));
            }
        }
        for t in tasks {
            task_tx
                .send(Frame::Task(t))
                .map_err(|_| PoolError::Exhausted)?;
        }

        let mut done: Vec<ResultEnvelope> = Vec::with_capacity(in_flight.len());
        while !in_flight.is_empty() {
            match self.reply_rx.recv() {
                Err(_) => return Err(PoolError::Exhausted),
                Ok(Frame::Result(r)) => {
                    if in_flight.remove(&r.task_id).is_none() {
                        return Err(PoolError::UnexpectedResult { task_id: r.task_id });
                    }
                    done.push(r);
                }
                Ok(Frame::Error {
                    task_id: Some(id),
                    message,
                }) => {
                    let Some((envelope, attempts)) = in_flight.get_mut(&id) else {
                        return Err(PoolError::UnexpectedResult { task_id: id });
                    };
                    if *attempts >= 2 {
                        return Err(PoolError::TaskFailed {
                            task_id: id,
                            message,
                        });
                    }
                    *attempts += 1;
                    log::warn!("task {id} failed ({message}); retrying once");
                    let retry = Frame::Task(envelope.clone());
                    task_tx.send(retry).map_err(|_| PoolError::Exhausted)?;
                }
                Ok(Frame::Error {
                    task_id: None,
                    message,
                }) => return Err(PoolError::Protocol(message)),
                Ok(other) => {
                    return Err(PoolError::Protocol(format!(
                        "coordinator received {} frame",
                        frame_kind(&other)
                    )))
                }
            }
        }
        done.sort_by_key(|r| r.task_id);
        Ok(done)
    }

    /// Ask every worker to exit and wait for all threads. Idempotent; also
    /// runs on drop.
    pub fn shutdown(&mut self) {
        if let Some(task_tx) = self.task_tx.take() {
            for _ in 0..self.size {
                let _ = task_tx.send(Frame::Shutdown);
            }
        }
        for handle in self.threads.drain(..) {
            let _ = handle.join();
        }
    }

    #[cfg(test)]
    fn from_parts(
        task_tx: Sender<Frame>,
        reply_rx: Receiver<Frame>,
        threads: Vec<JoinHandle<()>>,
        size: usize,
    ) -> Self {
        WorkerPool {
            size,
            task_tx: Some(task_tx),
            reply_rx,
            threads,
        }
    }
}

impl Drop for WorkerPool {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// One coordinator-side socket lane: shared queue in, socket out, reply
/// back to the shared stream. Strictly one task in flight per lane.
fn forward_lane(mut stream: TcpStream, tasks: Receiver<Frame>, replies: Sender<Frame>) {
    loop {
        let frame = match tasks.recv() {
            Ok(f) => f,
            Err(_) => return, // pool is gone
        };
        let in_flight_id = match &frame {
            Frame::Task(t) => Some(t.task_id),
            _ => None,
        };
        if let Err(e) = crate::protocol::write_frame(&mut stream, &frame) {
            report_lost(&replies, in_flight_id, &e.to_string());
            return;
        }
        if matches!(frame, Frame::Shutdown) {
            return;
        }
        match crate::protocol::read_frame(&mut stream) {
            Ok(reply) => {
                if replies.send(reply).is_err() {
                    return;
                }
            }
            Err(e) => {
                report_lost(&replies, in_flight_id, &e.to_string());
                return;
            }
        }
    }
}

fn report_lost(replies: &Sender<Frame>, task_id: Option<u64>, error: &str) {
    if let Some(id) = task_id {
        let _ = replies.send(Frame::Error {
            task_id: Some(id),
            message: format!("transport lost: {error}"),
        });
    }
}

fn frame_kind(frame: &Frame) -> &'static str {
    match frame {
        Frame::Task(_) => "task",
        Frame::Result(_) => "result",
        Frame::Error { .. } => "error",
        Frame::Shutdown => "shutdown",
    }
}
