//! The worker side: receive tasks, solve them, send results back.
//!
//! A worker is transport-agnostic — it runs against anything that can
//! exchange [`Frame`]s. The pool spawns workers on in-process channels or
//! local sockets, and tests can drive one directly.

use crate::protocol::{read_frame, write_frame, Frame, ResultEnvelope};
use crossbeam_channel::{Receiver, Sender};
use dqaoa_core::qaoa::solve_subqubo;
use std::net::{SocketAddr, TcpStream};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// A bidirectional frame stream, from the worker's point of view.
pub trait MessageChannel {
    /// Next frame from the coordinator. An error means the transport is
    /// gone and the worker should exit.
    fn recv(&mut self) -> Result<Frame, String>;
    fn send(&mut self, frame: Frame) -> Result<(), String>;
}

/// Worker end of a pair of in-process queues. The task receiver is shared
/// by all workers of a pool, so whichever worker is free pulls the next
/// task.
pub struct QueueChannel {
    pub tasks: Receiver<Frame>,
    pub replies: Sender<Frame>,
}

impl MessageChannel for QueueChannel {
    fn recv(&mut self) -> Result<Frame, String> {
        self.tasks.recv().map_err(|e| e.to_string())
    }

    fn send(&mut self, frame: Frame) -> Result<(), String> {
        self.replies.send(frame).map_err(|e| e.to_string())
    }
}

/// Length-prefixed frames over one TCP connection.
pub struct SocketChannel {
    stream: TcpStream,
}

impl SocketChannel {
    pub fn new(stream: TcpStream) -> Self {
        SocketChannel { stream }
    }
}

impl MessageChannel for SocketChannel {
    fn recv(&mut self) -> Result<Frame, String> {
        read_frame(&mut self.stream).map_err(|e| e.to_string())
    }

    fn send(&mut self, frame: Frame) -> Result<(), String> {
        write_frame(&mut self.stream, &frame).map_err(|e| e.to_string())
    }
}

/// Serve tasks until a shutdown frame or transport loss.
///
/// Solver failures (and panics) for a task become [`Frame::Error`] replies
/// carrying that task's id, so the coordinator can decide what to do; they
/// never kill the worker. Frames a worker should not receive are answered
/// with an unaddressed error frame.
pub fn worker_loop<C: MessageChannel>(mut channel: C) {
    loop {
        let frame = match channel.recv() {
            Ok(f) => f,
            Err(_) => return,
        };
        let reply = match frame {
            Frame::Task(task) => {
                let solved = catch_unwind(AssertUnwindSafe(|| {
                    solve_subqubo(&task.sub, &task.qaoa, task.seed)
                }));
                match solved {
                    Ok(Ok(result)) => Frame::Result(ResultEnvelope {
                        task_id: task.task_id,
                        result,
                    }),
                    Ok(Err(e)) => Frame::Error {
                        task_id: Some(task.task_id),
                        message: e.to_string(),
                    },
                    Err(_) => Frame::Error {
                        task_id: Some(task.task_id),
                        message: "worker panicked while solving".into(),
                    },
                }
            }
            Frame::Shutdown => return,
            Frame::Result(_) | Frame::Error { .. } => Frame::Error {
                task_id: None,
                message: "worker received a coordinator-bound frame".into(),
            },
        };
        if channel.send(reply).is_err() {
            return;
        }
    }
}

/// Connect to a coordinator at `addr` and serve tasks until shutdown.
pub fn run_socket_worker(addr: SocketAddr) -> std::io::Result<()> {
    let stream = TcpStream::connect(addr)?;
    stream.set_nodelay(true)?;
    worker_loop(SocketChannel::new(stream));
    Ok(())
}
