//! Wire protocol between the coordinator and its workers.
//!
//! Every message is a [`Frame`], encoded as a 4-byte big-endian length
//! followed by that many bytes of JSON. The JSON is adjacently tagged
//! (`{"type": ..., "payload": ...}`), unknown fields are ignored so either
//! side can be extended, and missing required fields fail the decode. The
//! same frames travel over in-process channels and TCP sockets, so
//! transport failures can be folded into the stream as [`Frame::Error`]
//! messages instead of needing a side channel.

use dqaoa_core::decompose::SubQubo;
use dqaoa_core::qaoa::{QaoaConfig, QaoaResult};
use serde::{Deserialize, Serialize};
use std::io::{self, Read, Write};
use thiserror::Error;

/// Upper bound on one encoded frame. A task carries a sub-problem matrix of
/// at most a few thousand coefficients, so anything near this limit is a
/// corrupt length prefix, not a real message.
pub const MAX_FRAME_LEN: u32 = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("frame of {len} bytes exceeds the {max}-byte limit")]
    FrameTooLarge { len: u64, max: u32 },
    #[error("malformed frame: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One unit of work: which variables to solve, with what solver knobs, and
/// the seed that makes the solve reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskEnvelope {
    pub task_id: u64,
    pub seed: u64,
    pub sub: SubQubo,
    pub qaoa: QaoaConfig,
}

/// A completed task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub task_id: u64,
    pub result: QaoaResult,
}

/// Everything that can travel between coordinator and worker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "lowercase")]
pub enum Frame {
    Task(TaskEnvelope),
    Result(ResultEnvelope),
    /// A failure report. `task_id` is present when the failure can be tied
    /// to a specific task (solver error, transport loss mid-task) and absent
    /// for stream-level problems.
    Error {
        task_id: Option<u64>,
        message: String,
    },
    /// Tells a worker to finish up and exit; never answered.
    Shutdown,
}

/// Encode `frame` onto `w` as length-prefixed JSON.
pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<(), ProtocolError> {
    let json = serde_json::to_vec(frame)?;
    if json.len() as u64 > MAX_FRAME_LEN as u64 {
        return Err(ProtocolError::FrameTooLarge {
            len: json.len() as u64,
            max: MAX_FRAME_LEN,
        });
    }
    w.write_all(&(json.len() as u32).to_be_bytes())?;
    w.write_all(&json)?;
    w.flush()?;
    Ok(())
}

/// Decode one frame from `r`.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Frame, ProtocolError> {
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes)?;
    let len = u32::from_be_bytes(len_bytes);
    if len > MAX_FRAME_LEN {
        return Err(ProtocolError::FrameTooLarge {
            len: len as u64,
            max: MAX_FRAME_LEN,
        });
    }
    let mut buf = vec![0u8; len as usize];
    r.read_exact(&mut buf)?;
    Ok(serde_json::from_slice(&buf)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqaoa_core::qubo::generate_dense_qubo;

    fn sample_task() -> TaskEnvelope {
        let q = generate_dense_qubo(5, 3).unwrap();
        TaskEnvelope {
            task_id: 42,
            seed: 7,
            sub: SubQubo::extract(&q, vec![0, 2, 4]).unwrap(),
            qaoa: QaoaConfig::default(),
        }
    }

    #[test]
    fn frames_are_length_prefixed_json() {
        let frame = Frame::Task(sample_task());
        let mut buf = Vec::new();
        write_frame(&mut buf, &frame).unwrap();
        let len = u32::from_be_bytes(buf[..4].try_into().unwrap()) as usize;
        assert_eq!(len, buf.len() - 4);
        let json: serde_json::Value = serde_json::from_slice(&buf[4..]).unwrap();
        assert_eq!(json["type"], "task");
        assert_eq!(json["payload"]["task_id"], 42);
        assert_eq!(json["payload"]["sub"]["indices"], serde_json::json!([0, 2, 4]));
    }

    #[test]
    fn shutdown_has_no_payload() {
        let mut buf = Vec::new();
        write_frame(&mut buf, &Frame::Shutdown).unwrap();
        let json: serde_json::Value = serde_json::from_slice(&buf[4..]).unwrap();
        assert_eq!(json, serde_json::json!({"type": "shutdown"}));
    }

    #[test]
    fn round_trip_all_variants() {
        let q = generate_dense_qubo(4, 1).unwrap();
        let sub = SubQubo::extract(&q, vec![1, 3]).unwrap();
        let result = dqaoa_core::qaoa::solve_subqubo(
            &sub,
            &QaoaConfig {
                shots: 8,
                max_evals: 3,
                ..QaoaConfig::default()
            },
            5,
        )
        .unwrap();
        let frames = [
            Frame::Task(sample_task()),
            Frame::Result(ResultEnvelope {
                task_id: 9,
                result,
            }),
            Frame::Error {
                task_id: Some(3),
                message: "boom".into(),
            },
            Frame::Error {
                task_id: None,
                message: "stream".into(),
            },
            Frame::Shutdown,
        ];
        let mut buf = Vec::new();
        for f in &frames {
            write_frame(&mut buf, f).unwrap();
        }
        let mut r = buf.as_slice();
        for f in &frames {
            let got = read_frame(&mut r).unwrap();
            match (f, &got) {
                // Durations survive only to f64 precision; compare the rest.
                (Frame::Result(a), Frame::Result(b)) => {
                    assert_eq!(a.task_id, b.task_id);
                    assert_eq!(a.result.best_bits, b.result.best_bits);
                    assert_eq!(a.result.params, b.result.params);
                }
                _ => assert_eq!(f, &got),
            }
        }
        assert!(r.is_empty());
    }

    #[test]
    fn unknown_fields_are_ignored_missing_fields_are_errors() {
        let ok = br#"{"type": "error", "payload": {"task_id": null, "message": "x", "alien": 1}}"#;
        let mut buf = (ok.len() as u32).to_be_bytes().to_vec();
        buf.extend_from_slice(ok);
        assert!(matches!(
            read_frame(&mut buf.as_slice()).unwrap(),
            Frame::Error { task_id: None, .. }
        ));

        let missing = br#"{"type": "error", "payload": {"task_id": 4}}"#;
        let mut buf = (missing.len() as u32).to_be_bytes().to_vec();
        buf.extend_from_slice(missing);
        assert!(matches!(
            read_frame(&mut buf.as_slice()),
            Err(ProtocolError::Malformed(_))
        ));
    }

    #[test]
    fn absurd_length_prefixes_are_rejected_without_allocating() {
        let mut buf = u32::MAX.to_be_bytes().to_vec();
        buf.extend_from_slice(b"garbage");
        assert!(matches!(
            read_frame(&mut buf.as_slice()),
            Err(ProtocolError::FrameTooLarge { .. })
        ));
    }

    #[test]
    fn truncated_frames_are_io_errors() {
        let frame = Frame::Shutdown;
        let mut buf = Vec::new();
        write_frame(&mut buf, &frame).unwrap();
        buf.truncate(buf.len() - 2);
        assert!(matches!(
            read_frame(&mut buf.as_slice()),
            Err(ProtocolError::Io(_))
        ));
    }
}
