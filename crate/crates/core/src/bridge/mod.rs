//! Framed TCP link that lets the planner run as a separate process.
//!
//! The driver sends `REFERENCE_PATH` once, optionally `OBSTACLES`, then one
//! `EV_STATE` per cycle and receives the optimal `TRAJECTORY` in reply.

pub mod codec;
mod driver;
mod server;

use thiserror::Error;

pub use codec::{decode, encode, DecodeError, MsgType, WireMessage, WirePoint};
pub use driver::{drive_scenario, DriveReport};
pub use server::{bind, serve_planner, serve_session, SessionSummary};

use crate::planner::InitError;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("BindError: {0}")]
    Bind(std::io::Error),
    #[error("ConnectionLost: {0}")]
    ConnectionLost(String),
    #[error("ProtocolViolation: expected {expected}, got {got:?}")]
    ProtocolViolation { expected: &'static str, got: MsgType },
    #[error("ProtocolViolation: {0}")]
    Decode(#[from] DecodeError),
    #[error("PlannerInit: {0}")]
    PlannerInit(#[from] InitError),
}

impl From<codec::ReadError> for BridgeError {
    fn from(e: codec::ReadError) -> Self {
        match e {
            codec::ReadError::Decode(d) => BridgeError::Decode(d),
            codec::ReadError::Closed => BridgeError::ConnectionLost("peer closed the stream".into()),
            codec::ReadError::Io(io) => BridgeError::ConnectionLost(io.to_string()),
        }
    }
}

impl From<std::io::Error> for BridgeError {
    fn from(e: std::io::Error) -> Self {
        BridgeError::ConnectionLost(e.to_string())
    }
}
