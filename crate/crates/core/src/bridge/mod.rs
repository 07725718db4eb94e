//! Lets agents outside this process take a seat.
//!
//! The wire protocol is newline-delimited JSON (see [`protocol`]); each
//! request carries both a structured observation and the fixed-length binary
//! encoding from [`encoder`].

pub mod encoder;
pub mod protocol;
mod session;

pub use encoder::{encode_observation, encoded_len, EncodedObservation};
pub use protocol::{ErrorCode, ProtocolMessage, WireHint, WireMove, WireObservation, PROTOCOL_VERSION};
pub use session::{serve_session, BridgeError, Connection, Partner, SessionConfig, SessionReport, DEFAULT_MOVE_TIMEOUT};
