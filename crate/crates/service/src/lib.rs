//! Training sessions for the qplay playground and the HTTP API around them.
//!
//! [`session::Session`] is the synchronous core. [`worker`] runs each session on
//! its own thread and publishes frames latest-wins; [`http`] exposes the
//! registry as JSON endpoints plus a server-sent-event frame stream.

pub mod config;
pub mod frame;
pub mod http;
pub mod session;
pub mod worker;

pub use config::{DatasetConfig, FieldError, SessionConfig};
pub use frame::Frame;
pub use session::{ControlCommand, Session, SessionError, SessionState};
