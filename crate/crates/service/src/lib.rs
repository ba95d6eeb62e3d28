//! JSON HTTP API over the practice catalog: search with either answer
//! back-end, faceted browsing, stage grouping and feedback capture.

pub mod api;
pub mod config;
pub mod feedback;
pub mod server;
pub mod stub;

pub use api::{router, AppState, SEARCH_RESPONSE_SCHEMA};
pub use config::ServiceConfig;
pub use feedback::{FeedbackEvent, FeedbackLog, Verdict};
pub use server::{build_state, run, serve, ServiceError};
