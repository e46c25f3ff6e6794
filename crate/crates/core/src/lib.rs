pub mod curves;
pub mod error;
mod interp;
pub mod minkowski;
pub mod polynomial;
pub mod surface;
pub mod grid;
pub mod oracle;
pub mod ode;
pub mod classify;
pub mod config;
pub mod verify;
