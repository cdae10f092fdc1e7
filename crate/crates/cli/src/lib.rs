//! Command-line and HTTP front end for the setsig engine.

pub mod commands;
pub mod ops;
pub mod service;
pub mod session;
