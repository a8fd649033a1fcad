//! Verification harness, command-line tool and HTTP service for
//! m-Modular Nim, built on `modnim-core`.

pub mod cli;
pub mod play;
pub mod report;
pub mod service;
pub mod session;
pub mod verify;
pub mod wire;
