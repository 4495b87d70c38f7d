//! Library side of the `treegrow` command: configuration, traces and the
//! verification suites, shared by the binary and its acceptance tests.

pub mod config;
pub mod suites;
pub mod trace;

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const REFUSED: u8 = 2;
    pub const FAILED: u8 = 3;
}
