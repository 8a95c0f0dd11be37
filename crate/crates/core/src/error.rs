// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Errors raised by the numerical core, the file formats and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("generator is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dagger U - 1| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "missing pulse file {path}: run `ddgrape optimize` to build the protected gates first"
    )]
    MissingPulse { path: PathBuf },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
