// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Dynamically protected two-qubit gates.
//!
//! Dynamical-decoupling pulses are embedded as frozen segments inside a
//! gradient-ascent pulse optimizer. The resulting gates drive Grover's search
//! on a homonuclear spin pair, and the quality of protection is judged by the
//! marked-state probability and the quantum discord along the trajectory
//! under quasi-static noise ensembles.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod discord;
pub mod error;
pub mod grape;
pub mod grover;
pub mod harness;
pub mod linalg;
pub mod nmr;

pub use error::{Error, Result};
