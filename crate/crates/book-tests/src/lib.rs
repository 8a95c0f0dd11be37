// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Runs the code blocks of the guide under `book/` as doctests, one module
//! per chapter so a failure points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spin-model.md")]
pub mod spin_model {}

#[doc = include_str!("../../../book/src/protected-gates.md")]
pub mod protected_gates {}

#[doc = include_str!("../../../book/src/grover.md")]
pub mod grover {}

#[doc = include_str!("../../../book/src/discord.md")]
pub mod discord {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
