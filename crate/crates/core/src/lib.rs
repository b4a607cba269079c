// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! Four-level double-dark-resonance medium: coherent dressing, open-system
//! steady states and the linear probe susceptibility.

pub mod cli;
pub mod coherent;
pub mod dynamics;
pub mod linalg;
pub mod model;
pub mod response;
