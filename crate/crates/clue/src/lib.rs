// SPDX-License-Identifier: Apache-2.0

//! File formats, generators and the command line front end for
//! [`clue_core`].

pub mod cli;
pub mod formats;
pub mod gen;
pub mod provenance;

pub use clue_core as core;
