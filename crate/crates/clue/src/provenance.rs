// SPDX-License-Identifier: Apache-2.0

//! Provenance headers for emitted artifacts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "clue";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    /// Input label to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(seed: u64) -> Self {
        Provenance { tool: TOOL.into(), version: VERSION.into(), seed, inputs: BTreeMap::new() }
    }

    pub fn with_input(mut self, label: &str, contents: &[u8]) -> Self {
        self.inputs.insert(label.into(), sha256_hex(contents));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let p = Provenance::new(3).with_input("report", b"abc");
        assert_eq!(p.inputs["report"].len(), 64);
        assert_eq!(p.tool, "clue");
    }
}
