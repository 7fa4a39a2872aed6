use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::formats::Num;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: String,
    pub paper_anchor: String,
    pub value: Num,
    pub measured: Num,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs_hash: String,
    pub bounds: Vec<Bound>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs_hash: String) -> Self {
        Report { command: command.into(), inputs_hash, bounds: Vec::new(), exit_code: EXIT_OK }
    }

    /// Adds a bound and downgrades the exit code when it fails.
    pub fn bound(&mut self, name: &str, anchor: &str, value: impl Into<Num>, measured: impl Into<Num>, satisfied: bool) {
        self.bounds.push(Bound {
            name: name.into(),
            paper_anchor: anchor.into(),
            value: value.into(),
            measured: measured.into(),
            satisfied,
        });
        if !satisfied {
            self.exit_code = EXIT_VIOLATED;
        }
    }

    /// Records `measured ≤ value`.
    pub fn upper(&mut self, name: &str, anchor: &str, value: f64, measured: f64) {
        self.bound(name, anchor, value, measured, measured <= value);
    }
}

/// SHA-256 over every input, each prefixed with its length so that boundaries are unambiguous.
pub fn hash_inputs<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
