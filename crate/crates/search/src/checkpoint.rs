//! Append-only progress log for exhaustive runs.
//!
//! Each line is one JSON record for a finished top-level subtree, keyed by
//! the colex ranks of its prefix family:
//!
//! ```text
//! {"prefix":[0,1,3],"status":"done","r":3,"k":3,"b":6,"n":5,"best_a":4,"best":[0,1,2,3,4,5],"nodes":17}
//! ```
//!
//! The problem parameters travel with every record so a log is never merged
//! into a different problem. A torn final line (from an interrupted write) is
//! ignored on resume.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::SearchError;
use crate::problem::SearchProblem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub prefix: Vec<u32>,
    pub status: String,
    pub r: usize,
    pub k: usize,
    pub b: usize,
    pub n: usize,
    pub best_a: Option<u64>,
    pub best: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optima: Vec<Vec<u32>>,
    pub nodes: u64,
}

impl CheckpointRecord {
    pub fn matches(&self, p: &SearchProblem) -> bool {
        (self.r, self.k, self.b, self.n) == (p.r, p.k, p.b, p.n)
    }
}

fn err(path: &Path, message: impl Into<String>) -> SearchError {
    SearchError::Checkpoint { path: path.display().to_string(), message: message.into() }
}

/// Reads finished subtrees for `problem`, keyed by prefix.
pub fn load(path: &Path, problem: &SearchProblem) -> Result<HashMap<Vec<u32>, CheckpointRecord>, SearchError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(HashMap::new()),
        Err(e) => return Err(err(path, e.to_string())),
    };
    let lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>().map_err(|e| err(path, e.to_string()))?;
    let mut out = HashMap::new();
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CheckpointRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(_) if i == last => break,
            Err(e) => return Err(err(path, format!("line {}: {e}", i + 1))),
        };
        if !rec.matches(problem) {
            return Err(err(
                path,
                format!("line {}: record is for r={} k={} b={} n={}", i + 1, rec.r, rec.k, rec.b, rec.n),
            ));
        }
        if rec.status == "done" {
            out.insert(rec.prefix.clone(), rec);
        }
    }
    Ok(out)
}

/// Serialized appender shared by worker threads.
pub struct CheckpointWriter {
    path: PathBuf,
    file: Mutex<File>,
}

impl CheckpointWriter {
    pub fn open(path: &Path, truncate: bool) -> Result<Self, SearchError> {
        let mut opts = OpenOptions::new();
        opts.create(true);
        if truncate {
            opts.write(true).truncate(true);
        } else {
            opts.append(true);
        }
        let mut file = opts.open(path).map_err(|e| err(path, e.to_string()))?;
        if !truncate {
            // Terminate a torn last line so new records start cleanly.
            let text = std::fs::read(path).map_err(|e| err(path, e.to_string()))?;
            if text.last().is_some_and(|&c| c != b'\n') {
                file.write_all(b"\n").map_err(|e| err(path, e.to_string()))?;
            }
        }
        Ok(CheckpointWriter { path: path.to_path_buf(), file: Mutex::new(file) })
    }

    pub fn append(&self, rec: &CheckpointRecord) -> Result<(), SearchError> {
        let mut line = serde_json::to_string(rec).expect("record serializes");
        line.push('\n');
        let mut f = self.file.lock().expect("checkpoint lock");
        f.write_all(line.as_bytes()).and_then(|_| f.flush()).map_err(|e| err(&self.path, e.to_string()))
    }
}
