//! The machine-readable one-line summary printed by `solve` and recorded by
//! `bench`.

use serde::Serialize;
use tlsp::solver::{SolveOutcome, SolveStatus};

#[derive(Serialize)]
pub struct Summary {
    pub instance: String,
    pub method: String,
    pub seed: u64,
    pub status: SolveStatus,
    pub total: Option<u64>,
    pub s1: Option<u64>,
    pub s2: Option<u64>,
    pub s3: Option<u64>,
    pub s4: Option<u64>,
    pub s5: Option<u64>,
    pub nodes: u64,
    pub moves: u64,
    pub wall_secs: f64,
}

impl Summary {
    pub fn new(instance: &str, method: &str, seed: u64, outcome: &SolveOutcome) -> Self {
        let terms = outcome.best_penalty;
        Summary {
            instance: instance.to_string(),
            method: method.to_string(),
            seed,
            status: outcome.status,
            total: terms.map(|t| t.total),
            s1: terms.map(|t| t.s1),
            s2: terms.map(|t| t.s2),
            s3: terms.map(|t| t.s3),
            s4: terms.map(|t| t.s4),
            s5: terms.map(|t| t.s5),
            nodes: outcome.nodes,
            moves: outcome.moves,
            wall_secs: outcome.wall_secs,
        }
    }
}
