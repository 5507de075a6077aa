//! Random program generation and the property runner built on it.

pub mod gen;
pub mod mutate;
pub mod props;
pub mod shrink;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::context::preprocess;
use crate::interp::{eval_expr, EvalOutcome};
use crate::syntax::{desugar, pretty, Program};

pub use gen::{gen_program, GenConfig};
pub use mutate::Mutant;
pub use props::{check_all, check_property, honest, Limits, Property, Transformer};
pub use shrink::shrink;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub property: Property,
    pub message: String,
    /// Minimized failing program, pretty-printed.
    pub witness: String,
    pub witness_selected: Vec<String>,
    pub witness_defs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub types: Vec<String>,
    pub selected: Vec<String>,
    pub defs: usize,
    /// How the generated program's own evaluation ended: value, fuel or stuck.
    pub outcome: &'static str,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub trials: Vec<TrialReport>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub failed_trials: usize,
    pub terminating: usize,
    pub exhausted: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.trials.iter().all(|t| t.failures.is_empty())
    }

    pub fn summary(&self) -> Summary {
        Summary {
            trials: self.trials.len(),
            failed_trials: self.trials.iter().filter(|t| !t.failures.is_empty()).count(),
            terminating: self.trials.iter().filter(|t| t.outcome == "value").count(),
            exhausted: self.trials.iter().filter(|t| t.outcome == "fuel").count(),
        }
    }

    /// One JSON object per trial, then one summary object.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.trials {
            out.push_str(&serde_json::to_string(t).expect("report serializes"));
            out.push('\n');
        }
        let summary = serde_json::json!({ "summary": self.summary(), "passed": self.passed() });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Seed of trial `i` of a run started from `base`.
pub fn trial_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// The program and selected types of one trial.
pub fn trial_subject(cfg: &GenConfig, i: usize) -> (Program, BTreeSet<String>, u64) {
    let seed = trial_seed(cfg.seed, i);
    let program = desugar(&gen_program(&GenConfig { seed, ..cfg.clone() }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e1e_c7ed);
    let selected = program.type_names().into_iter().filter(|_| rng.gen_bool(0.7)).collect();
    (program, selected, seed)
}

fn outcome_label(p: &Program, fuel: u64) -> &'static str {
    let Ok(ctx) = preprocess(p) else { return "invalid" };
    match eval_expr(&p.main, &ctx, fuel).0 {
        EvalOutcome::Value(_) => "value",
        EvalOutcome::FuelExhausted => "fuel",
        EvalOutcome::Stuck { .. } => "stuck",
    }
}

/// Runs `trials` generated programs through every property with the real
/// transformation.
pub fn run_properties(cfg: &GenConfig, trials: usize, limits: Limits) -> Report {
    run_properties_with(cfg, trials, limits, &honest, &Property::ALL, true)
}

/// Like [`run_properties`] but against any transformer and property subset.
/// Trials run in parallel; the report keeps trial order.
pub fn run_properties_with(
    cfg: &GenConfig,
    trials: usize,
    limits: Limits,
    tr: &Transformer,
    properties: &[Property],
    minimize: bool,
) -> Report {
    let trials = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (program, selected, seed) = trial_subject(cfg, i);
            let failures = properties
                .iter()
                .filter_map(|&prop| {
                    let message = check_property(prop, &program, &selected, tr, limits).err()?;
                    let (w, ws) = if minimize {
                        shrink(&program, &selected, prop, tr, limits)
                    } else {
                        (program.clone(), selected.clone())
                    };
                    Some(Failure {
                        property: prop,
                        message,
                        witness: pretty(&w).unwrap_or_default(),
                        witness_selected: ws.into_iter().collect(),
                        witness_defs: w.defs.len(),
                    })
                })
                .collect();
            TrialReport {
                trial: i,
                seed,
                types: program.type_names(),
                selected: selected.iter().cloned().collect(),
                defs: program.defs.len(),
                outcome: outcome_label(&program, limits.fuel),
                failures,
            }
        })
        .collect();
    Report { trials }
}
