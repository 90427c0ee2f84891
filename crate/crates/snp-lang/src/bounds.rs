//! Exhaustive runtime-bound sweep: run a program on every input in
//! `{1..N}^I` and record the largest value any variable ever holds. That
//! maximum is the bound B the compiler sizes loop unrolling and gadget
//! coefficients with.

use crate::ast::Program;
use crate::interp::{run, ExecError, ExecOptions};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("sweep of {needed} inputs exceeds cap {cap}; pass a declared bound instead")]
    SweepCapExceeded { needed: u128, cap: u64 },
    #[error("execution failed on input {input:?}: {source}")]
    ExecFailed {
        input: Vec<u64>,
        #[source]
        source: ExecError,
    },
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Abort if the sweep would visit more than this many inputs.
    pub cap: u64,
    /// Caller-declared bound; the result is at least this.
    pub declared: Option<u64>,
    pub record_per_input: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cap: 1_000_000,
            declared: None,
            record_per_input: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundProfile {
    /// The swept input range bound N.
    pub input_bound: u64,
    /// Maximum runtime value over all inputs and execution steps.
    pub value_bound: u64,
    /// Per-input maxima, when requested.
    pub per_input_max: Option<Vec<(Vec<u64>, u64)>>,
}

/// Iterate over `{1..n}^arity` in lexicographic order.
pub fn input_grid(n: u64, arity: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (n as u128).pow(arity as u32);
    (0..total).map(move |mut idx| {
        let mut point = vec![1u64; arity];
        for slot in (0..arity).rev() {
            point[slot] = (idx % n as u128) as u64 + 1;
            idx /= n as u128;
        }
        point
    })
}

pub fn bound_profile(
    p: &Program,
    n: u64,
    opts: &SweepOptions,
) -> Result<BoundProfile, BoundError> {
    let arity = p.input_count();
    let needed = (n as u128).pow(arity as u32);
    if needed > opts.cap as u128 {
        return Err(BoundError::SweepCapExceeded {
            needed,
            cap: opts.cap,
        });
    }

    let exec_opts = ExecOptions::default();
    let mut value_bound = opts.declared.unwrap_or(0);
    let mut per_input = opts.record_per_input.then(Vec::new);
    for input in input_grid(n, arity) {
        let outcome = run(p, &input, &exec_opts).map_err(|source| BoundError::ExecFailed {
            input: input.clone(),
            source,
        })?;
        if outcome.max_value > value_bound {
            value_bound = outcome.max_value;
        }
        if let Some(table) = &mut per_input {
            table.push((input, outcome.max_value));
        }
    }
    Ok(BoundProfile {
        input_bound: n,
        value_bound,
        per_input_max: per_input,
    })
}
