//! Exhaustive differential check: the compiled network against the
//! interpreter, over every input in the program's range.

use crate::CompiledProgram;
use nn_core::NnError;
use snp_lang::ast::Program;
use snp_lang::bounds::input_grid;
use snp_lang::interp::{interpret_bounded, ExecError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("sweep of {needed} inputs exceeds cap {cap}")]
    SweepCapExceeded { needed: u128, cap: u64 },
    #[error("interpreter failed on {input:?}: {source}")]
    Interpreter {
        input: Vec<u64>,
        #[source]
        source: ExecError,
    },
    #[error("network evaluation failed on {input:?}: {source}")]
    Network {
        input: Vec<u64>,
        #[source]
        source: NnError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub input: Vec<u64>,
    pub expected: u64,
    pub actual: i64,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

const MISMATCH_KEEP: usize = 32;

/// Compare `compiled` with the interpreter on all of `{1..n}^I`. The
/// interpreter runs under the unrolled loop-exit convention with the
/// compile-time bound, the exact semantics the network realizes.
pub fn verify_equivalence(
    p: &Program,
    compiled: &CompiledProgram,
    n: u64,
    cap: u64,
) -> Result<EquivalenceReport, VerifyError> {
    let arity = p.input_count();
    let needed = (n as u128).pow(arity as u32);
    if needed > cap as u128 {
        return Err(VerifyError::SweepCapExceeded { needed, cap });
    }
    let bound = compiled.options.value_bound;
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    let inputs: Vec<Vec<u64>> = input_grid(n, arity).collect();
    for chunk in inputs.chunks(64) {
        let actuals = compiled
            .eval_batch(chunk)
            .map_err(|source| VerifyError::Network {
                input: chunk[0].clone(),
                source,
            })?;
        for (input, actual) in chunk.iter().zip(actuals) {
            let expected =
                interpret_bounded(p, input, bound).map_err(|source| VerifyError::Interpreter {
                    input: input.clone(),
                    source,
                })?;
            checked += 1;
            if actual != expected as i64 && mismatches.len() < MISMATCH_KEEP {
                mismatches.push(Mismatch {
                    input: input.clone(),
                    expected,
                    actual,
                });
            }
        }
    }
    Ok(EquivalenceReport {
        checked,
        mismatches,
    })
}
