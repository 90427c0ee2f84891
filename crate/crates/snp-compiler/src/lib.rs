//! Compilation of SNP programs into exact integer ReLU networks.
//!
//! Every variable owns one node of the width-V state vector; statements
//! become short layer groups and counted loops become one repeated block
//! per loop. The compiler's primary output is the repetition-compressed
//! layer word ([`nn_core::RcWord`]): the flat network is recoverable from
//! it, but desk-scale loop nests already denote millions of layers, so
//! evaluation and measurement work on the word directly.

mod gadget;
mod verify;

pub use gadget::{encode_for_loop, encode_statement};
pub use verify::{verify_equivalence, EquivalenceReport, Mismatch, VerifyError};

use nn_core::{eval_word, eval_word_batch, eval_word_checked, InputSlot, Layer, Network, NnError, RcNode, RcWord};
use snp_lang::ast::{Operand, Program, Statement, VarKind};
use snp_lang::validate::{is_valid, validate};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("program failed validation: {0:?}")]
    InvalidProgram(Vec<snp_lang::validate::Diagnostic>),
    #[error("composite program: inline subprogram calls before compiling")]
    CompositeProgram,
    #[error("runtime bound {got} is too small (need at least {need})")]
    BoundTooSmall { got: u64, need: u64 },
    #[error("runtime bound or constant {0} exceeds the supported coefficient range")]
    BoundTooLarge(u64),
    #[error("loops are encoded by encode_for_loop, not encode_statement")]
    LoopInStatementEncoder,
    #[error("program body does not end with a return statement")]
    NoReturn,
    #[error(transparent)]
    Net(#[from] NnError),
}

/// The layer group a single non-loop statement compiles to.
#[derive(Debug, Clone)]
pub struct LayerGroup {
    pub layers: Vec<Arc<Layer>>,
}

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Input range bound N: inputs are drawn from {1..N}.
    pub input_bound: u64,
    /// Runtime value bound B: loop blocks repeat B+1 times and gate
    /// coefficients scale with 2B.
    pub value_bound: u64,
    /// Assert pass-through nonnegativity during checked evaluation.
    pub strict_checks: bool,
}

impl CompileOptions {
    pub fn new(input_bound: u64, value_bound: u64) -> Result<CompileOptions, CompileError> {
        if value_bound < 2 {
            return Err(CompileError::BoundTooSmall {
                got: value_bound,
                need: 2,
            });
        }
        Ok(CompileOptions {
            input_bound,
            value_bound,
            strict_checks: false,
        })
    }
}

/// A compiled program: the input slots (one per context variable) and the
/// repetition-compressed layer word. The final layer projects out the
/// returned variable and carries no nonlinearity.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub input_spec: Vec<InputSlot>,
    pub word: RcWord,
    pub options: CompileOptions,
}

impl CompiledProgram {
    /// Exact forward pass on one program input.
    pub fn eval(&self, input: &[u64]) -> Result<i64, NnError> {
        let ints: Vec<i64> = input.iter().map(|x| *x as i64).collect();
        let out = if self.options.strict_checks {
            eval_word_checked(&self.input_spec, &self.word, false, &ints)?
        } else {
            eval_word(&self.input_spec, &self.word, false, &ints)?
        };
        Ok(out[0])
    }

    /// Evaluate many inputs with one walk over the layer word.
    pub fn eval_batch(&self, inputs: &[Vec<u64>]) -> Result<Vec<i64>, NnError> {
        let ints: Vec<Vec<i64>> = inputs
            .iter()
            .map(|x| x.iter().map(|v| *v as i64).collect())
            .collect();
        let views: Vec<&[i64]> = ints.iter().map(|v| v.as_slice()).collect();
        let outs = eval_word_batch(&self.input_spec, &self.word, false, &views)?;
        Ok(outs.into_iter().map(|o| o[0]).collect())
    }

    /// Materialize the flat network (may be large; see `RcWord::flatten`).
    pub fn to_network(&self) -> Result<Network, NnError> {
        Network::from_word(self.input_spec.clone(), &self.word, false)
    }

    pub fn layer_count(&self) -> u128 {
        self.word.layer_count()
    }
}

/// Compile an atomic, valid program against the given bounds.
pub fn compile(p: &Program, options: &CompileOptions) -> Result<CompiledProgram, CompileError> {
    if !p.is_atomic() {
        return Err(CompileError::CompositeProgram);
    }
    let diags = validate(p);
    if !is_valid(&diags) {
        return Err(CompileError::InvalidProgram(
            diags
                .into_iter()
                .filter(|d| d.severity == snp_lang::validate::Severity::Error)
                .collect(),
        ));
    }
    if p.return_var().is_none() {
        return Err(CompileError::NoReturn);
    }
    if p.input_count() > 0 && options.value_bound < options.input_bound {
        return Err(CompileError::BoundTooSmall {
            got: options.value_bound,
            need: options.input_bound,
        });
    }
    check_constant_range(&p.body)?;

    let v = p.var_count();
    let word = RcWord {
        nodes: compile_block(&p.body, v, options.value_bound)?,
    };
    let input_spec = p
        .context
        .iter()
        .map(|d| match d.kind {
            VarKind::Input => InputSlot::Free,
            _ => InputSlot::Fixed(d.init.unwrap_or(0)),
        })
        .collect();
    Ok(CompiledProgram {
        input_spec,
        word,
        options: *options,
    })
}

fn compile_block(stmts: &[Statement], v: usize, b: u64) -> Result<Vec<RcNode>, CompileError> {
    let mut nodes = Vec::new();
    for stmt in stmts {
        match stmt {
            Statement::For {
                counter,
                start,
                end,
                clause,
            } => {
                let clause_word = RcWord {
                    nodes: compile_block(clause, v, b)?,
                };
                nodes.extend(encode_for_loop(*counter, start, end, &clause_word, v, b)?);
            }
            other => {
                let group = encode_statement(other, v, b)?;
                nodes.extend(group.layers.into_iter().map(RcNode::Atom));
            }
        }
    }
    Ok(nodes)
}

fn check_constant_range(stmts: &[Statement]) -> Result<(), CompileError> {
    const LIMIT: u64 = (i64::MAX / 4) as u64;
    fn check_op(op: &Operand) -> Option<u64> {
        match op {
            Operand::Const(c) if *c > LIMIT => Some(*c),
            _ => None,
        }
    }
    for stmt in stmts {
        let bad = match stmt {
            Statement::Assign { value, .. } => check_op(value),
            Statement::MulConst { constant, .. } if *constant > LIMIT => Some(*constant),
            Statement::UnaryCmp { constant, .. } if *constant > LIMIT => Some(*constant),
            Statement::If {
                then_src, else_src, ..
            } => check_op(then_src).or(check_op(else_src)),
            Statement::For {
                start, end, clause, ..
            } => {
                check_constant_range(clause)?;
                check_op(start).or(check_op(end))
            }
            _ => None,
        };
        if let Some(c) = bad {
            return Err(CompileError::BoundTooLarge(c));
        }
    }
    Ok(())
}
