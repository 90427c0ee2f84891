//! Reference interpreter. Two loop-exit conventions are supported:
//!
//! * `LoopExit::Natural` leaves a counter at the value that first failed the
//!   loop test, `max(start, end + 1)`.
//! * `LoopExit::Unrolled { bound }` mirrors the compiled network, which
//!   always runs `bound + 1` repetitions and increments the counter in every
//!   one, leaving it at `start + bound + 1`.
//!
//! Valid programs never read a counter after its loop (the validator warns
//! otherwise), so the two conventions agree on every corpus program. The
//! unrolled form is what differential tests against compiled networks use.

use crate::ast::{ArithOp, Operand, Program, Statement, VarKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("subtraction produced a negative value in '{var}'")]
    NegativeResult { var: String },
    #[error("composite program: inline subprogram calls before interpreting")]
    CompositeProgram,
    #[error("condition variable '{var}' holds {value}, expected 0 or 1")]
    NonBooleanCondition { var: String, value: u64 },
    #[error("arithmetic overflow in '{var}'")]
    Overflow { var: String },
    #[error("program body does not end with a return statement")]
    NoReturn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopExit {
    Natural,
    Unrolled { bound: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct ExecOptions {
    pub loop_exit: LoopExit,
    pub record_trace: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            loop_exit: LoopExit::Natural,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceLine {
    pub step: usize,
    pub state: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ExecOutcome {
    pub output: u64,
    /// Largest value any variable held at any point, initial values included.
    pub max_value: u64,
    pub trace: Option<Vec<TraceLine>>,
}

/// Run with the natural loop-exit convention and return the output.
pub fn interpret(p: &Program, inputs: &[u64]) -> Result<u64, ExecError> {
    run(p, inputs, &ExecOptions::default()).map(|o| o.output)
}

/// Run with the network's loop-exit convention for runtime bound `bound`.
pub fn interpret_bounded(p: &Program, inputs: &[u64], bound: u64) -> Result<u64, ExecError> {
    run(
        p,
        inputs,
        &ExecOptions {
            loop_exit: LoopExit::Unrolled { bound },
            record_trace: false,
        },
    )
    .map(|o| o.output)
}

pub fn run(p: &Program, inputs: &[u64], opts: &ExecOptions) -> Result<ExecOutcome, ExecError> {
    let expected = p.input_count();
    if inputs.len() != expected {
        return Err(ExecError::ArityMismatch {
            expected,
            got: inputs.len(),
        });
    }
    if !matches!(p.body.last(), Some(Statement::Return { .. })) {
        return Err(ExecError::NoReturn);
    }

    let mut state = Vec::with_capacity(p.context.len());
    let mut next_input = 0;
    for decl in &p.context {
        match decl.kind {
            VarKind::Input => {
                state.push(inputs[next_input]);
                next_input += 1;
            }
            _ => state.push(decl.init.unwrap_or(0)),
        }
    }

    let mut exec = Exec {
        p,
        opts,
        max_value: state.iter().copied().max().unwrap_or(0),
        trace: if opts.record_trace { Some(Vec::new()) } else { None },
        step: 0,
    };
    let output = exec.block(&p.body, &mut state)?.expect("return is last");
    Ok(ExecOutcome {
        output,
        max_value: exec.max_value,
        trace: exec.trace,
    })
}

struct Exec<'a> {
    p: &'a Program,
    opts: &'a ExecOptions,
    max_value: u64,
    trace: Option<Vec<TraceLine>>,
    step: usize,
}

impl<'a> Exec<'a> {
    fn set(&mut self, state: &mut [u64], var: usize, value: u64) {
        state[var] = value;
        if value > self.max_value {
            self.max_value = value;
        }
    }

    fn record(&mut self, state: &[u64]) {
        self.step += 1;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceLine {
                step: self.step,
                state: state.to_vec(),
            });
        }
    }

    fn operand(&self, state: &[u64], op: &Operand) -> u64 {
        match op {
            Operand::Var(v) => state[*v],
            Operand::Const(c) => *c,
        }
    }

    /// Execute a block; returns `Some(output)` once a return runs.
    fn block(&mut self, stmts: &[Statement], state: &mut Vec<u64>) -> Result<Option<u64>, ExecError> {
        for stmt in stmts {
            match stmt {
                Statement::Assign { target, value } => {
                    let v = self.operand(state, value);
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::AddConst {
                    target,
                    source,
                    constant,
                } => {
                    let base = state[*source];
                    let v = if *constant >= 0 {
                        base.checked_add(*constant as u64).ok_or(ExecError::Overflow {
                            var: self.p.var_name(*target).into(),
                        })?
                    } else {
                        base.checked_sub(constant.unsigned_abs()).ok_or_else(|| {
                            ExecError::NegativeResult {
                                var: self.p.var_name(*target).into(),
                            }
                        })?
                    };
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::MulConst {
                    target,
                    constant,
                    source,
                } => {
                    let v = constant
                        .checked_mul(state[*source])
                        .ok_or(ExecError::Overflow {
                            var: self.p.var_name(*target).into(),
                        })?;
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::BinaryArith {
                    target,
                    op,
                    lhs,
                    rhs,
                } => {
                    let (a, b) = (state[*lhs], state[*rhs]);
                    let v = match op {
                        ArithOp::Add => a.checked_add(b).ok_or(ExecError::Overflow {
                            var: self.p.var_name(*target).into(),
                        })?,
                        ArithOp::Sub => a.checked_sub(b).ok_or_else(|| ExecError::NegativeResult {
                            var: self.p.var_name(*target).into(),
                        })?,
                    };
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::UnaryCmp {
                    target,
                    op,
                    operand,
                    constant,
                } => {
                    let v = op.eval(state[*operand], *constant);
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::BinaryCmp {
                    target,
                    op,
                    lhs,
                    rhs,
                } => {
                    let v = op.eval(state[*lhs], state[*rhs]);
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::If {
                    target,
                    cond,
                    then_src,
                    else_src,
                } => {
                    let c = state[*cond];
                    if c > 1 {
                        return Err(ExecError::NonBooleanCondition {
                            var: self.p.var_name(*cond).into(),
                            value: c,
                        });
                    }
                    let v = if c == 1 {
                        self.operand(state, then_src)
                    } else {
                        self.operand(state, else_src)
                    };
                    self.set(state, *target, v);
                    self.record(state);
                }
                Statement::For {
                    counter,
                    start,
                    end,
                    clause,
                } => {
                    let start_v = self.operand(state, start);
                    let end_v = self.operand(state, end);
                    self.set(state, *counter, start_v);
                    self.record(state);
                    match self.opts.loop_exit {
                        LoopExit::Natural => {
                            while state[*counter] <= end_v {
                                self.block(clause, state)?;
                                let next = state[*counter] + 1;
                                self.set(state, *counter, next);
                                self.record(state);
                            }
                        }
                        LoopExit::Unrolled { bound } => {
                            for _ in 0..=bound {
                                if state[*counter] <= end_v {
                                    self.block(clause, state)?;
                                }
                                let next = state[*counter] + 1;
                                self.set(state, *counter, next);
                                self.record(state);
                            }
                        }
                    }
                }
                Statement::Subcall { .. } => return Err(ExecError::CompositeProgram),
                Statement::Return { var } => {
                    self.record(state);
                    return Ok(Some(state[*var]));
                }
            }
        }
        Ok(None)
    }
}
