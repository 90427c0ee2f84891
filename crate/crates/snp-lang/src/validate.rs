//! Structural checks beyond the grammar. Errors mark programs the compiler
//! and interpreter refuse; warnings flag constructs whose loop-exit behavior
//! differs between the interpreter's plain reading and the compiled network
//! (reading a loop counter after its loop ends).

use crate::ast::{Operand, Program, Statement, VarId, VarKind};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
        }
    }
    fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

/// True when `diags` contains no errors.
pub fn is_valid(diags: &[Diagnostic]) -> bool {
    diags.iter().all(|d| d.severity != Severity::Error)
}

pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    // Exactly one return, as the final top-level statement.
    let return_count = count_returns(&p.body);
    match p.body.last() {
        Some(Statement::Return { .. }) => {
            if return_count > 1 {
                diags.push(Diagnostic::error("multiple return statements"));
            }
        }
        Some(_) => {
            if return_count == 0 {
                diags.push(Diagnostic::error("program must end with a return statement"));
            } else {
                diags.push(Diagnostic::error(
                    "statements appear after the return statement",
                ));
            }
        }
        None => diags.push(Diagnostic::error("empty program body")),
    }

    check_block(p, &p.body, true, &mut diags);

    // Counter reads after their loop finished: the compiled network leaves
    // the counter past its range, so such reads are flagged. The clause is
    // walked twice to catch reads fed by the previous iteration.
    let mut tainted = BTreeSet::new();
    let mut warned = BTreeSet::new();
    taint_walk(p, &p.body, &mut tainted, &mut warned, &mut diags);

    diags
}

fn count_returns(stmts: &[Statement]) -> usize {
    stmts
        .iter()
        .map(|s| match s {
            Statement::Return { .. } => 1,
            Statement::For { clause, .. } => count_returns(clause),
            _ => 0,
        })
        .sum()
}

fn check_block(p: &Program, stmts: &[Statement], top: bool, diags: &mut Vec<Diagnostic>) {
    for (i, stmt) in stmts.iter().enumerate() {
        match stmt {
            Statement::Return { .. } => {
                if !top {
                    diags.push(Diagnostic::error("return inside a loop clause"));
                } else if i + 1 != stmts.len() {
                    // reported by the last-statement check
                }
            }
            Statement::If { cond, .. } => {
                if p.context[*cond].kind != VarKind::Bool {
                    diags.push(Diagnostic::error(format!(
                        "condition '{}' is not a bool variable",
                        p.var_name(*cond)
                    )));
                }
            }
            Statement::MulConst { .. } => {}
            Statement::For {
                counter,
                end,
                clause,
                ..
            } => {
                if p.context[*counter].kind == VarKind::Bool {
                    diags.push(Diagnostic::error(format!(
                        "loop counter '{}' must be an int variable",
                        p.var_name(*counter)
                    )));
                }
                if let Operand::Var(e) = end {
                    if e == counter {
                        diags.push(Diagnostic::error(format!(
                            "loop end variable equals the counter '{}'",
                            p.var_name(*counter)
                        )));
                    }
                }
                let mut writes = BTreeSet::new();
                collect_writes(clause, &mut writes);
                if writes.contains(counter) {
                    diags.push(Diagnostic::error(format!(
                        "loop clause modifies its counter '{}'",
                        p.var_name(*counter)
                    )));
                }
                if let Operand::Var(e) = end {
                    if writes.contains(e) {
                        diags.push(Diagnostic::error(format!(
                            "loop clause modifies the loop end variable '{}'",
                            p.var_name(*e)
                        )));
                    }
                }
                check_block(p, clause, false, diags);
            }
            Statement::Subcall { callee, args, .. } => match p.defs.get(callee) {
                Some(def) => {
                    let expected = def.input_count();
                    if args.len() != expected {
                        diags.push(Diagnostic::error(format!(
                            "call to '{callee}' passes {} arguments, expected {expected}",
                            args.len()
                        )));
                    }
                }
                None => diags.push(Diagnostic::error(format!("unknown subprogram '{callee}'"))),
            },
            Statement::Assign { target, value } => {
                if p.context[*target].kind == VarKind::Bool {
                    match value {
                        Operand::Const(c) if *c > 1 => diags.push(Diagnostic::error(format!(
                            "bool variable '{}' assigned constant {c}",
                            p.var_name(*target)
                        ))),
                        Operand::Var(v) if p.context[*v].kind != VarKind::Bool => {
                            diags.push(Diagnostic::warning(format!(
                                "bool variable '{}' assigned from int variable '{}'",
                                p.var_name(*target),
                                p.var_name(*v)
                            )))
                        }
                        _ => {}
                    }
                }
            }
            Statement::AddConst { target, .. } | Statement::BinaryArith { target, .. } => {
                if p.context[*target].kind == VarKind::Bool {
                    diags.push(Diagnostic::warning(format!(
                        "arithmetic result stored in bool variable '{}'",
                        p.var_name(*target)
                    )));
                }
            }
            _ => {}
        }
    }
}

fn collect_writes(stmts: &[Statement], out: &mut BTreeSet<VarId>) {
    for stmt in stmts {
        if let Some(w) = stmt.write_target() {
            out.insert(w);
        }
        if let Statement::For { clause, .. } = stmt {
            collect_writes(clause, out);
        }
    }
}

fn taint_walk(
    p: &Program,
    stmts: &[Statement],
    tainted: &mut BTreeSet<VarId>,
    warned: &mut BTreeSet<VarId>,
    diags: &mut Vec<Diagnostic>,
) {
    for stmt in stmts {
        for read in stmt.reads() {
            if tainted.contains(&read) && warned.insert(read) {
                diags.push(Diagnostic::warning(format!(
                    "variable '{}' is read after serving as a loop counter; \
                     its post-loop value depends on the runtime bound",
                    p.var_name(read)
                )));
            }
        }
        if let Statement::For {
            counter, clause, ..
        } = stmt
        {
            tainted.remove(counter);
            taint_walk(p, clause, tainted, warned, diags);
            taint_walk(p, clause, tainted, warned, diags);
            tainted.insert(*counter);
        } else if let Some(w) = stmt.write_target() {
            tainted.remove(&w);
        }
    }
}
