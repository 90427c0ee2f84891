//! Reduction of composite programs to atomic ones. A call
//! `y = f(a1, ..., ak)` is replaced by the callee's local initializations,
//! its body with inputs substituted by the arguments, and a final copy into
//! `y`. Callee locals are renamed with a per-call suffix to avoid capture.

use crate::ast::{Operand, Program, Statement, VarDecl, VarId, VarKind};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InlineError {
    #[error("unknown subprogram '{0}' (recursive and forward calls are not allowed)")]
    UnknownCallee(String),
    #[error("call to '{callee}' passes {got} arguments, expected {expected}")]
    ArityMismatch {
        callee: String,
        expected: usize,
        got: usize,
    },
    #[error("subprogram '{0}' does not end with a return statement")]
    MalformedCallee(String),
    #[error("subprogram nesting exceeds {0} levels")]
    TooDeep(usize),
}

const MAX_NESTING: usize = 64;

/// Inline every subprogram call, producing an atomic program equal to `p`
/// as a function of its inputs. Atomic programs are returned unchanged
/// (with `defs` dropped).
pub fn inline_composite(p: &Program) -> Result<Program, InlineError> {
    inline_rec(p, 0)
}

fn inline_rec(p: &Program, depth: usize) -> Result<Program, InlineError> {
    if depth > MAX_NESTING {
        return Err(InlineError::TooDeep(MAX_NESTING));
    }
    // Callees are inlined on demand; define-before-use ordering means each
    // callee's own defs never reference the caller, so this terminates.
    let mut atomic_defs: BTreeMap<String, Program> = BTreeMap::new();
    for name in called_names(&p.body) {
        let def = p
            .defs
            .get(&name)
            .ok_or_else(|| InlineError::UnknownCallee(name.clone()))?;
        atomic_defs.insert(name, inline_rec(def, depth + 1)?);
    }

    let mut context = p.context.clone();
    let mut call_counter = 0usize;
    let body = splice_block(&p.body, &mut context, &atomic_defs, &mut call_counter)?;
    Ok(Program {
        context,
        body,
        defs: BTreeMap::new(),
    })
}

fn called_names(stmts: &[Statement]) -> Vec<String> {
    let mut out = Vec::new();
    fn walk(stmts: &[Statement], out: &mut Vec<String>) {
        for stmt in stmts {
            match stmt {
                Statement::Subcall { callee, .. } => {
                    if !out.contains(callee) {
                        out.push(callee.clone());
                    }
                }
                Statement::For { clause, .. } => walk(clause, out),
                _ => {}
            }
        }
    }
    walk(stmts, &mut out);
    out
}

fn splice_block(
    stmts: &[Statement],
    context: &mut Vec<VarDecl>,
    defs: &BTreeMap<String, Program>,
    call_counter: &mut usize,
) -> Result<Vec<Statement>, InlineError> {
    let mut out = Vec::new();
    for stmt in stmts {
        match stmt {
            Statement::Subcall {
                target,
                callee,
                args,
            } => {
                let def = defs
                    .get(callee)
                    .ok_or_else(|| InlineError::UnknownCallee(callee.clone()))?;
                let inputs = def.input_ids();
                if inputs.len() != args.len() {
                    return Err(InlineError::ArityMismatch {
                        callee: callee.clone(),
                        expected: inputs.len(),
                        got: args.len(),
                    });
                }
                let ret = def
                    .return_var()
                    .ok_or_else(|| InlineError::MalformedCallee(callee.clone()))?;
                *call_counter += 1;
                let call_id = *call_counter;

                // Map every callee variable to a caller variable: inputs to
                // the arguments, locals to freshly declared copies.
                let mut map: Vec<VarId> = vec![usize::MAX; def.context.len()];
                for (slot, arg) in inputs.iter().zip(args) {
                    map[*slot] = *arg;
                }
                for (id, decl) in def.context.iter().enumerate() {
                    if decl.kind == VarKind::Input {
                        continue;
                    }
                    let name = fresh_name(context, &decl.name, callee, call_id);
                    map[id] = context.len();
                    context.push(VarDecl {
                        name,
                        kind: decl.kind,
                        init: decl.init,
                    });
                    // Re-initialize at the call site so repeated executions
                    // (calls inside loops) start from the declared value.
                    out.push(Statement::Assign {
                        target: map[id],
                        value: Operand::Const(decl.init.unwrap_or(0)),
                    });
                }

                for s in &def.body {
                    if matches!(s, Statement::Return { .. }) {
                        continue;
                    }
                    out.push(rename_stmt(s, &map));
                }
                out.push(Statement::Assign {
                    target: *target,
                    value: Operand::Var(map[ret]),
                });
            }
            Statement::For {
                counter,
                start,
                end,
                clause,
            } => {
                let clause = splice_block(clause, context, defs, call_counter)?;
                out.push(Statement::For {
                    counter: *counter,
                    start: *start,
                    end: *end,
                    clause,
                });
            }
            other => out.push(other.clone()),
        }
    }
    Ok(out)
}

fn fresh_name(context: &[VarDecl], base: &str, callee: &str, call_id: usize) -> String {
    let mut name = format!("{base}_{callee}{call_id}");
    while context.iter().any(|d| d.name == name) {
        name.push('_');
    }
    name
}

fn rename_op(op: &Operand, map: &[VarId]) -> Operand {
    match op {
        Operand::Var(v) => Operand::Var(map[*v]),
        Operand::Const(c) => Operand::Const(*c),
    }
}

fn rename_stmt(stmt: &Statement, map: &[VarId]) -> Statement {
    match stmt {
        Statement::Assign { target, value } => Statement::Assign {
            target: map[*target],
            value: rename_op(value, map),
        },
        Statement::AddConst {
            target,
            source,
            constant,
        } => Statement::AddConst {
            target: map[*target],
            source: map[*source],
            constant: *constant,
        },
        Statement::MulConst {
            target,
            constant,
            source,
        } => Statement::MulConst {
            target: map[*target],
            constant: *constant,
            source: map[*source],
        },
        Statement::BinaryArith {
            target,
            op,
            lhs,
            rhs,
        } => Statement::BinaryArith {
            target: map[*target],
            op: *op,
            lhs: map[*lhs],
            rhs: map[*rhs],
        },
        Statement::UnaryCmp {
            target,
            op,
            operand,
            constant,
        } => Statement::UnaryCmp {
            target: map[*target],
            op: *op,
            operand: map[*operand],
            constant: *constant,
        },
        Statement::BinaryCmp {
            target,
            op,
            lhs,
            rhs,
        } => Statement::BinaryCmp {
            target: map[*target],
            op: *op,
            lhs: map[*lhs],
            rhs: map[*rhs],
        },
        Statement::If {
            target,
            cond,
            then_src,
            else_src,
        } => Statement::If {
            target: map[*target],
            cond: map[*cond],
            then_src: rename_op(then_src, map),
            else_src: rename_op(else_src, map),
        },
        Statement::For {
            counter,
            start,
            end,
            clause,
        } => Statement::For {
            counter: map[*counter],
            start: rename_op(start, map),
            end: rename_op(end, map),
            clause: clause.iter().map(|s| rename_stmt(s, map)).collect(),
        },
        Statement::Subcall {
            target,
            callee,
            args,
        } => Statement::Subcall {
            target: map[*target],
            callee: callee.clone(),
            args: args.iter().map(|a| map[*a]).collect(),
        },
        Statement::Return { var } => Statement::Return { var: map[*var] },
    }
}
