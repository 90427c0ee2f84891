//! Seeded random program generator. Produces valid-by-construction programs
//! (loop clauses never touch their counter or end variable, returns are
//! last) for structural checks on the compiler output.

use crate::ast::{ArithOp, CmpOp, Operand, Program, Statement, VarDecl, VarId, VarKind};
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub max_len: usize,
    pub max_vars: usize,
    pub max_depth: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            max_len: 8,
            max_vars: 6,
            max_depth: 2,
        }
    }
}

pub fn random_program(rng: &mut impl Rng, cfg: &FuzzConfig) -> Program {
    let var_count = rng.gen_range(2..=cfg.max_vars.max(2));
    let input_count = rng.gen_range(1..=2.min(var_count - 1));
    let mut context = Vec::new();
    for i in 0..var_count {
        if i < input_count {
            context.push(VarDecl {
                name: format!("in{i}"),
                kind: VarKind::Input,
                init: None,
            });
        } else if rng.gen_bool(0.2) {
            context.push(VarDecl {
                name: format!("b{i}"),
                kind: VarKind::Bool,
                init: Some(rng.gen_range(0..=1)),
            });
        } else {
            context.push(VarDecl {
                name: format!("v{i}"),
                kind: VarKind::Int,
                init: Some(rng.gen_range(0..=5)),
            });
        }
    }

    // Reserve one statement for the return.
    let budget = rng.gen_range(1..cfg.max_len.max(2));
    let mut gen = Gen {
        context: context.clone(),
    };
    let mut body = gen.block(rng, budget, cfg.max_depth, &[]);
    let ret = rng.gen_range(0..var_count);
    body.push(Statement::Return { var: ret });
    Program {
        context,
        body,
        defs: BTreeMap::new(),
    }
}

struct Gen {
    context: Vec<VarDecl>,
}

impl Gen {
    fn bools(&self) -> Vec<VarId> {
        self.context
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == VarKind::Bool)
            .map(|(i, _)| i)
            .collect()
    }

    fn pick_write(&self, rng: &mut impl Rng, frozen: &[VarId]) -> Option<VarId> {
        let candidates: Vec<VarId> = (0..self.context.len())
            .filter(|v| !frozen.contains(v))
            .collect();
        if candidates.is_empty() {
            None
        } else {
            Some(candidates[rng.gen_range(0..candidates.len())])
        }
    }

    fn pick_any(&self, rng: &mut impl Rng) -> VarId {
        rng.gen_range(0..self.context.len())
    }

    fn operand(&self, rng: &mut impl Rng) -> Operand {
        if rng.gen_bool(0.4) {
            Operand::Const(rng.gen_range(0..=6))
        } else {
            Operand::Var(self.pick_any(rng))
        }
    }

    fn cmp(&self, rng: &mut impl Rng) -> CmpOp {
        match rng.gen_range(0..5) {
            0 => CmpOp::Eq,
            1 => CmpOp::Lt,
            2 => CmpOp::Gt,
            3 => CmpOp::Le,
            _ => CmpOp::Ge,
        }
    }

    /// `frozen` holds counters and end variables of enclosing loops.
    fn block(
        &mut self,
        rng: &mut impl Rng,
        budget: usize,
        depth_left: usize,
        frozen: &[VarId],
    ) -> Vec<Statement> {
        let mut out = Vec::new();
        let mut remaining = budget;
        while remaining > 0 {
            let Some(target) = self.pick_write(rng, frozen) else {
                break;
            };
            let target_is_bool = self.context[target].kind == VarKind::Bool;
            let kind = rng.gen_range(0..8);
            let stmt = match kind {
                0 if remaining >= 2 && depth_left > 0 => {
                    // Counted loop over a fresh sub-block.
                    let counter = target;
                    if self.context[counter].kind == VarKind::Bool {
                        continue;
                    }
                    let start = if rng.gen_bool(0.5) {
                        Operand::Const(rng.gen_range(0..=3))
                    } else {
                        Operand::Var(self.pick_any(rng))
                    };
                    let end_candidates: Vec<VarId> =
                        (0..self.context.len()).filter(|v| *v != counter).collect();
                    let end = if rng.gen_bool(0.5) || end_candidates.is_empty() {
                        Operand::Const(rng.gen_range(0..=4))
                    } else {
                        Operand::Var(end_candidates[rng.gen_range(0..end_candidates.len())])
                    };
                    let mut inner_frozen = frozen.to_vec();
                    inner_frozen.push(counter);
                    if let Operand::Var(e) = end {
                        inner_frozen.push(e);
                    }
                    let inner_budget = rng.gen_range(1..=remaining - 1);
                    let clause = self.block(rng, inner_budget, depth_left - 1, &inner_frozen);
                    if clause.is_empty() {
                        continue;
                    }
                    remaining -= 1 + count(&clause);
                    out.push(Statement::For {
                        counter,
                        start,
                        end,
                        clause,
                    });
                    continue;
                }
                1 if !target_is_bool => Statement::AddConst {
                    target,
                    source: self.pick_any(rng),
                    constant: rng.gen_range(0..=4),
                },
                2 if !target_is_bool => Statement::MulConst {
                    target,
                    constant: rng.gen_range(0..=3),
                    source: self.pick_any(rng),
                },
                3 if !target_is_bool => Statement::BinaryArith {
                    target,
                    op: ArithOp::Add,
                    lhs: self.pick_any(rng),
                    rhs: self.pick_any(rng),
                },
                4 => Statement::UnaryCmp {
                    target,
                    op: self.cmp(rng),
                    operand: self.pick_any(rng),
                    constant: rng.gen_range(0..=6),
                },
                5 => Statement::BinaryCmp {
                    target,
                    op: self.cmp(rng),
                    lhs: self.pick_any(rng),
                    rhs: self.pick_any(rng),
                },
                6 => {
                    let bools = self.bools();
                    if bools.is_empty() {
                        continue;
                    }
                    Statement::If {
                        target,
                        cond: bools[rng.gen_range(0..bools.len())],
                        then_src: self.operand(rng),
                        else_src: self.operand(rng),
                    }
                }
                _ => Statement::Assign {
                    target,
                    value: if target_is_bool {
                        Operand::Const(rng.gen_range(0..=1))
                    } else {
                        self.operand(rng)
                    },
                },
            };
            remaining -= 1;
            out.push(stmt);
        }
        out
    }
}

fn count(stmts: &[Statement]) -> usize {
    stmts
        .iter()
        .map(|s| match s {
            Statement::For { clause, .. } => 1 + count(clause),
            _ => 1,
        })
        .sum()
}
