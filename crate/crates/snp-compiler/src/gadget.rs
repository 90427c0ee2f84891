//! Per-statement layer constructions.
//!
//! Every statement maps to one or two affine-plus-ReLU layers over the
//! width-V state vector (one node per context variable). Comparisons go
//! through integer ReLU identities that create temporary nodes in a first
//! layer and consume them in a second; conditionals gate two candidate
//! sources with coefficients proportional to the runtime bound B.
//!
//! Counted loops repeat a fixed block B+1 times. Each repetition computes
//! the live flag `c = [counter <= end]`, snapshots the non-counter
//! variables, runs the clause unconditionally, then writes back
//! `c*new + (1-c)*old` per variable:
//!
//!   keep_new = relu(2B*c + new - 2B)     (= new when c = 1)
//!   keep_old = relu(-2B*c + old)         (= old when c = 0)
//!   var <- keep_new + keep_old
//!
//! The 2B threshold tolerates clause outputs up to 2B on dead repetitions
//! (one statement can at most double a bounded value), which keeps every
//! weight and bias within 2B in magnitude.

use crate::{CompileError, LayerGroup};
use nn_core::{Layer, RcNode, RcWord};
use snp_lang::ast::{ArithOp, CmpOp, Operand, Statement, VarId};
use std::sync::Arc;

type Row = (Vec<(usize, i64)>, i64);

fn mk(in_w: usize, rows: Vec<Row>) -> Arc<Layer> {
    let (weights, bias): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Arc::new(Layer::new(in_w, weights, bias).expect("gadget layer shape"))
}

fn identity_rows(n: usize) -> Vec<Row> {
    (0..n).map(|i| (vec![(i, 1)], 0)).collect()
}

/// Weight contribution and bias contribution of an operand slot.
fn operand_row(op: &Operand) -> (Vec<(usize, i64)>, i64) {
    match op {
        Operand::Var(v) => (vec![(*v, 1)], 0),
        Operand::Const(c) => (vec![], *c as i64),
    }
}

/// Encode a non-loop statement as its layer group over a width-`v` state.
pub fn encode_statement(stmt: &Statement, v: usize, b: u64) -> Result<LayerGroup, CompileError> {
    let b = bound_i64(b)?;
    let layers = match stmt {
        Statement::Assign { target, value } => {
            let mut rows = identity_rows(v);
            rows[*target] = operand_row(value);
            vec![mk(v, rows)]
        }
        Statement::AddConst {
            target,
            source,
            constant,
        } => {
            let mut rows = identity_rows(v);
            rows[*target] = (vec![(*source, 1)], *constant);
            vec![mk(v, rows)]
        }
        Statement::MulConst {
            target,
            constant,
            source,
        } => {
            let mut rows = identity_rows(v);
            rows[*target] = (vec![(*source, *constant as i64)], 0);
            vec![mk(v, rows)]
        }
        Statement::BinaryArith {
            target,
            op,
            lhs,
            rhs,
        } => {
            let sign = match op {
                ArithOp::Add => 1,
                ArithOp::Sub => -1,
            };
            let mut rows = identity_rows(v);
            rows[*target] = (vec![(*lhs, 1), (*rhs, sign)], 0);
            vec![mk(v, rows)]
        }
        Statement::UnaryCmp {
            target,
            op,
            operand,
            constant,
        } => {
            let c = bound_i64(*constant)?;
            comparison_layers(v, *target, &[(*operand, 1)], -c, *op)
        }
        Statement::BinaryCmp {
            target,
            op,
            lhs,
            rhs,
        } => comparison_layers(v, *target, &[(*lhs, 1), (*rhs, -1)], 0, *op),
        Statement::If {
            target,
            cond,
            then_src,
            else_src,
        } => {
            // keep_then = relu(2B*c + then - B); keep_else = relu(-2B*c + else + B);
            // target <- keep_then + keep_else - B.
            // A branch source equal to the condition itself has a forced
            // value on the branch that selects it.
            let then_src = match then_src {
                Operand::Var(v) if v == cond => &Operand::Const(1),
                other => other,
            };
            let else_src = match else_src {
                Operand::Var(v) if v == cond => &Operand::Const(0),
                other => other,
            };
            let (then_w, then_b) = operand_row(then_src);
            let (else_w, else_b) = operand_row(else_src);
            let mut first = identity_rows(v);
            let mut then_row = vec![(*cond, 2 * b)];
            then_row.extend(then_w);
            first.push((then_row, then_b - b));
            let mut else_row = vec![(*cond, -2 * b)];
            else_row.extend(else_w);
            first.push((else_row, else_b + b));

            let mut second = identity_rows(v);
            second[*target] = (vec![(v, 1), (v + 1, 1)], -b);
            vec![mk(v, first), mk(v + 2, second)]
        }
        Statement::Return { var } => {
            vec![mk(v, vec![(vec![(*var, 1)], 0)])]
        }
        Statement::For { .. } => return Err(CompileError::LoopInStatementEncoder),
        Statement::Subcall { .. } => return Err(CompileError::CompositeProgram),
    };
    Ok(LayerGroup { layers })
}

/// Two-layer comparison gadget. `diff` rows plus `shift` express the tested
/// quantity t (e.g. x - c, or x - y); each operator reduces to a short ReLU
/// combination of shifted copies of t:
///
///   [t = 0] = relu(t+1) + relu(t-1) - 2 relu(t)
///   [t > 0] = relu(t) - relu(t-1)
///   [t < 0] = relu(-t) - relu(-t-1)
///   [t >= 0] = relu(t+1) - relu(t)
///   [t <= 0] = relu(-t+1) - relu(-t)
fn comparison_layers(
    v: usize,
    target: VarId,
    diff: &[(VarId, i64)],
    shift: i64,
    op: CmpOp,
) -> Vec<Arc<Layer>> {
    let pos = diff.to_vec();
    let neg: Vec<(usize, i64)> = diff.iter().map(|(i, w)| (*i, -w)).collect();
    // (row weights, bias, combine coefficient)
    let temps: Vec<(Vec<(usize, i64)>, i64, i64)> = match op {
        CmpOp::Eq => vec![
            (pos.clone(), shift + 1, 1),
            (pos.clone(), shift - 1, 1),
            (pos.clone(), shift, -2),
        ],
        CmpOp::Gt => vec![(pos.clone(), shift, 1), (pos.clone(), shift - 1, -1)],
        CmpOp::Lt => vec![(neg.clone(), -shift, 1), (neg.clone(), -shift - 1, -1)],
        CmpOp::Ge => vec![(pos.clone(), shift + 1, 1), (pos.clone(), shift, -1)],
        CmpOp::Le => vec![(neg.clone(), -shift + 1, 1), (neg.clone(), -shift, -1)],
    };

    let mut first = identity_rows(v);
    for (w, bias, _) in &temps {
        first.push((w.clone(), *bias));
    }
    let mut second = identity_rows(v);
    second[target] = (
        temps
            .iter()
            .enumerate()
            .map(|(k, (_, _, coeff))| (v + k, *coeff))
            .collect(),
        0,
    );
    vec![mk(v, first), mk(v + temps.len(), second)]
}

/// Encode a counted loop: the entry layer, the repeated block as a single
/// group, and the exit layer. `clause` holds the clause's compiled word
/// over the width-`v` state; its atoms are widened here to carry the live
/// flag and the snapshots through.
pub fn encode_for_loop(
    counter: VarId,
    start: &Operand,
    end: &Operand,
    clause: &RcWord,
    v: usize,
    b: u64,
) -> Result<Vec<RcNode>, CompileError> {
    let bi = bound_i64(b)?;
    let flag = v; // live-flag node index
    let others: Vec<VarId> = (0..v).filter(|x| *x != counter).collect();

    // Entry: counter <- start, flag <- 0.
    let mut entry = identity_rows(v);
    entry[counter] = operand_row(start);
    entry.push((vec![], 0));
    let l1 = mk(v, entry);

    // Block: flag <- [counter <= end], two layers.
    let (end_w, end_b) = operand_row(end);
    let mut cond1 = identity_rows(v + 1);
    let mut t_row: Vec<(usize, i64)> = vec![(counter, -1)];
    t_row.extend(end_w.iter().cloned());
    cond1.push((t_row.clone(), end_b + 1)); // relu(end - counter + 1)
    cond1.push((t_row, end_b)); // relu(end - counter)
    let l2 = mk(v + 1, cond1);

    let mut cond2 = identity_rows(v);
    cond2.push((vec![(v + 1, 1), (v + 2, -1)], 0));
    let l3 = mk(v + 3, cond2);

    // Snapshot the non-counter variables behind the flag.
    let mut snap = identity_rows(v + 1);
    for x in &others {
        snap.push((vec![(*x, 1)], 0));
    }
    let l4 = mk(v + 1, snap);

    // The clause runs on the first v coordinates; flag and snapshots ride
    // along on appended identity rows.
    let widened_clause = clause.map_atoms(&mut |layer| layer.widened(v));

    // Write-back: keep_new / keep_old pairs, then recombine.
    let width = 2 * v;
    let mut select1 = identity_rows(width);
    for (q, x) in others.iter().enumerate() {
        let old = v + 1 + q;
        select1.push((vec![(flag, 2 * bi), (*x, 1)], -2 * bi));
        select1.push((vec![(flag, -2 * bi), (old, 1)], 0));
    }
    let l5 = mk(width, select1);

    let mut select2: Vec<Row> = Vec::with_capacity(width);
    for x in 0..v {
        if x == counter {
            select2.push((vec![(x, 1)], 0));
        } else {
            let q = others.iter().position(|o| o == &x).unwrap();
            select2.push((vec![(width + 2 * q, 1), (width + 2 * q + 1, 1)], 0));
        }
    }
    select2.push((vec![(flag, 1)], 0));
    for q in 0..others.len() {
        select2.push((vec![(v + 1 + q, 1)], 0));
    }
    let l6 = mk(width + 2 * others.len(), select2);

    // Drop the snapshots, advance the counter.
    let mut advance = identity_rows(v);
    advance[counter] = (vec![(counter, 1)], 1);
    advance.push((vec![(flag, 1)], 0));
    let l7 = mk(width, advance);

    // Exit: drop the flag.
    let l8 = mk(v + 1, identity_rows(v));

    let mut body = vec![RcNode::Atom(l2), RcNode::Atom(l3), RcNode::Atom(l4)];
    body.extend(widened_clause.nodes);
    body.push(RcNode::Atom(l5));
    body.push(RcNode::Atom(l6));
    body.push(RcNode::Atom(l7));

    Ok(vec![
        RcNode::Atom(l1),
        RcNode::Group {
            body,
            repeat: b + 1,
        },
        RcNode::Atom(l8),
    ])
}

fn bound_i64(b: u64) -> Result<i64, CompileError> {
    if b > (i64::MAX / 4) as u64 {
        return Err(CompileError::BoundTooLarge(b));
    }
    Ok(b as i64)
}
