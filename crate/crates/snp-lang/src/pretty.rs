//! Canonical text rendering. `parse(pretty(p))` reproduces `p` structurally.

use crate::ast::{Operand, Program, Statement, VarKind};
use std::fmt::Write;

fn operand(p: &Program, o: &Operand) -> String {
    match o {
        Operand::Var(v) => p.var_name(*v).to_string(),
        Operand::Const(c) => c.to_string(),
    }
}

fn write_stmt(out: &mut String, p: &Program, stmt: &Statement, level: usize) {
    let pad = "    ".repeat(level);
    match stmt {
        Statement::Assign { target, value } => {
            writeln!(out, "{pad}{} = {}", p.var_name(*target), operand(p, value)).unwrap();
        }
        Statement::AddConst {
            target,
            source,
            constant,
        } => {
            let (op, c) = if *constant < 0 {
                ('-', -constant)
            } else {
                ('+', *constant)
            };
            writeln!(
                out,
                "{pad}{} = {} {op} {c}",
                p.var_name(*target),
                p.var_name(*source)
            )
            .unwrap();
        }
        Statement::MulConst {
            target,
            constant,
            source,
        } => {
            writeln!(
                out,
                "{pad}{} = {constant} * {}",
                p.var_name(*target),
                p.var_name(*source)
            )
            .unwrap();
        }
        Statement::BinaryArith {
            target,
            op,
            lhs,
            rhs,
        } => {
            let sym = match op {
                crate::ast::ArithOp::Add => '+',
                crate::ast::ArithOp::Sub => '-',
            };
            writeln!(
                out,
                "{pad}{} = {} {sym} {}",
                p.var_name(*target),
                p.var_name(*lhs),
                p.var_name(*rhs)
            )
            .unwrap();
        }
        Statement::UnaryCmp {
            target,
            op,
            operand,
            constant,
        } => {
            writeln!(
                out,
                "{pad}{} = ({} {} {constant})",
                p.var_name(*target),
                p.var_name(*operand),
                op.symbol()
            )
            .unwrap();
        }
        Statement::BinaryCmp {
            target,
            op,
            lhs,
            rhs,
        } => {
            writeln!(
                out,
                "{pad}{} = ({} {} {})",
                p.var_name(*target),
                p.var_name(*lhs),
                op.symbol(),
                p.var_name(*rhs)
            )
            .unwrap();
        }
        Statement::If {
            target,
            cond,
            then_src,
            else_src,
        } => {
            writeln!(
                out,
                "{pad}{} = {} if {} else {}",
                p.var_name(*target),
                operand(p, then_src),
                p.var_name(*cond),
                operand(p, else_src)
            )
            .unwrap();
        }
        Statement::For {
            counter,
            start,
            end,
            clause,
        } => {
            writeln!(
                out,
                "{pad}for {} = {},...,{}:",
                p.var_name(*counter),
                operand(p, start),
                operand(p, end)
            )
            .unwrap();
            for s in clause {
                write_stmt(out, p, s, level + 1);
            }
        }
        Statement::Subcall {
            target,
            callee,
            args,
        } => {
            let args = args
                .iter()
                .map(|a| p.var_name(*a))
                .collect::<Vec<_>>()
                .join(", ");
            writeln!(out, "{pad}{} = {callee}({args})", p.var_name(*target)).unwrap();
        }
        Statement::Return { var } => {
            writeln!(out, "{pad}return {}", p.var_name(*var)).unwrap();
        }
    }
}

/// Render a single program (without its `defs`).
pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    for decl in &p.context {
        match decl.kind {
            VarKind::Input => writeln!(out, "input {}", decl.name).unwrap(),
            VarKind::Int => writeln!(out, "int {} = {}", decl.name, decl.init.unwrap()).unwrap(),
            VarKind::Bool => writeln!(out, "bool {} = {}", decl.name, decl.init.unwrap()).unwrap(),
        }
    }
    for stmt in &p.body {
        write_stmt(&mut out, p, stmt, 0);
    }
    out
}

/// Render a module of named programs as `program <name>` sections.
pub fn pretty_module(programs: &[(String, Program)]) -> String {
    let mut out = String::new();
    for (i, (name, p)) in programs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "program {name}").unwrap();
        out.push_str(&pretty(p));
    }
    out
}
