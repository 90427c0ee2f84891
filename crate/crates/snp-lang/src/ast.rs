use std::collections::BTreeMap;

/// Index into a program's variable context.
pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Input,
    Int,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    /// Initial value; `None` for inputs.
    pub init: Option<u64>,
}

/// A value position that is either a variable reference or a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Var(VarId),
    Const(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }

    /// The operator with its operands swapped: `a op b` iff `b op.mirror() a`.
    pub fn mirror(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Le,
        }
    }

    pub fn eval(self, a: u64, b: u64) -> u64 {
        let r = match self {
            CmpOp::Eq => a == b,
            CmpOp::Lt => a < b,
            CmpOp::Gt => a > b,
            CmpOp::Le => a <= b,
            CmpOp::Ge => a >= b,
        };
        r as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    /// `x = c` or `x = y`.
    Assign { target: VarId, value: Operand },
    /// `x = y + c` (the constant may be negative, e.g. `x = y - 1`).
    AddConst {
        target: VarId,
        source: VarId,
        constant: i64,
    },
    /// `x = c * y` with `c >= 0`.
    MulConst {
        target: VarId,
        constant: u64,
        source: VarId,
    },
    /// `x = y + z` or `x = y - z`.
    BinaryArith {
        target: VarId,
        op: ArithOp,
        lhs: VarId,
        rhs: VarId,
    },
    /// `b = (y op c)`.
    UnaryCmp {
        target: VarId,
        op: CmpOp,
        operand: VarId,
        constant: u64,
    },
    /// `b = (y op z)`.
    BinaryCmp {
        target: VarId,
        op: CmpOp,
        lhs: VarId,
        rhs: VarId,
    },
    /// `x = a if cond else b`.
    If {
        target: VarId,
        cond: VarId,
        then_src: Operand,
        else_src: Operand,
    },
    /// `for counter = start,...,end:` followed by an indented clause.
    For {
        counter: VarId,
        start: Operand,
        end: Operand,
        clause: Vec<Statement>,
    },
    /// `y = callee(a, b, ...)`; removed by inlining.
    Subcall {
        target: VarId,
        callee: String,
        args: Vec<VarId>,
    },
    /// `return x`; must be the last statement.
    Return { var: VarId },
}

impl Statement {
    /// Variable written by this statement (the counter, for loops).
    pub fn write_target(&self) -> Option<VarId> {
        match self {
            Statement::Assign { target, .. }
            | Statement::AddConst { target, .. }
            | Statement::MulConst { target, .. }
            | Statement::BinaryArith { target, .. }
            | Statement::UnaryCmp { target, .. }
            | Statement::BinaryCmp { target, .. }
            | Statement::If { target, .. }
            | Statement::Subcall { target, .. } => Some(*target),
            Statement::For { counter, .. } => Some(*counter),
            Statement::Return { .. } => None,
        }
    }

    /// Variables read by this statement itself (not its clause).
    pub fn reads(&self) -> Vec<VarId> {
        fn op(o: &Operand, out: &mut Vec<VarId>) {
            if let Operand::Var(v) = o {
                out.push(*v);
            }
        }
        let mut out = Vec::new();
        match self {
            Statement::Assign { value, .. } => op(value, &mut out),
            Statement::AddConst { source, .. } => out.push(*source),
            Statement::MulConst { source, .. } => out.push(*source),
            Statement::BinaryArith { lhs, rhs, .. } => {
                out.push(*lhs);
                out.push(*rhs);
            }
            Statement::UnaryCmp { operand, .. } => out.push(*operand),
            Statement::BinaryCmp { lhs, rhs, .. } => {
                out.push(*lhs);
                out.push(*rhs);
            }
            Statement::If {
                cond,
                then_src,
                else_src,
                ..
            } => {
                out.push(*cond);
                op(then_src, &mut out);
                op(else_src, &mut out);
            }
            Statement::For { start, end, .. } => {
                op(start, &mut out);
                op(end, &mut out);
            }
            Statement::Subcall { args, .. } => out.extend(args.iter().copied()),
            Statement::Return { var } => out.push(*var),
        }
        out
    }
}

/// A parsed SNP: declaration block plus statement body. The body ends with a
/// `return` statement when well formed; `defs` holds the programs declared
/// earlier in the same source, available to `Subcall` statements.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub context: Vec<VarDecl>,
    pub body: Vec<Statement>,
    pub defs: BTreeMap<String, Program>,
}

impl Program {
    /// Number of variables in the context (inputs included).
    pub fn var_count(&self) -> usize {
        self.context.len()
    }

    /// Number of input variables.
    pub fn input_count(&self) -> usize {
        self.context
            .iter()
            .filter(|d| d.kind == VarKind::Input)
            .count()
    }

    /// Context indices of the input variables, in declaration order.
    pub fn input_ids(&self) -> Vec<VarId> {
        self.context
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == VarKind::Input)
            .map(|(i, _)| i)
            .collect()
    }

    /// Program length: every statement, including those inside loop clauses.
    pub fn len(&self) -> usize {
        fn count(stmts: &[Statement]) -> usize {
            stmts
                .iter()
                .map(|s| match s {
                    Statement::For { clause, .. } => 1 + count(clause),
                    _ => 1,
                })
                .sum()
        }
        count(&self.body)
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Maximum loop nesting depth.
    pub fn depth(&self) -> usize {
        fn depth(stmts: &[Statement]) -> usize {
            stmts
                .iter()
                .map(|s| match s {
                    Statement::For { clause, .. } => 1 + depth(clause),
                    _ => 0,
                })
                .max()
                .unwrap_or(0)
        }
        depth(&self.body)
    }

    /// The returned variable, when the body ends in a return.
    pub fn return_var(&self) -> Option<VarId> {
        match self.body.last() {
            Some(Statement::Return { var }) => Some(*var),
            _ => None,
        }
    }

    /// True when no statement is a subprogram call.
    pub fn is_atomic(&self) -> bool {
        fn atomic(stmts: &[Statement]) -> bool {
            stmts.iter().all(|s| match s {
                Statement::Subcall { .. } => false,
                Statement::For { clause, .. } => atomic(clause),
                _ => true,
            })
        }
        atomic(&self.body)
    }

    pub fn var_name(&self, id: VarId) -> &str {
        &self.context[id].name
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.context.iter().position(|d| d.name == name)
    }
}
