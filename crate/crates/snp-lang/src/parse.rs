//! Line-oriented recursive-descent parser for the SNP concrete syntax.
//!
//! One statement per line; loop clauses are indented by exactly four more
//! spaces than the loop header; `#` starts a comment. A source file holds
//! either a single bare program or a sequence of `program <name>` sections,
//! where each program may call those defined before it.

use crate::ast::{ArithOp, CmpOp, Operand, Program, Statement, VarDecl, VarId, VarKind};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        msg: msg.into(),
    })
}

const INDENT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Eq,     // =
    Cmp(CmpOp),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Colon,
    Dots, // ...
}

struct Line {
    number: usize,
    level: usize,
    toks: Vec<Tok>,
}

fn lex_line(number: usize, text: &str) -> Result<Option<Line>, ParseError> {
    let content = match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    };
    if content.trim().is_empty() {
        return Ok(None);
    }
    let stripped = content.trim_start_matches(' ');
    let spaces = content.len() - stripped.len();
    if stripped.starts_with('\t') || content.contains('\t') {
        return err(number, spaces + 1, "tabs are not allowed; indent with spaces");
    }
    if spaces % INDENT != 0 {
        return err(
            number,
            1,
            format!("indentation must be a multiple of {INDENT} spaces"),
        );
    }
    let level = spaces / INDENT;

    let mut toks = Vec::new();
    let bytes = stripped.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let col = spaces + i + 1;
        let c = bytes[i] as char;
        match c {
            ' ' => i += 1,
            '=' if i + 1 < bytes.len() && bytes[i + 1] == b'=' => {
                toks.push(Tok::Cmp(CmpOp::Eq));
                i += 2;
            }
            '=' => {
                toks.push(Tok::Eq);
                i += 1;
            }
            '<' if i + 1 < bytes.len() && bytes[i + 1] == b'=' => {
                toks.push(Tok::Cmp(CmpOp::Le));
                i += 2;
            }
            '<' => {
                toks.push(Tok::Cmp(CmpOp::Lt));
                i += 1;
            }
            '>' if i + 1 < bytes.len() && bytes[i + 1] == b'=' => {
                toks.push(Tok::Cmp(CmpOp::Ge));
                i += 2;
            }
            '>' => {
                toks.push(Tok::Cmp(CmpOp::Gt));
                i += 1;
            }
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            ',' => {
                toks.push(Tok::Comma);
                i += 1;
            }
            ':' => {
                toks.push(Tok::Colon);
                i += 1;
            }
            '.' => {
                if stripped[i..].starts_with("...") {
                    toks.push(Tok::Dots);
                    i += 3;
                } else {
                    return err(number, col, "unexpected '.'");
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit = &stripped[start..i];
                match lit.parse::<u64>() {
                    Ok(n) => toks.push(Tok::Num(n)),
                    Err(_) => return err(number, col, format!("malformed literal '{lit}'")),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Tok::Ident(stripped[start..i].to_string()));
            }
            other => return err(number, col, format!("unexpected character '{other}'")),
        }
    }
    Ok(Some(Line {
        number,
        level,
        toks,
    }))
}

/// Parse a source file into its named programs, in definition order. A file
/// with no `program` headers yields a single program named `main`.
pub fn parse_module(source: &str) -> Result<Vec<(String, Program)>, ParseError> {
    let mut lines = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        if let Some(line) = lex_line(idx + 1, raw)? {
            lines.push(line);
        }
    }

    // Split into sections at `program <name>` headers.
    let mut sections: Vec<(String, Vec<Line>)> = Vec::new();
    let mut current: Option<(String, Vec<Line>)> = None;
    for line in lines {
        if line.level == 0 && matches!(line.toks.first(), Some(Tok::Ident(k)) if k == "program") {
            if line.toks.len() != 2 {
                return err(line.number, 1, "expected 'program <name>'");
            }
            let name = match &line.toks[1] {
                Tok::Ident(n) => n.clone(),
                _ => return err(line.number, 1, "expected 'program <name>'"),
            };
            if let Some(sec) = current.take() {
                sections.push(sec);
            }
            current = Some((name, Vec::new()));
        } else {
            match &mut current {
                Some((_, body)) => body.push(line),
                None => {
                    current = Some(("main".to_string(), vec![line]));
                }
            }
        }
    }
    if let Some(sec) = current.take() {
        sections.push(sec);
    }
    if sections.is_empty() {
        return err(1, 1, "empty source");
    }

    let mut defs: BTreeMap<String, Program> = BTreeMap::new();
    let mut out = Vec::new();
    for (name, body) in sections {
        if defs.contains_key(&name) {
            let line = body.first().map(|l| l.number).unwrap_or(1);
            return err(line, 1, format!("duplicate program name '{name}'"));
        }
        let program = parse_program(&body, defs.clone())?;
        defs.insert(name.clone(), program.clone());
        out.push((name, program));
    }
    Ok(out)
}

/// Parse a source file and return its last (main) program.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let mut module = parse_module(source)?;
    Ok(module.pop().expect("parse_module returns at least one").1)
}

struct Ctx {
    decls: Vec<VarDecl>,
    by_name: BTreeMap<String, VarId>,
}

impl Ctx {
    fn lookup(&self, name: &str, line: usize) -> Result<VarId, ParseError> {
        match self.by_name.get(name) {
            Some(&id) => Ok(id),
            None => err(line, 1, format!("unknown variable '{name}'")),
        }
    }
}

fn parse_program(
    lines: &[Line],
    defs: BTreeMap<String, Program>,
) -> Result<Program, ParseError> {
    let mut ctx = Ctx {
        decls: Vec::new(),
        by_name: BTreeMap::new(),
    };

    // Leading declaration block.
    let mut idx = 0;
    while idx < lines.len() {
        let line = &lines[idx];
        if line.level != 0 {
            break;
        }
        let keyword = match line.toks.first() {
            Some(Tok::Ident(k)) if k == "input" || k == "int" || k == "bool" => k.clone(),
            _ => break,
        };
        let decl = parse_decl(line, &keyword)?;
        if ctx.by_name.contains_key(&decl.name) {
            return err(
                line.number,
                1,
                format!("duplicate variable '{}'", decl.name),
            );
        }
        ctx.by_name.insert(decl.name.clone(), ctx.decls.len());
        ctx.decls.push(decl);
        idx += 1;
    }

    let body = parse_block(lines, &mut idx, 0, &ctx, &defs)?;
    if idx < lines.len() {
        return err(
            lines[idx].number,
            1,
            "unexpected indentation outside any loop clause",
        );
    }
    Ok(Program {
        context: ctx.decls,
        body,
        defs,
    })
}

fn parse_decl(line: &Line, keyword: &str) -> Result<VarDecl, ParseError> {
    let n = line.number;
    let name = match line.toks.get(1) {
        Some(Tok::Ident(name)) => name.clone(),
        _ => return err(n, 1, format!("expected variable name after '{keyword}'")),
    };
    match keyword {
        "input" => {
            if line.toks.len() != 2 {
                return err(n, 1, "expected 'input <name>'");
            }
            Ok(VarDecl {
                name,
                kind: VarKind::Input,
                init: None,
            })
        }
        _ => {
            if line.toks.len() != 4 || line.toks[2] != Tok::Eq {
                if line.toks.len() == 5 && line.toks[2] == Tok::Eq && line.toks[3] == Tok::Minus {
                    return err(n, 1, "initial values must be nonnegative");
                }
                return err(n, 1, format!("expected '{keyword} <name> = <value>'"));
            }
            let value = match line.toks[3] {
                Tok::Num(v) => v,
                _ => return err(n, 1, "expected a nonnegative integer initial value"),
            };
            let kind = if keyword == "int" {
                VarKind::Int
            } else {
                if value > 1 {
                    return err(n, 1, "bool variables must be initialized to 0 or 1");
                }
                VarKind::Bool
            };
            Ok(VarDecl {
                name,
                kind,
                init: Some(value),
            })
        }
    }
}

fn parse_block(
    lines: &[Line],
    idx: &mut usize,
    level: usize,
    ctx: &Ctx,
    defs: &BTreeMap<String, Program>,
) -> Result<Vec<Statement>, ParseError> {
    let mut out = Vec::new();
    while *idx < lines.len() {
        let line = &lines[*idx];
        if line.level < level {
            break;
        }
        if line.level > level {
            return err(line.number, 1, "unexpected indentation");
        }
        *idx += 1;
        let stmt = parse_statement(line, ctx, defs)?;
        if let Statement::For { counter, start, end, .. } = stmt {
            let clause = parse_block(lines, idx, level + 1, ctx, defs)?;
            if clause.is_empty() {
                return err(line.number, 1, "for loop requires an indented clause");
            }
            out.push(Statement::For {
                counter,
                start,
                end,
                clause,
            });
        } else {
            out.push(stmt);
        }
    }
    Ok(out)
}

fn operand(tok: &Tok, ctx: &Ctx, line: usize) -> Result<Operand, ParseError> {
    match tok {
        Tok::Ident(name) => Ok(Operand::Var(ctx.lookup(name, line)?)),
        Tok::Num(v) => Ok(Operand::Const(*v)),
        _ => err(line, 1, "expected a variable or integer"),
    }
}

fn parse_statement(
    line: &Line,
    ctx: &Ctx,
    defs: &BTreeMap<String, Program>,
) -> Result<Statement, ParseError> {
    let n = line.number;
    let t = &line.toks;

    if let Some(Tok::Ident(k)) = t.first() {
        match k.as_str() {
            "return" => {
                if t.len() != 2 {
                    return err(n, 1, "expected 'return <variable>'");
                }
                let var = match &t[1] {
                    Tok::Ident(name) => ctx.lookup(name, n)?,
                    _ => return err(n, 1, "return takes a variable name"),
                };
                return Ok(Statement::Return { var });
            }
            "for" => {
                // for i = <start>,...,<end>:
                if t.len() != 9
                    || t[2] != Tok::Eq
                    || t[4] != Tok::Comma
                    || t[5] != Tok::Dots
                    || t[6] != Tok::Comma
                    || t[8] != Tok::Colon
                {
                    return err(n, 1, "expected 'for <var> = <start>,...,<end>:'");
                }
                let counter = match &t[1] {
                    Tok::Ident(name) => ctx.lookup(name, n)?,
                    _ => return err(n, 1, "loop counter must be a variable"),
                };
                let start = operand(&t[3], ctx, n)?;
                let end = operand(&t[7], ctx, n)?;
                return Ok(Statement::For {
                    counter,
                    start,
                    end,
                    clause: Vec::new(),
                });
            }
            "input" | "int" | "bool" => {
                return err(n, 1, "declarations must precede all statements");
            }
            _ => {}
        }
    }

    // Everything else is `<target> = <rhs>`.
    let target_name = match t.first() {
        Some(Tok::Ident(name)) => name,
        _ => return err(n, 1, "unknown statement form"),
    };
    if t.get(1) != Some(&Tok::Eq) {
        return err(n, 1, "unknown statement form");
    }
    let target = ctx.lookup(target_name, n)?;
    let rhs = &t[2..];
    if rhs.is_empty() {
        return err(n, 1, "missing right-hand side");
    }

    // Parenthesized comparison: ( a op b )
    if rhs[0] == Tok::LParen {
        if rhs.len() != 5 || rhs[4] != Tok::RParen {
            return err(n, 1, "expected '(<operand> <cmp> <operand>)'");
        }
        let op = match rhs[2] {
            Tok::Cmp(op) => op,
            _ => return err(n, 1, "expected a comparison operator"),
        };
        let a = operand(&rhs[1], ctx, n)?;
        let b = operand(&rhs[3], ctx, n)?;
        return Ok(match (a, b) {
            (Operand::Var(l), Operand::Var(r)) => Statement::BinaryCmp {
                target,
                op,
                lhs: l,
                rhs: r,
            },
            (Operand::Var(v), Operand::Const(c)) => Statement::UnaryCmp {
                target,
                op,
                operand: v,
                constant: c,
            },
            (Operand::Const(c), Operand::Var(v)) => Statement::UnaryCmp {
                target,
                op: op.mirror(),
                operand: v,
                constant: c,
            },
            (Operand::Const(a), Operand::Const(b)) => Statement::Assign {
                target,
                value: Operand::Const(op.eval(a, b)),
            },
        });
    }

    // Conditional: <a> if <cond> else <b>
    if rhs.len() == 5 && rhs[1] == Tok::Ident("if".into()) {
        if rhs[3] != Tok::Ident("else".into()) {
            return err(n, 1, "expected '<value> if <cond> else <value>'");
        }
        let then_src = operand(&rhs[0], ctx, n)?;
        let cond = match &rhs[2] {
            Tok::Ident(name) => ctx.lookup(name, n)?,
            _ => return err(n, 1, "condition must be a variable"),
        };
        let else_src = operand(&rhs[4], ctx, n)?;
        return Ok(Statement::If {
            target,
            cond,
            then_src,
            else_src,
        });
    }

    // Subprogram call: <name>(a, b, ...)
    if rhs.len() >= 3 && rhs[1] == Tok::LParen {
        let callee = match &rhs[0] {
            Tok::Ident(name) => name.clone(),
            _ => return err(n, 1, "unknown statement form"),
        };
        if *rhs.last().unwrap() != Tok::RParen {
            return err(n, 1, "missing ')'");
        }
        let mut args = Vec::new();
        let inner = &rhs[2..rhs.len() - 1];
        let mut expect_arg = true;
        for tok in inner {
            match (expect_arg, tok) {
                (true, Tok::Ident(name)) => {
                    args.push(ctx.lookup(name, n)?);
                    expect_arg = false;
                }
                (false, Tok::Comma) => expect_arg = true,
                _ => return err(n, 1, "call arguments must be comma-separated variables"),
            }
        }
        if expect_arg && !args.is_empty() {
            return err(n, 1, "trailing comma in call arguments");
        }
        if !defs.contains_key(&callee) {
            return err(n, 1, format!("unknown subprogram '{callee}'"));
        }
        return Ok(Statement::Subcall {
            target,
            callee,
            args,
        });
    }

    // Arithmetic and plain assignment.
    match rhs.len() {
        1 => Ok(Statement::Assign {
            target,
            value: operand(&rhs[0], ctx, n)?,
        }),
        3 => {
            let a = operand(&rhs[0], ctx, n)?;
            let b = operand(&rhs[2], ctx, n)?;
            match rhs[1] {
                Tok::Plus => Ok(match (a, b) {
                    (Operand::Var(l), Operand::Var(r)) => Statement::BinaryArith {
                        target,
                        op: ArithOp::Add,
                        lhs: l,
                        rhs: r,
                    },
                    (Operand::Var(v), Operand::Const(c)) | (Operand::Const(c), Operand::Var(v)) => {
                        Statement::AddConst {
                            target,
                            source: v,
                            constant: c as i64,
                        }
                    }
                    (Operand::Const(a), Operand::Const(b)) => Statement::Assign {
                        target,
                        value: Operand::Const(a + b),
                    },
                }),
                Tok::Minus => match (a, b) {
                    (Operand::Var(l), Operand::Var(r)) => Ok(Statement::BinaryArith {
                        target,
                        op: ArithOp::Sub,
                        lhs: l,
                        rhs: r,
                    }),
                    (Operand::Var(v), Operand::Const(c)) => Ok(Statement::AddConst {
                        target,
                        source: v,
                        constant: -(c as i64),
                    }),
                    (Operand::Const(a), Operand::Const(b)) if a >= b => Ok(Statement::Assign {
                        target,
                        value: Operand::Const(a - b),
                    }),
                    (Operand::Const(_), Operand::Const(_)) => {
                        err(n, 1, "constant difference is negative")
                    }
                    (Operand::Const(_), Operand::Var(_)) => {
                        err(n, 1, "subtraction from a constant is not supported")
                    }
                },
                Tok::Star => match (a, b) {
                    (Operand::Const(c), Operand::Var(v)) => Ok(Statement::MulConst {
                        target,
                        constant: c,
                        source: v,
                    }),
                    (Operand::Const(a), Operand::Const(b)) => Ok(Statement::Assign {
                        target,
                        value: Operand::Const(a * b),
                    }),
                    _ => err(n, 1, "multiplication must be written '<constant> * <variable>'"),
                },
                _ => err(n, 1, "unknown statement form"),
            }
        }
        _ => err(n, 1, "unknown statement form"),
    }
}
