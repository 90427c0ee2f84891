//! Whole-program compilation checked exhaustively against the interpreter,
//! plus the structural guarantees of the compiled word: width bounds,
//! parameter bounds, repetition-block identity, and flatten fidelity.

use nn_core::{RcNode, RcWord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snp_compiler::{compile, verify_equivalence, CompileOptions, CompiledProgram};
use snp_lang::fuzz::{random_program, FuzzConfig};
use snp_lang::{bound_profile, parse, validate, Program, SweepOptions};
use std::fs;
use std::path::PathBuf;

fn corpus(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    parse(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn compile_at(p: &Program, n: u64) -> CompiledProgram {
    let b = bound_profile(p, n, &SweepOptions::default())
        .unwrap()
        .value_bound
        .max(2);
    compile(p, &CompileOptions::new(n, b).unwrap()).unwrap()
}

#[test]
fn identity_program_compiles_to_one_layer() {
    let p = parse("input x\nreturn x").unwrap();
    let compiled = compile(&p, &CompileOptions::new(5, 5).unwrap()).unwrap();
    assert_eq!(compiled.layer_count(), 1);
    let net = compiled.to_network().unwrap();
    assert_eq!(net.layers()[0].entry(0, 0), 1);
    assert_eq!(net.layers()[0].bias(), &[0]);
    assert_eq!(compiled.eval(&[3]).unwrap(), 3);
}

#[test]
fn multiply_agrees_exhaustively() {
    let p = corpus("multiply.snp");
    let compiled = compile_at(&p, 5);
    assert_eq!(compiled.options.value_bound, 25);
    assert_eq!(compiled.eval(&[3, 4]).unwrap(), 12);
    let report = verify_equivalence(&p, &compiled, 5, 1_000_000).unwrap();
    assert_eq!(report.checked, 25);
    assert!(report.is_equivalent(), "{:?}", report.mismatches);
}

#[test]
fn fibonacci_agrees_exhaustively() {
    let p = corpus("fibonacci.snp");
    let compiled = compile_at(&p, 10);
    let report = verify_equivalence(&p, &compiled, 10, 1_000_000).unwrap();
    assert_eq!(report.checked, 10);
    assert!(report.is_equivalent(), "{:?}", report.mismatches);
}

#[test]
fn triangle_agrees_exhaustively() {
    let p = corpus("triangle.snp");
    let compiled = compile_at(&p, 6);
    let report = verify_equivalence(&p, &compiled, 6, 1_000_000).unwrap();
    assert_eq!(report.checked, 216);
    assert!(report.is_equivalent(), "{:?}", report.mismatches);
}

#[test]
fn maximum_agrees_exhaustively() {
    let p = corpus("maximum.snp");
    let compiled = compile_at(&p, 8);
    let report = verify_equivalence(&p, &compiled, 8, 1_000_000).unwrap();
    assert!(report.is_equivalent(), "{:?}", report.mismatches);
}

#[test]
fn prime_small_range_agrees() {
    let p = corpus("prime.snp");
    let compiled = compile_at(&p, 4);
    let report = verify_equivalence(&p, &compiled, 4, 1_000_000).unwrap();
    assert_eq!(report.checked, 4);
    assert!(report.is_equivalent(), "{:?}", report.mismatches);
}

#[test]
fn corrupted_weight_is_detected() {
    let p = corpus("multiply.snp");
    let mut compiled = compile_at(&p, 4);
    // Flip one bias in the first layer.
    if let RcNode::Atom(layer) = &compiled.word.nodes[0] {
        let mut rows: Vec<Vec<(usize, i64)>> = layer
            .rows()
            .iter()
            .map(|r| r.iter().map(|(c, w)| (*c as usize, *w)).collect())
            .collect();
        let mut bias = layer.bias().to_vec();
        bias[0] += 1;
        let corrupted = nn_core::Layer::new(layer.in_width(), rows.drain(..).collect(), bias).unwrap();
        compiled.word.nodes[0] = RcNode::Atom(std::sync::Arc::new(corrupted));
    } else {
        panic!("expected an atom");
    }
    let report = verify_equivalence(&p, &compiled, 4, 1_000_000).unwrap();
    assert!(!report.is_equivalent());
}

#[test]
fn strict_checks_pass_on_corpus() {
    let p = corpus("multiply.snp");
    let b = bound_profile(&p, 5, &SweepOptions::default())
        .unwrap()
        .value_bound;
    let mut opts = CompileOptions::new(5, b).unwrap();
    opts.strict_checks = true;
    let compiled = compile(&p, &opts).unwrap();
    assert_eq!(compiled.eval(&[5, 5]).unwrap(), 25);
}

#[test]
fn composite_programs_must_be_inlined_first() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/prime_composite.snp");
    let p = parse(&fs::read_to_string(path).unwrap()).unwrap();
    assert!(matches!(
        compile(&p, &CompileOptions::new(4, 16).unwrap()),
        Err(snp_compiler::CompileError::CompositeProgram)
    ));
    let atomic = snp_lang::inline_composite(&p).unwrap();
    let compiled = compile_at(&atomic, 6);
    let report = verify_equivalence(&atomic, &compiled, 6, 1_000_000).unwrap();
    assert!(report.is_equivalent(), "{:?}", report.mismatches);
}

#[test]
fn undersized_bound_is_rejected() {
    let p = corpus("multiply.snp");
    assert!(matches!(
        CompileOptions::new(5, 1),
        Err(snp_compiler::CompileError::BoundTooSmall { .. })
    ));
    // B below N with live inputs.
    assert!(matches!(
        compile(&p, &CompileOptions::new(5, 3).unwrap()),
        Err(snp_compiler::CompileError::BoundTooSmall { .. })
    ));
}

#[test]
fn width_bound_four_v_l_on_corpus() {
    for (name, n) in [
        ("identity.snp", 5u64),
        ("multiply.snp", 5),
        ("fibonacci.snp", 10),
        ("triangle.snp", 6),
        ("maximum.snp", 8),
        ("prime.snp", 4),
        ("sum_of_squares.snp", 4),
    ] {
        let p = corpus(name);
        let compiled = compile_at(&p, n);
        let limit = 4 * p.var_count() * p.len();
        let max_width = max_width_of_word(&compiled.word, p.var_count());
        assert!(
            max_width <= limit,
            "{name}: width {max_width} > 4VL = {limit}"
        );
    }
}

fn max_width_of_word(word: &RcWord, input_width: usize) -> usize {
    let mut max = input_width;
    fn walk(nodes: &[RcNode], max: &mut usize) {
        for n in nodes {
            match n {
                RcNode::Atom(l) => {
                    *max = (*max).max(l.in_width()).max(l.out_width());
                }
                RcNode::Group { body, .. } => walk(body, max),
            }
        }
    }
    walk(&word.nodes, &mut max);
    max
}

fn max_abs_param_of_word(word: &RcWord) -> i64 {
    let mut max = 0i64;
    fn walk(nodes: &[RcNode], max: &mut i64) {
        for n in nodes {
            match n {
                RcNode::Atom(l) => *max = (*max).max(l.max_abs_entry()),
                RcNode::Group { body, .. } => walk(body, max),
            }
        }
    }
    walk(&word.nodes, &mut max);
    max
}

#[test]
fn parameters_bounded_by_twice_the_runtime_bound() {
    for (name, n) in [
        ("multiply.snp", 5u64),
        ("fibonacci.snp", 10),
        ("triangle.snp", 6),
        ("prime.snp", 4),
        ("sum_of_squares.snp", 4),
    ] {
        let p = corpus(name);
        let compiled = compile_at(&p, n);
        let bound = 2 * compiled.options.value_bound as i64;
        let max = max_abs_param_of_word(&compiled.word);
        assert!(max <= bound, "{name}: |param| {max} > 2B = {bound}");
    }
}

#[test]
fn word_structure_counts_on_corpus() {
    for (name, n, loops) in [
        ("multiply.snp", 5u64, 1usize),
        ("fibonacci.snp", 10, 1),
        ("triangle.snp", 6, 0),
        ("prime.snp", 4, 3),
        ("sum_of_squares.snp", 4, 4),
    ] {
        let p = corpus(name);
        let compiled = compile_at(&p, n);
        assert_eq!(compiled.word.group_count(), loops, "{name}: group count");
        let atoms = compiled.word.distinct_atom_count();
        assert!(
            atoms <= 8 * p.len(),
            "{name}: {atoms} distinct atoms > 8L = {}",
            8 * p.len()
        );
    }
}

/// Direct loop unroller: emits the flat layer list by looping over block
/// copies instead of expanding groups, as an independent construction path.
fn unroll_program(p: &Program, b: u64) -> Vec<std::sync::Arc<nn_core::Layer>> {
    use snp_lang::ast::Statement;
    fn emit(
        stmts: &[Statement],
        v: usize,
        b: u64,
        out: &mut Vec<std::sync::Arc<nn_core::Layer>>,
        augment: usize,
    ) {
        for stmt in stmts {
            match stmt {
                Statement::For {
                    counter,
                    start,
                    end,
                    clause,
                } => {
                    let clause_word = RcWord { nodes: Vec::new() };
                    // Build the loop pieces through the public encoder, then
                    // unroll the group by hand so repetition comes from this
                    // loop rather than from group expansion.
                    let mut inner = Vec::new();
                    emit(clause, v, b, &mut inner, 0);
                    let inner_word = RcWord {
                        nodes: inner.into_iter().map(RcNode::Atom).collect(),
                    };
                    let nodes =
                        snp_compiler::encode_for_loop(*counter, start, end, &inner_word, v, b)
                            .unwrap();
                    let _ = clause_word;
                    for node in nodes {
                        match node {
                            RcNode::Atom(l) => out.push(widen(l, augment)),
                            RcNode::Group { body, repeat } => {
                                for _ in 0..repeat {
                                    for n in &body {
                                        flatten_into(n, out, augment);
                                    }
                                }
                            }
                        }
                    }
                }
                other => {
                    for l in snp_compiler::encode_statement(other, v, b).unwrap().layers {
                        out.push(widen(l, augment));
                    }
                }
            }
        }
    }
    fn widen(
        l: std::sync::Arc<nn_core::Layer>,
        extra: usize,
    ) -> std::sync::Arc<nn_core::Layer> {
        if extra == 0 {
            l
        } else {
            std::sync::Arc::new(l.widened(extra))
        }
    }
    fn flatten_into(
        node: &RcNode,
        out: &mut Vec<std::sync::Arc<nn_core::Layer>>,
        augment: usize,
    ) {
        match node {
            RcNode::Atom(l) => out.push(widen(l.clone(), augment)),
            RcNode::Group { body, repeat } => {
                for _ in 0..*repeat {
                    for n in body {
                        flatten_into(n, out, augment);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    emit(&p.body, p.var_count(), b, &mut out, 0);
    out
}

#[test]
fn flatten_matches_direct_unrolling() {
    for (name, n) in [("multiply.snp", 4u64), ("fibonacci.snp", 6), ("prime.snp", 3)] {
        let p = corpus(name);
        let compiled = compile_at(&p, n);
        let flat = compiled.word.flatten().unwrap();
        let direct = unroll_program(&p, compiled.options.value_bound);
        assert_eq!(flat.len(), direct.len(), "{name}: layer count");
        for (i, (a, b)) in flat.iter().zip(&direct).enumerate() {
            assert_eq!(a.as_ref(), b.as_ref(), "{name}: layer {i} differs");
        }
    }
}

#[test]
fn repeated_blocks_are_bit_identical() {
    let p = corpus("multiply.snp");
    let compiled = compile_at(&p, 4);
    // Find the group; its flattened repetitions must all equal the first.
    fn find_group(nodes: &[RcNode]) -> Option<(&[RcNode], u64)> {
        for n in nodes {
            if let RcNode::Group { body, repeat } = n {
                return Some((body, *repeat));
            }
        }
        None
    }
    let (body, repeat) = find_group(&compiled.word.nodes).unwrap();
    assert_eq!(repeat, compiled.options.value_bound + 1);
    let body_word = RcWord {
        nodes: body.to_vec(),
    };
    let one = body_word.flatten().unwrap();
    let all = RcWord {
        nodes: vec![RcNode::Group {
            body: body.to_vec(),
            repeat,
        }],
    }
    .flatten()
    .unwrap();
    assert_eq!(all.len(), one.len() * repeat as usize);
    for (i, layer) in all.iter().enumerate() {
        assert_eq!(layer.as_ref(), one[i % one.len()].as_ref());
    }
}

#[test]
fn fuzzed_programs_respect_structural_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let cfg = FuzzConfig::default();
    let mut checked = 0;
    while checked < 200 {
        let p = random_program(&mut rng, &cfg);
        if !snp_lang::validate::is_valid(&validate(&p)) {
            continue;
        }
        checked += 1;
        let b = 64;
        let compiled = compile(&p, &CompileOptions::new(6, b).unwrap()).unwrap();
        let limit = 4 * p.var_count() * p.len();
        let width = max_width_of_word(&compiled.word, p.var_count());
        assert!(width <= limit, "fuzz #{checked}: width {width} > {limit}");
        assert!(
            compiled.word.distinct_atom_count() <= 8 * p.len(),
            "fuzz #{checked}: atom count"
        );
        let loops = count_loops(&p.body);
        assert_eq!(compiled.word.group_count(), loops, "fuzz #{checked}");
        assert!(max_abs_param_of_word(&compiled.word) <= 2 * b as i64);
        // Flatten fidelity at small scale.
        if compiled.word.layer_count() <= 20_000 {
            let flat = compiled.word.flatten().unwrap();
            assert_eq!(flat.len() as u128, compiled.word.layer_count());
        }
    }
}

fn count_loops(stmts: &[snp_lang::Statement]) -> usize {
    stmts
        .iter()
        .map(|s| match s {
            snp_lang::Statement::For { clause, .. } => 1 + count_loops(clause),
            _ => 0,
        })
        .sum()
}

#[test]
fn depth_zero_fuzzed_programs_agree_with_interpreter() {
    // Loop-free fuzzed programs run without negative-value hazards only if
    // subtraction stays clear; the generator avoids binary subtraction, so
    // every run is well defined and must match the network exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ff);
    let cfg = FuzzConfig {
        max_len: 6,
        max_vars: 5,
        max_depth: 1,
    };
    let mut checked = 0;
    while checked < 60 {
        let p = random_program(&mut rng, &cfg);
        if !snp_lang::validate::is_valid(&validate(&p)) {
            continue;
        }
        let n = 4u64;
        let Ok(profile) = bound_profile(&p, n, &SweepOptions::default()) else {
            continue;
        };
        let b = profile.value_bound.max(n).max(2);
        let Ok(compiled) = compile(&p, &CompileOptions::new(n, b).unwrap()) else {
            continue;
        };
        checked += 1;
        let report = verify_equivalence(&p, &compiled, n, 10_000).unwrap();
        assert!(
            report.is_equivalent(),
            "fuzz #{checked}:\n{}\n{:?}",
            snp_lang::pretty(&p),
            report.mismatches
        );
    }
}
