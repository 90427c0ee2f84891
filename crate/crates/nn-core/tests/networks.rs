use nn_core::*;
use std::sync::Arc;

fn layer(in_w: usize, rows: Vec<Vec<(usize, i64)>>, bias: Vec<i64>) -> Arc<Layer> {
    Arc::new(Layer::new(in_w, rows, bias).unwrap())
}

/// Two layers over input [x, 1]: W1 = [[1,1],[1,1]], b1 = [5,5];
/// W2 = [[3,1]], b2 = [2].
fn example_network() -> Network {
    Network::new(
        vec![InputSlot::Free, InputSlot::Fixed(1)],
        vec![
            layer(2, vec![vec![(0, 1), (1, 1)], vec![(0, 1), (1, 1)]], vec![5, 5]),
            layer(2, vec![vec![(0, 3), (1, 1)]], vec![2]),
        ],
        false,
    )
    .unwrap()
}

#[test]
fn identity_layer_evaluates_to_input() {
    let net = Network::new(
        vec![InputSlot::Free],
        vec![layer(1, vec![vec![(0, 1)]], vec![0])],
        false,
    )
    .unwrap();
    assert_eq!(net.eval(&[5]).unwrap(), vec![5]);
}

#[test]
fn example_network_hand_evaluation() {
    let net = example_network();
    // relu([1+1+5, 1+1+5]) = [7,7]; 3*7 + 7 + 2 = 30.
    assert_eq!(net.eval(&[1]).unwrap(), vec![30]);
}

#[test]
fn zero_indicator_gadget() {
    // relu(x+1) + relu(x-1) - 2 relu(x) = 1 iff x = 0 (integers).
    let gadget = Network::new(
        vec![InputSlot::Free],
        vec![
            layer(1, vec![vec![(0, 1)], vec![(0, 1)], vec![(0, 1)]], vec![1, -1, 0]),
            layer(3, vec![vec![(0, 1), (1, 1), (2, -2)]], vec![0]),
        ],
        false,
    )
    .unwrap();
    for x in -6i64..=6 {
        assert_eq!(gadget.eval(&[x]).unwrap(), vec![(x == 0) as i64], "x={x}");
    }
}

#[test]
fn eval_checks_arity_and_dimensions() {
    let net = example_network();
    assert!(matches!(net.eval(&[]), Err(NnError::InputArity { .. })));
    assert!(matches!(net.eval(&[1, 2]), Err(NnError::InputArity { .. })));

    let bad = Network::new(
        vec![InputSlot::Free],
        vec![layer(2, vec![vec![(0, 1)]], vec![0])],
        false,
    );
    assert!(matches!(bad, Err(NnError::WidthMismatch { .. })));
}

#[test]
fn empty_network_rejected() {
    assert!(matches!(
        Network::new(vec![InputSlot::Free], vec![], false),
        Err(NnError::EmptyNetwork)
    ));
}

#[test]
fn stats_of_example_network() {
    let stats = example_network().stats();
    assert_eq!(stats.depth, 2);
    assert_eq!(stats.max_width, 2);
    assert_eq!(stats.max_abs_param, 5);
    assert_eq!(stats.param_count, (4 + 2) + (2 + 1));
}

#[test]
fn determinism() {
    let net = example_network();
    let a = net.eval(&[3]).unwrap();
    let b = net.eval(&[3]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn compose_matches_manual_network() {
    let f = Network::new(
        vec![InputSlot::Free, InputSlot::Fixed(1)],
        vec![layer(2, vec![vec![(0, 1), (1, 1)], vec![(0, 1), (1, 1)]], vec![5, 5])],
        false,
    )
    .unwrap();
    let g = Network::new(
        vec![InputSlot::Free, InputSlot::Free],
        vec![layer(2, vec![vec![(0, 3), (1, 1)]], vec![2])],
        false,
    )
    .unwrap();
    let composed = f.compose(&g).unwrap();
    assert_eq!(composed.layers().len(), 2);
    assert_eq!(composed.eval(&[1]).unwrap(), vec![30]);
    // Structurally the example network.
    assert_eq!(composed, example_network());
}

#[test]
fn compose_identity_is_neutral() {
    let ident = Network::new(
        vec![InputSlot::Free],
        vec![layer(1, vec![vec![(0, 1)]], vec![0])],
        false,
    )
    .unwrap();
    let tail = Network::new(
        vec![InputSlot::Free],
        vec![layer(1, vec![vec![(0, 2)]], vec![1])],
        false,
    )
    .unwrap();
    let composed = ident.compose(&tail).unwrap();
    for x in 0..5 {
        assert_eq!(composed.eval(&[x]).unwrap(), tail.eval(&[x]).unwrap());
    }
}

#[test]
fn compose_rejects_mismatched_widths_and_fixed_inputs() {
    let f = example_network(); // output width 1
    let g2 = Network::new(
        vec![InputSlot::Free, InputSlot::Free],
        vec![layer(2, vec![vec![(0, 1)]], vec![0])],
        false,
    )
    .unwrap();
    assert!(matches!(f.compose(&g2), Err(NnError::WidthMismatch { .. })));

    let g_fixed = Network::new(
        vec![InputSlot::Fixed(3)],
        vec![layer(1, vec![vec![(0, 1)]], vec![0])],
        false,
    )
    .unwrap();
    assert!(matches!(
        f.compose(&g_fixed),
        Err(NnError::FixedInputsInComposition)
    ));
}

#[test]
fn compose_is_associative_on_small_inputs() {
    let a = Network::new(
        vec![InputSlot::Free],
        vec![layer(1, vec![vec![(0, 2)]], vec![1])],
        false,
    )
    .unwrap();
    let b = Network::new(
        vec![InputSlot::Free],
        vec![layer(1, vec![vec![(0, 1)]], vec![3])],
        false,
    )
    .unwrap();
    let c = Network::new(
        vec![InputSlot::Free],
        vec![layer(1, vec![vec![(0, 5)]], vec![0])],
        false,
    )
    .unwrap();
    let left = a.compose(&b).unwrap().compose(&c).unwrap();
    let right = a.compose(&b.compose(&c).unwrap()).unwrap();
    for x in 0..=5 {
        assert_eq!(left.eval(&[x]).unwrap(), right.eval(&[x]).unwrap());
    }
    assert_eq!(left, right);
}

#[test]
fn overflow_promotes_to_big_integers() {
    // 70 doubling layers blow past i64 mid-stream; a final projection to a
    // single scaled-down value must still come out exact.
    let mut layers = vec![];
    for _ in 0..70 {
        layers.push(layer(1, vec![vec![(0, 2)]], vec![0]));
    }
    // Subtract the giant value from itself: two copies, then difference.
    layers.push(layer(1, vec![vec![(0, 1)], vec![(0, 1)]], vec![0, 0]));
    layers.push(layer(2, vec![vec![(0, 1), (1, -1)]], vec![7]));
    let net = Network::new(vec![InputSlot::Free], layers, false).unwrap();
    assert_eq!(net.eval(&[1]).unwrap(), vec![7]);
}

#[test]
fn overflow_in_final_value_is_an_error() {
    let mut layers = vec![];
    for _ in 0..70 {
        layers.push(layer(1, vec![vec![(0, 2)]], vec![0]));
    }
    let net = Network::new(vec![InputSlot::Free], layers, false).unwrap();
    assert!(matches!(net.eval(&[1]), Err(NnError::ValueOverflow)));
}

#[test]
fn word_flatten_and_counts() {
    let a = layer(1, vec![vec![(0, 1)]], vec![1]);
    let b = layer(1, vec![vec![(0, 1)]], vec![2]);
    let word = RcWord {
        nodes: vec![
            RcWord::atom(a.clone()),
            RcNode::Group {
                body: vec![RcWord::atom(b.clone()), RcWord::atom(a.clone())],
                repeat: 3,
            },
        ],
    };
    assert_eq!(word.layer_count(), 7);
    assert_eq!(word.group_count(), 1);
    assert_eq!(word.atom_count(), 3);
    assert_eq!(word.distinct_atom_count(), 2);
    let flat = word.flatten().unwrap();
    assert_eq!(flat.len(), 7);
    assert!(Arc::ptr_eq(&flat[0], &a));
    assert!(Arc::ptr_eq(&flat[1], &b));

    // x + 1, then (x+2, x+1) three times: 1 + 3*3 = 10.
    let out = eval_word(&[InputSlot::Free], &word, false, &[0]).unwrap();
    assert_eq!(out, vec![10]);

    let net = Network::from_word(vec![InputSlot::Free], &word, false).unwrap();
    assert_eq!(net.eval(&[0]).unwrap(), vec![10]);
}

#[test]
fn word_eval_matches_flat_eval() {
    let a = layer(2, vec![vec![(0, 1), (1, 1)], vec![(1, 1)]], vec![0, 1]);
    let b = layer(2, vec![vec![(0, 1)], vec![(0, 1), (1, -1)]], vec![0, 0]);
    let word = RcWord {
        nodes: vec![
            RcNode::Group {
                body: vec![RcWord::atom(a), RcWord::atom(b)],
                repeat: 5,
            },
        ],
    };
    let net = Network::from_word(vec![InputSlot::Free, InputSlot::Free], &word, false).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            assert_eq!(
                eval_word(net.input_spec(), &word, false, &[x, y]).unwrap(),
                net.eval(&[x, y]).unwrap()
            );
        }
    }
}

#[test]
fn map_atoms_preserves_sharing() {
    let a = layer(1, vec![vec![(0, 1)]], vec![1]);
    let word = RcWord {
        nodes: vec![
            RcWord::atom(a.clone()),
            RcNode::Group {
                body: vec![RcWord::atom(a.clone())],
                repeat: 2,
            },
        ],
    };
    let widened = word.map_atoms(&mut |l| l.widened(1));
    assert_eq!(widened.distinct_atom_count(), 1);
    let flat = widened.flatten().unwrap();
    assert!(Arc::ptr_eq(&flat[0], &flat[1]));
    assert_eq!(flat[0].in_width(), 2);
    assert_eq!(flat[0].out_width(), 2);
}

#[test]
fn debug_dump_one_layer_per_line() {
    let dump = example_network().debug_dump();
    let lines: Vec<&str> = dump.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "W 2 2: 1 1 1 1; B: 5 5");
    assert_eq!(lines[1], "W 1 2: 3 1; B: 2");
}
