//! Exact evaluation. The fast path runs in checked 64-bit arithmetic; any
//! overflow restarts the affected input in arbitrary precision, and the
//! result must fit back into 64 bits.
//!
//! Evaluation is batched: a sweep over many inputs walks the layer word
//! once, carrying one state column per input, so per-layer dispatch costs
//! amortize across the batch.

use crate::layer::Layer;
use crate::network::InputSlot;
use crate::word::RcWord;
use crate::NnError;
use num_bigint::BigInt;
use std::sync::Arc;

/// An ordered sequence of layers that can be walked without materializing.
pub(crate) trait LayerSeq {
    fn count(&self) -> u128;
    fn walk<F: FnMut(&Layer) -> Result<(), NnError>>(&self, f: &mut F) -> Result<(), NnError>;
}

impl LayerSeq for RcWord {
    fn count(&self) -> u128 {
        self.layer_count()
    }
    fn walk<F: FnMut(&Layer) -> Result<(), NnError>>(&self, f: &mut F) -> Result<(), NnError> {
        self.for_each_layer(&mut |l: &Arc<Layer>| f(l.as_ref()))
    }
}

impl LayerSeq for &[Arc<Layer>] {
    fn count(&self) -> u128 {
        self.len() as u128
    }
    fn walk<F: FnMut(&Layer) -> Result<(), NnError>>(&self, f: &mut F) -> Result<(), NnError> {
        for l in self.iter() {
            f(l.as_ref())?;
        }
        Ok(())
    }
}

pub(crate) fn initial_state(
    input_spec: &[InputSlot],
    inputs: &[i64],
) -> Result<Vec<i64>, NnError> {
    let expected = input_spec
        .iter()
        .filter(|s| matches!(s, InputSlot::Free))
        .count();
    if inputs.len() != expected {
        return Err(NnError::InputArity {
            expected,
            got: inputs.len(),
        });
    }
    let mut state = Vec::with_capacity(input_spec.len());
    let mut next = 0;
    for slot in input_spec {
        match slot {
            InputSlot::Free => {
                state.push(inputs[next]);
                next += 1;
            }
            InputSlot::Fixed(v) => state.push(*v as i64),
        }
    }
    Ok(state)
}

/// Apply one layer to a `k`-column batch; `false` on overflow. The batch is
/// node-major: `x[node * k + j]` is input node `node` of batch column `j`.
fn apply_batch_i64(layer: &Layer, k: usize, x: &[i64], out: &mut Vec<i64>, relu: bool) -> bool {
    let (row_ptr, cols, coeffs, bias) = layer.raw();
    let m = bias.len();
    out.clear();
    out.resize(m * k, 0);
    for r in 0..m {
        let b = bias[r];
        let dst = &mut out[r * k..(r + 1) * k];
        dst.fill(b);
        for e in row_ptr[r] as usize..row_ptr[r + 1] as usize {
            let w = coeffs[e];
            let src = &x[cols[e] as usize * k..cols[e] as usize * k + k];
            for j in 0..k {
                let Some(t) = w.checked_mul(src[j]) else {
                    return false;
                };
                let Some(s) = dst[j].checked_add(t) else {
                    return false;
                };
                dst[j] = s;
            }
        }
        if relu {
            for v in dst.iter_mut() {
                if *v < 0 {
                    *v = 0;
                }
            }
        }
    }
    true
}

fn apply_big(layer: &Layer, x: &[BigInt], out: &mut Vec<BigInt>, relu: bool) {
    out.clear();
    for r in 0..layer.out_width() {
        let mut acc = BigInt::from(layer.bias()[r]);
        for (c, w) in layer.row(r) {
            acc += BigInt::from(w) * &x[c];
        }
        if relu && acc.sign() == num_bigint::Sign::Minus {
            acc = BigInt::from(0);
        }
        out.push(acc);
    }
}

pub(crate) struct Strictness {
    /// Error out if an identity pass-through row is negative pre-ReLU.
    pub check_passthrough: bool,
}

/// Batched exact evaluation over a shared layer sequence. Returns one
/// output vector per input. Inputs that overflow 64 bits mid-network are
/// re-run individually in arbitrary precision.
pub(crate) fn eval_seq_batch<S: LayerSeq>(
    input_spec: &[InputSlot],
    seq: &S,
    relu_after_last: bool,
    inputs: &[&[i64]],
    strict: &Strictness,
) -> Result<Vec<Vec<i64>>, NnError> {
    let total = seq.count();
    if total == 0 {
        return Err(NnError::EmptyNetwork);
    }
    let k = inputs.len();
    if k == 0 {
        return Ok(Vec::new());
    }

    // Node-major batch state.
    let mut columns = Vec::with_capacity(k);
    for input in inputs {
        columns.push(initial_state(input_spec, input)?);
    }
    let width0 = input_spec.len();
    let mut state = vec![0i64; width0 * k];
    for (j, col) in columns.iter().enumerate() {
        for (node, v) in col.iter().enumerate() {
            state[node * k + j] = *v;
        }
    }

    let mut scratch: Vec<i64> = Vec::new();
    let mut width = width0;
    let mut applied: u128 = 0;
    let mut overflowed = false;
    let result = seq.walk(&mut |layer: &Layer| {
        if layer.in_width() != width {
            return Err(NnError::WidthMismatch {
                index: applied as usize,
                expected: layer.in_width(),
                got: width,
            });
        }
        applied += 1;
        let relu = applied < total || relu_after_last;
        if strict.check_passthrough {
            for r in 0..layer.out_width() {
                if let Some(c) = layer.passthrough_source(r) {
                    for j in 0..k {
                        if state[c * k + j] < 0 {
                            return Err(NnError::ReluSafety);
                        }
                    }
                }
            }
        }
        if !apply_batch_i64(layer, k, &state, &mut scratch, relu) {
            overflowed = true;
            return Err(NnError::ValueOverflow);
        }
        width = layer.out_width();
        std::mem::swap(&mut state, &mut scratch);
        Ok(())
    });
    match result {
        Ok(()) => {
            let mut out = Vec::with_capacity(k);
            for j in 0..k {
                out.push((0..width).map(|node| state[node * k + j]).collect());
            }
            return Ok(out);
        }
        Err(NnError::ValueOverflow) if overflowed => {}
        Err(e) => return Err(e),
    }

    // Arbitrary-precision retry, one input at a time.
    let mut out = Vec::with_capacity(k);
    for input in inputs {
        out.push(eval_seq_big(input_spec, seq, relu_after_last, input)?);
    }
    Ok(out)
}

fn eval_seq_big<S: LayerSeq>(
    input_spec: &[InputSlot],
    seq: &S,
    relu_after_last: bool,
    inputs: &[i64],
) -> Result<Vec<i64>, NnError> {
    let total = seq.count();
    let mut state: Vec<BigInt> = initial_state(input_spec, inputs)?
        .into_iter()
        .map(BigInt::from)
        .collect();
    let mut scratch: Vec<BigInt> = Vec::new();
    let mut applied: u128 = 0;
    seq.walk(&mut |layer: &Layer| {
        applied += 1;
        let relu = applied < total || relu_after_last;
        apply_big(layer, &state, &mut scratch, relu);
        std::mem::swap(&mut state, &mut scratch);
        Ok(())
    })?;
    state
        .into_iter()
        .map(|v| i64::try_from(v).map_err(|_| NnError::ValueOverflow))
        .collect()
}

pub(crate) fn eval_seq<S: LayerSeq>(
    input_spec: &[InputSlot],
    seq: &S,
    relu_after_last: bool,
    inputs: &[i64],
    strict: &Strictness,
) -> Result<Vec<i64>, NnError> {
    let mut out = eval_seq_batch(input_spec, seq, relu_after_last, &[inputs], strict)?;
    Ok(out.pop().expect("one output per input"))
}

/// Evaluate the layer sequence denoted by `word` on `inputs`. The ReLU is
/// applied after every layer except the last, unless `relu_after_last`.
pub fn eval_word(
    input_spec: &[InputSlot],
    word: &RcWord,
    relu_after_last: bool,
    inputs: &[i64],
) -> Result<Vec<i64>, NnError> {
    eval_seq(
        input_spec,
        word,
        relu_after_last,
        inputs,
        &Strictness {
            check_passthrough: false,
        },
    )
}

/// Batched form of [`eval_word`]: one shared walk over the word.
pub fn eval_word_batch(
    input_spec: &[InputSlot],
    word: &RcWord,
    relu_after_last: bool,
    inputs: &[&[i64]],
) -> Result<Vec<Vec<i64>>, NnError> {
    eval_seq_batch(
        input_spec,
        word,
        relu_after_last,
        inputs,
        &Strictness {
            check_passthrough: false,
        },
    )
}

/// As [`eval_word`], additionally failing if any identity pass-through row
/// sees a negative pre-activation (a miscompiled gadget symptom).
pub fn eval_word_checked(
    input_spec: &[InputSlot],
    word: &RcWord,
    relu_after_last: bool,
    inputs: &[i64],
) -> Result<Vec<i64>, NnError> {
    eval_seq(
        input_spec,
        word,
        relu_after_last,
        inputs,
        &Strictness {
            check_passthrough: true,
        },
    )
}
