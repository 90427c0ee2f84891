use crate::eval::{eval_seq, Strictness};
use crate::layer::Layer;
use crate::word::RcWord;
use crate::NnError;
use std::fmt::Write;
use std::sync::Arc;

/// Per-coordinate input tag: a free input fed at evaluation time, or a
/// coordinate fixed to a nonnegative constant (a variable's initial value).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSlot {
    Free,
    Fixed(u64),
}

/// A feedforward ReLU network over exact integers. The nonlinearity acts
/// after every layer except the last; `relu_after_last` opts the final
/// layer in, for sub-networks meant to be composed into larger ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_spec: Vec<InputSlot>,
    layers: Vec<Arc<Layer>>,
    relu_after_last: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetStats {
    pub depth: usize,
    pub max_width: usize,
    pub max_abs_param: i64,
    pub param_count: u128,
}

impl Network {
    pub fn new(
        input_spec: Vec<InputSlot>,
        layers: Vec<Arc<Layer>>,
        relu_after_last: bool,
    ) -> Result<Network, NnError> {
        if layers.is_empty() {
            return Err(NnError::EmptyNetwork);
        }
        let mut width = input_spec.len();
        for (index, layer) in layers.iter().enumerate() {
            if layer.in_width() != width {
                return Err(NnError::WidthMismatch {
                    index,
                    expected: width,
                    got: layer.in_width(),
                });
            }
            width = layer.out_width();
        }
        Ok(Network {
            input_spec,
            layers,
            relu_after_last,
        })
    }

    /// Materialize the flat layer sequence denoted by `word`.
    pub fn from_word(
        input_spec: Vec<InputSlot>,
        word: &RcWord,
        relu_after_last: bool,
    ) -> Result<Network, NnError> {
        Network::new(input_spec, word.flatten()?, relu_after_last)
    }

    pub fn input_spec(&self) -> &[InputSlot] {
        &self.input_spec
    }

    pub fn layers(&self) -> &[Arc<Layer>] {
        &self.layers
    }

    pub fn relu_after_last(&self) -> bool {
        self.relu_after_last
    }

    pub fn free_input_count(&self) -> usize {
        self.input_spec
            .iter()
            .filter(|s| matches!(s, InputSlot::Free))
            .count()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().expect("nonempty").out_width()
    }

    /// Exact forward pass: `inputs` supplies the free coordinates in order.
    pub fn eval(&self, inputs: &[i64]) -> Result<Vec<i64>, NnError> {
        eval_seq(
            &self.input_spec,
            &self.layers.as_slice(),
            self.relu_after_last,
            inputs,
            &Strictness {
                check_passthrough: false,
            },
        )
    }

    pub fn stats(&self) -> NetStats {
        let mut max_width = self.input_spec.len();
        let mut max_abs = 0i64;
        let mut params = 0u128;
        for layer in &self.layers {
            max_width = max_width.max(layer.out_width()).max(layer.in_width());
            max_abs = max_abs.max(layer.max_abs_entry());
            params += layer.param_count();
        }
        NetStats {
            depth: self.layers.len(),
            max_width,
            max_abs_param: max_abs,
            param_count: params,
        }
    }

    /// Concatenate `self` then `g`: the result evaluates `g` on the output
    /// of `self`, with the nonlinearity between them. Exact as `g ∘ self`
    /// whenever `self` produces nonnegative outputs (compiled networks do).
    pub fn compose(&self, g: &Network) -> Result<Network, NnError> {
        if g.free_input_count() != g.input_spec.len() {
            return Err(NnError::FixedInputsInComposition);
        }
        if g.input_spec.len() != self.output_width() {
            return Err(NnError::WidthMismatch {
                index: self.layers.len(),
                expected: self.output_width(),
                got: g.input_spec.len(),
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(g.layers.iter().cloned());
        Network::new(self.input_spec.clone(), layers, g.relu_after_last)
    }

    /// One layer per line: `W rows cols: entries…; B: entries…`.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for layer in &self.layers {
            let entries: Vec<String> = layer.dense_entries().map(|e| e.to_string()).collect();
            let bias: Vec<String> = layer.bias().iter().map(|b| b.to_string()).collect();
            writeln!(
                out,
                "W {} {}: {}; B: {}",
                layer.out_width(),
                layer.in_width(),
                entries.join(" "),
                bias.join(" ")
            )
            .unwrap();
        }
        out
    }
}
