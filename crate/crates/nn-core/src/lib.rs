//! Exact integer feedforward ReLU networks.
//!
//! Layers store sparse rows of `(column, coefficient)` pairs because compiled
//! networks are near-identity almost everywhere, and loop constructions
//! unroll into millions of layers that share a handful of distinct
//! parameter values. The shared-layer sequence is captured by [`RcWord`], a
//! word over layer atoms with k-fold repetition groups; evaluation can walk
//! the word directly without materializing the flat layer list.

pub mod eval;
pub mod layer;
pub mod network;
pub mod word;

pub use eval::{eval_word, eval_word_batch, eval_word_checked};
pub use layer::Layer;
pub use network::{InputSlot, NetStats, Network};
pub use word::{RcNode, RcWord};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NnError {
    #[error("layer {index}: input width {got} does not match expected {expected}")]
    WidthMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("network must have at least one layer")]
    EmptyNetwork,
    #[error("bias length {bias} does not match row count {rows}")]
    BiasMismatch { rows: usize, bias: usize },
    #[error("row references column {col} outside input width {width}")]
    ColumnOutOfRange { col: usize, width: usize },
    #[error("expected {expected} input values, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("evaluation produced a value outside the 64-bit range")]
    ValueOverflow,
    #[error("composition requires g to have only free inputs")]
    FixedInputsInComposition,
    #[error("flattening would materialize {0} layers, over the supported limit")]
    TooManyLayers(u128),
    #[error("identity pass-through row went negative before the nonlinearity")]
    ReluSafety,
}
