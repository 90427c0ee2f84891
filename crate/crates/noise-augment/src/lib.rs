//! Output-override corrections and label corruption.

pub mod correction;
pub mod corrupt;

pub use correction::{
    build_correction_net, build_correction_word, correction_layers, CorrectionError,
    CorrectionSet,
};
pub use corrupt::{corrupt_dataset, CorruptMode, CorruptedDataset, DataPoint, Ratio};
