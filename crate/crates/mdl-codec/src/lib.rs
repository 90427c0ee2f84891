//! Symbol-alphabet serialization of integer networks.

pub mod decode;
pub mod emit;
pub mod measure;
pub mod symbol;

pub use decode::{decode, expand, DecodeError};
pub use emit::{emit_compressed, emit_compressed_parts, emit_full};
pub use measure::{count_networks_upper, description_length_bound, full_length, DescLen};
pub use symbol::{Symbol, SymbolSeq, ALPHABET};
