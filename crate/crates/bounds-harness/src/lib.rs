//! Bound formulas, experiment harness, and CLI plumbing.
