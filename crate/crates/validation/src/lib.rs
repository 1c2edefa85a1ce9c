//! Holds the acceptance suite in `tests/acceptance.rs`; it lives in its own
//! package so that `cargo test --workspace` runs it after everything else.
