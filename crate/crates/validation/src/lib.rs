//! Holds the `acceptance` test target. The package name sorts after
//! `lrpulse-core`, so `cargo test --workspace` reports every other suite
//! before the acceptance criteria.
