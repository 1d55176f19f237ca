//! Acceptance suite for `qbessel`. The checks live in `tests/acceptance.rs`
//! and run with `cargo test -p qbessel-verify --test acceptance`.
