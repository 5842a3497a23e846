//! Acceptance checks live in `tests/acceptance.rs`; this crate only hosts them
//! so that they run after every other test target in the workspace.
