//! Acceptance criteria for `fraclim`; see `tests/acceptance.rs`.
