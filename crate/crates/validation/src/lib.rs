//! Holds the `acceptance` test target; run it with
//! `cargo test -p rydchain-validation --test acceptance -- --nocapture`.
