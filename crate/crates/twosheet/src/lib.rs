//! Cycle double covers of bridgeless graphs through a two-sheet lift.
//!
//! A graph is lifted to two copies joined by auxiliary edges at its odd
//! vertices, an Eulerian trail of the lift is projected back, and the
//! resulting closed walks are decomposed and reduced until only cycles
//! remain. Every edge then lies on exactly two of them.
//!
//! The [`pipeline`] module runs the whole procedure; [`verify`] checks any
//! claimed cover independently and holds a brute-force oracle for small
//! graphs. [`embedding`] covers rotation systems and face tracing.

pub mod audit;
pub mod cli;
pub mod decompose;
pub mod embedding;
pub mod generators;
pub mod graph;
pub mod lift;
pub mod pipeline;
pub mod reduce;
pub mod verify;
pub mod walk;
