//! Feedback vertex set algorithms for planar graphs.
//!
//! The pipeline: a 2-approximation ([`approx2`]) gives fast feasible
//! solutions and upper bounds; kernelization ([`kernel`]) shrinks instances
//! while tracking how to lift solutions back; an exact branch-and-bound
//! ([`exact`]) solves small graphs; planar separators ([`separator`]) drive
//! a divide-and-conquer approximation scheme ([`ptas`]); and local-search
//! heuristics ([`heuristics`]) trade time for quality on large inputs.

pub mod approx2;
pub mod bench;
pub mod embed;
pub mod exact;
pub mod graph;
pub mod heuristics;
pub mod kernel;
pub mod ptas;
pub mod separator;
