//! Permutation-symmetric vertex couplings on an n-edge star graph.
//!
//! The crate models the two-parameter family of self-adjoint vertex couplings
//! `U = aI + bJ` (|a| = 1, |a+nb| = 1), the singular approximation schedules
//! u(d), v(d) that pair a delta vertex with one delta interaction per edge,
//! the closed-form half-line resolvent kernels of both operator families, an
//! independent piecewise-matching oracle, and the Hilbert-Schmidt quadrature
//! machinery that measures how the approximants approach their target in the
//! norm-resolvent sense as d -> 0+.

pub mod convergence;
pub mod coupling;
pub mod kernels;
pub mod oracle;
pub mod quad;
pub mod schedule;
pub mod stargraph;
pub mod verify;
