//! Permutation-symmetric vertex couplings `U = aI + bJ`.
//!
//! A vertex joining n half-lines is self-adjoint under the boundary condition
//! `(U - I) Psi(0) + i (U + I) Psi'(0) = 0` with unitary U. Invariance under
//! edge permutations forces `U = aI + bJ` (J the all-ones matrix) with
//! `|a| = 1` and `|a + nb| = 1`; the eigenvalues of U are `a` on the
//! zero-sum subspace (multiplicity n-1) and `a + nb` on the constant vector.

use num_complex::Complex64;
use thiserror::Error;

/// Validation tolerance for the two unitarity moduli (relative).
pub const DEFAULT_TOL_UNITARY: f64 = 1e-12;
/// Classification tolerance, looser than validation so that couplings built
/// from closed forms are never misrouted to the wrong schedule branch.
pub const DEFAULT_TOL_CLASS: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CouplingError {
    #[error("edge count must be at least 2, got {n}")]
    BadEdgeCount { n: u32 },
    #[error("unitarity constraint {constraint} violated by {deviation:.3e} (tolerance {tol:.3e})")]
    ConstraintViolated {
        constraint: &'static str,
        deviation: f64,
        tol: f64,
    },
    #[error("boundary data has {got} components, coupling has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
}

/// Coupling classification steering schedule-branch selection.
///
/// `classify` returns one of the first five tags under the precedence
/// Diagonal -> Delta -> DeltaP -> Resonant -> Generic. `DeltaPrimeS` and
/// `DeltaPrime` are informational sub-labels of Generic carried only by the
/// named-family constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingClass {
    /// b = 0: U diagonal, edges decoupled.
    Diagonal,
    /// a = -1: wavefunction continuous at the vertex.
    Delta,
    /// a + nb = -1: the dual coupling with a pole-type vertex schedule.
    DeltaP,
    /// a(a + nb) = 1: needs the stronger vertex singularity u = zeta/d^nu.
    Resonant,
    Generic,
    DeltaPrimeS,
    DeltaPrime,
}

impl CouplingClass {
    /// Collapse the informational sub-labels onto the branch actually used.
    pub fn schedule_branch(self) -> CouplingClass {
        match self {
            CouplingClass::DeltaPrimeS | CouplingClass::DeltaPrime => CouplingClass::Generic,
            other => other,
        }
    }

    /// Delta and Diagonal couplings are excluded from the schedules: the
    /// former has its own regular-potential approximation, the latter is a
    /// decoupled half-line problem.
    pub fn is_schedule_excluded(self) -> bool {
        matches!(self, CouplingClass::Delta | CouplingClass::Diagonal)
    }

    pub fn tag(self) -> &'static str {
        match self {
            CouplingClass::Diagonal => "diagonal",
            CouplingClass::Delta => "delta",
            CouplingClass::DeltaP => "delta_p",
            CouplingClass::Resonant => "resonant",
            CouplingClass::Generic => "generic",
            CouplingClass::DeltaPrimeS => "delta_prime_s",
            CouplingClass::DeltaPrime => "delta_prime",
        }
    }
}

/// The four named one-parameter subfamilies with closed-form (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingFamily {
    /// Continuous wavefunction, sum of derivatives = alpha * psi(0).
    Delta { alpha: f64 },
    /// Continuous derivative, sum of values = beta * psi'(0).
    DeltaPrimeS { beta: f64 },
    /// Zero derivative sum; value differences proportional to derivative differences.
    DeltaPrime { beta: f64 },
    /// Dual of delta with the roles of values and derivatives interchanged.
    DeltaP { alpha: f64 },
}

impl CouplingFamily {
    /// The informational class label of the family.
    pub fn label(&self) -> CouplingClass {
        match self {
            CouplingFamily::Delta { .. } => CouplingClass::Delta,
            CouplingFamily::DeltaPrimeS { .. } => CouplingClass::DeltaPrimeS,
            CouplingFamily::DeltaPrime { .. } => CouplingClass::DeltaPrime,
            CouplingFamily::DeltaP { .. } => CouplingClass::DeltaP,
        }
    }

    /// The (a, b) pair of the family for an n-edge vertex.
    pub fn parameters(&self, n: u32) -> (Complex64, Complex64) {
        let nf = n as f64;
        let two = Complex64::new(2.0, 0.0);
        match *self {
            CouplingFamily::Delta { alpha } => {
                let denom = Complex64::new(nf, alpha);
                (Complex64::new(-1.0, 0.0), two / denom)
            }
            CouplingFamily::DeltaPrimeS { beta } => {
                let denom = Complex64::new(-nf, beta);
                (Complex64::new(1.0, 0.0), two / denom)
            }
            CouplingFamily::DeltaPrime { beta } => {
                let num = Complex64::new(nf, beta);
                let denom = Complex64::new(-nf, beta);
                (num / denom, two / Complex64::new(nf, -beta))
            }
            CouplingFamily::DeltaP { alpha } => {
                let denom = Complex64::new(nf, alpha);
                (Complex64::new(nf, -alpha) / denom, -two / denom)
            }
        }
    }
}

/// A validated permutation-symmetric vertex coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexCoupling {
    n: u32,
    a: Complex64,
    b: Complex64,
}

impl VertexCoupling {
    /// Validate and construct a coupling: requires n >= 2, |a| = 1 and
    /// |a + nb| = 1 within `tol_unitary`.
    pub fn new(
        n: u32,
        a: Complex64,
        b: Complex64,
        tol_unitary: f64,
    ) -> Result<VertexCoupling, CouplingError> {
        if n < 2 {
            return Err(CouplingError::BadEdgeCount { n });
        }
        let dev_a = (a.norm() - 1.0).abs();
        if dev_a > tol_unitary {
            return Err(CouplingError::ConstraintViolated {
                constraint: "|a| = 1",
                deviation: dev_a,
                tol: tol_unitary,
            });
        }
        let scalar = a + b * n as f64;
        let dev_s = (scalar.norm() - 1.0).abs();
        if dev_s > tol_unitary {
            return Err(CouplingError::ConstraintViolated {
                constraint: "|a + nb| = 1",
                deviation: dev_s,
                tol: tol_unitary,
            });
        }
        Ok(VertexCoupling { n, a, b })
    }

    /// Construct with the default validation tolerance.
    pub fn with_default_tol(n: u32, a: Complex64, b: Complex64) -> Result<Self, CouplingError> {
        Self::new(n, a, b, DEFAULT_TOL_UNITARY)
    }

    /// Closed-form coupling of a named family; always passes validation.
    pub fn from_family(family: CouplingFamily, n: u32) -> Result<VertexCoupling, CouplingError> {
        let (a, b) = family.parameters(n);
        VertexCoupling::new(n, a, b, DEFAULT_TOL_UNITARY)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Eigenvalue of U on the constant vector: a + nb.
    pub fn scalar_eigenvalue(&self) -> Complex64 {
        self.a + self.b * self.n as f64
    }

    /// The full matrix U[j][k] = a delta_jk + b.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let n = self.n as usize;
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| if j == k { self.a + self.b } else { self.b })
                    .collect()
            })
            .collect()
    }

    /// Deterministic class tag under the precedence
    /// Diagonal -> Delta -> DeltaP -> Resonant -> Generic.
    pub fn classify(&self, tol_class: f64) -> CouplingClass {
        let scalar = self.scalar_eigenvalue();
        if self.b.norm() <= tol_class {
            CouplingClass::Diagonal
        } else if (self.a + 1.0).norm() <= tol_class {
            CouplingClass::Delta
        } else if (scalar + 1.0).norm() <= tol_class {
            CouplingClass::DeltaP
        } else if (self.a * scalar - 1.0).norm() <= tol_class {
            CouplingClass::Resonant
        } else {
            CouplingClass::Generic
        }
    }

    /// Residual of the vertex condition: (U - I) Psi(0) + i (U + I) Psi'(0).
    ///
    /// Zero iff the boundary data satisfies the coupling.
    pub fn bc_residual(&self, bv: &BoundaryValues) -> Result<Vec<Complex64>, CouplingError> {
        let n = self.n as usize;
        if bv.values.len() != n || bv.derivatives.len() != n {
            return Err(CouplingError::LengthMismatch {
                expected: n,
                got: bv.values.len().max(bv.derivatives.len()),
            });
        }
        let sum_v: Complex64 = bv.values.iter().sum();
        let sum_d: Complex64 = bv.derivatives.iter().sum();
        let i = Complex64::i();
        Ok((0..n)
            .map(|j| {
                (self.a - 1.0) * bv.values[j]
                    + self.b * sum_v
                    + i * ((self.a + 1.0) * bv.derivatives[j] + self.b * sum_d)
            })
            .collect())
    }
}

/// Wavefunction boundary values and outgoing derivatives at the vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
}

impl BoundaryValues {
    pub fn new(values: Vec<Complex64>, derivatives: Vec<Complex64>) -> Result<Self, CouplingError> {
        if values.len() != derivatives.len() {
            return Err(CouplingError::LengthMismatch {
                expected: values.len(),
                got: derivatives.len(),
            });
        }
        Ok(BoundaryValues {
            values,
            derivatives,
        })
    }
}
