//! Coupling-strength schedules u(d), v(d) for the approximating family.
//!
//! The approximating operator carries a delta coupling of strength u at the
//! vertex and a delta interaction of strength v on each edge at distance d.
//! The edge strength is branch-independent,
//!
//! ```text
//! v(d) = -1/d - i (a-1)/(a+1) = -1/d + 2 Im(a)/|a+1|^2 ,
//! ```
//!
//! while the vertex strength splits three ways: the generic closed form
//! `u = i n/d^2 * [ (w-1)/(w+1) + (a-1)/(a+1) ]^{-1}` with w = a + nb, the
//! resonant branch `u = zeta/d^nu` when a(a+nb) = 1 makes the bracket vanish,
//! and the pole branch `u = -n/d` for the delta_p subfamily (w = -1).

use num_complex::Complex64;
use thiserror::Error;

use crate::coupling::{CouplingClass, VertexCoupling, DEFAULT_TOL_CLASS};

/// Relative bound on the imaginary residue discarded when collapsing the
/// symbolic complex expressions for u and v to reals.
pub const REALNESS_TOL: f64 = 1e-13;
/// Bracket modulus below this signals a resonant coupling that slipped
/// through classification.
pub const BRACKET_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScheduleError {
    #[error("{class:?} couplings are excluded from the singular schedules")]
    ExcludedCoupling { class: CouplingClass },
    #[error("distance must be positive, got {d}")]
    NonPositiveDistance { d: f64 },
    #[error("generic-branch bracket modulus {modulus:.3e} below {BRACKET_TOL:.0e}: coupling is resonant, reclassify")]
    DegenerateBracket { modulus: f64 },
    #[error("symbolic strength has relative imaginary part {rel_imag:.3e}, coupling violates unitarity")]
    NonRealStrength { rel_imag: f64 },
    #[error("invalid schedule configuration: {reason}")]
    InvalidConfig { reason: String },
}

/// Resonant-branch parameters: u = zeta / d^nu with zeta != 0, nu > 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    zeta: f64,
    nu: f64,
}

impl ScheduleConfig {
    pub fn new(zeta: f64, nu: f64) -> Result<ScheduleConfig, ScheduleError> {
        if zeta == 0.0 || !zeta.is_finite() {
            return Err(ScheduleError::InvalidConfig {
                reason: format!("zeta must be a nonzero finite real, got {zeta}"),
            });
        }
        if !nu.is_finite() || nu <= 2.0 {
            return Err(ScheduleError::InvalidConfig {
                reason: format!("nu must exceed 2, got {nu}"),
            });
        }
        Ok(ScheduleConfig { zeta, nu })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            zeta: 1.0,
            nu: 3.0,
        }
    }
}

/// One point of the approximation schedule: edge interactions of strength v
/// sit at distance d from the vertex, which carries a delta of strength u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulePoint {
    pub d: f64,
    pub u: f64,
    pub v: f64,
}

fn check_admissible(c: &VertexCoupling, d: f64) -> Result<CouplingClass, ScheduleError> {
    if !d.is_finite() || d <= 0.0 {
        return Err(ScheduleError::NonPositiveDistance { d });
    }
    let class = c.classify(DEFAULT_TOL_CLASS).schedule_branch();
    if class.is_schedule_excluded() {
        return Err(ScheduleError::ExcludedCoupling { class });
    }
    Ok(class)
}

/// Collapse a symbolic complex strength to its real part, verifying the
/// imaginary residue stays below `REALNESS_TOL` relative to the expression
/// scale (the value itself may cancel to zero legitimately).
fn collapse_real(z: Complex64, scale: f64) -> Result<f64, ScheduleError> {
    let scale = scale.max(z.norm());
    if scale > 0.0 && z.im.abs() > REALNESS_TOL * scale {
        return Err(ScheduleError::NonRealStrength {
            rel_imag: z.im.abs() / scale,
        });
    }
    Ok(z.re)
}

/// Strength of the edge delta interactions: v = -1/d - i(a-1)/(a+1).
pub fn edge_strength_v(c: &VertexCoupling, d: f64) -> Result<f64, ScheduleError> {
    check_admissible(c, d)?;
    let a = c.a();
    let cayley = Complex64::i() * (a - 1.0) / (a + 1.0);
    let symbolic = -1.0 / d - cayley;
    collapse_real(symbolic, 1.0 / d + cayley.norm())
}

/// Strength of the vertex delta coupling on the branch picked by `classify`.
pub fn vertex_strength_u(
    c: &VertexCoupling,
    d: f64,
    cfg: &ScheduleConfig,
) -> Result<f64, ScheduleError> {
    let class = check_admissible(c, d)?;
    let n = c.n() as f64;
    match class {
        CouplingClass::Resonant => Ok(cfg.zeta / d.powf(cfg.nu)),
        CouplingClass::DeltaP => Ok(-n / d),
        _ => {
            let a = c.a();
            let w = c.scalar_eigenvalue();
            let bracket = (w - 1.0) / (w + 1.0) + (a - 1.0) / (a + 1.0);
            if bracket.norm() < BRACKET_TOL {
                return Err(ScheduleError::DegenerateBracket {
                    modulus: bracket.norm(),
                });
            }
            let symbolic = Complex64::i() * (n / (d * d)) / bracket;
            collapse_real(symbolic, symbolic.norm())
        }
    }
}

/// Evaluate both strengths at a single distance.
pub fn schedule_point(
    c: &VertexCoupling,
    d: f64,
    cfg: &ScheduleConfig,
) -> Result<SchedulePoint, ScheduleError> {
    Ok(SchedulePoint {
        d,
        u: vertex_strength_u(c, d, cfg)?,
        v: edge_strength_v(c, d)?,
    })
}

/// Evaluate the schedule over a distance grid, preserving order.
///
/// Callers fitting rates should supply a strictly decreasing, log-spaced grid.
pub fn schedule_sweep(
    c: &VertexCoupling,
    d_values: &[f64],
    cfg: &ScheduleConfig,
) -> Result<Vec<SchedulePoint>, ScheduleError> {
    d_values.iter().map(|&d| schedule_point(c, d, cfg)).collect()
}
