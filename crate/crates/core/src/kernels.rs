//! Closed-form half-line resolvent kernels and their rank-one perturbations.
//!
//! Every base kernel here is the Green function of -d^2/dx^2 + kappa^2 on the
//! half-line with some boundary condition `c0 psi(0) + c1 psi'(0) = 0` at the
//! origin, and takes the separable form
//!
//! ```text
//! G(x, y) = phi(x_<) e^{-kappa x_>} / (kappa (p + q)),
//! phi(t)  = p sinh(kappa t) + q cosh(kappa t),
//! ```
//!
//! with x_< = min(x,y), x_> = max(x,y). A delta interaction of strength v at
//! x = d is a rank-one (Krein) perturbation,
//!
//! ```text
//! G_v(x, y) = G(x, y) + G(x, d) G(d, y) / (-1/v - G(d, d)).
//! ```
//!
//! Evaluation is done in the regrouped form
//! `(e^{-kappa(x_> - x_<)} + r e^{-kappa(x_> + x_<)}) / (2 kappa)` with
//! r = (q-p)/(p+q), so every exponential decays and no overflow can occur.
//! Derivatives are analytic, one-sided at the kink points x = y and x = d.

use num_complex::Complex64;
use thiserror::Error;

use crate::coupling::DEFAULT_TOL_CLASS;
use crate::schedule::SchedulePoint;

/// Exponent threshold beyond which kernels report a flagged underflow.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;
/// Absolute floor below which a kernel denominator counts as singular.
pub const SINGULAR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("kernel denominator modulus {modulus:.3e} is singular at this kappa")]
    SingularDenominator { modulus: f64 },
    #[error("invalid kernel query: {reason}")]
    InvalidQuery { reason: String },
}

/// Spectral parameter kappa = -ik with Re(kappa) > 0; the resolvent is
/// evaluated at energy k^2 = -kappa^2, off the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter(Complex64);

impl SpectralParameter {
    pub fn new(kappa: Complex64) -> Result<SpectralParameter, KernelError> {
        if !kappa.re.is_finite() || !kappa.im.is_finite() || kappa.re <= 0.0 {
            return Err(KernelError::InvalidQuery {
                reason: format!("kappa must have positive finite real part, got {kappa}"),
            });
        }
        Ok(SpectralParameter(kappa))
    }

    pub fn kappa(&self) -> Complex64 {
        self.0
    }
}

/// Evaluation point of a kernel: positions x, y >= 0 at spectral parameter kappa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub kappa: SpectralParameter,
    pub x: f64,
    pub y: f64,
}

impl KernelQuery {
    pub fn new(kappa: SpectralParameter, x: f64, y: f64) -> Result<KernelQuery, KernelError> {
        if !x.is_finite() || !y.is_finite() || x < 0.0 || y < 0.0 {
            return Err(KernelError::InvalidQuery {
                reason: format!("positions must be finite and nonnegative, got x={x}, y={y}"),
            });
        }
        Ok(KernelQuery { kappa, x, y })
    }
}

/// Kernel value and its analytic x-derivative.
///
/// `underflowed` is set when an exponential factor exceeded the
/// representable range and the affected contribution was clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub g: Complex64,
    pub dg_dx: Complex64,
    pub underflowed: bool,
}

/// One-sided limit selector for derivatives at kink points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Base kernel `phi(x_<) e^{-kappa x_>} / (kappa (p + q))` with
/// `phi(t) = p sinh(kappa t) + q cosh(kappa t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormKernel {
    kappa: Complex64,
    p: Complex64,
    q: Complex64,
    /// (q - p)/(p + q), precomputed.
    ratio: Complex64,
}

impl ClosedFormKernel {
    fn from_pq(kappa: Complex64, p: Complex64, q: Complex64) -> Result<Self, KernelError> {
        let denom = kappa * (p + q);
        if denom.norm() < SINGULAR_FLOOR {
            return Err(KernelError::SingularDenominator {
                modulus: denom.norm(),
            });
        }
        Ok(ClosedFormKernel {
            kappa,
            p,
            q,
            ratio: (q - p) / (p + q),
        })
    }

    /// Boundary condition psi(0) = 0.
    pub fn dirichlet(kappa: SpectralParameter) -> ClosedFormKernel {
        // p = 1, q = 0 is never singular for Re(kappa) > 0
        Self::from_pq(kappa.kappa(), Complex64::new(1.0, 0.0), ZERO).unwrap()
    }

    /// Boundary condition psi'(0) = 0.
    pub fn neumann(kappa: SpectralParameter) -> ClosedFormKernel {
        Self::from_pq(kappa.kappa(), ZERO, Complex64::new(1.0, 0.0)).unwrap()
    }

    /// Generic two-term boundary condition c0 psi(0) + c1 psi'(0) = 0.
    pub fn from_two_term_bc(
        kappa: SpectralParameter,
        c0: Complex64,
        c1: Complex64,
    ) -> Result<ClosedFormKernel, KernelError> {
        let i = Complex64::i();
        Self::from_pq(kappa.kappa(), i * c0, -i * kappa.kappa() * c1)
    }

    /// Scalar channel of a delta vertex of strength u on n edges:
    /// psi'(0) = (u/n) psi(0).
    pub fn delta_vertex(
        kappa: SpectralParameter,
        u: f64,
        n: u32,
    ) -> Result<ClosedFormKernel, KernelError> {
        let ratio = Complex64::new(u / n as f64, 0.0);
        Self::from_pq(kappa.kappa(), ratio, Complex64::new(1.0, 0.0) * kappa.kappa())
    }

    /// Complement channel of the target coupling:
    /// (a-1) psi(0) + i(a+1) psi'(0) = 0. Degenerates exactly to the
    /// Dirichlet kernel as a -> -1.
    pub fn target_complement(
        kappa: SpectralParameter,
        a: Complex64,
    ) -> Result<ClosedFormKernel, KernelError> {
        Self::from_two_term_bc(kappa, a - 1.0, Complex64::i() * (a + 1.0))
    }

    /// Scalar channel of the target coupling with w = a + nb:
    /// (w-1) psi(0) + i(w+1) psi'(0) = 0.
    ///
    /// The delta_p limit w = -1 is dispatched to the Dirichlet coefficients,
    /// which is the exact algebraic limit of the formula.
    pub fn target_scalar(
        kappa: SpectralParameter,
        a: Complex64,
        b: Complex64,
        n: u32,
    ) -> Result<ClosedFormKernel, KernelError> {
        let w = a + b * n as f64;
        if (w + 1.0).norm() <= DEFAULT_TOL_CLASS {
            return Ok(Self::dirichlet(kappa));
        }
        Self::from_two_term_bc(kappa, w - 1.0, Complex64::i() * (w + 1.0))
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub(crate) fn ratio(&self) -> Complex64 {
        self.ratio
    }

    /// Kernel value; bool flags a clamped underflow.
    pub fn value(&self, x: f64, y: f64) -> (Complex64, bool) {
        let lo = x.min(y);
        let hi = x.max(y);
        if self.kappa.re * hi > UNDERFLOW_EXPONENT {
            return (ZERO, true);
        }
        let e_diff = (-self.kappa * (hi - lo)).exp();
        let e_sum = (-self.kappa * (hi + lo)).exp();
        ((e_diff + self.ratio * e_sum) / (2.0 * self.kappa), false)
    }

    /// Analytic x-derivative; `side` picks the one-sided limit when x = y.
    pub fn deriv_x(&self, x: f64, y: f64, side: Side) -> (Complex64, bool) {
        let hi = x.max(y);
        if self.kappa.re * hi > UNDERFLOW_EXPONENT {
            return (ZERO, true);
        }
        let below = x < y || (x == y && side == Side::Minus);
        let val = if below {
            // d/dx of phi(x) e^{-kappa y} / N
            let e_diff = (-self.kappa * (y - x)).exp();
            let e_sum = (-self.kappa * (y + x)).exp();
            (e_diff - self.ratio * e_sum) / 2.0
        } else {
            // d/dx of phi(y) e^{-kappa x} / N
            let e_diff = (-self.kappa * (x - y)).exp();
            let e_sum = (-self.kappa * (x + y)).exp();
            -(e_diff + self.ratio * e_sum) / 2.0
        };
        (val, false)
    }
}

/// Rank-one perturbation of a base kernel by a delta of strength v at x = d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KreinKernel {
    base: ClosedFormKernel,
    v: f64,
    d: f64,
    /// -1/v - G(d, d); `None` when v = 0 and the base passes through.
    denom: Option<Complex64>,
}

impl KreinKernel {
    pub fn new(base: ClosedFormKernel, v: f64, d: f64) -> Result<KreinKernel, KernelError> {
        if !d.is_finite() || d <= 0.0 {
            return Err(KernelError::InvalidQuery {
                reason: format!("interface distance must be positive, got {d}"),
            });
        }
        if v == 0.0 {
            return Ok(KreinKernel {
                base,
                v,
                d,
                denom: None,
            });
        }
        let (gdd, _) = base.value(d, d);
        let denom = -Complex64::new(1.0 / v, 0.0) - gdd;
        if denom.norm() < SINGULAR_FLOOR {
            return Err(KernelError::SingularDenominator {
                modulus: denom.norm(),
            });
        }
        Ok(KreinKernel {
            base,
            v,
            d,
            denom: Some(denom),
        })
    }

    pub fn base(&self) -> &ClosedFormKernel {
        &self.base
    }

    pub fn interface(&self) -> (f64, f64) {
        (self.d, self.v)
    }

    pub(crate) fn denom(&self) -> Option<Complex64> {
        self.denom
    }

    pub fn value(&self, x: f64, y: f64) -> (Complex64, bool) {
        let (g0, uf0) = self.base.value(x, y);
        match self.denom {
            None => (g0, uf0),
            Some(denom) => {
                let (gxd, uf1) = self.base.value(x, self.d);
                let (gdy, uf2) = self.base.value(self.d, y);
                (g0 + gxd * gdy / denom, uf0 || uf1 || uf2)
            }
        }
    }

    /// Analytic x-derivative; `side` resolves the kink at whichever of
    /// x = y, x = d the point sits on.
    pub fn deriv_x(&self, x: f64, y: f64, side: Side) -> (Complex64, bool) {
        let (dg0, uf0) = self.base.deriv_x(x, y, side);
        match self.denom {
            None => (dg0, uf0),
            Some(denom) => {
                let (dgxd, uf1) = self.base.deriv_x(x, self.d, side);
                let (gdy, uf2) = self.base.value(self.d, y);
                (dg0 + dgxd * gdy / denom, uf0 || uf1 || uf2)
            }
        }
    }
}

/// A half-line Green function of either family, evaluable at any (x, y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalflineGreen {
    Closed(ClosedFormKernel),
    Krein(KreinKernel),
}

impl HalflineGreen {
    pub fn kappa(&self) -> Complex64 {
        match self {
            HalflineGreen::Closed(k) => k.kappa(),
            HalflineGreen::Krein(k) => k.base().kappa(),
        }
    }

    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        match self {
            HalflineGreen::Closed(k) => k.value(x, y).0,
            HalflineGreen::Krein(k) => k.value(x, y).0,
        }
    }

    pub fn deriv_x(&self, x: f64, y: f64, side: Side) -> Complex64 {
        match self {
            HalflineGreen::Closed(k) => k.deriv_x(x, y, side).0,
            HalflineGreen::Krein(k) => k.deriv_x(x, y, side).0,
        }
    }

    /// Kink locations of the x-derivative for a source at y.
    fn kinks(&self, y: f64) -> Vec<f64> {
        match self {
            HalflineGreen::Closed(_) => vec![y],
            HalflineGreen::Krein(k) => vec![y, k.d],
        }
    }

    /// Evaluate value and derivative with the default side convention:
    /// at a kink the limit is taken from the side facing away from the
    /// nearest other special point (the other kink, or the origin).
    pub fn eval(&self, x: f64, y: f64) -> KernelValue {
        let kinks = self.kinks(y);
        let side = auto_side(x, &kinks);
        self.eval_sided(x, y, side)
    }

    pub fn eval_sided(&self, x: f64, y: f64, side: Side) -> KernelValue {
        let (g, uf_g, dg, uf_d) = match self {
            HalflineGreen::Closed(k) => {
                let (g, a) = k.value(x, y);
                let (dg, b) = k.deriv_x(x, y, side);
                (g, a, dg, b)
            }
            HalflineGreen::Krein(k) => {
                let (g, a) = k.value(x, y);
                let (dg, b) = k.deriv_x(x, y, side);
                (g, a, dg, b)
            }
        };
        KernelValue {
            g,
            dg_dx: dg,
            underflowed: uf_g || uf_d,
        }
    }
}

fn auto_side(x: f64, kinks: &[f64]) -> Side {
    if !kinks.contains(&x) {
        // derivative is smooth here; the branch picked by comparison is exact
        return Side::Plus;
    }
    let nearest_other = kinks
        .iter()
        .copied()
        .chain(std::iter::once(0.0))
        .filter(|&t| t != x)
        .min_by(|a, b| {
            ((a - x).abs())
                .partial_cmp(&(b - x).abs())
                .expect("finite kinks")
        });
    match nearest_other {
        Some(t) if t > x => Side::Minus,
        _ => Side::Plus,
    }
}

// ---------------------------------------------------------------------------
// Free-function surface used by the CLI and the convergence module.
// ---------------------------------------------------------------------------

/// Dirichlet half-line kernel sinh(kappa x_<) e^{-kappa x_>} / kappa.
pub fn dirichlet_kernel(q: &KernelQuery) -> KernelValue {
    HalflineGreen::Closed(ClosedFormKernel::dirichlet(q.kappa)).eval(q.x, q.y)
}

/// Rank-one perturbation of `base` by a delta of strength v at x = d,
/// evaluated at the query point. v = 0 returns the base kernel unchanged.
pub fn krein_perturb(
    base: &ClosedFormKernel,
    v: f64,
    d: f64,
    q: &KernelQuery,
) -> Result<KernelValue, KernelError> {
    let k = KreinKernel::new(*base, v, d)?;
    Ok(HalflineGreen::Krein(k).eval(q.x, q.y))
}

/// Complement-channel target kernel for boundary parameter a.
pub fn target_complement_kernel(
    a: Complex64,
    q: &KernelQuery,
) -> Result<KernelValue, KernelError> {
    let k = ClosedFormKernel::target_complement(q.kappa, a)?;
    Ok(HalflineGreen::Closed(k).eval(q.x, q.y))
}

/// Scalar-channel kernel of a pure delta vertex of strength u on n edges.
pub fn delta_vertex_kernel(u: f64, n: u32, q: &KernelQuery) -> Result<KernelValue, KernelError> {
    let k = ClosedFormKernel::delta_vertex(q.kappa, u, n)?;
    Ok(HalflineGreen::Closed(k).eval(q.x, q.y))
}

/// Scalar-channel target kernel for coupling parameters (a, b, n).
pub fn target_scalar_kernel(
    a: Complex64,
    b: Complex64,
    n: u32,
    q: &KernelQuery,
) -> Result<KernelValue, KernelError> {
    let k = ClosedFormKernel::target_scalar(q.kappa, a, b, n)?;
    Ok(HalflineGreen::Closed(k).eval(q.x, q.y))
}

/// Complement channel of the approximating operator: Dirichlet base with the
/// edge interaction (v, d) of the schedule point.
pub fn approx_complement_kernel(
    sp: &SchedulePoint,
    q: &KernelQuery,
) -> Result<KernelValue, KernelError> {
    let base = ClosedFormKernel::dirichlet(q.kappa);
    krein_perturb(&base, sp.v, sp.d, q)
}

/// Scalar channel of the approximating operator: delta vertex of strength u
/// with the edge interaction (v, d) of the schedule point.
pub fn approx_scalar_kernel(
    sp: &SchedulePoint,
    n: u32,
    q: &KernelQuery,
) -> Result<KernelValue, KernelError> {
    let base = ClosedFormKernel::delta_vertex(q.kappa, sp.u, n)?;
    krein_perturb(&base, sp.v, sp.d, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn kp(re: f64, im: f64) -> SpectralParameter {
        SpectralParameter::new(Complex64::new(re, im)).unwrap()
    }

    fn query(kappa: SpectralParameter, x: f64, y: f64) -> KernelQuery {
        KernelQuery::new(kappa, x, y).unwrap()
    }

    fn rel_err(got: Complex64, want: Complex64) -> f64 {
        (got - want).norm() / want.norm().max(1e-30)
    }

    #[test]
    fn dirichlet_vanishes_at_origin() {
        for kappa in [kp(1.0, 0.0), kp(2.0, 0.5)] {
            let v = dirichlet_kernel(&query(kappa, 0.0, 0.7));
            assert_eq!(v.g, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn kernels_are_symmetric() {
        let mut rng = StdRng::seed_from_u64(11);
        let kappa = kp(1.3, 0.4);
        let sp = SchedulePoint {
            d: 0.2,
            u: -3.0,
            v: -5.0,
        };
        for _ in 0..50 {
            let x = rng.gen_range(0.0..3.0);
            let y = rng.gen_range(0.0..3.0);
            let a = dirichlet_kernel(&query(kappa, x, y)).g;
            let b = dirichlet_kernel(&query(kappa, y, x)).g;
            assert_eq!(a, b);
            let a = approx_scalar_kernel(&sp, 3, &query(kappa, x, y)).unwrap().g;
            let b = approx_scalar_kernel(&sp, 3, &query(kappa, y, x)).unwrap().g;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_strength_perturbation_is_identity() {
        let mut rng = StdRng::seed_from_u64(12);
        let kappa = kp(1.0, 0.0);
        let base = ClosedFormKernel::dirichlet(kappa);
        for _ in 0..20 {
            let q = query(kappa, rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let perturbed = krein_perturb(&base, 0.0, 0.3, &q).unwrap();
            let plain = dirichlet_kernel(&q);
            assert_eq!(perturbed.g, plain.g);
            assert_eq!(perturbed.dg_dx, plain.dg_dx);
        }
    }

    #[test]
    fn perturbed_dirichlet_still_vanishes_at_origin() {
        let kappa = kp(1.0, 0.0);
        let base = ClosedFormKernel::dirichlet(kappa);
        for v in [-10.0, 3.0] {
            for y in [0.05, 0.4, 2.0] {
                let val = krein_perturb(&base, v, 0.1, &query(kappa, 0.0, y)).unwrap();
                assert!(val.g.norm() < 1e-16);
            }
        }
    }

    #[test]
    fn interface_jump_matches_strength() {
        let kappa = kp(1.0, 0.0);
        let d = 0.3;
        let v = -7.0;
        let base = ClosedFormKernel::dirichlet(kappa);
        let k = KreinKernel::new(base, v, d).unwrap();
        for y in [0.9, 1.7] {
            let plus = k.deriv_x(d, y, Side::Plus).0;
            let minus = k.deriv_x(d, y, Side::Minus).0;
            let g_dy = k.value(d, y).0;
            let jump = plus - minus;
            assert!(
                rel_err(jump, g_dy * v) < 1e-10,
                "jump {jump} vs v*g {}",
                g_dy * v
            );
        }
    }

    #[test]
    fn neumann_reduction_of_complement() {
        // a = 1 kills the sinh coefficient
        let kappa = kp(1.7, 0.3);
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let q = query(kappa, rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let got = target_complement_kernel(Complex64::new(1.0, 0.0), &q).unwrap();
            let want = HalflineGreen::Closed(ClosedFormKernel::neumann(kappa)).eval(q.x, q.y);
            assert!(rel_err(got.g, want.g) < 1e-14);
        }
    }

    #[test]
    fn complement_boundary_residual_vanishes() {
        let kappa = kp(1.0, 0.0);
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..50 {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let a = Complex64::from_polar(1.0, theta);
            if (a + 1.0).norm() < 1e-3 {
                continue;
            }
            let y = rng.gen_range(0.1..2.0);
            let kv = target_complement_kernel(a, &query(kappa, 0.0, y)).unwrap();
            let residual = (a - 1.0) * kv.g + Complex64::i() * (a + 1.0) * kv.dg_dx;
            let scale = kv.g.norm().max(kv.dg_dx.norm());
            assert!(residual.norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn delta_vertex_reductions_and_residual() {
        let kappa = kp(1.0, 0.0);
        let q = query(kappa, 0.4, 1.1);
        // u = 0 -> Neumann
        let got = delta_vertex_kernel(0.0, 3, &q).unwrap();
        let want = HalflineGreen::Closed(ClosedFormKernel::neumann(kappa)).eval(q.x, q.y);
        assert!(rel_err(got.g, want.g) < 1e-14);

        // Robin residual psi'(0) - (u/n) psi(0) = 0
        for (u, n) in [(3.0, 3u32), (-20.0, 2), (150.0, 5)] {
            for y in [0.2, 1.0, 2.4] {
                let kv = delta_vertex_kernel(u, n, &query(kappa, 0.0, y)).unwrap();
                let residual = kv.dg_dx - Complex64::new(u / n as f64, 0.0) * kv.g;
                assert!(residual.norm() <= 1e-12 * kv.g.norm().max(1.0));
            }
        }
    }

    #[test]
    fn scalar_target_limits() {
        let kappa = kp(1.0, 0.0);
        let q = query(kappa, 0.6, 1.3);
        // a + nb = 1 -> Neumann (delta_prime family)
        let a = Complex64::new(3.0, 2.0) / Complex64::new(-3.0, 2.0);
        let b = Complex64::new(2.0, 0.0) / Complex64::new(3.0, -2.0);
        let got = target_scalar_kernel(a, b, 3, &q).unwrap();
        let want = HalflineGreen::Closed(ClosedFormKernel::neumann(kappa)).eval(q.x, q.y);
        assert!(rel_err(got.g, want.g) < 1e-13);

        // a + nb = -1 -> Dirichlet (delta_p family)
        let a = Complex64::new(2.0, -1.0) / Complex64::new(2.0, 1.0);
        let b = Complex64::new(-2.0, 0.0) / Complex64::new(2.0, 1.0);
        let got = target_scalar_kernel(a, b, 2, &q).unwrap();
        let want = dirichlet_kernel(&q);
        assert!(rel_err(got.g, want.g) < 1e-13);
    }

    #[test]
    fn scalar_target_boundary_residual() {
        let kappa = kp(1.0, 0.0);
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..50 {
            let a = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            if (w + 1.0).norm() < 1e-3 {
                continue;
            }
            let n = rng.gen_range(2..6u32);
            let b = (w - a) / n as f64;
            let y = rng.gen_range(0.1..2.0);
            let kv = target_scalar_kernel(a, b, n, &query(kappa, 0.0, y)).unwrap();
            let residual = (w - 1.0) * kv.g + Complex64::i() * (w + 1.0) * kv.dg_dx;
            assert!(residual.norm() <= 1e-12 * kv.g.norm().max(kv.dg_dx.norm()).max(1.0));
        }
    }

    #[test]
    fn normalization_jump_is_minus_one() {
        let mut rng = StdRng::seed_from_u64(16);
        for kappa in [kp(1.0, 0.0), kp(2.0, 0.0), kp(1.0, 0.5)] {
            let sp = SchedulePoint {
                d: 0.25,
                u: -16.0,
                v: -4.0,
            };
            let kernels: Vec<HalflineGreen> = vec![
                HalflineGreen::Closed(ClosedFormKernel::dirichlet(kappa)),
                HalflineGreen::Closed(ClosedFormKernel::neumann(kappa)),
                HalflineGreen::Closed(
                    ClosedFormKernel::target_complement(kappa, Complex64::new(0.0, -1.0)).unwrap(),
                ),
                HalflineGreen::Closed(ClosedFormKernel::delta_vertex(kappa, -8.0, 2).unwrap()),
                HalflineGreen::Krein(
                    KreinKernel::new(ClosedFormKernel::dirichlet(kappa), sp.v, sp.d).unwrap(),
                ),
                HalflineGreen::Krein(
                    KreinKernel::new(
                        ClosedFormKernel::delta_vertex(kappa, sp.u, 2).unwrap(),
                        sp.v,
                        sp.d,
                    )
                    .unwrap(),
                ),
            ];
            for k in &kernels {
                for _ in 0..5 {
                    let y = rng.gen_range(0.1..2.5);
                    let jump = k.deriv_x(y, y, Side::Plus) - k.deriv_x(y, y, Side::Minus);
                    assert!(
                        (jump + 1.0).norm() < 1e-10,
                        "jump {jump} for kernel {k:?} at y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn ode_defect_by_finite_differences() {
        // -g'' + kappa^2 g = 0 away from the source and the interface
        let mut rng = StdRng::seed_from_u64(17);
        let kappa = kp(1.0, 0.25);
        let kk = kappa.kappa();
        let sp = SchedulePoint {
            d: 0.31,
            u: -9.0,
            v: -3.2,
        };
        let kernels: Vec<HalflineGreen> = vec![
            HalflineGreen::Closed(ClosedFormKernel::dirichlet(kappa)),
            HalflineGreen::Closed(
                ClosedFormKernel::target_complement(kappa, Complex64::new(0.6, 0.8)).unwrap(),
            ),
            HalflineGreen::Krein(
                KreinKernel::new(
                    ClosedFormKernel::delta_vertex(kappa, sp.u, 3).unwrap(),
                    sp.v,
                    sp.d,
                )
                .unwrap(),
            ),
        ];
        for k in &kernels {
            let mut checked = 0;
            while checked < 50 {
                let x: f64 = rng.gen_range(0.05..3.0);
                let y: f64 = rng.gen_range(0.05..3.0);
                let h = 1e-4 * x.max(1.0);
                // keep the stencil away from the kinks
                if (x - y).abs() < 3.0 * h || (x - sp.d).abs() < 3.0 * h || x < 2.0 * h {
                    continue;
                }
                checked += 1;
                let g0 = k.value(x, y);
                let gp = k.value(x + h, y);
                let gm = k.value(x - h, y);
                let second = (gp - 2.0 * g0 + gm) / (h * h);
                let defect = -second + kk * kk * g0;
                assert!(
                    defect.norm() <= 1e-4 * (1.0 + g0.norm()),
                    "defect {} at x={x} y={y}",
                    defect.norm()
                );
            }
        }
    }

    #[test]
    fn exponential_decay_bound() {
        let kappa = kp(1.0, 0.0);
        let k = HalflineGreen::Closed(
            ClosedFormKernel::target_complement(kappa, Complex64::new(0.0, -1.0)).unwrap(),
        );
        // measure the constant on a grid, then check random points
        let mut cmax: f64 = 0.0;
        for i in 1..20 {
            for j in 1..20 {
                let (x, y) = (0.2 * i as f64, 0.2 * j as f64);
                let bound = (-(x - y).abs()).exp();
                cmax = cmax.max(k.value(x, y).norm() / bound);
            }
        }
        let mut rng = StdRng::seed_from_u64(18);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(0.0..4.0);
            let y: f64 = rng.gen_range(0.0..4.0);
            let bound = (-(x - y).abs()).exp();
            assert!(k.value(x, y).norm() <= 1.0001 * cmax * bound);
        }
    }

    #[test]
    fn far_field_underflow_is_flagged() {
        let kappa = kp(1.0, 0.0);
        let kv = dirichlet_kernel(&query(kappa, 0.5, 800.0));
        assert!(kv.underflowed);
        assert_eq!(kv.g, Complex64::new(0.0, 0.0));
        assert!(kv.g.is_finite() && kv.dg_dx.is_finite());
    }

    #[test]
    fn singular_denominator_is_reported() {
        // u/n + kappa = 0 at kappa = 1, u = -2, n = 2
        let kappa = kp(1.0, 0.0);
        let err = ClosedFormKernel::delta_vertex(kappa, -2.0, 2).unwrap_err();
        assert!(matches!(err, KernelError::SingularDenominator { .. }));
    }
}
