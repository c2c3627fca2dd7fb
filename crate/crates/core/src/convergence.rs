//! Hilbert-Schmidt certification of norm-resolvent convergence.
//!
//! The squared HS norm of a resolvent-kernel difference,
//! `int_0^inf int_0^inf |G_A(x,y) - G_B(x,y)|^2 dx dy`, bounds the squared
//! operator norm of the resolvent difference, so driving it to zero along a
//! schedule d -> 0+ certifies convergence. The double integral is truncated
//! at `X = d + truncation_multiplier / Re(kappa)` (the integrand decays like
//! `e^{-2 Re(kappa)(x+y)}`), split into Gauss-Legendre panels with cuts at
//! the interface x = d and the diagonal x = y where the difference has
//! derivative kinks, and graded geometrically toward 0 and d where the O(1)
//! mismatch region [0, d] drives the convergence rate.

use num_complex::Complex64;
use thiserror::Error;

use crate::coupling::VertexCoupling;
use crate::kernels::{
    ClosedFormKernel, HalflineGreen, KernelError, KreinKernel, SpectralParameter,
};
use crate::quad::{graded_edges, pairwise_sum, GaussRule};
use crate::schedule::{schedule_point, ScheduleConfig, ScheduleError, SchedulePoint};

/// Geometric panel-width growth factor along each axis.
const PANEL_GROWTH: f64 = 1.35;
/// Relative change allowed when the panel order is doubled.
const SELF_CHECK_TOL: f64 = 1e-6;
/// Allowed truncation-tail fraction of the integral.
const TAIL_TOL: f64 = 1e-3;
/// Integrals below this are reported as converged zeros.
const ZERO_FLOOR: f64 = 1e-25;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConvergenceError {
    #[error("doubling the panel order changed the integral by {rel_change:.3e} relative (limit {SELF_CHECK_TOL:.0e})")]
    QuadratureNotConverged { rel_change: f64 },
    #[error("truncation tail estimate is {ratio:.3e} of the integral (limit {TAIL_TOL:.0e})")]
    TailTooLarge { ratio: f64 },
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("log-log fit needs positive values, got {value:.3e} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("invalid input: {reason}")]
    InvalidInput { reason: String },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Panel layout and order of the 2D quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    panel_order: usize,
    truncation_multiplier: f64,
    panels_per_axis: usize,
}

impl QuadratureConfig {
    pub fn new(
        panel_order: usize,
        truncation_multiplier: f64,
        panels_per_axis: usize,
    ) -> Result<QuadratureConfig, ConvergenceError> {
        if panel_order < 4 {
            return Err(ConvergenceError::InvalidInput {
                reason: format!("panel_order must be at least 4, got {panel_order}"),
            });
        }
        if !truncation_multiplier.is_finite() || truncation_multiplier < 10.0 {
            return Err(ConvergenceError::InvalidInput {
                reason: format!(
                    "truncation_multiplier must be at least 10, got {truncation_multiplier}"
                ),
            });
        }
        if panels_per_axis < 1 {
            return Err(ConvergenceError::InvalidInput {
                reason: "panels_per_axis must be positive".into(),
            });
        }
        Ok(QuadratureConfig {
            panel_order,
            truncation_multiplier,
            panels_per_axis,
        })
    }

    pub fn panel_order(&self) -> usize {
        self.panel_order
    }

    pub fn truncation_multiplier(&self) -> f64 {
        self.truncation_multiplier
    }

    pub fn panels_per_axis(&self) -> usize {
        self.panels_per_axis
    }

    /// Same layout with the panel order doubled.
    pub fn doubled_order(&self) -> QuadratureConfig {
        QuadratureConfig {
            panel_order: self.panel_order * 2,
            ..*self
        }
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panel_order: 20,
            truncation_multiplier: 40.0,
            panels_per_axis: 16,
        }
    }
}

/// Squared HS norms of the kernel differences at one schedule point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub d: f64,
    pub hs_sq_scalar: f64,
    pub hs_sq_complement: f64,
    /// hs_sq_scalar + (n-1) * hs_sq_complement, the channel multiplicities.
    pub hs_sq_total: f64,
    pub u: f64,
    pub v: f64,
}

/// Least-squares line through (log d, log value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Field selector for `fit_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordField {
    Scalar,
    Complement,
    Total,
}

impl RecordField {
    fn get(&self, r: &ConvergenceRecord) -> f64 {
        match self {
            RecordField::Scalar => r.hs_sq_scalar,
            RecordField::Complement => r.hs_sq_complement,
            RecordField::Total => r.hs_sq_total,
        }
    }
}

/// Per-channel pointwise rates of |Delta G(x, y)| against d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    pub complement: RateFit,
    pub scalar: RateFit,
}

// ---------------------------------------------------------------------------
// Hilbert-Schmidt quadrature
// ---------------------------------------------------------------------------

/// Kernel values cached on the shared axis nodes: for the separable base
/// form the value at a node pair is assembled in O(1) without exponentials.
struct NodeCache {
    /// (e^{kappa t} + r e^{-kappa t}) / (2 kappa) per node.
    profile: Vec<Complex64>,
    /// e^{-kappa t} per node.
    decay: Vec<Complex64>,
    /// base(t, d) per node, with 1/denom folded in; empty for closed kernels.
    interface: Vec<Complex64>,
}

impl NodeCache {
    fn build(kernel: &HalflineGreen, nodes: &[f64]) -> NodeCache {
        let (base, krein) = match kernel {
            HalflineGreen::Closed(k) => (k, None),
            HalflineGreen::Krein(k) => (k.base(), k.denom().map(|denom| (k.interface().0, denom))),
        };
        let kappa = base.kappa();
        let r = base.ratio();
        let inv2k = 0.5 / kappa;
        let profile: Vec<Complex64> = nodes
            .iter()
            .map(|&t| ((kappa * t).exp() + r * (-kappa * t).exp()) * inv2k)
            .collect();
        let decay: Vec<Complex64> = nodes.iter().map(|&t| (-kappa * t).exp()).collect();
        let interface = match krein {
            None => Vec::new(),
            Some((d, denom)) => {
                let profile_d = ((kappa * d).exp() + r * (-kappa * d).exp()) * inv2k;
                let decay_d = (-kappa * d).exp();
                // divide by sqrt(denom) so the pair product carries 1/denom
                nodes
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| {
                        let b = if t <= d {
                            profile[i] * decay_d
                        } else {
                            decay[i] * profile_d
                        };
                        b / denom.sqrt()
                    })
                    .collect()
            }
        };
        NodeCache {
            profile,
            decay,
            interface,
        }
    }

    /// Kernel value at (nodes[lo], nodes[hi]) with lo index below hi index.
    #[inline]
    fn value(&self, lo: usize, hi: usize) -> Complex64 {
        let base = self.decay[hi] * self.profile[lo];
        if self.interface.is_empty() {
            base
        } else {
            base + self.interface[lo] * self.interface[hi]
        }
    }
}

struct PanelGrid {
    /// Flat node positions, panel-major.
    nodes: Vec<f64>,
    /// Matching quadrature weights.
    weights: Vec<f64>,
    /// Panel edges (panel i spans edges[i]..edges[i+1]).
    edges: Vec<f64>,
    order: usize,
}

impl PanelGrid {
    fn build(edges: &[f64], order: usize) -> PanelGrid {
        let rule = GaussRule::legendre(order);
        let mut nodes = Vec::with_capacity(order * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            for (t, wt) in rule.mapped(w[0], w[1]) {
                nodes.push(t);
                weights.push(wt);
            }
        }
        PanelGrid {
            nodes,
            weights,
            edges: edges.to_vec(),
            order,
        }
    }

    fn panel_count(&self) -> usize {
        self.edges.len() - 1
    }
}

struct Integrated {
    total: f64,
    /// Mass of all cells touching the outermost panel, for the tail estimate.
    last_strip: f64,
}

/// Axis panel edges: [0, d] graded toward 0, [d, X] graded toward d.
fn axis_edges(d: f64, x_max: f64, panels_per_axis: usize) -> Vec<f64> {
    if d <= 0.0 {
        return graded_edges(0.0, x_max, panels_per_axis, PANEL_GROWTH);
    }
    let near_panels = (panels_per_axis / 4).max(2);
    let mut edges = graded_edges(0.0, d, near_panels, PANEL_GROWTH);
    edges.pop();
    edges.extend(graded_edges(d, x_max, panels_per_axis, PANEL_GROWTH));
    edges
}

fn integrate_once(a: &HalflineGreen, b: &HalflineGreen, grid: &PanelGrid) -> Integrated {
    let cache_a = NodeCache::build(a, &grid.nodes);
    let cache_b = NodeCache::build(b, &grid.nodes);
    let p = grid.panel_count();
    let m = grid.order;
    let rule01 = GaussRule::legendre(m);

    let mut contribs = Vec::with_capacity(p * (p + 1) / 2);
    let mut last_strip = 0.0;

    for i in 0..p {
        // tensor cells with the x panel strictly below the y panel
        for j in (i + 1)..p {
            let mut cell = 0.0;
            for xi in i * m..(i + 1) * m {
                let wx = grid.weights[xi];
                let mut row = 0.0;
                for yj in j * m..(j + 1) * m {
                    let diff = cache_a.value(xi, yj) - cache_b.value(xi, yj);
                    row += grid.weights[yj] * diff.norm_sqr();
                }
                cell += wx * row;
            }
            let cell = 2.0 * cell;
            contribs.push(cell);
            if j == p - 1 {
                last_strip += cell;
            }
        }
        // triangle above the diagonal inside the i-th diagonal cell,
        // integrated with the collapsed map y = x + s (t1 - x)
        let (t0, t1) = (grid.edges[i], grid.edges[i + 1]);
        let mut tri = 0.0;
        for (x, wx) in rule01.mapped(t0, t1) {
            let span = t1 - x;
            let mut inner = 0.0;
            for (s, ws) in rule01.mapped(0.0, 1.0) {
                let y = x + s * span;
                let diff = a.value(x, y) - b.value(x, y);
                inner += ws * diff.norm_sqr();
            }
            tri += wx * span * inner;
        }
        let tri = 2.0 * tri;
        contribs.push(tri);
        if i == p - 1 {
            last_strip += tri;
        }
    }

    Integrated {
        total: pairwise_sum(&contribs),
        last_strip,
    }
}

/// Squared HS norm of the difference of two kernels sharing one kappa,
/// integrated over [0, X]^2 with X = d + truncation_multiplier / Re(kappa).
///
/// The result is self-checked against a doubled panel order and against an
/// a-posteriori estimate of the truncated tail.
pub fn hs_norm_sq_diff(
    kernel_a: &HalflineGreen,
    kernel_b: &HalflineGreen,
    kappa: SpectralParameter,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, ConvergenceError> {
    let k = kappa.kappa();
    if kernel_a.kappa() != k || kernel_b.kappa() != k {
        return Err(ConvergenceError::InvalidInput {
            reason: "kernels must be built at the stated kappa".into(),
        });
    }
    if !d.is_finite() || d < 0.0 {
        return Err(ConvergenceError::InvalidInput {
            reason: format!("interface split must be a nonnegative distance, got {d}"),
        });
    }
    let x_max = d + cfg.truncation_multiplier / k.re;
    let edges = axis_edges(d, x_max, cfg.panels_per_axis);

    let coarse = integrate_once(kernel_a, kernel_b, &PanelGrid::build(&edges, cfg.panel_order));
    let fine = integrate_once(
        kernel_a,
        kernel_b,
        &PanelGrid::build(&edges, cfg.panel_order * 2),
    );

    let scale = fine.total.abs().max(coarse.total.abs());
    if scale >= ZERO_FLOOR {
        let rel_change = (fine.total - coarse.total).abs() / scale;
        if rel_change > SELF_CHECK_TOL {
            return Err(ConvergenceError::QuadratureNotConverged { rel_change });
        }
        let last_width = edges[edges.len() - 1] - edges[edges.len() - 2];
        let continuation = (-2.0 * k.re * last_width).exp();
        let tail = fine.last_strip.abs() * continuation / (1.0 - continuation);
        let ratio = tail / scale;
        if ratio > TAIL_TOL {
            return Err(ConvergenceError::TailTooLarge { ratio });
        }
    }
    Ok(fine.total)
}

// ---------------------------------------------------------------------------
// Sweeps and rate fits
// ---------------------------------------------------------------------------

/// The two channel kernel pairs (approximant, target) at one schedule point.
fn channel_kernels(
    c: &VertexCoupling,
    kappa: SpectralParameter,
    sp: &SchedulePoint,
) -> Result<[(HalflineGreen, HalflineGreen); 2], ConvergenceError> {
    let target_c = ClosedFormKernel::target_complement(kappa, c.a())?;
    let target_s = ClosedFormKernel::target_scalar(kappa, c.a(), c.b(), c.n())?;
    let approx_c = KreinKernel::new(ClosedFormKernel::dirichlet(kappa), sp.v, sp.d)?;
    let approx_s = KreinKernel::new(
        ClosedFormKernel::delta_vertex(kappa, sp.u, c.n())?,
        sp.v,
        sp.d,
    )?;
    Ok([
        (HalflineGreen::Krein(approx_s), HalflineGreen::Closed(target_s)),
        (HalflineGreen::Krein(approx_c), HalflineGreen::Closed(target_c)),
    ])
}

/// HS record at an explicitly given schedule point.
pub fn convergence_record_at(
    c: &VertexCoupling,
    kappa: SpectralParameter,
    sp: &SchedulePoint,
    qcfg: &QuadratureConfig,
) -> Result<ConvergenceRecord, ConvergenceError> {
    let [(approx_s, target_s), (approx_c, target_c)] = channel_kernels(c, kappa, sp)?;
    let hs_sq_scalar = hs_norm_sq_diff(&approx_s, &target_s, kappa, sp.d, qcfg)?;
    let hs_sq_complement = hs_norm_sq_diff(&approx_c, &target_c, kappa, sp.d, qcfg)?;
    Ok(ConvergenceRecord {
        d: sp.d,
        hs_sq_scalar,
        hs_sq_complement,
        hs_sq_total: hs_sq_scalar + (c.n() as f64 - 1.0) * hs_sq_complement,
        u: sp.u,
        v: sp.v,
    })
}

/// HS records over explicit schedule points, preserving order.
pub fn convergence_sweep_at(
    c: &VertexCoupling,
    kappa: SpectralParameter,
    points: &[SchedulePoint],
    qcfg: &QuadratureConfig,
) -> Result<Vec<ConvergenceRecord>, ConvergenceError> {
    points
        .iter()
        .map(|sp| convergence_record_at(c, kappa, sp, qcfg))
        .collect()
}

/// HS records over a distance grid with the schedule picked by the coupling
/// class. Callers fitting rates should pass a decreasing geometric grid.
pub fn convergence_sweep(
    c: &VertexCoupling,
    kappa: SpectralParameter,
    d_values: &[f64],
    scfg: &ScheduleConfig,
    qcfg: &QuadratureConfig,
) -> Result<Vec<ConvergenceRecord>, ConvergenceError> {
    d_values
        .iter()
        .map(|&d| {
            let sp = schedule_point(c, d, scfg)?;
            convergence_record_at(c, kappa, &sp, qcfg)
        })
        .collect()
}

/// Least-squares line through (log x, log y).
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<RateFit, ConvergenceError> {
    if xs.len() < 4 || xs.len() != ys.len() {
        return Err(ConvergenceError::InsufficientData {
            needed: 4,
            got: xs.len().min(ys.len()),
        });
    }
    for (i, &v) in xs.iter().chain(ys.iter()).enumerate() {
        if !v.is_finite() || v <= 0.0 {
            return Err(ConvergenceError::NonPositiveValue {
                index: i % xs.len(),
                value: v,
            });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Rate fit of a record field against d.
pub fn fit_rate(
    records: &[ConvergenceRecord],
    field: RecordField,
) -> Result<RateFit, ConvergenceError> {
    let xs: Vec<f64> = records.iter().map(|r| r.d).collect();
    let ys: Vec<f64> = records.iter().map(|r| field.get(r)).collect();
    fit_loglog(&xs, &ys)
}

/// Fit the pointwise decay of |Delta G(x, y)| against d, per channel.
pub fn pointwise_rate_probe(
    c: &VertexCoupling,
    kappa: SpectralParameter,
    x: f64,
    y: f64,
    d_values: &[f64],
    scfg: &ScheduleConfig,
) -> Result<ChannelRates, ConvergenceError> {
    if d_values.len() < 4 {
        return Err(ConvergenceError::InsufficientData {
            needed: 4,
            got: d_values.len(),
        });
    }
    let d_max = d_values.iter().copied().fold(0.0, f64::max);
    if !x.is_finite() || !y.is_finite() || x <= d_max || y <= d_max {
        return Err(ConvergenceError::InvalidInput {
            reason: format!("probe point ({x}, {y}) must lie beyond every d (max {d_max})"),
        });
    }
    let mut diff_c = Vec::with_capacity(d_values.len());
    let mut diff_s = Vec::with_capacity(d_values.len());
    for &d in d_values {
        let sp = schedule_point(c, d, scfg)?;
        let [(approx_s, target_s), (approx_c, target_c)] = channel_kernels(c, kappa, &sp)?;
        diff_s.push((approx_s.value(x, y) - target_s.value(x, y)).norm());
        diff_c.push((approx_c.value(x, y) - target_c.value(x, y)).norm());
    }
    Ok(ChannelRates {
        complement: fit_loglog(d_values, &diff_c)?,
        scalar: fit_loglog(d_values, &diff_s)?,
    })
}
