//! End-to-end checks through the public surface: the full verification
//! battery, a complete sweep with its rate fit, and the stall of a
//! deliberately mismatched schedule.

use num_complex::Complex64;
use stargreen::convergence::{
    convergence_sweep, convergence_sweep_at, fit_rate, QuadratureConfig, RecordField,
};
use stargreen::coupling::{CouplingFamily, VertexCoupling};
use stargreen::kernels::SpectralParameter;
use stargreen::schedule::{edge_strength_v, ScheduleConfig, SchedulePoint};
use stargreen::verify::{run_battery, Suite};

fn geometric_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    let ratio = (end / start).powf(1.0 / (points as f64 - 1.0));
    (0..points).map(|i| start * ratio.powi(i as i32)).collect()
}

#[test]
fn full_battery_is_green() {
    let checks = run_battery(Suite::Full);
    let mut failed = Vec::new();
    for c in &checks {
        println!(
            "{} {} {:.6e} {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
        if !c.pass {
            failed.push(c.name);
        }
    }
    assert!(failed.is_empty(), "failing checks: {failed:?}");
}

#[test]
fn generic_sweep_rate_is_first_order() {
    let c = VertexCoupling::from_family(CouplingFamily::DeltaPrimeS { beta: 1.0 }, 3).unwrap();
    let kappa = SpectralParameter::new(Complex64::new(1.0, 0.0)).unwrap();
    let records = convergence_sweep(
        &c,
        kappa,
        &geometric_grid(1e-1, 1e-3, 9),
        &ScheduleConfig::default(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    let fit = fit_rate(&records, RecordField::Total).unwrap();
    assert!(
        fit.slope > 0.8 && fit.slope < 1.2,
        "total HS^2 slope {}",
        fit.slope
    );
    assert!(fit.r_squared > 0.999, "r^2 {}", fit.r_squared);
}

#[test]
fn mismatched_schedule_stalls() {
    // strong vertex singularity applied to a coupling that needs u ~ 1/d^2
    let c = VertexCoupling::from_family(CouplingFamily::DeltaPrimeS { beta: 1.0 }, 3).unwrap();
    let kappa = SpectralParameter::new(Complex64::new(1.0, 0.0)).unwrap();
    let grid = geometric_grid(1e-1, 1e-3, 5);
    let points: Vec<SchedulePoint> = grid
        .iter()
        .map(|&d| SchedulePoint {
            d,
            u: 1.0 / (d * d * d),
            v: edge_strength_v(&c, d).unwrap(),
        })
        .collect();
    let records =
        convergence_sweep_at(&c, kappa, &points, &QuadratureConfig::default()).unwrap();
    assert!(records.last().unwrap().hs_sq_total >= 0.1 * records[0].hs_sq_total);
}
