//! Radius iteration for circle packings.
//!
//! Interior angle sums are driven to 2*pi by sweeping the uniform-neighbor
//! update (each vertex pretends its petals all share one effective radius),
//! with a guarded geometric extrapolation step every other sweep that is
//! only kept when it actually lowers the residual.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

use super::{Geometry, Packing, PackingComplex};

/// How the packing meets the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PackMode {
    /// Hyperbolic packing filling the unit disc; boundary circles become
    /// horocycles (infinite hyperbolic radius).
    DiscMaximal,
    /// Euclidean packing with prescribed boundary radii. `None` picks half
    /// the refined mesh edge length, 2^-hex_depth / 2.
    EuclideanBoundary { boundary_radius: Option<f64> },
}

impl PackMode {
    pub fn geometry(&self) -> Geometry {
        match self {
            PackMode::DiscMaximal => Geometry::Hyperbolic,
            PackMode::EuclideanBoundary { .. } => Geometry::Euclidean,
        }
    }

    pub fn word(&self) -> &'static str {
        match self {
            PackMode::DiscMaximal => "disc_maximal",
            PackMode::EuclideanBoundary { .. } => "euclidean_boundary",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Max allowed interior angle-sum deviation from 2*pi.
    pub tol: f64,
    /// Budget in sweep-equivalents; residual evaluations count too.
    pub max_sweeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_sweeps: 1_000_000,
        }
    }
}

const MIN_RADIUS: f64 = 1e-12;
const MAX_RADIUS: f64 = 1e30;
const HISTORY_KEPT: usize = 24;

/// Angle at v spanned by the tangent-circle triangle (v, u, w).
pub(crate) fn triangle_angle(geometry: Geometry, rv: f64, ru: f64, rw: f64) -> f64 {
    let s2 = match geometry {
        Geometry::Euclidean => (ru / (rv + ru)) * (rw / (rv + rw)),
        Geometry::Hyperbolic => hyp_factor(rv, ru) * hyp_factor(rv, rw),
    };
    2.0 * s2.sqrt().min(1.0).asin()
}

/// sinh(ru) / sinh(rv + ru), with the horocycle limit exp(-rv) for an
/// infinite petal. Written with expm1 so it stays accurate for tiny and
/// huge radii alike.
fn hyp_factor(rv: f64, ru: f64) -> f64 {
    if ru.is_infinite() {
        (-rv).exp()
    } else {
        let num = -(-2.0 * ru).exp_m1();
        let den = -(-2.0 * (rv + ru)).exp_m1();
        (-rv).exp() * num / den
    }
}

/// Full angle sum of the flower of v. Each petal's factor is shared by its
/// two adjacent spans, halving the transcendental work of summing
/// per-triangle angles.
pub(crate) fn angle_sum(pc: &PackingComplex, radii: &[f64], geometry: Geometry, v: usize) -> f64 {
    let flower = &pc.flowers[v];
    let petals = &flower.petals;
    let rv = radii[v];
    match geometry {
        Geometry::Euclidean => {
            accumulate_angles(petals, flower.closed, radii, |ru| ru / (rv + ru))
        }
        Geometry::Hyperbolic => {
            let ev = (-rv).exp();
            accumulate_angles(petals, flower.closed, radii, |ru| {
                if ru.is_infinite() {
                    ev
                } else {
                    let num = -(-2.0 * ru).exp_m1();
                    let den = -(-2.0 * (rv + ru)).exp_m1();
                    ev * num / den
                }
            })
        }
    }
}

fn accumulate_angles<F: Fn(f64) -> f64>(
    petals: &[usize],
    closed: bool,
    radii: &[f64],
    factor: F,
) -> f64 {
    let first = factor(radii[petals[0]]);
    let mut prev = first;
    let mut sum = 0.0;
    for &p in &petals[1..] {
        let cur = factor(radii[p]);
        sum += 2.0 * (prev * cur).sqrt().min(1.0).asin();
        prev = cur;
    }
    if closed {
        sum += 2.0 * (prev * first).sqrt().min(1.0).asin();
    }
    sum
}

/// New radius for an interior vertex whose k-petal flower currently sums
/// to theta: replace the petals by one effective radius reproducing theta,
/// then resize v so the same petals would sum to exactly 2*pi.
fn updated_radius(geometry: Geometry, rv: f64, theta: f64, k: usize) -> f64 {
    let beta = (theta / (2.0 * k as f64)).sin();
    let delta = (PI / k as f64).sin();
    match geometry {
        Geometry::Euclidean => {
            let u = beta * rv / (1.0 - beta);
            (u * (1.0 - delta) / delta).max(MIN_RADIUS)
        }
        Geometry::Hyperbolic => hyp_updated_radius(rv, beta, delta),
    }
}

fn hyp_updated_radius(rv: f64, beta: f64, delta: f64) -> f64 {
    // Effective petal radius u solves sinh(u) / sinh(rv + u) = beta, i.e.
    // tanh(u) = beta sinh(rv) / (1 - beta cosh(rv)). When that has no
    // positive solution the petals behave like horocycles and the update
    // reduces to a shift of rv.
    let t = if rv > 30.0 {
        // cosh and sinh are both ~ exp(rv)/2 here.
        let c = beta * (rv - std::f64::consts::LN_2).exp();
        if c >= 0.5 {
            f64::INFINITY
        } else {
            c / (1.0 - c)
        }
    } else {
        let denom = 1.0 - beta * rv.cosh();
        if denom <= 0.0 {
            f64::INFINITY
        } else {
            beta * rv.sinh() / denom
        }
    };
    let r_new = if t >= 1.0 {
        rv + (beta / delta).ln()
    } else {
        let u = t.atanh();
        if u > 30.0 {
            -delta.ln()
        } else {
            (u.sinh() / delta).asinh() - u
        }
    };
    r_new.max(MIN_RADIUS)
}

fn max_residual(pc: &PackingComplex, radii: &[f64], geometry: Geometry) -> f64 {
    let mut worst = 0.0f64;
    for v in pc.interior_vertices() {
        let err = (angle_sum(pc, radii, geometry, v) - TAU).abs();
        if !err.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max(err);
    }
    worst
}

/// One Gauss-Seidel pass over the interior, returning the worst pre-update
/// angle-sum deviation seen during the pass (a running-state residual; the
/// solver confirms convergence with a clean `max_residual` pass).
fn gauss_seidel_sweep(
    pc: &PackingComplex,
    radii: &mut [f64],
    geometry: Geometry,
    interior: &[usize],
) -> f64 {
    let mut worst = 0.0f64;
    for &v in interior {
        let theta = angle_sum(pc, radii, geometry, v);
        if !theta.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max((theta - TAU).abs());
        radii[v] = updated_radius(geometry, radii[v], theta, pc.flowers[v].petals.len());
    }
    worst
}

/// Solves for packing radii with the given boundary treatment. Interior
/// angle sums end within `opts.tol` of 2*pi or the iteration budget is
/// exhausted with `Error::NonConvergence`.
pub fn solve_radii(pc: &PackingComplex, mode: PackMode, opts: &SolveOptions) -> Result<Packing> {
    let geometry = mode.geometry();
    let n = pc.vertex_count();
    let interior: Vec<usize> = pc.interior_vertices().collect();
    if interior.is_empty() {
        return Err(Error::Topology(
            "triangulation has no interior vertex to solve for".into(),
        ));
    }

    let mut radii = vec![0.0f64; n];
    match mode {
        PackMode::DiscMaximal => {
            for v in 0..n {
                radii[v] = if pc.is_boundary[v] { f64::INFINITY } else { 0.5 };
            }
        }
        PackMode::EuclideanBoundary { boundary_radius } => {
            let b = boundary_radius.unwrap_or_else(|| 0.5 * 0.5f64.powi(pc.hex_depth as i32));
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Layout(format!("boundary radius {b} must be positive")));
            }
            radii.fill(b);
        }
    }

    let mut history: Vec<f64> = Vec::new();
    let mut prev = radii.clone();
    let mut candidate = radii.clone();
    let mut budget = 0usize;
    let mut last_res = f64::INFINITY;
    let mut sweep_index = 0usize;

    loop {
        prev.copy_from_slice(&radii);
        let mut res = gauss_seidel_sweep(pc, &mut radii, geometry, &interior);
        budget += 1;
        sweep_index += 1;
        push_history(&mut history, res);
        if res <= opts.tol {
            let clean = max_residual(pc, &radii, geometry);
            budget += 1;
            if clean <= opts.tol {
                return Ok(done(geometry, radii, clean, budget));
            }
            res = clean;
        }

        // Guarded extrapolation: treat the per-sweep contraction as
        // geometric and jump the whole remaining series in log space. The
        // candidate is judged by sweeping it, so the evaluation also
        // advances the iteration when the jump is kept.
        if sweep_index % 2 == 0 && res < last_res && budget + 1 < opts.max_sweeps {
            let lambda = (res / last_res).min(0.99);
            let factor = (lambda / (1.0 - lambda)).min(1000.0);
            for v in 0..n {
                candidate[v] = if radii[v].is_finite() && prev[v].is_finite() {
                    (radii[v] * (radii[v] / prev[v]).powf(factor)).clamp(MIN_RADIUS, MAX_RADIUS)
                } else {
                    radii[v]
                };
            }
            let cres = gauss_seidel_sweep(pc, &mut candidate, geometry, &interior);
            budget += 1;
            if cres < res {
                std::mem::swap(&mut radii, &mut candidate);
                res = cres;
                push_history(&mut history, res);
                if res <= opts.tol {
                    let clean = max_residual(pc, &radii, geometry);
                    budget += 1;
                    if clean <= opts.tol {
                        return Ok(done(geometry, radii, clean, budget));
                    }
                    res = clean;
                }
            }
        }

        last_res = res;
        if budget >= opts.max_sweeps {
            return Err(Error::NonConvergence {
                residual: res,
                iterations: budget,
                history,
            });
        }
    }
}

fn push_history(history: &mut Vec<f64>, res: f64) {
    if history.len() == HISTORY_KEPT {
        history.remove(0);
    }
    history.push(res);
}

fn done(geometry: Geometry, radii: Vec<f64>, residual: f64, sweeps: usize) -> Packing {
    Packing {
        geometry,
        radii,
        residual,
        sweeps,
        positions: None,
        circles: None,
        layout_gap: 0.0,
    }
}
