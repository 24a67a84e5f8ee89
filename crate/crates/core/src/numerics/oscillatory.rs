//! Fourier cosine transforms ∫₀^∞ f(ω) cos(ωt) dω.
//!
//! The half-line is cut into half periods [nπ/t, (n+1)π/t]. On panel n the
//! integrand is evaluated in the local phase s = ωt − nπ so that
//! cos(ωt) = (−1)^n cos(s) carries no argument-reduction error at large ωt.
//! Panels up to the last user breakpoint are summed directly; the remaining
//! alternating series is extrapolated with Wynn's epsilon algorithm.

use std::cell::Cell;
use std::f64::consts::PI;

use super::quadrature::{adaptive, neumaier, Segment};
use super::{QuadratureResult, Tolerance};
use crate::error::{Error, Result};
use crate::numerics::integrate_semi_infinite_with;

const MIN_TAIL_TERMS: usize = 6;
const EPS_WINDOW: usize = 24;
// terms that have not shrunk over this many panels mean f does not decay
const NO_DECAY_SPAN: usize = 100;
const MAX_TAIL_TERMS: usize = 4_000;

/// Cosine transform of `f` at `t >= 0`.
pub fn cosine_transform<F: Fn(f64) -> f64>(f: F, t: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    cosine_transform_with(f, t, &[], tol)
}

/// Cosine transform with panel boundaries at `breaks` (sharp features of `f`).
pub fn cosine_transform_with<F: Fn(f64) -> f64>(
    f: F,
    t: f64,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<QuadratureResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("cosine transform needs finite t >= 0, got {t}")));
    }
    if t == 0.0 {
        return integrate_semi_infinite_with(f, breaks, tol).map_err(|e| e.context("cosine transform at t = 0"));
    }
    let mut breaks: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && b.is_finite()).collect();
    breaks.sort_by(f64::total_cmp);
    let period = PI / t;
    let last = breaks.last().copied().unwrap_or(0.0);
    let head_panels = ((last / period).ceil() as usize).max(1);

    let panel_tol = Tolerance { rel: tol.rel * 0.1, abs: tol.abs * 0.01, max_evals: tol.max_evals };
    let evals = Cell::new(0usize);
    let err_sum = Cell::new(0.0);
    let panel = |n: usize| -> Result<f64> {
        let base = n as f64 * PI;
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let g = |s: f64| f((base + s) / t) * s.cos();
        let mut cuts = vec![0.0];
        for &b in &breaks {
            let s = b * t - base;
            if s > 0.0 && s < PI {
                cuts.push(s);
            }
        }
        // wide first panel: decade cuts keep the adaptive search from missing
        // features near the origin
        if n == 0 && period > 10.0 {
            let mut w = 1e-3;
            while w < period {
                cuts.push(w * t);
                w *= 10.0;
            }
        }
        cuts.push(PI);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let segments: Vec<Segment> = cuts.windows(2).map(|w| Segment::plain(w[0], w[1])).collect();
        let out = adaptive(&g, &segments, &panel_tol);
        evals.set(evals.get() + out.result.evaluations);
        err_sum.set(err_sum.get() + out.result.abs_error_estimate / t);
        if out.out_of_budget || !out.result.value.is_finite() {
            return Err(Error::NonConvergence {
                what: format!("cosine transform panel {n}"),
                evaluations: evals.get(),
                estimate: out.result.value * sign / t,
                abs_error: out.result.abs_error_estimate / t,
            });
        }
        Ok(sign * out.result.value / t)
    };

    let mut head = Vec::with_capacity(head_panels);
    for n in 0..head_panels {
        head.push(panel(n)?);
    }
    let head_sum = neumaier(head.iter().copied());

    let mut sums: Vec<f64> = Vec::new();
    let mut prev_estimate = f64::NAN;
    let mut n = head_panels;
    let mut last_terms = [f64::NAN; 2];
    let mut tail_max = 0.0f64;
    loop {
        let a = panel(n)?;
        let running = sums.last().copied().unwrap_or(head_sum) + a;
        sums.push(running);
        last_terms = [last_terms[1], a];
        tail_max = tail_max.max(a.abs());
        n += 1;
        let target = tol.target(running);
        if last_terms.iter().all(|x| x.abs() <= 1e-3 * target) {
            return Ok(QuadratureResult {
                value: running,
                abs_error_estimate: err_sum.get() + last_terms[1].abs(),
                evaluations: evals.get().max(1),
            });
        }
        if sums.len() < MIN_TAIL_TERMS {
            continue;
        }
        let len = sums.len();
        if len >= NO_DECAY_SPAN * 4 && a.abs() >= (sums[len - NO_DECAY_SPAN] - sums[len - NO_DECAY_SPAN - 1]).abs() {
            return Err(Error::NonConvergence {
                what: "cosine transform (integrand does not decay)".into(),
                evaluations: evals.get(),
                estimate: running,
                abs_error: a.abs(),
            });
        }
        let estimate = wynn_epsilon(&sums[sums.len().saturating_sub(EPS_WINDOW)..]);
        let accel_err = (estimate - prev_estimate).abs();
        // only extrapolate once the terms are visibly shrinking
        if a.abs() <= 0.5 * tail_max && accel_err <= 0.5 * tol.target(estimate) {
            return Ok(QuadratureResult {
                value: estimate,
                abs_error_estimate: err_sum.get() + accel_err,
                evaluations: evals.get().max(1),
            });
        }
        if sums.len() >= MAX_TAIL_TERMS || evals.get() > tol.max_evals {
            return Err(Error::NonConvergence {
                what: "cosine transform tail".into(),
                evaluations: evals.get(),
                estimate,
                abs_error: accel_err,
            });
        }
        prev_estimate = estimate;
    }
}

/// Wynn's epsilon algorithm on a sequence of partial sums; returns the
/// deepest even-column entry.
fn wynn_epsilon(sums: &[f64]) -> f64 {
    let mut prev = vec![0.0; sums.len() + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = *sums.last().unwrap_or(&0.0);
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                // column has converged exactly
                return if k % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            let v = *cur.last().unwrap();
            if !v.is_finite() {
                break;
            }
            best = v;
        }
    }
    best
}
