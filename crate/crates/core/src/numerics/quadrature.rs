//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The engine works on a list of finite segments, each carrying the map that
//! turns it into a piece of the original integral. Semi-infinite tails use
//! x = origin + scale (1/u - 1), u in (0, 1]; principal values fold the
//! integrand about the pole, f(p + s) + f(p - s), which cancels the 1/(x - p)
//! part exactly and leaves a regular integrand on [0, h].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{QuadratureResult, Tolerance};
use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_609_479,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const EVALS_PER_RULE: usize = 21;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Map {
    Identity,
    Tail { origin: f64, scale: f64 },
    Fold { center: f64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub map: Map,
}

impl Segment {
    pub fn plain(a: f64, b: f64) -> Self {
        Segment { a, b, map: Map::Identity }
    }
}

/// Mapped integrand value and the magnitude its roundoff scales with.
#[inline]
fn eval_mapped<F: Fn(f64) -> f64>(f: &F, map: Map, x: f64) -> (f64, f64) {
    match map {
        Map::Identity => {
            let v = f(x);
            (v, v.abs())
        }
        Map::Tail { origin, scale } => {
            if x <= 0.0 {
                return (0.0, 0.0);
            }
            let w = origin + scale * (1.0 / x - 1.0);
            let v = f(w) * scale / (x * x);
            (v, v.abs())
        }
        Map::Fold { center } => {
            let (l, r) = (f(center + x), f(center - x));
            (l + r, l.abs() + r.abs())
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    map: Map,
    value: f64,
    error: f64,
    // error already at the roundoff floor of this piece
    floor: bool,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, seg: Segment) -> Piece {
    let Segment { a, b, map } = seg;
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (f_center, m_center) = eval_mapped(f, map, center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = m_center * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, m1) = eval_mapped(f, map, center - dx);
        let (f2, m2) = eval_mapped(f, map, center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (m1 + m2);
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * res_abs;
    let floor = err <= round;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(round);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Piece { a, b, map, value, error: err, floor }
}

/// Kahan–Neumaier sum.
pub(crate) fn neumaier<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Outcome of the engine before the caller decides what counts as failure.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub result: QuadratureResult,
    pub converged: bool,
    pub out_of_budget: bool,
}

pub(crate) fn adaptive<F: Fn(f64) -> f64>(f: &F, segments: &[Segment], tol: &Tolerance) -> Outcome {
    let mut heap = BinaryHeap::new();
    // pieces that cannot be improved: at their roundoff floor, or too narrow to split
    let mut settled: Vec<Piece> = Vec::new();
    let mut evals = 0usize;
    let mut value_run = 0.0;
    let mut err_run = 0.0;
    let mut floor_run = 0.0;
    for seg in segments {
        if seg.b > seg.a {
            let p = gauss_kronrod(f, *seg);
            value_run += p.value;
            err_run += p.error;
            heap.push(p);
            evals += EVALS_PER_RULE;
        }
    }
    // total value, total error, and the error that refinement could still reduce
    let exact = |heap: &BinaryHeap<Piece>, settled: &[Piece]| {
        let all = || heap.iter().chain(settled.iter());
        let total = neumaier(all().map(|p| p.value));
        let err = neumaier(all().map(|p| p.error));
        let reducible = neumaier(all().filter(|p| !p.floor).map(|p| p.error));
        (total, err, reducible)
    };
    let report = |total: f64, err: f64, evals: usize, converged: bool| Outcome {
        result: QuadratureResult { value: total, abs_error_estimate: err, evaluations: evals.max(1) },
        converged,
        out_of_budget: !converged && evals + 2 * EVALS_PER_RULE > tol.max_evals,
    };
    loop {
        let target = tol.target(value_run);
        if err_run.is_nan() || err_run <= target || err_run - floor_run <= target {
            let (total, err, reducible) = exact(&heap, &settled);
            value_run = total;
            err_run = err;
            floor_run = err - reducible;
            let target = tol.target(total);
            if err <= target || reducible <= target {
                return report(total, err, evals, true);
            }
        }
        let Some(worst) = heap.pop() else {
            let (total, err, reducible) = exact(&heap, &settled);
            let target = tol.target(total);
            return report(total, err, evals, err <= target || reducible <= target);
        };
        if evals + 2 * EVALS_PER_RULE > tol.max_evals {
            heap.push(worst);
            let (total, err, reducible) = exact(&heap, &settled);
            let target = tol.target(total);
            return report(total, err, evals, err <= target || reducible <= target);
        }
        let mid = 0.5 * (worst.a + worst.b);
        if worst.floor || !(mid > worst.a && mid < worst.b) {
            if worst.floor {
                floor_run += worst.error;
            }
            settled.push(worst);
            continue;
        }
        let left = gauss_kronrod(f, Segment { a: worst.a, b: mid, map: worst.map });
        let right = gauss_kronrod(f, Segment { a: mid, b: worst.b, map: worst.map });
        evals += 2 * EVALS_PER_RULE;
        value_run += left.value + right.value - worst.value;
        err_run += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

fn finish(outcome: Outcome, what: &str) -> Result<QuadratureResult> {
    if outcome.converged {
        Ok(outcome.result)
    } else {
        Err(Error::NonConvergence {
            what: what.to_string(),
            evaluations: outcome.result.evaluations,
            estimate: outcome.result.value,
            abs_error: outcome.result.abs_error_estimate,
        })
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_nan() || b.is_nan() || !(b >= a) {
        return Err(Error::domain(format!("invalid integration interval [{a}, {b}]")));
    }
    Ok(())
}

/// ∫_a^b f(x) dx on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadratureResult> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Finite integral over consecutive `points` (sorted ascending, at least two).
/// Interior points are panel boundaries the integrand should not straddle.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: &Tolerance) -> Result<QuadratureResult> {
    if points.len() < 2 {
        return Err(Error::domain("need at least two integration points"));
    }
    for w in points.windows(2) {
        check_interval(w[0], w[1])?;
        if !w[1].is_finite() || !w[0].is_finite() {
            return Err(Error::domain("finite integration requires finite limits"));
        }
    }
    let segments: Vec<Segment> = points.windows(2).map(|w| Segment::plain(w[0], w[1])).collect();
    finish(adaptive(&f, &segments, tol), "integral")
}

/// ∫_0^∞ f(x) dx.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, tol: &Tolerance) -> Result<QuadratureResult> {
    integrate_semi_infinite_with(f, &[], tol)
}

/// Segments for [start, ∞) split at `breaks`, the last one compactified.
pub(crate) fn semi_infinite_segments(start: f64, breaks: &[f64]) -> Vec<Segment> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > start && b.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut segments = Vec::with_capacity(pts.len() + 2);
    let mut lo = start;
    // the compactified tail starts at a unit scale unless the breaks say otherwise
    if pts.is_empty() {
        pts.push(start + 1.0);
    }
    for &p in &pts {
        segments.push(Segment::plain(lo, p));
        lo = p;
    }
    let scale = (lo - start).max(f64::MIN_POSITIVE);
    segments.push(Segment { a: 0.0, b: 1.0, map: Map::Tail { origin: lo, scale } });
    segments
}

/// ∫_0^∞ f(x) dx with panel boundaries at `breaks` (values ≤ 0 are ignored).
pub fn integrate_semi_infinite_with<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<QuadratureResult> {
    let segments = semi_infinite_segments(0.0, breaks);
    finish(adaptive(&f, &segments, tol), "semi-infinite integral")
}

/// Cauchy principal value of ∫_a^b f(x) dx where f has a simple pole at
/// `pole`, a < pole < b; `b` may be `f64::INFINITY`. `breaks` adds panel
/// boundaries in the regular part.
pub fn integrate_pv<F: Fn(f64) -> f64>(
    f: F,
    pole: f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<QuadratureResult> {
    check_interval(a, b)?;
    if !a.is_finite() {
        return Err(Error::domain("principal value requires a finite lower limit"));
    }
    if !(pole > a && pole < b) {
        return Err(Error::PoleOnBoundary { pole, lower: a, upper: b });
    }
    let half = if b.is_finite() { (pole - a).min(b - pole) } else { pole - a };
    let mut segments = vec![Segment { a: 0.0, b: half, map: Map::Fold { center: pole } }];
    let left_end = pole - half;
    if left_end > a {
        let mut pts: Vec<f64> = std::iter::once(a)
            .chain(breaks.iter().copied().filter(|&x| x > a && x < left_end))
            .chain(std::iter::once(left_end))
            .collect();
        pts.sort_by(f64::total_cmp);
        segments.extend(pts.windows(2).map(|w| Segment::plain(w[0], w[1])));
    }
    let right_start = pole + half;
    if b.is_finite() {
        if b > right_start {
            let mut pts: Vec<f64> = std::iter::once(right_start)
                .chain(breaks.iter().copied().filter(|&x| x > right_start && x < b))
                .chain(std::iter::once(b))
                .collect();
            pts.sort_by(f64::total_cmp);
            segments.extend(pts.windows(2).map(|w| Segment::plain(w[0], w[1])));
        }
    } else {
        segments.extend(semi_infinite_segments(right_start, breaks));
    }
    finish(adaptive(&f, &segments, tol), "principal-value integral")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::gamma_fn;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tight() -> Tolerance {
        Tolerance::new(1e-12, 1e-15).unwrap()
    }

    #[test]
    fn exponential() {
        let r = integrate_semi_infinite(|x| (-x).exp(), &Tolerance::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.abs_error_estimate >= 0.0 && r.evaluations >= 1);
        assert!(r.abs_error_estimate <= Tolerance::default().target(r.value));
    }

    #[test]
    fn algebraic_standard_integral() {
        let r = integrate_semi_infinite(|w| w * w * (1.0 + w * w).powf(-5.3), &tight()).unwrap();
        let expect = PI.sqrt() / 4.0 * gamma_fn(3.8).unwrap() / gamma_fn(5.3).unwrap();
        assert!(((r.value - expect) / expect).abs() < 1e-11, "{} vs {expect}", r.value);
    }

    #[test]
    fn finite_with_breaks() {
        let r = integrate_with_breaks(|x: f64| x.sin(), &[0.0, 1.0, PI], &tight()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        assert!(integrate_with_breaks(|x| x, &[0.0], &tight()).is_err());
        assert!(integrate(|x| x, 1.0, 0.0, &tight()).is_err());
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &tight()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let tol = Tolerance::new(1e-15, 1e-300).unwrap().with_max_evals(100).unwrap();
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tol).unwrap_err();
        match err {
            Error::NonConvergence { evaluations, estimate, .. } => {
                assert!(evaluations <= 100);
                assert!(estimate.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pv_symmetric_pole_vanishes() {
        let r = integrate_pv(|w| 1.0 / (w - 1.0), 1.0, 0.0, 2.0, &[], &tight()).unwrap();
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn pv_weighted_pole_closed_form() {
        // PV ∫₀^∞ w / ((w²-1)(1+w²)²) dw = -1/4 by partial fractions in v = w²
        let f = |w: f64| w / ((w * w - 1.0) * (1.0 + w * w).powi(2));
        let r = integrate_pv(f, 1.0, 0.0, f64::INFINITY, &[], &tight()).unwrap();
        assert!((r.value + 0.25).abs() < 1e-11, "{}", r.value);
        // brute force: midpoint rule on the folded and tail parts, 10^6 points
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let folded: f64 = (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                f(1.0 + s) + f(1.0 - s)
            })
            .sum::<f64>()
            * h;
        // tail [2, ∞) with w = 2/u
        let tail: f64 = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                f(2.0 / u) * 2.0 / (u * u)
            })
            .sum::<f64>()
            * h;
        assert!((r.value - (folded + tail)).abs() < 1e-8);
    }

    #[test]
    fn pv_errors() {
        let tol = tight();
        assert!(matches!(
            integrate_pv(|w| 1.0 / (w - 3.0), 3.0, 0.0, 3.0, &[], &tol),
            Err(Error::PoleOnBoundary { .. })
        ));
        assert!(matches!(
            integrate_pv(|w| 1.0 / (w + 1.0), -1.0, 0.0, 2.0, &[], &tol),
            Err(Error::PoleOnBoundary { .. })
        ));
    }

    #[test]
    fn pv_odd_pole_random_centres() {
        for &(c, h) in &[(0.3, 0.3), (2.0, 1.5), (10.0, 0.1)] {
            let r = integrate_pv(|w| 1.0 / (w - c), c, c - h, c + h, &[], &tight()).unwrap();
            assert!(r.value.abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn beta_identity(mu in 0.5f64..4.0, gap in 0.5f64..4.0) {
            let nu = mu + gap;
            let r = integrate_semi_infinite(|v: f64| v.powf(mu - 1.0) * (1.0 + v).powf(-nu), &tight()).unwrap();
            let expect = gamma_fn(mu).unwrap() * gamma_fn(nu - mu).unwrap() / gamma_fn(nu).unwrap();
            prop_assert!(((r.value - expect) / expect).abs() < 1e-9, "{} vs {}", r.value, expect);
        }
    }
}
