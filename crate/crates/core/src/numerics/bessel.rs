//! Modified Bessel function of the second kind for real order.
//!
//! The order is split as nu = mu + n with |mu| <= 1/2. K_mu and K_{mu+1} come
//! from Temme's series for z < 2 and from Steed's continued fraction otherwise;
//! forward recurrence in the order (stable for K) then reaches nu.

use std::f64::consts::PI;

use super::gamma::temme_gammas;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 20_000;

/// K_nu(z) for nu >= 0, z > 0.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    check(nu, z)?;
    if z < 2.0 {
        Ok(k_temme(nu, z))
    } else {
        Ok(bessel_k_scaled(nu, z)? * (-z).exp())
    }
}

/// e^z K_nu(z), finite for large z where K_nu itself underflows.
pub fn bessel_k_scaled(nu: f64, z: f64) -> Result<f64> {
    check(nu, z)?;
    if z < 2.0 {
        Ok(k_temme(nu, z) * z.exp())
    } else {
        let (kmu, kmu1, mu, n) = split_steed(nu, z);
        Ok(recur(kmu, kmu1, mu, n, z))
    }
}

fn check(nu: f64, z: f64) -> Result<()> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("bessel_k requires z > 0, got {z}")));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("bessel_k requires nu >= 0, got {nu}")));
    }
    Ok(())
}

fn split(nu: f64) -> (f64, usize) {
    let n = (nu + 0.5).floor();
    (nu - n, n as usize)
}

fn recur(mut k_lo: f64, mut k_hi: f64, mu: f64, n: usize, z: f64) -> f64 {
    // k_lo = K_mu, k_hi = K_{mu+1}; returns K_{mu+n}
    if n == 0 {
        return k_lo;
    }
    for i in 1..n {
        let next = 2.0 * (mu + i as f64) / z * k_hi + k_lo;
        k_lo = k_hi;
        k_hi = next;
    }
    k_hi
}

fn k_temme(nu: f64, z: f64) -> f64 {
    let (mu, n) = split(nu);
    let (kmu, kmu1) = temme(mu, z);
    recur(kmu, kmu1, mu, n, z)
}

/// Temme's series: (K_mu, K_{mu+1}) for |mu| <= 1/2, z < 2.
fn temme(mu: f64, z: f64) -> (f64, f64) {
    let half = 0.5 * z;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -half.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (g1, g2, recip_plus, recip_minus) = temme_gammas(mu);
    let mut ff = fact * (g1 * e.cosh() + g2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / recip_plus;
    let mut q = 0.5 / (ee * recip_minus);
    let mut c = 1.0;
    let dd = half * half;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / z)
}

/// Steed's continued fraction, scaled by e^z: (e^z K_mu, e^z K_{mu+1}, mu, n).
fn split_steed(nu: f64, z: f64) -> (f64, f64, f64, usize) {
    let (mu, n) = split(nu);
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let kmu = (PI / (2.0 * z)).sqrt() / s;
    let kmu1 = kmu * (mu + z + 0.5 - h) / z;
    (kmu, kmu1, mu, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::gamma_fn;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// e^{-z} times the terminating series of K_{n+1/2}.
    fn half_integer(n: usize, z: f64) -> f64 {
        let mut sum = 0.0;
        for kk in 0..=n {
            let num = gamma_fn((n + kk + 1) as f64).unwrap();
            let den =
                gamma_fn((kk + 1) as f64).unwrap() * gamma_fn((n - kk + 1) as f64).unwrap() * (2.0 * z).powi(kk as i32);
            sum += num / den;
        }
        (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
    }

    /// ∫₀^∞ e^{-z cosh t} cosh(nu t) dt by plain composite Simpson on a long range.
    fn integral_rep(nu: f64, z: f64) -> f64 {
        let upper = ((60.0 + nu * 10.0) / z).max(1.0).acosh() + 2.0;
        let n = 200_000;
        let h = upper / n as f64;
        let f = |t: f64| (-z * t.cosh() + nu * t).exp() * 0.5 + (-z * t.cosh() - nu * t).exp() * 0.5;
        let mut s = f(0.0) + f(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn half_order_closed_form() {
        let k = bessel_k(0.5, 1.0).unwrap();
        assert!(rel(k, 0.461_068_504_447_894_4) < 1e-12);
        for &z in &[1e-6, 0.01, 0.7, 1.99, 2.0, 5.0, 30.0, 50.0] {
            for n in 0..8 {
                let nu = n as f64 + 0.5;
                let exact = half_integer(n, z);
                let got = bessel_k(nu, z).unwrap();
                assert!(rel(got, exact) < 1e-11, "nu={nu} z={z}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn integral_representation_oracle() {
        for &(nu, z) in &[(3.8, 2.0), (4.8, 0.5), (0.0, 1.0), (2.25, 7.5), (9.7, 3.0), (0.3, 0.05)] {
            let oracle = integral_rep(nu, z);
            let got = bessel_k(nu, z).unwrap();
            assert!(rel(got, oracle) < 1e-10, "nu={nu} z={z}: {got} vs {oracle}");
        }
    }

    #[test]
    fn large_argument_limit() {
        for &nu in &[0.0, 1.3, 3.8] {
            for &z in &[50.0, 200.0, 1000.0] {
                let lead = (PI / (2.0 * z)).sqrt();
                let ratio = bessel_k_scaled(nu, z).unwrap() / lead;
                let first = (4.0 * nu * nu - 1.0) / (8.0 * z);
                assert!((ratio - 1.0 - first).abs() < first.abs().max(1e-3) * 0.2 + 1e-12);
            }
        }
    }

    #[test]
    fn recurrence_grid() {
        for i in 0..20 {
            let nu = 1.0 + 9.0 * i as f64 / 19.0;
            for j in 0..20 {
                let z = 1e-3 * (5e4f64).powf(j as f64 / 19.0);
                let lhs = bessel_k(nu + 1.0, z).unwrap();
                let rhs = bessel_k(nu - 1.0, z).unwrap() + 2.0 * nu / z * bessel_k(nu, z).unwrap();
                assert!(rel(lhs, rhs) < 1e-9, "nu={nu} z={z}");
            }
        }
    }

    #[test]
    fn continuity_across_method_switch() {
        for &nu in &[0.0, 0.2, 3.8, 4.8, 9.9] {
            let below = bessel_k(nu, 2.0 - 1e-12).unwrap();
            let above = bessel_k(nu, 2.0).unwrap();
            assert!(rel(below, above) < 1e-11, "nu={nu}");
        }
    }

    #[test]
    fn small_argument_limit() {
        // K_nu(z) ~ Γ(nu)/2 (2/z)^nu
        let nu = 4.8;
        let z: f64 = 1e-6;
        let lead = gamma_fn(nu).unwrap() / 2.0 * (2.0 / z).powf(nu);
        assert!(rel(bessel_k(nu, z).unwrap(), lead) < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(1.0, -1.0).is_err());
        assert!(bessel_k(-0.5, 1.0).is_err());
        assert!(bessel_k_scaled(f64::NAN, 1.0).is_err());
    }
}
