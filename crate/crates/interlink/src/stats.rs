//! Statistical primitives: correlation estimators and the Student-t
//! significance machinery (log-gamma, regularized incomplete beta).
//!
//! The special functions follow the classic Lanczos / Lentz continued-fraction
//! formulations so the crate does not depend on an external statistics
//! package for its core significance gate.

/// Natural log of the gamma function for positive arguments (Lanczos).
pub fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0, "ln_gamma requires z > 0");
    const COEF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut sum = 1.000000000190015;
    for (i, c) in COEF.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * sum / z).ln()
}

/// Regularized incomplete beta function I_x(a, b), evaluated with the
/// Lentz continued fraction. Valid for a, b > 0 and x in [0, 1].
pub fn inc_beta(x: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    debug_assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // Symmetry: converges fastest for x below the distribution mean.
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - inc_beta(1.0 - x, b, a);
    }

    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta).exp();

    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

    let mut f = 1.0;
    let mut c = 1.0;
    let mut d = 0.0;

    for m in 0..MAX_ITER {
        let mf = m as f64;

        let odd = -(a + mf) * (a + b + mf) * x / ((a + 2.0 * mf) * (a + 2.0 * mf + 1.0));
        let delta = lentz_step(odd, &mut c, &mut d, TINY);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }

        let even = (mf + 1.0) * (b - mf - 1.0) * x / ((a + 2.0 * mf + 1.0) * (a + 2.0 * mf + 2.0));
        let delta = lentz_step(even, &mut c, &mut d, TINY);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }

    (front / (f * a)).clamp(0.0, 1.0)
}

fn lentz_step(coef: f64, c: &mut f64, d: &mut f64, tiny: f64) -> f64 {
    *d = 1.0 + coef * *d;
    if d.abs() < tiny {
        *d = tiny;
    }
    *d = 1.0 / *d;
    *c = 1.0 + coef / *c;
    if c.abs() < tiny {
        *c = tiny;
    }
    *c * *d
}

/// Two-sided p-value of a correlation coefficient under the null of no
/// association, via the t statistic with `n - 2` degrees of freedom.
///
/// Uses the identity P(|T| >= |t|) = I_x(nu/2, 1/2) with x = nu/(nu + t^2),
/// so `r = 0` maps to exactly 1 and `|r| = 1` to exactly 0.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    debug_assert!(n >= 3);
    debug_assert!(r.abs() <= 1.0);
    if r == 0.0 {
        return 1.0;
    }
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let nu = (n - 2) as f64;
    let t2 = r * r * nu / (1.0 - r * r);
    inc_beta(nu / (nu + t2), nu / 2.0, 0.5)
}

/// Pearson product-moment correlation of two equal-length slices.
///
/// Returns `None` when either slice has zero variance. The result is clamped
/// to [-1, 1] to absorb floating-point overshoot on exact linear relations.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fractional ranks with ties shared as averages (midranks).
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| {
        xs[a]
            .partial_cmp(&xs[b])
            .expect("non-finite value in ranks")
    });
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // ranks are 1-based; tied block shares the average rank
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation: Pearson on midranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    pearson(&ranks(xs), &ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_small_integers() {
        // Gamma(5) = 24
        assert_abs_diff_eq!(ln_gamma(5.0), 24.0_f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn inc_beta_endpoints() {
        assert_eq!(inc_beta(0.0, 2.0, 3.0), 0.0);
        assert_eq!(inc_beta(1.0, 2.0, 3.0), 1.0);
        // I_x(1,1) = x
        assert_abs_diff_eq!(inc_beta(0.37, 1.0, 1.0), 0.37, epsilon = 1e-12);
    }

    #[test]
    fn p_value_exact_limits() {
        assert_eq!(correlation_p_value(0.0, 10), 1.0);
        assert_eq!(correlation_p_value(1.0, 10), 0.0);
        assert_eq!(correlation_p_value(-1.0, 10), 0.0);
    }

    #[test]
    fn p_value_matches_external_t_cdf() {
        // Reference values computed independently with scipy.stats.t.sf.
        assert_abs_diff_eq!(
            correlation_p_value(0.6, 24),
            0.001939392876526,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(correlation_p_value(0.5, 10), 0.141113281250, epsilon = 1e-9);
        assert_abs_diff_eq!(correlation_p_value(-0.8, 5), 0.104088038662, epsilon = 1e-9);
        assert_abs_diff_eq!(correlation_p_value(0.95, 50), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(correlation_p_value(0.2, 50), 0.163753081245, epsilon = 1e-9);
    }

    #[test]
    fn pearson_linear_relations() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        assert_abs_diff_eq!(pearson(&x, &y).unwrap(), 1.0, epsilon = 1e-12);
        let z = [5.0, 4.0, 3.0, 2.0];
        assert_abs_diff_eq!(pearson(&x, &z).unwrap(), -1.0, epsilon = 1e-12);
        assert!(pearson(&x, &[1.0; 4]).is_none());
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(ranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }
}
