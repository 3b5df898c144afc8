//! Special functions used by the kernels: the Pochhammer symbol, the Gauss
//! hypergeometric function 2F1, and the generalized hypergeometric 1F2.
//!
//! Scope is deliberately narrow: the parameter families the kernels need
//! (2F1(1,3/2;5/2;.), 2F1(-1/2,-1/2;1/2;.), the 1F2 triplets of the noise
//! kernel) are fully tested; anything else is best-effort series evaluation.

use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

const MAX_TERMS: usize = 20_000;

/// Result of a hypergeometric evaluation with its convergence diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HypResult {
    pub value_re: f64,
    pub value_im: f64,
    pub terms_used: usize,
    pub converged: bool,
    pub est_error: f64,
}

impl HypResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

/// Pochhammer symbol (x)_n = x (x+1) ... (x+n-1); (x)_0 = 1.
pub fn pochhammer(x: f64, n: u32) -> Result<f64> {
    let mut p = 1.0f64;
    for i in 0..n {
        p *= x + i as f64;
        if !p.is_finite() {
            return Err(Error::Domain(format!(
                "pochhammer({x}, {n}) overflows at factor {i}"
            )));
        }
    }
    Ok(p)
}

/// Direct hypergeometric series sum_k (a)_k (b)_k / (c)_k z^k / k!.
fn hyp2f1_series(a: f64, b: f64, c: f64, z: Complex64, tol: f64) -> HypResult {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small_streak = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.norm() <= tol * sum.norm().max(f64::MIN_POSITIVE) {
            small_streak += 1;
            // three consecutive small terms guard against accidental zeros
            if small_streak >= 3 {
                return HypResult {
                    value_re: sum.re,
                    value_im: sum.im,
                    terms_used: k + 1,
                    converged: true,
                    est_error: term.norm(),
                };
            }
        } else {
            small_streak = 0;
        }
    }
    HypResult {
        value_re: sum.re,
        value_im: sum.im,
        terms_used: MAX_TERMS,
        converged: false,
        est_error: term.norm(),
    }
}

/// Gauss hypergeometric 2F1(a, b; c; z) for real parameters and complex z.
///
/// Direct series inside |z| <= 0.85; otherwise the Pfaff transformation
/// 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), which maps the
/// left half-plane Re z < 1/2 into the unit disk. The principal branch of
/// (1-z)^(-a) is used; all kernel call sites have Re z < 0, where 1-z stays
/// in the right half-plane and the branch choice is unambiguous.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: Complex64) -> Result<HypResult> {
    if c <= 0.0 && c == c.floor() {
        return Err(Error::Domain(format!(
            "hyp2f1: c = {c} is a non-positive integer"
        )));
    }
    // run the series down to rounding level; the stop test is on the last
    // term, and the geometric tail can exceed it by 1/(1-|z|)
    let tol = 4.0 * f64::EPSILON;
    let direct = z.norm() <= 0.85;
    let res = if direct {
        hyp2f1_series(a, b, c, z, tol)
    } else {
        let w = z / (z - 1.0);
        if w.norm() > 0.999 {
            return Err(Error::Domain(format!(
                "hyp2f1: z = {z} outside the covered region (|z/(z-1)| = {:.4})",
                w.norm()
            )));
        }
        // Transform on the parameter pair that shrinks the series terms
        // fastest: use (a, c-b) or (b, c-a), whichever has the smaller
        // leading growth.
        let inner = if (c - b).abs() <= (c - a).abs() {
            let r = hyp2f1_series(a, c - b, c, w, tol);
            (r, (1.0 - z).powf(-a))
        } else {
            let r = hyp2f1_series(b, c - a, c, w, tol);
            (r, (1.0 - z).powf(-b))
        };
        let (r, prefactor) = inner;
        let v = prefactor * r.value();
        HypResult {
            value_re: v.re,
            value_im: v.im,
            terms_used: r.terms_used,
            converged: r.converged,
            est_error: r.est_error * prefactor.norm(),
        }
    };
    if !res.converged {
        return Err(Error::SpecFun {
            context: format!("hyp2f1({a},{b};{c};{z})"),
            terms: res.terms_used,
            est_error: res.est_error,
        });
    }
    Ok(res)
}

/// Generalized hypergeometric 1F2(a; b, c; z), entire in z, evaluated by the
/// direct series with Kahan-compensated summation. For large negative z the
/// series cancels catastrophically; the estimated rounding error is reported
/// and an error advising a quadrature fallback is raised when it exceeds the
/// tolerance.
pub fn hyp1f2(a: f64, b: f64, c: f64, z: f64) -> Result<HypResult> {
    if (b <= 0.0 && b == b.floor()) || (c <= 0.0 && c == c.floor()) {
        return Err(Error::Domain(format!(
            "hyp1f2: lower parameter in {{{b}, {c}}} is a non-positive integer"
        )));
    }
    let tol = 1e-10;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    let mut abs_sum = 1.0f64;
    let mut converged = false;
    let mut used = MAX_TERMS;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / ((b + kf) * (c + kf) * (kf + 1.0)) * z;
        abs_sum += term.abs();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        // terms of an entire series eventually decay monotonically; require
        // two consecutive small terms past the turning point
        if term.abs() <= 0.5 * tol * sum.abs().max(f64::MIN_POSITIVE)
            && kf + 1.0 > z.abs().sqrt()
        {
            converged = true;
            used = k + 1;
            break;
        }
    }
    let cancellation = f64::EPSILON * abs_sum;
    let est_error = cancellation.max(term.abs());
    // the alternating series loses digits as |z| grows; tolerate the loss
    // until fewer than ~6 significant digits remain, then demand quadrature
    if !converged || est_error > 1e-6 * sum.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::SpecFun {
            context: format!("hyp1f2({a};{b},{c};{z}): use quadrature fallback"),
            terms: used,
            est_error,
        });
    }
    Ok(HypResult {
        value_re: sum,
        value_im: 0.0,
        terms_used: used,
        converged,
        est_error,
    })
}

/// Elementary closed form of 2F1(1, 3/2; 5/2; z) for z < 0:
/// 3 (atan(sqrt(-z))/sqrt(-z) - 1)/z. Used as an independent oracle in tests
/// and kept here so other modules can cross-check the series path.
pub fn hyp2f1_1_32_52_neg(z: f64) -> f64 {
    debug_assert!(z < 0.0);
    let s = (-z).sqrt();
    3.0 * (s.atan() / s - 1.0) / z
}

/// 2F1(1, 3/2; 5/2; z) for general complex z off the branch cut [1, inf).
///
/// The damping-kernel Laplace transform evaluates this family at
/// z = -Lambda/(E_gap -/+ i s) with s anywhere in the right half-plane;
/// those arguments can fall outside the reach of the Pfaff transformation,
/// so this uses the elementary representation
/// `3 (atanh(w)/w - 1)/z, w = sqrt(z)`,
/// which is even in w (the sqrt branch drops out) and analytic off the cut.
/// The direct series is used inside |z| <= 0.6 where the closed form loses
/// digits to cancellation.
pub fn hyp2f1_1_32_52(z: Complex64) -> Complex64 {
    if z.norm() <= 0.6 {
        return hyp2f1_series(1.0, 1.5, 2.5, z, 1e-15).value();
    }
    let w = z.sqrt();
    3.0 * (w.atanh() / w - 1.0) / z
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(7.3, 0).unwrap(), 1.0);
        assert_eq!(pochhammer(3.0, 4).unwrap(), 360.0);
        assert_eq!(pochhammer(-0.5, 2).unwrap(), -0.25);
        assert!(pochhammer(1e300, 4).is_err());
    }

    #[test]
    fn pochhammer_recurrence() {
        for i in 0..40 {
            let x = -3.7 + 0.41 * i as f64;
            for n in 0..12u32 {
                let lhs = pochhammer(x, n + 1).unwrap();
                let rhs = pochhammer(x, n).unwrap() * (x + n as f64);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-15, epsilon = 1e-300);
            }
        }
    }

    fn re(r: HypResult) -> f64 {
        assert!(r.value_im.abs() < 1e-12 * r.value_re.abs().max(1.0));
        r.value_re
    }

    #[test]
    fn hyp2f1_known_values() {
        assert_eq!(
            re(hyp2f1(1.0, 1.5, 2.5, Complex64::new(0.0, 0.0)).unwrap()),
            1.0
        );
        // -ln(1-z)/z at z = 0.5
        assert_relative_eq!(
            re(hyp2f1(1.0, 1.0, 2.0, Complex64::new(0.5, 0.0)).unwrap()),
            1.3862943611198906,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            re(hyp2f1(1.0, 1.5, 2.5, Complex64::new(-10.0, 0.0)).unwrap()),
            0.18003719848327016,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            re(hyp2f1(2.0, 2.5, 3.5, Complex64::new(-50.0, 0.0)).unwrap()),
            0.0014127801348915739,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            re(hyp2f1(3.0, 3.5, 4.5, Complex64::new(-50.0, 0.0)).unwrap()),
            3.599094178387329e-5,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            re(hyp2f1(-0.5, -0.5, 0.5, Complex64::new(0.5, 0.0)).unwrap()),
            1.2624671484563433,
            max_relative = 1e-13
        );
    }

    #[test]
    fn hyp2f1_quadrature_oracle() {
        // Euler integral: 2F1(a,b;c;z) = B(b, c-b)^-1 int_0^1 t^{b-1}
        // (1-t)^{c-b-1} (1-zt)^{-a} dt; for (1, 3/2; 5/2; -10) the Beta
        // factor is Gamma(5/2)/(Gamma(3/2) Gamma(1)) = 3/2.
        let (quad, _) = crate::quad::integrate(
            |t: f64| t.sqrt() / (1.0 + 10.0 * t),
            0.0,
            1.0,
            1e-13,
        )
        .unwrap();
        let oracle = 1.5 * quad;
        assert_relative_eq!(
            re(hyp2f1(1.0, 1.5, 2.5, Complex64::new(-10.0, 0.0)).unwrap()),
            oracle,
            max_relative = 1e-10
        );
    }

    #[test]
    fn hyp2f1_elementary_identity() {
        for &z in &[-0.3, -2.0, -10.0, -50.0, -500.0] {
            assert_relative_eq!(
                re(hyp2f1(1.0, 1.5, 2.5, Complex64::new(z, 0.0)).unwrap()),
                hyp2f1_1_32_52_neg(z),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn hyp2f1_complex_argument() {
        // conjugate symmetry for real parameters: F(conj z) = conj F(z)
        let z = Complex64::new(-8.0, 3.0);
        let a = hyp2f1(1.0, 1.5, 2.5, z).unwrap().value();
        let b = hyp2f1(1.0, 1.5, 2.5, z.conj()).unwrap().value();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
        assert_relative_eq!(a.im, -b.im, max_relative = 1e-12);
    }

    #[test]
    fn hyp2f1_symmetry_in_ab() {
        // deterministic pseudo-random triplets
        let mut s = 0x9e3779b97f4a7c15u64;
        let mut rnd = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..60 {
            let a = 3.0 * rnd() - 1.0;
            let b = 3.0 * rnd() - 1.0;
            let c = 0.5 + 3.0 * rnd();
            let z = Complex64::new(1.6 * rnd() - 0.8, 1.6 * rnd() - 0.8);
            if z.norm() > 0.85 {
                continue;
            }
            let lhs = hyp2f1(a, b, c, z).unwrap().value();
            let rhs = hyp2f1(b, a, c, z).unwrap().value();
            assert_relative_eq!(lhs.re, rhs.re, max_relative = 1e-11, epsilon = 1e-14);
            assert_relative_eq!(lhs.im, rhs.im, max_relative = 1e-11, epsilon = 1e-14);
        }
    }

    #[test]
    fn hyp2f1_rejects_bad_domain() {
        assert!(hyp2f1(1.0, 1.5, -2.0, Complex64::new(0.1, 0.0)).is_err());
        // z near 1: Pfaff image outside the disk
        assert!(hyp2f1(1.0, 1.5, 2.5, Complex64::new(0.999, 0.0)).is_err());
    }

    #[test]
    fn hyp2f1_family_complex_matches_series() {
        // inside the series radius, the closed form and the series agree
        for &(re, im) in &[(0.3, 0.4), (-0.5, 0.2), (0.1, -0.7), (-0.8, -0.05)] {
            let z = Complex64::new(re, im);
            let a = hyp2f1_1_32_52(z);
            let b = hyp2f1_series_oracle(z);
            assert_relative_eq!(a.re, b.re, max_relative = 1e-11);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-11, epsilon = 1e-13);
        }
        // far outside, against the real-axis elementary oracle
        assert_relative_eq!(
            hyp2f1_1_32_52(Complex64::new(-300.0, 0.0)).re,
            hyp2f1_1_32_52_neg(-300.0),
            max_relative = 1e-12
        );
    }

    fn hyp2f1_series_oracle(z: Complex64) -> Complex64 {
        // plain term-by-term sum, independent of the production series code
        let (mut term, mut sum) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for k in 0..5000 {
            let kf = k as f64;
            term *= (1.0 + kf) * (1.5 + kf) / ((2.5 + kf) * (kf + 1.0)) * z;
            sum += term;
        }
        sum
    }

    #[test]
    fn hyp1f2_known_values() {
        assert_eq!(hyp1f2(0.75, 0.5, 1.75, 0.0).unwrap().value_re, 1.0);
        assert_relative_eq!(
            hyp1f2(0.75, 0.5, 1.75, -1.0).unwrap().value_re,
            0.30786417837222827,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            hyp1f2(1.25, 1.5, 2.25, -25.0).unwrap().value_re,
            0.025306366131716766,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            hyp1f2(0.75, 0.5, 1.75, -100.0).unwrap().value_re,
            0.05876769179700723,
            max_relative = 1e-8
        );
    }

    #[test]
    fn hyp1f2_cancellation_flagged() {
        // extreme argument: the alternating series loses all digits
        match hyp1f2(0.75, 0.5, 1.75, -1.0e7) {
            Err(Error::SpecFun { est_error, .. }) => assert!(est_error > 0.0),
            other => panic!("expected cancellation failure, got {other:?}"),
        }
    }

    #[test]
    fn hyp1f2_error_bound_honest() {
        let r = hyp1f2(0.75, 0.5, 1.75, -1.0).unwrap();
        assert!(r.converged);
        assert!((r.value_re - 0.30786417837222827).abs() <= r.est_error.max(1e-13));
    }
}
