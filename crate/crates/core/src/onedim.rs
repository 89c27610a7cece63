//! Bracketed derivative-free 1-D maximization.
//!
//! Golden-section search with parabolic interpolation steps (Brent's
//! `localmin`), run on the negated objective. The search stops once the
//! bracket `[a, b]` around the incumbent is narrower than the requested
//! tolerance.

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt 5) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub fx: f64,
    pub evaluations: u32,
    /// Final bracket width.
    pub width: f64,
    pub converged: bool,
}

/// Maximize `f` over `[lo, hi]`, stopping when the bracket is narrower than
/// `tol`. `f` is never evaluated at the endpoints.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: u32) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut neg = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };

    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = neg(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut evaluations = 1;
    let mut d = 0.0f64;
    let mut e = 0.0f64;
    let mut converged = false;

    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        // Brent's test |x - mid| <= 2 tol1 - (b - a)/2 implies b - a <= 4 tol1.
        let tol1 = 0.25 * tol + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) || b - a < tol {
            converged = true;
            break;
        }

        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < mid { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < mid { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = neg(u);
        evaluations += 1;

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    Maximum {
        x,
        fx: -fx,
        evaluations,
        width: b - a,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_peak() {
        let m = maximize(|x| -(x - 0.3).powi(2) + 2.0, 0.0, 1.0, 1e-10, 500);
        assert!(m.converged);
        assert!((m.x - 0.3).abs() < 1e-8);
        assert!((m.fx - 2.0).abs() < 1e-15);
        assert!(m.width < 1e-10);
    }

    #[test]
    fn non_smooth_peak() {
        let m = maximize(|x: f64| -(x - 0.7).abs(), 0.0, 1.0, 1e-9, 500);
        assert!(m.converged);
        assert!((m.x - 0.7).abs() < 1e-8);
    }

    #[test]
    fn monotone_goes_to_edge() {
        let m = maximize(|x| x, 0.5, 2.0, 1e-8, 500);
        assert!(m.converged);
        assert!(2.0 - m.x < 1e-7);
        assert!(m.x < 2.0);
    }

    #[test]
    fn tolerance_controls_bracket() {
        for &tol in &[1e-4, 1e-6, 1e-8, 1e-10] {
            let m = maximize(|x: f64| (3.0 * x).sin(), 0.0, 1.0, tol, 1000);
            assert!(m.converged);
            assert!(m.width <= tol, "{tol}: {}", m.width);
            // a smooth peak only resolves x to about sqrt(f64::EPSILON)
            let xs = std::f64::consts::FRAC_PI_6;
            assert!((m.x - xs).abs() <= tol.max(1e-7));
            assert!(1.0 - m.fx <= 4.5 * tol * tol + 1e-15);
        }
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * 5.0).cos() * x;
        let a = maximize(f, 0.0, 1.0, 1e-10, 500);
        let b = maximize(f, 0.0, 1.0, 1e-10, 500);
        assert_eq!(a, b);
    }
}
