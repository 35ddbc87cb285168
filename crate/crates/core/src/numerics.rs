//! Small numerical building blocks shared by the solver stages.

/// Cubic Hermite interpolation on one interval of width `h`, with `t ∈ [0, 1]`.
/// Returns the value and the derivative with respect to the abscissa.
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let g00 = 6.0 * t2 - 6.0 * t;
    let g10 = 3.0 * t2 - 4.0 * t + 1.0;
    let g01 = -g00;
    let g11 = 3.0 * t2 - 2.0 * t;
    let deriv = (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1;
    (value, deriv)
}

/// Weights `(w_old, w_new)` of the exponentially fitted trapezoid rule:
/// `∫_0^λ e^{-τ} φ(τ) dτ ≈ w_new φ(0) + w_old φ(λ)` for `φ` linear in `τ`.
pub fn fitted_weights(lambda: f64) -> (f64, f64) {
    if lambda < 0.5 {
        // series in λ; both weights tend to λ/2
        let mut e0 = 0.0; // λ·E0 = Σ_{k≥1} (-1)^{k+1} λ^k / k!
        let mut e1 = 0.0; // λ·E1 = Σ_{k≥1} (-1)^{k+1} λ^k / ((k-1)!(k+1))
        let mut pow_fact = 1.0; // λ^k / k!
        for k in 1..40 {
            pow_fact *= lambda / k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            e0 += sign * pow_fact;
            e1 += sign * pow_fact * k as f64 / (k as f64 + 1.0);
            if pow_fact < 1e-18 * e0.abs() {
                break;
            }
        }
        (e1, e0 - e1)
    } else {
        let decay = (-lambda).exp();
        let e0 = -(-lambda).exp_m1();
        let e1 = (1.0 - decay * (1.0 + lambda)) / lambda;
        (e1, e0 - e1)
    }
}

/// Truncated moments `∫_0^λ t^k e^{-t} dt` for `k = 0, 1, 2`.
fn exp_moments(lambda: f64) -> [f64; 3] {
    if lambda < 1.0 {
        let mut m = [0.0; 3];
        let mut term = 1.0; // (-1)^i λ^i / i!
        for i in 0..60 {
            for (k, mk) in m.iter_mut().enumerate() {
                *mk += term * lambda.powi((k + 1) as i32) / (i + k + 1) as f64;
            }
            term *= -lambda / (i + 1) as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
        m
    } else {
        let decay = (-lambda).exp();
        [
            -(-lambda).exp_m1(),
            1.0 - decay * (1.0 + lambda),
            2.0 - decay * (lambda * lambda + 2.0 * lambda + 2.0),
        ]
    }
}

/// Three-point version of [`fitted_weights`]: `φ` quadratic in `τ` through
/// `τ = 0` (new node), `λ` (old node) and `λ + λ_prev` (the node before).
/// Returns `(w_before, w_old, w_new)`; for small `λ` this is Adams–Moulton.
pub fn fitted_weights3(lambda_prev: f64, lambda: f64) -> (f64, f64, f64) {
    let [m0, m1, m2] = exp_moments(lambda);
    let (t1, t2) = (lambda, lambda + lambda_prev);
    if t1 <= 0.0 || lambda_prev <= 0.0 {
        let (w_old, w_new) = fitted_weights(lambda);
        return (0.0, w_old, w_new);
    }
    let w_old = (m2 - t2 * m1) / (t1 * (t1 - t2));
    let w_before = (m2 - t1 * m1) / (t2 * (t2 - t1));
    (w_before, w_old, m0 - w_old - w_before)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `n` points from `a` to `b` inclusive, evenly spaced in log scale.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i + 1 == n {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
