//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Tanh-sinh quadrature on `[a, b]`, tolerant of integrable endpoint
/// singularities. Refines the step until two levels agree to `tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let node = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        // distance from the nearer endpoint, computed without cancellation
        let e = (-2.0 * u.abs()).exp();
        let off = 2.0 * e / (1.0 + e) * half;
        let x = if u >= 0.0 { b - off } else { a + off };
        let c = u.cosh();
        let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() / (c * c);
        // nodes this close to an endpoint add < 1e-20 for singularities up to r^-0.9
        if off <= 1e-200 * half || !w.is_finite() {
            0.0
        } else {
            w * f(x)
        }
    };
    // wide enough for singularities as strong as r^-0.9
    let t_max = 6.0;
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += node(k as f64 * h) + node(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += node(k as f64 * h) + node(-(k as f64) * h);
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Richardson-extrapolated central difference of `f` at `x`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
