//! Small numerical kernels shared across modules: adaptive quadrature,
//! monotone cubic interpolation, and dyadic grid helpers that make the
//! periodic wrap of the simulation window exact in floating point.

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Recursion refines until the local Richardson estimate meets `tol`
/// (distributed across subintervals) or `max_depth` is reached. Suitable
/// for smooth integrands with localized features, such as mollifier
/// profiles and arc-length kernels.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        forced: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || (forced == 0 && delta.abs() <= 15.0 * tol) {
            left + right + delta / 15.0
        } else {
            let fc = forced.saturating_sub(1);
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, fc)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, fc)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    // A few mandatory splits stop the error estimate from accepting a
    // spuriously flat coarse sample (e.g. an integrand supported on a
    // narrow band that the first five probes straddle).
    let forced = max_depth.min(3);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, forced)
}

/// Integrates `f` to a relative tolerance: two passes, the first to scale
/// the absolute tolerance of the second.
pub fn adaptive_simpson_rel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let rough = adaptive_simpson(f, a, b, 1e-6, 20);
    let scale = rough.abs().max(1e-300);
    adaptive_simpson(f, a, b, rel_tol * scale, 40)
}

/// Monotone cubic interpolant (Fritsch–Carlson slopes) on sorted knots.
///
/// When the data are monotone the interpolant is monotone too and never
/// overshoots the data range; that keeps tabulated obstacle profiles
/// inside `[0, 1]`.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. Knots must be strictly increasing; at least
    /// two are required.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len(), "need >= 2 matching knots");
        assert!(
            x.windows(2).all(|w| w[1] > w[0]),
            "knots must be strictly increasing"
        );
        let n = x.len();
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // Weighted harmonic mean; guarantees |m| <= 3 min(|d-|, |d+|),
                // the Fritsch–Carlson monotonicity region.
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // Clamp the one-sided endpoint slopes into the monotone region.
        for (i, di) in [(0usize, d[0]), (n - 1, d[n - 2])] {
            if m[i] * di <= 0.0 {
                m[i] = 0.0;
            } else if m[i].abs() > 3.0 * di.abs() {
                m[i] = 3.0 * di;
            }
        }
        MonotoneCubic { x, y, m }
    }

    fn segment(&self, x: f64) -> usize {
        // partition_point returns the first knot > x; segment is the one before.
        let i = self.x.partition_point(|&k| k <= x);
        i.clamp(1, self.x.len() - 1) - 1
    }

    /// Evaluates the interpolant; clamps outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.x[0] {
            return self.y[0];
        }
        if x >= *self.x.last().unwrap() {
            return *self.y.last().unwrap();
        }
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    /// Knot slopes of the interpolant (Fritsch–Carlson limited).
    pub fn slopes(&self) -> &[f64] {
        &self.m
    }

    /// Maximum |slope| of the interpolant, measured by dense sampling
    /// (`refine` points per segment).
    pub fn max_abs_slope(&self, refine: usize) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.x.len() - 1 {
            let h = (self.x[i + 1] - self.x[i]) / refine as f64;
            let mut prev = self.eval(self.x[i]);
            for k in 1..=refine {
                let xs = self.x[i] + h * k as f64;
                let cur = self.eval(xs);
                max = max.max(((cur - prev) / h).abs());
                prev = cur;
            }
        }
        max
    }
}

/// Largest power of two `<= x` (x must be positive and finite).
pub fn pow2_below(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite());
    let mut p = f64::powi(2.0, x.log2().floor() as i32);
    while p > x {
        p *= 0.5;
    }
    while p * 2.0 <= x {
        p *= 2.0;
    }
    p
}

/// Rounds `x` to `bits` significant binary digits (nearest, ties up).
/// The result is a dyadic rational, so products with small integers and
/// sums with same-scale dyadics are exact in f64.
pub fn round_dyadic(x: f64, bits: u32) -> f64 {
    assert!(x > 0.0 && x.is_finite() && bits >= 1);
    let scale = pow2_below(x) * f64::powi(2.0, 1 - bits as i32);
    (x / scale).round() * scale
}

/// Simulation window for a periodic strip: width `w` is `24/sqrt(rho)`
/// rounded to 7 significant bits and the node spacing is the largest power
/// of two `<= dx_target`, so `w` is an exact integer multiple of `dx` and
/// every wrap `x ± w` of a grid point is exact in f64.
pub fn dyadic_window(width_target: f64, dx_target: f64) -> (f64, f64, usize) {
    let dx = pow2_below(dx_target);
    let w_rounded = round_dyadic(width_target, 7);
    let n = (w_rounded / dx).round().max(8.0);
    let w = n * dx;
    (w, dx, n as usize)
}
