//! Quadrature kernels: adaptive Simpson for general integrands and a fixed
//! 5-point Gauss-Legendre rule for smooth per-segment integrals.

/// 5-point Gauss-Legendre abscissae on [-1, 1].
const GL5_X: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];

/// 5-point Gauss-Legendre weights (sum to 2).
const GL5_W: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

/// Integrate `f` over [a, b] with the 5-point Gauss-Legendre rule.
/// Exact for polynomials up to degree 9; intended for short smooth segments.
pub fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in GL5_X.iter().zip(GL5_W.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
///
/// Subdivision is capped at depth 20 (2^20 intervals); past the cap the
/// current Richardson-extrapolated estimate is accepted.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 20)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
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
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrate over [a, b] split at the sorted interior breakpoints in `cuts`
/// (entries outside (a, b) are ignored). Each smooth piece gets a tolerance
/// share proportional to its length.
pub fn adaptive_simpson_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cuts: &[f64],
    tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let total = b - a;
    let mut acc = 0.0;
    let mut lo = a;
    for &c in cuts {
        if c > lo && c < b {
            let piece_tol = (tol * (c - lo) / total).max(1e-300);
            acc += adaptive_simpson(f, lo, c, piece_tol);
            lo = c;
        }
    }
    let piece_tol = (tol * (b - lo) / total).max(1e-300);
    acc + adaptive_simpson(f, lo, b, piece_tol)
}

/// Neumaier compensated accumulator for long running sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
