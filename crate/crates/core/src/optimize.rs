//! Scalar bracketing routines: bisection and golden-section search.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Root of `f` in `[lo, hi]`, given `f(lo)` and `f(hi)` of opposite sign.
///
/// Stops when the bracket is narrower than `xtol`, when `|f| <= ftol`, or when
/// the midpoint no longer moves in floating point. Returns `None` if the
/// endpoints do not bracket a sign change.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, ftol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= xtol {
            break;
        }
        let f_mid = f(mid);
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid == 0.0 || f_mid.abs() <= ftol {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(best.0)
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn golden_section_max<F>(f: F, a: f64, b: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (x, v) = golden_section_min(|s| -f(s), a, b, xtol);
    (x, -v)
}
