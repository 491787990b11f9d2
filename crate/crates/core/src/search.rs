//! One-dimensional minimization helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Result of a bracketed minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub argmin: f64,
    pub value: f64,
    /// Final bracket `[lower, upper]`.
    pub bracket: (f64, f64),
}

/// Log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k + 1 == count {
                hi
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Golden-section search on `[a, b]` until the bracket width falls below
/// `rel_width` times its midpoint. Assumes `f` is unimodal on the bracket.
pub fn golden_section<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    rel_width: f64,
) -> Result<Minimum, E> {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    // Hard cap: the bracket shrinks by 0.618 per pass.
    for _ in 0..200 {
        if hi - lo <= rel_width * 0.5 * (lo + hi).abs() {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (argmin, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(Minimum {
        argmin,
        value,
        bracket: (lo, hi),
    })
}
