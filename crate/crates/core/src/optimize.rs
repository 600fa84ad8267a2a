//! Golden-section search for unimodal functions on an interval.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
/// The endpoints are compared against the interior result, so a minimum
/// sitting on the boundary is returned exactly.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 500 {
        if fc <= fd {
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
        iterations += 1;
    }
    let mut best =
        if fc <= fd { Minimum { x: c, value: fc, iterations } } else { Minimum { x: d, value: fd, iterations } };
    for x in [lo, hi] {
        let fx = f(x);
        if fx <= best.value {
            best = Minimum { x, value: fx, iterations };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let m = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10);
        assert!((m.x - 1.3).abs() < 1e-6);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_minimum_is_exact() {
        let m = golden_section(|x| x * x, 2.0, 9.0, 1e-10);
        assert_eq!(m.x, 2.0);
        assert_eq!(m.value, 4.0);
    }
}
