//! Composite Simpson quadrature on uniform grids.
//!
//! Every integral in the crate goes through the same rule: Simpson's 1/3
//! rule over consecutive node pairs, and for an odd number of intervals the
//! last interval is closed with the quadratic through the final three
//! nodes. [`Cumulative`] uses the identical piecewise-quadratic interpolant,
//! so a running integral evaluated at the right end reproduces
//! [`simpson`] exactly.

/// Composite Simpson integral of equally spaced samples with spacing `h`.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let even = n - n % 2;
            let mut acc = 0.0;
            for pair in (0..even).step_by(2) {
                acc += values[pair] + 4.0 * values[pair + 1] + values[pair + 2];
            }
            let mut total = acc * h / 3.0;
            if n % 2 == 1 {
                total += h * (-values[n - 2] + 8.0 * values[n - 1] + 5.0 * values[n]) / 12.0;
            }
            total
        }
    }
}

/// Simpson integral of `f` over `[a, b]` with `intervals` subintervals
/// (rounded up to an even count).
pub fn simpson_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = even_at_least(intervals.max(2));
    let h = (b - a) / n as f64;
    let samples: Vec<f64> = (0..=n).map(|k| f(a + k as f64 * h)).collect();
    simpson(&samples, h)
}

pub(crate) fn even_at_least(n: usize) -> usize {
    n + n % 2
}

/// Integral of the quadratic through `(0,f0) (1,f1) (2,f2)` over `s ∈ [0, s_end]`,
/// in units of the node spacing.
fn quadratic_area(f0: f64, f1: f64, f2: f64, s_end: f64) -> f64 {
    let s2 = s_end * s_end;
    let s3 = s2 * s_end;
    let w0 = 0.5 * (s3 / 3.0 - 1.5 * s2 + 2.0 * s_end);
    let w1 = -(s3 / 3.0 - s2);
    let w2 = 0.5 * (s3 / 3.0 - 0.5 * s2);
    w0 * f0 + w1 * f1 + w2 * f2
}

/// Running integral `x ↦ ∫_{x0}^{x} f` of uniformly sampled data.
#[derive(Debug, Clone)]
pub struct Cumulative {
    origin: f64,
    h: f64,
    values: Vec<f64>,
    at_nodes: Vec<f64>,
}

impl Cumulative {
    pub fn new(origin: f64, h: f64, values: &[f64]) -> Self {
        let n = values.len().saturating_sub(1);
        let mut at_nodes = vec![0.0; values.len()];
        if n == 1 {
            at_nodes[1] = 0.5 * h * (values[0] + values[1]);
        } else if n >= 2 {
            let even = n - n % 2;
            for pair in (0..even).step_by(2) {
                let (f0, f1, f2) = (values[pair], values[pair + 1], values[pair + 2]);
                let base = at_nodes[pair];
                at_nodes[pair + 1] = base + h * quadratic_area(f0, f1, f2, 1.0);
                at_nodes[pair + 2] = base + h * (f0 + 4.0 * f1 + f2) / 3.0;
            }
            if n % 2 == 1 {
                at_nodes[n] =
                    at_nodes[n - 1] + h * (-values[n - 2] + 8.0 * values[n - 1] + 5.0 * values[n]) / 12.0;
            }
        }
        Self {
            origin,
            h,
            values: values.to_vec(),
            at_nodes,
        }
    }

    pub fn total(&self) -> f64 {
        self.at_nodes.last().copied().unwrap_or(0.0)
    }

    pub fn at_nodes(&self) -> &[f64] {
        &self.at_nodes
    }

    /// Integral from the origin to `x`, clamped to the sampled range.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.values.len().saturating_sub(1);
        if n == 0 {
            return 0.0;
        }
        let s = ((x - self.origin) / self.h).clamp(0.0, n as f64);
        let k = s.floor() as usize;
        if k >= n {
            return self.total();
        }
        if s == k as f64 {
            return self.at_nodes[k];
        }
        let f = &self.values;
        if n == 1 {
            let frac = s;
            let fx = f[0] + frac * (f[1] - f[0]);
            return 0.5 * self.h * frac * (f[0] + fx);
        }
        let even = n - n % 2;
        if k < even {
            let start = k - k % 2;
            let local = s - start as f64;
            self.at_nodes[start]
                + self.h * quadratic_area(f[start], f[start + 1], f[start + 2], local)
        } else {
            // trailing odd interval, quadratic through the last three nodes
            let start = n - 2;
            let local = s - start as f64;
            let (f0, f1, f2) = (f[start], f[start + 1], f[start + 2]);
            self.at_nodes[n - 1]
                + self.h * (quadratic_area(f0, f1, f2, local) - quadratic_area(f0, f1, f2, 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, f64) {
        let h = (b - a) / n as f64;
        ((0..=n).map(|k| f(a + k as f64 * h)).collect(), h)
    }

    #[test]
    fn exact_for_cubics_even_and_odd() {
        let f = |x: f64| 2.0 * x * x * x - x * x + 3.0 * x - 1.0;
        let exact = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 1.5 * x * x - x;
        for n in [2, 3, 4, 7, 10] {
            let (v, h) = grid(0.0, 2.0, n, f);
            let s = simpson(&v, h);
            // the odd-interval closure is only quadratic-exact
            let tol = if n % 2 == 0 { 1e-12 } else { 0.2 };
            assert!((s - (exact(2.0) - exact(0.0))).abs() < tol, "n={n} got {s}");
        }
    }

    #[test]
    fn degenerate_lengths() {
        assert_eq!(simpson(&[], 0.1), 0.0);
        assert_eq!(simpson(&[3.0], 0.1), 0.0);
        assert!((simpson(&[1.0, 3.0], 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_converges() {
        let f = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let (v, h) = grid(-10.0, 10.0, 4096, f);
        assert!((simpson(&v, h) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cumulative_total_matches_simpson() {
        for n in [1, 2, 5, 8, 33] {
            let (v, h) = grid(0.0, 3.0, n, |x| x.sin() + 2.0);
            let c = Cumulative::new(0.0, h, &v);
            assert_eq!(c.total(), c.at(3.0));
            assert!((c.total() - simpson(&v, h)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn cumulative_between_nodes() {
        let (v, h) = grid(0.0, 2.0, 400, |x| x.cos());
        let c = Cumulative::new(0.0, h, &v);
        for x in [0.0, 0.0123, 0.5, 1.00001, 1.7777, 2.0] {
            assert!((c.at(x) - x.sin()).abs() < 1e-10, "x={x}");
        }
        // odd interval count exercises the trailing closure
        let (v, h) = grid(0.0, 2.0, 401, |x| x.cos());
        let c = Cumulative::new(0.0, h, &v);
        assert!((c.at(1.9999) - 1.9999f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn simpson_fn_rounds_to_even() {
        let s = simpson_fn(|x| x * x, 0.0, 3.0, 3);
        assert!((s - 9.0).abs() < 1e-12);
    }
}
