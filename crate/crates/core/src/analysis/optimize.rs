//! Small deterministic local optimizers used by the searches.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Nelder–Mead maximization settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the starting simplex.
    pub step: f64,
    pub max_evals: usize,
    /// Stop once the spread of simplex values falls below this.
    pub tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { step: 0.3, max_evals: 4000, tol: 1e-12 }
    }
}

/// Maximizes `f` from `x0` with the Nelder–Mead simplex. Returns the best
/// point and its value.
pub fn nelder_mead(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], opts: SimplexOptions) -> (Vec<f64>, f64) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f(x0));
    }
    // minimize g = -f
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), -f(x0)));
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += opts.step;
        let v = -f(&x);
        simplex.push((x, v));
    }
    let mut evals = n + 1;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 < opts.tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let toward = |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (w - c)).collect() };
        let worst = simplex[n].0.clone();
        let xr = toward(-1.0, &worst);
        let fr = -f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = toward(-2.0, &worst);
            let fe = -f(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = toward(-0.5, &worst);
                let fc = -f(&xc);
                (xc, fc)
            } else {
                let xc = toward(0.5, &worst);
                let fc = -f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best.iter().zip(&entry.0).map(|(b, xi)| b + 0.5 * (xi - b)).collect();
                    let v = -f(&x);
                    *entry = (x, v);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, -v)
}

/// Adam ascent state for a fixed-length parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    pub rate: f64,
}

impl Adam {
    pub fn new(len: usize, rate: f64) -> Self {
        Self { m: vec![0.0; len], v: vec![0.0; len], t: 0, rate }
    }

    /// One ascent step along `grad`.
    pub fn step(&mut self, x: &mut [f64], grad: &[f64]) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        self.t += 1;
        let c1 = 1.0 - B1.powi(self.t);
        let c2 = 1.0 - B2.powi(self.t);
        for i in 0..x.len() {
            self.m[i] = B1 * self.m[i] + (1.0 - B1) * grad[i];
            self.v[i] = B2 * self.v[i] + (1.0 - B2) * grad[i] * grad[i];
            x[i] += self.rate * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + 1e-12);
        }
    }
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `min` smoothed from below: `−ln(Σ e^{−β v})/β`, plus the weights
/// `∂/∂v_p` of the smoothed value.
pub fn soft_min(values: &[f64], beta: f64) -> (f64, Vec<f64>) {
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = values.iter().map(|v| (-beta * (v - m)).exp()).collect();
    let z: f64 = e.iter().sum();
    (m - z.ln() / beta, e.iter().map(|x| x / z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_finds_quadratic_peak() {
        let mut f = |x: &[f64]| -((x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2));
        let (x, v) = nelder_mead(&mut f, &[0.0, 0.0], SimplexOptions::default());
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 0.5).abs() < 1e-5);
        assert!(v > -1e-10);
    }

    #[test]
    fn adam_climbs() {
        let mut f = |x: &[f64]| -(x[0] - 2.0).powi(2);
        let mut x = vec![0.0];
        let mut opt = Adam::new(1, 0.1);
        for _ in 0..500 {
            let g = fd_gradient(&mut f, &x, 1e-6);
            opt.step(&mut x, &g);
        }
        assert!((x[0] - 2.0).abs() < 1e-2);
    }

    #[test]
    fn soft_min_bounds() {
        let (s, w) = soft_min(&[0.2, 0.9, 0.5], 1e4);
        assert!(s <= 0.2 && s > 0.2 - 1e-3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
