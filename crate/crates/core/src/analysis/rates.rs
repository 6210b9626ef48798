//! Success rates of the two-station strategies over the encoding sphere.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::optimize::{nelder_mead, SimplexOptions};
use crate::attacks::{attack_modified, strategy_success_probability, ModifiedStrategy};
use crate::error::{Error, Result};
use crate::matrix::{c, inner, CMatrix};
use crate::protocols::{angles_gate, ModifiedInstance, Program};
use crate::rng::{trial_rng, OutcomeSource};
use crate::spacetime::Geometry;
use crate::state::{BlochAngles, SingleGate};

/// Successive quadrature refinements stop once they differ by less than this.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Coarsest quadrature grid per axis.
pub const QUADRATURE_START: usize = 32;
/// Finest grid tried before giving up on the tolerance.
pub const QUADRATURE_MAX: usize = 4096;
/// Fewest Monte Carlo samples accepted.
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub strategy: ModifiedStrategy,
    pub rate: f64,
    /// `√(p(1−p)/n)`.
    pub std_error: f64,
    pub samples: usize,
    pub quadrature: Option<f64>,
}

/// A converged sphere average and the grid it converged on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub cells: usize,
    /// Difference from the previous refinement.
    pub change: f64,
}

/// Midpoint average of `f` over `cosθ ∈ [c0, c1]`, `φ ∈ [p0, p1]` with
/// `nc × nphi` cells (uniform in the sphere measure).
pub fn midpoint_average(f: &dyn Fn(BlochAngles) -> f64, nc: usize, nphi: usize, cos_range: (f64, f64), phi_range: (f64, f64)) -> f64 {
    let dc = (cos_range.1 - cos_range.0) / nc as f64;
    let dp = (phi_range.1 - phi_range.0) / nphi as f64;
    let mut total = 0.0;
    for i in 0..nc {
        let cos = cos_range.0 + (i as f64 + 0.5) * dc;
        let theta = cos.clamp(-1.0, 1.0).acos();
        let mut row = 0.0;
        for j in 0..nphi {
            let phi = phi_range.0 + (j as f64 + 0.5) * dp;
            row += f(BlochAngles::new(theta, phi).expect("grid angles in range"));
        }
        total += row;
    }
    total / (nc * nphi) as f64
}

/// Sphere average, doubling the grid until successive values agree to `tol`.
pub fn sphere_average(f: &dyn Fn(BlochAngles) -> f64, tol: f64) -> Result<Quadrature> {
    let full = |n| midpoint_average(f, n, n, (-1.0, 1.0), (0.0, 2.0 * PI));
    let mut n = QUADRATURE_START;
    let mut prev = full(n);
    while n < QUADRATURE_MAX {
        n *= 2;
        let next = full(n);
        let change = (next - prev).abs();
        if change < tol {
            return Ok(Quadrature { value: next, cells: n, change });
        }
        prev = next;
    }
    Err(Error::InvalidArgument("quadrature did not converge".into()))
}

/// Sphere-averaged success of the maximum-likelihood teleport strategy.
pub fn rate_quadrature_teleport() -> Result<Quadrature> {
    sphere_average(&|a| strategy_success_probability(ModifiedStrategy::TeleportOptimal, a), QUADRATURE_TOL)
}

pub fn rate_quadrature(strategy: ModifiedStrategy) -> Result<Quadrature> {
    sphere_average(&|a| strategy_success_probability(strategy, a), QUADRATURE_TOL)
}

/// The teleport integrand on an `n × n` grid: full domain, the `cosθ ≥ 0`
/// half and the `φ < π` half. The halves equal the full value by symmetry.
pub fn half_domain_check(n: usize) -> (f64, f64, f64) {
    let f = |a| strategy_success_probability(ModifiedStrategy::TeleportOptimal, a);
    let full = midpoint_average(&f, n, n, (-1.0, 1.0), (0.0, 2.0 * PI));
    let upper = midpoint_average(&f, n / 2, n, (0.0, 1.0), (0.0, 2.0 * PI));
    let front = midpoint_average(&f, n, n / 2, (-1.0, 1.0), (0.0, PI));
    (full, upper, front)
}

/// `φ`-averaged success at each `θ`.
pub fn theta_sweep(strategy: ModifiedStrategy, thetas: &[f64], nphi: usize) -> Result<Vec<(f64, f64)>> {
    thetas
        .iter()
        .map(|&theta| {
            let mut total = 0.0;
            for j in 0..nphi {
                let phi = (j as f64 + 0.5) * 2.0 * PI / nphi as f64;
                total += strategy_success_probability(strategy, BlochAngles::new(theta, phi)?);
            }
            Ok((theta, total / nphi as f64))
        })
        .collect()
}

/// Line layout used for the two-station rate experiments.
fn rate_geometry() -> Geometry {
    Geometry::collinear(1.0, 0.1, 1.0).expect("valid line layout")
}

/// Monte Carlo over the sphere: trial `i` draws `cosθ`, `φ` and `u` from
/// stream `i` under `seed` and runs the strategy once.
pub fn rate_monte_carlo(strategy: ModifiedStrategy, samples: usize, seed: u64) -> Result<RateReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(alloc::format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let geometry = rate_geometry();
    let mut wins = 0usize;
    for i in 0..samples {
        let mut rng = trial_rng(seed, i as u64);
        let cos = 2.0 * rng.uniform() - 1.0;
        let phi = (2.0 * PI * rng.uniform()).min(2.0 * PI - 1e-15);
        let u = rng.uniform() < 0.5;
        let angles = BlochAngles::new(cos.acos(), phi)?;
        let instance = ModifiedInstance::from_program(2, u, &Program::Angles(angles))?;
        if attack_modified(&instance, strategy, &geometry, &mut rng)?.success {
            wins += 1;
        }
    }
    let rate = wins as f64 / samples as f64;
    let quadrature = match strategy {
        ModifiedStrategy::EntangleMemory => None,
        _ => Some(rate_quadrature(strategy)?.value),
    };
    Ok(RateReport { strategy, rate, std_error: (rate * (1.0 - rate) / samples as f64).sqrt(), samples, quadrature })
}

/// `exp(i(xX + yY + zZ))`.
pub fn rotation_from_params(p: &[f64]) -> CMatrix {
    let (x, y, z) = (p[0], p[1], p[2]);
    let r = (x * x + y * y + z * z).sqrt();
    let (s, co) = r.sin_cos();
    let k = if r < 1e-300 { 0.0 } else { s / r };
    // cos r · I + i sin r · (n·σ)
    CMatrix::from_rows(2, vec![c(co, k * z), c(k * y, k * x), c(-k * y, k * x), c(co, -k * z)])
}

/// Success when `B2` measures `{F R|0⟩, F R|1⟩}` with `F|0⟩ = ψ`,
/// `F|1⟩ = ψ̄`, then decides by maximum likelihood.
pub fn b2_basis_success(rotation: &CMatrix, angles: BlochAngles) -> f64 {
    let frame = angles_gate(angles).matrix();
    let basis = &frame * rotation;
    let paulis = [CMatrix::identity(2), SingleGate::X.matrix(), SingleGate::Z.matrix(), &SingleGate::X.matrix() * &SingleGate::Z.matrix()];
    let mut total = 0.0;
    for p in &paulis {
        for v in 0..2 {
            let b = basis.column(v);
            let best = (0..2).map(|u| inner(&b, &p.apply(&frame.column(u))).norm_sqr()).fold(0.0, f64::max);
            total += best / 2.0;
        }
    }
    total / 4.0
}

/// Sphere average of [`b2_basis_success`] on an `n × n` midpoint grid.
pub fn b2_basis_rate(rotation: &CMatrix, n: usize) -> f64 {
    midpoint_average(&|a| b2_basis_success(rotation, a), n, n, (-1.0, 1.0), (0.0, 2.0 * PI))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSearchResult {
    pub best_rate: f64,
    /// Rotation generator `(x, y, z)` at the best point.
    pub rotation: [f64; 3],
    /// Rate with no rotation on the same grid.
    pub identity_rate: f64,
    pub restarts: usize,
    pub grid: usize,
}

/// Grid used while searching over constant rotations.
pub const BASIS_SEARCH_GRID: usize = 64;

/// Multi-start simplex search over a constant rotation `R` of `B2`'s basis.
/// Restart 0 starts from the identity.
pub fn optimal_b2_basis_search(restarts: usize, seed: u64) -> Result<BasisSearchResult> {
    if restarts < 8 {
        return Err(Error::InvalidArgument(alloc::format!("need at least 8 restarts, got {restarts}")));
    }
    let grid = BASIS_SEARCH_GRID;
    let mut f = |p: &[f64]| b2_basis_rate(&rotation_from_params(p), grid);
    let identity_rate = f(&[0.0; 3]);
    let mut best = (vec![0.0; 3], identity_rate);
    for r in 0..restarts {
        let x0 = if r == 0 {
            vec![0.0; 3]
        } else {
            let mut rng = trial_rng(seed, r as u64);
            (0..3).map(|_| PI * (2.0 * rng.uniform() - 1.0)).collect()
        };
        let (x, v) = nelder_mead(&mut f, &x0, SimplexOptions { step: 0.4, max_evals: 400, tol: 1e-10 });
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(BasisSearchResult { best_rate: best.1, rotation: [best.0[0], best.0[1], best.0[2]], identity_rate, restarts, grid })
}
