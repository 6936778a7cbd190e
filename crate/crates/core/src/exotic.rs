//! Brieskorn 7-spheres `Σ⁷ = Y_κ ∩ X`, with
//! `Y_κ: z₁² + z₂² + z₃² + z₄³ + z₅^{6κ−1} = 0` and `X: Σ|z_j|² = 1`,
//! sampled by Gauss–Newton projection, plus `Θ₇ ≅ Z₂₈` class arithmetic.
//!
//! Real coordinates are interleaved: `(Re z₁, Im z₁, …, Re z₅, Im z₅)`.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;
pub const RANK_THRESHOLD: f64 = 1e-8;
const MAX_HALVINGS: usize = 40;

type Jacobian = SMatrix<f64, 3, 10>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrieskornPoint {
    pub z: [Complex64; 5],
}

impl BrieskornPoint {
    pub fn new(z: [Complex64; 5]) -> Self {
        Self { z }
    }

    pub fn from_reals(r: &[f64; 10]) -> Self {
        Self { z: std::array::from_fn(|j| Complex64::new(r[2 * j], r[2 * j + 1])) }
    }

    pub fn to_reals(&self) -> [f64; 10] {
        std::array::from_fn(|k| if k % 2 == 0 { self.z[k / 2].re } else { self.z[k / 2].im })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn exponents(kappa: u32) -> Result<[u32; 5]> {
    if !(1..=28).contains(&kappa) {
        return Err(Error::InvalidInput(format!("κ must lie in 1..=28, got {kappa}")));
    }
    Ok([2, 2, 2, 3, 6 * kappa - 1])
}

/// `(z₁² + z₂² + z₃² + z₄³ + z₅^{6κ−1}, Σ|z_j|² − 1)`.
pub fn brieskorn_residuals(p: &BrieskornPoint, kappa: u32) -> Result<(Complex64, f64)> {
    let e = exponents(kappa)?;
    Ok(residuals(p, &e))
}

fn residuals(p: &BrieskornPoint, e: &[u32; 5]) -> (Complex64, f64) {
    let poly = p.z.iter().zip(e).map(|(z, &k)| z.powu(k)).sum();
    (poly, p.norm_sqr() - 1.0)
}

fn residual_vector(p: &BrieskornPoint, e: &[u32; 5]) -> SVector<f64, 3> {
    let (poly, sphere) = residuals(p, e);
    SVector::<f64, 3>::new(poly.re, poly.im, sphere)
}

/// The real 3×10 Jacobian of `(Re P, Im P, Σ|z|² − 1)`.
pub fn constraint_jacobian(p: &BrieskornPoint, kappa: u32) -> Result<SMatrix<f64, 3, 10>> {
    Ok(jacobian(p, &exponents(kappa)?))
}

fn jacobian(p: &BrieskornPoint, e: &[u32; 5]) -> Jacobian {
    let mut j = Jacobian::zeros();
    for (k, (z, &ek)) in p.z.iter().zip(e).enumerate() {
        // P is holomorphic: ∂P/∂x = P', ∂P/∂y = i·P'.
        let d = z.powu(ek - 1) * ek as f64;
        j[(0, 2 * k)] = d.re;
        j[(0, 2 * k + 1)] = -d.im;
        j[(1, 2 * k)] = d.im;
        j[(1, 2 * k + 1)] = d.re;
        j[(2, 2 * k)] = 2.0 * z.re;
        j[(2, 2 * k + 1)] = 2.0 * z.im;
    }
    j
}

/// Rank of the constraint Jacobian, counting singular values above
/// [`RANK_THRESHOLD`].
pub fn jacobian_rank(p: &BrieskornPoint, kappa: u32) -> Result<usize> {
    let j = constraint_jacobian(p, kappa)?;
    Ok(j.singular_values().iter().filter(|&&s| s > RANK_THRESHOLD).count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: BrieskornPoint,
    pub iterations: usize,
    pub poly_residual: f64,
    pub sphere_residual: f64,
}

fn converged(r: &SVector<f64, 3>) -> bool {
    (r[0] * r[0] + r[1] * r[1]).sqrt() < RESIDUAL_TOL && r[2].abs() < RESIDUAL_TOL
}

/// Gauss–Newton with minimal-norm SVD steps and a halving line search.
pub fn project_to_sigma(z0: &BrieskornPoint, kappa: u32) -> Result<Projection> {
    let e = exponents(kappa)?;
    if z0.norm_sqr() == 0.0 {
        return Err(Error::Domain("the origin is the singular point of Y_κ; the Jacobian vanishes there".into()));
    }
    let mut x = SVector::<f64, 10>::from(z0.to_reals());
    let point = |x: &SVector<f64, 10>| BrieskornPoint::from_reals(&(*x).into());
    let mut r = residual_vector(z0, &e);
    for iterations in 0..=MAX_ITERATIONS {
        if converged(&r) {
            let (poly, sphere) = residuals(&point(&x), &e);
            return Ok(Projection {
                point: point(&x),
                iterations,
                poly_residual: poly.norm(),
                sphere_residual: sphere.abs(),
            });
        }
        if iterations == MAX_ITERATIONS {
            break;
        }
        let j = jacobian(&point(&x), &e);
        let svd = j.svd(true, true);
        if svd.singular_values.iter().all(|&s| s <= RANK_THRESHOLD) {
            return Err(Error::Domain(format!("degenerate constraint Jacobian at {:?}", point(&x).z)));
        }
        let step = svd
            .solve(&r, RANK_THRESHOLD)
            .map_err(|e| Error::Domain(format!("least-squares step failed: {e}")))?;
        let norm = r.norm();
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = x - step * lambda;
            let rt = residual_vector(&point(&trial), &e);
            if rt.norm() < norm {
                x = trial;
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let (poly, sphere) = residuals(&point(&x), &e);
    Err(Error::NotConverged { iterations: MAX_ITERATIONS, poly: poly.norm(), sphere: sphere.abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledPoint {
    pub reals: [f64; 10],
    pub poly_residual: f64,
    pub sphere_residual: f64,
    pub rank: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianReport {
    pub requested: usize,
    pub converged: usize,
    /// Ranks of the converged points, in sample order.
    pub ranks: Vec<usize>,
    pub all_rank_three: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaSample {
    pub kappa: u32,
    pub seed: u64,
    pub points: Vec<SampledPoint>,
    pub report: JacobianReport,
}

/// Projects `count` random unit vectors drawn from `seed` onto `Σ⁷`.
pub fn sample_sigma(kappa: u32, count: usize, seed: u64) -> Result<SigmaSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<BrieskornPoint> = (0..count)
        .map(|_| loop {
            let v: [f64; 10] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 0.0 {
                break BrieskornPoint::from_reals(&v.map(|a| a / n));
            }
        })
        .collect();
    sample_from(kappa, &seeds, seed)
}

/// Projects the given starting points onto `Σ⁷`.
pub fn sample_from(kappa: u32, starts: &[BrieskornPoint], seed: u64) -> Result<SigmaSample> {
    exponents(kappa)?;
    if starts.is_empty() {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let mut points = Vec::new();
    for z0 in starts {
        match project_to_sigma(z0, kappa) {
            Ok(p) => points.push(SampledPoint {
                reals: p.point.to_reals(),
                poly_residual: p.poly_residual,
                sphere_residual: p.sphere_residual,
                rank: jacobian_rank(&p.point, kappa)?,
                iterations: p.iterations,
            }),
            Err(Error::NotConverged { .. }) | Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let requested = starts.len();
    if points.len() * 2 < requested {
        return Err(Error::SamplingFailure { converged: points.len(), requested });
    }
    let ranks: Vec<usize> = points.iter().map(|p| p.rank).collect();
    Ok(SigmaSample {
        kappa,
        seed,
        report: JacobianReport {
            requested,
            converged: points.len(),
            all_rank_three: ranks.iter().all(|&r| r == 3),
            ranks,
        },
        points,
    })
}

/// An element of `Θ₇ ≅ Z₂₈`; class 0 is the standard sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Theta7Class(u8);

impl Theta7Class {
    pub const ORDER: u8 = 28;
    pub const STANDARD: Theta7Class = Theta7Class(0);

    pub fn new(value: i64) -> Self {
        Self(value.rem_euclid(Self::ORDER as i64) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Connected sum.
    pub fn add(self, other: Self) -> Self {
        Self((self.0 + other.0) % Self::ORDER)
    }

    pub fn invert(self) -> Self {
        Self((Self::ORDER - self.0) % Self::ORDER)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta7Op {
    Add,
    Invert,
}

/// `Add` returns `a + b`; `Invert` returns `−a` and ignores `b`.
pub fn theta7_op(a: Theta7Class, b: Theta7Class, op: Theta7Op) -> Theta7Class {
    match op {
        Theta7Op::Add => a.add(b),
        Theta7Op::Invert => a.invert(),
    }
}
