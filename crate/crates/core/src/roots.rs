//! Complex root finding.
//!
//! [`all_roots_dense`] runs Aberth–Ehrlich simultaneous iteration on a dense
//! polynomial. [`trinomial_roots`] handles `y^n + y^m - 1` structurally: the
//! equal-exponent case is an explicit ring, and otherwise the exponents are
//! divided by their gcd `r`, the reduced trinomial is solved densely, and
//! every reduced root is expanded into its `r` complex `r`-th roots.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use num_integer::Integer;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::cpoly::{
    self, cdiv, horner, lift_c, lower_c, relative, trinomial_parts, trinomial_relative_residual, ComplexPoint,
    DensePolynomial, Precision, Real,
};
use crate::error::{Error, Result};
use crate::graphs::TrinomialSpec;

/// Degree above which binary64 solving triggers a precision warning.
pub const EXTENDED_PRECISION_HINT_DEGREE: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Bound on `|p(z)| / sum |a_k| |z|^k` at every returned root.
    pub residual_tolerance: f64,
    pub precision: Precision,
    /// Angular offset (radians) of the initial circle of iterates.
    pub seed_angle: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 200,
            residual_tolerance: 1e-10,
            precision: Precision::Standard,
            seed_angle: 0.4,
        }
    }
}

impl SolverConfig {
    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be positive"));
        }
        if !(self.residual_tolerance > 0.0) {
            return Err(Error::invalid("residual tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    DenseIteration,
    ExplicitRing,
    GcdReduction,
}

/// Multiset of roots with per-root relative residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSet {
    #[serde(serialize_with = "cpoly::serialize_points")]
    roots: Vec<ComplexPoint>,
    residuals: Vec<f64>,
    solver: SolverKind,
    iterations_used: usize,
}

impl RootSet {
    /// A bare root multiset (zero residuals), e.g. for classification of
    /// externally supplied roots.
    pub fn from_points(roots: Vec<ComplexPoint>) -> Self {
        let residuals = vec![0.0; roots.len()];
        RootSet {
            roots,
            residuals,
            solver: SolverKind::DenseIteration,
            iterations_used: 0,
        }
    }

    pub fn roots(&self) -> &[ComplexPoint] {
        &self.roots
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn solver(&self) -> SolverKind {
        self.solver
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn map_points(&self, f: impl Fn(ComplexPoint) -> ComplexPoint) -> RootSet {
        RootSet {
            roots: self.roots.iter().map(|&z| f(z)).collect(),
            ..self.clone()
        }
    }

    /// Product of root moduli.
    pub fn modulus_product(&self) -> f64 {
        self.roots.iter().map(|z| z.norm().ln()).sum::<f64>().exp()
    }

    /// Whether the multiset is invariant under conjugation, pairing within
    /// `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let conj: Vec<_> = self.roots.iter().map(|z| z.conj()).collect();
        match_root_multisets(&self.roots, &conj).is_some_and(|d| d <= tol)
    }
}

/// `y^n + y^m - 1 = g(y^r)` with `g(z) = z^p_red + z^q_red - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedForm {
    pub r: u32,
    pub p_red: u32,
    pub q_red: u32,
}

impl ReducedForm {
    pub fn reduced_trinomial(&self) -> TrinomialSpec {
        TrinomialSpec::new(self.p_red, self.q_red).expect("reduced exponents are positive and ordered")
    }
}

pub fn reduce_trinomial(t: &TrinomialSpec) -> ReducedForm {
    let r = t.n().gcd(&t.m());
    ReducedForm {
        r,
        p_red: t.n() / r,
        q_red: t.m() / r,
    }
}

/// All roots of a dense polynomial by Aberth–Ehrlich iteration with Newton
/// polishing.
pub fn all_roots_dense(p: &DensePolynomial, cfg: &SolverConfig) -> Result<RootSet> {
    cfg.validate()?;
    if p.degree() == 0 {
        return Err(Error::invalid("constant polynomial has no roots"));
    }
    if p.leading_coefficient().norm() <= 1e-300 {
        return Err(Error::invalid("leading coefficient too small"));
    }
    if p.precision() == Precision::Standard && p.degree() > EXTENDED_PRECISION_HINT_DEGREE {
        log::warn!(
            "degree {} exceeds {}; consider --precision extended",
            p.degree(),
            EXTENDED_PRECISION_HINT_DEGREE
        );
    }
    let (roots, residuals, iterations) = match p.precision() {
        Precision::Standard => aberth::<f64>(p.coefficients(), cfg)?,
        Precision::Extended => aberth::<TwoFloat>(p.coefficients(), cfg)?,
    };
    verify_stored(&roots, cfg, |z| p.relative_residual(z))?;
    Ok(RootSet {
        roots,
        residuals,
        solver: SolverKind::DenseIteration,
        iterations_used: iterations,
    })
}

/// Stored roots may sit this far above the working residual after rounding.
const STORED_RESIDUAL_FACTOR: f64 = 1e4;

/// Re-evaluates the returned points through a separate path.
fn verify_stored(roots: &[ComplexPoint], cfg: &SolverConfig, residual: impl Fn(ComplexPoint) -> f64) -> Result<()> {
    let limit = cfg.residual_tolerance * STORED_RESIDUAL_FACTOR;
    match roots.iter().find(|&&z| !(residual(z) <= limit)) {
        Some(z) => Err(Error::Consistency(format!(
            "stored root {} {:+}i fails re-evaluation (residual {:e})",
            z.re,
            z.im,
            residual(*z)
        ))),
        None => Ok(()),
    }
}

type Solved = (Vec<ComplexPoint>, Vec<f64>, usize);

fn aberth<T: Real>(coeffs: &[Complex64], cfg: &SolverConfig) -> Result<Solved> {
    let coeffs: Vec<Complex<T>> = coeffs.iter().map(|&c| lift_c(c)).collect();
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree].norm();

    let moduli: Vec<f64> = coeffs.iter().map(|c| (c.norm() / lead).lower()).collect();
    let radius = cauchy_radius(&moduli);
    let mut z: Vec<Complex<T>> = (0..degree)
        .map(|k| {
            let angle = TAU * k as f64 / degree as f64 + cfg.seed_angle;
            lift_c(Complex64::from_polar(radius, angle))
        })
        .collect();

    // Roots can sit on the Cauchy circle itself, so the clamp needs slack.
    let bound = T::lift(2.0 * radius);
    let step_tol = T::lift(4.0 * T::EPS);
    // Horner's rounding error is about 2n units of roundoff relative to the
    // coefficient scale; below that the residual carries no information.
    let floor_residual = 4.0 * degree as f64 * T::EPS;
    let mut done = vec![false; degree];
    let mut iterations = 0;
    while iterations < cfg.max_iterations && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (value, deriv, scale) = horner(&coeffs, z[i]);
            let residual = relative(value.norm().lower(), scale.lower());
            if residual <= floor_residual {
                done[i] = true;
                continue;
            }
            // 1/step = p'/p - sum_{j != i} 1/(z_i - z_j)
            let repulsion = z.iter().enumerate().filter(|&(j, _)| j != i).fold(
                Complex::new(T::zero(), T::zero()),
                |acc, (_, zj)| {
                    let d = z[i] - zj;
                    if d.norm().is_zero() {
                        acc
                    } else {
                        acc + cdiv(Complex::new(T::one(), T::zero()), d)
                    }
                },
            );
            let mut step = cdiv(Complex::new(T::one(), T::zero()), cdiv(deriv, value) - repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                step = Complex::new(T::lift(1e-8) * (T::one() + z[i].norm()), T::zero());
            }
            z[i] = z[i] - step;
            if z[i].norm() > bound {
                // no root lies outside the Cauchy disk
                z[i] = z[i].scale(bound / z[i].norm());
            }
            // A tiny step alone can come from a crowded neighbourhood, so the
            // residual has to agree before the iterate is frozen.
            if step.norm() <= step_tol * z[i].norm().max(T::epsilon()) && residual <= cfg.residual_tolerance {
                done[i] = true;
            }
        }
    }

    let mut roots = Vec::with_capacity(degree);
    let mut residuals = Vec::with_capacity(degree);
    for zi in z {
        let zi = newton_polish(&coeffs, zi);
        let (value, _, scale) = horner(&coeffs, zi);
        roots.push(lower_c(zi));
        residuals.push(relative(value.norm().lower(), scale.lower()));
    }
    let worst = residuals.iter().copied().fold(
        0.0,
        |a: f64, r| if a.is_nan() || r.is_nan() { f64::NAN } else { a.max(r) },
    );
    if !(worst <= cfg.residual_tolerance) {
        return Err(Error::NoConvergence {
            iterations,
            worst_residual: worst,
            best_iterate: roots,
        });
    }
    Ok((roots, residuals, iterations))
}

/// Cauchy bound: the positive root of `x^n - sum_{k<n} |a_k| x^k` for a
/// monic coefficient modulus list. Every root satisfies `|z| <= radius`.
fn cauchy_radius(moduli: &[f64]) -> f64 {
    let n = moduli.len() - 1;
    let crude = moduli[..n].iter().copied().fold(0.0, f64::max) + 1.0;
    if moduli[..n].iter().all(|&a| a == 0.0) {
        return 1.0;
    }
    // 1 - sum |a_k| x^{k-n} is increasing in x
    let excess = |x: f64| {
        1.0 - moduli[..n]
            .iter()
            .enumerate()
            .map(|(k, a)| a * x.powi(k as i32 - n as i32))
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (0.0, crude);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Up to three Newton steps, each accepted only if it lowers |p|.
fn newton_polish<T: Real>(coeffs: &[Complex<T>], mut z: Complex<T>) -> Complex<T> {
    let (mut value, mut deriv, _) = horner(coeffs, z);
    for _ in 0..3 {
        if value.norm().is_zero() || deriv.norm().is_zero() {
            break;
        }
        let candidate = z - cdiv(value, deriv);
        let (v2, d2, _) = horner(coeffs, candidate);
        if v2.norm() < value.norm() {
            z = candidate;
            value = v2;
            deriv = d2;
        } else {
            break;
        }
    }
    z
}

/// Newton polish of a trinomial root evaluated by binary powering.
fn trinomial_polish<T: Real>(t: &TrinomialSpec, mut z: Complex<T>) -> Complex<T> {
    let (mut value, mut deriv, _) = trinomial_parts(t, z);
    for _ in 0..3 {
        if value.norm().is_zero() || deriv.norm().is_zero() {
            break;
        }
        let candidate = z - cdiv(value, deriv);
        let (v2, d2, _) = trinomial_parts(t, candidate);
        if v2.norm() < value.norm() {
            z = candidate;
            value = v2;
            deriv = d2;
        } else {
            break;
        }
    }
    z
}

/// All `n` roots of `y^n + y^m - 1`.
pub fn trinomial_roots(t: &TrinomialSpec, cfg: &SolverConfig) -> Result<RootSet> {
    cfg.validate()?;
    match cfg.precision {
        Precision::Standard => trinomial_roots_in::<f64>(t, cfg),
        Precision::Extended => trinomial_roots_in::<TwoFloat>(t, cfg),
    }
}

fn trinomial_roots_in<T: Real>(t: &TrinomialSpec, cfg: &SolverConfig) -> Result<RootSet> {
    let tau = T::PI() + T::PI();
    let (candidates, solver, iterations): (Vec<Complex<T>>, _, _) = if t.is_equal_exponent() {
        // 2y^n - 1: ring of radius (1/2)^(1/n)
        let n = T::lift(t.n() as f64);
        let radius = (T::lift(0.5).ln() / n).exp();
        let ring = (0..t.n())
            .map(|k| Complex::from_polar(radius, tau * T::lift(k as f64) / n))
            .collect();
        (ring, SolverKind::ExplicitRing, 0)
    } else {
        let reduced = reduce_trinomial(t);
        let g = reduced.reduced_trinomial();
        let dense = DensePolynomial::from_int_polynomial(&g.to_int_polynomial(), cfg.precision)?;
        let base = all_roots_dense(&dense, cfg)?;
        let r = T::lift(reduced.r as f64);
        let mut out = Vec::with_capacity(t.degree());
        for &z in base.roots() {
            let z: Complex<T> = lift_c(z);
            let z = trinomial_polish(&g, z);
            let modulus = (z.norm().ln() / r).exp();
            let theta = z.im.atan2(z.re);
            for k in 0..reduced.r {
                let angle = (theta + tau * T::lift(k as f64)) / r;
                out.push(Complex::from_polar(modulus, angle));
            }
        }
        let solver = if reduced.r == 1 {
            SolverKind::DenseIteration
        } else {
            SolverKind::GcdReduction
        };
        (out, solver, base.iterations_used())
    };

    let mut roots = Vec::with_capacity(candidates.len());
    let mut residuals = Vec::with_capacity(candidates.len());
    for mut y in candidates {
        let (v, _, s) = trinomial_parts(t, y);
        let mut res = relative(v.norm().lower(), s.lower());
        if res > cfg.residual_tolerance {
            y = trinomial_polish(t, y);
            let (v, _, s) = trinomial_parts(t, y);
            res = relative(v.norm().lower(), s.lower());
        }
        roots.push(lower_c(y));
        residuals.push(res);
    }
    let worst = residuals.iter().copied().fold(
        0.0,
        |a: f64, r| if a.is_nan() || r.is_nan() { f64::NAN } else { a.max(r) },
    );
    if !(worst <= cfg.residual_tolerance) {
        return Err(Error::NoConvergence {
            iterations,
            worst_residual: worst,
            best_iterate: roots,
        });
    }
    verify_stored(&roots, cfg, |z| trinomial_relative_residual(t, z, cfg.precision))?;
    Ok(RootSet {
        roots,
        residuals,
        solver,
        iterations_used: iterations,
    })
}

/// Matches two root multisets and returns the largest matched distance, or
/// `None` if their sizes differ.
///
/// Matching is greedy nearest-neighbour with an escalating radius: pairs
/// closer than the current radius are fixed first, then the radius grows
/// tenfold until everything is paired.
pub fn match_root_multisets(a: &[ComplexPoint], b: &[ComplexPoint]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut matched = vec![false; a.len()];
    let mut remaining = a.len();
    let mut worst: f64 = 0.0;
    let mut radius = 1e-14;
    while remaining > 0 {
        for (i, za) in a.iter().enumerate() {
            if matched[i] {
                continue;
            }
            let nearest = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, zb)| (j, (za - zb).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            if let Some((j, d)) = nearest {
                if d <= radius {
                    used[j] = true;
                    matched[i] = true;
                    remaining -= 1;
                    worst = worst.max(d);
                }
            }
        }
        if radius > f64::MAX / 10.0 {
            // non-finite points can never be matched
            return Some(f64::INFINITY);
        }
        radius *= 10.0;
    }
    Some(worst)
}
