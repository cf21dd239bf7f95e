//! Instability of `K_{m,ℓm}` for rational `ℓ = p/q > 1`.
//!
//! With `m = q·r`, `Φ(K_{m,ℓm}, y) = g(y^r)` for `g(z) = z^p + z^q - 1`. A
//! root `t = s·e^{iθ}` of `g` with `s > 1` yields roots `s^{1/r} e^{iθ/r}`
//! whose real part exceeds 1 once `r` is large enough.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::cpoly::{self, ComplexPoint};
use crate::error::{Error, Result};
use crate::graphs::TrinomialSpec;
use crate::roots::{trinomial_roots, RootSet, SolverConfig};
use crate::stability::{classify_bipartite, GridCell, StabilityReport, Verdict};

/// Moduli and real parts closer than this are treated as ties.
pub const TIE_TOL: f64 = 1e-10;
/// `|Im t| <= SNAP_TOL·|t|` puts `t` on the real axis.
pub const SNAP_TOL: f64 = 1e-12;
/// `θ` below this counts as zero.
pub const THETA_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ratio {
    p: u32,
    q: u32,
}

impl Ratio {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `g(z) = z^p + z^q - 1`
    pub fn trinomial(&self) -> TrinomialSpec {
        TrinomialSpec::new(self.p, self.q).expect("ratio keeps p > q >= 1")
    }

    /// `ℓ·m`, if it is an integer.
    pub fn scale(&self, m: u32) -> Option<u32> {
        m.is_multiple_of(self.q)
            .then(|| (m / self.q).checked_mul(self.p))
            .flatten()
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Reduces `p/q`; requires `p > q >= 1`.
pub fn make_ratio(p: u32, q: u32) -> Result<Ratio> {
    if q == 0 {
        return Err(Error::invalid("q must be positive"));
    }
    if p <= q {
        return Err(Error::invalid(format!("ratio {p}/{q} must exceed 1")));
    }
    let d = p.gcd(&q);
    Ok(Ratio { p: p / d, q: q / d })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DominantRoot {
    #[serde(serialize_with = "cpoly::serialize_point")]
    pub t: ComplexPoint,
    pub s: f64,
    /// `arg t` in `[0, 2π)`.
    pub theta: f64,
}

/// Picks the dominant root: largest modulus, then largest real part, then
/// `Im > 0`.
pub fn select_dominant(roots: &[ComplexPoint]) -> Option<ComplexPoint> {
    let s_max = roots.iter().map(|z| z.norm()).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<ComplexPoint> = roots
        .iter()
        .copied()
        .filter(|z| s_max - z.norm() <= TIE_TOL * s_max.max(1.0))
        .collect();
    let re_max = top.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    top.into_iter()
        .filter(|z| re_max - z.re <= TIE_TOL * s_max.max(1.0))
        .max_by(|a, b| a.im.total_cmp(&b.im))
}

fn normalized_angle(t: ComplexPoint) -> f64 {
    let a = t.im.atan2(t.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

pub fn dominant_root(r: &Ratio, cfg: &SolverConfig) -> Result<DominantRoot> {
    let roots = trinomial_roots(&r.trinomial(), cfg)?;
    dominant_from_roots(&roots)
}

fn dominant_from_roots(roots: &RootSet) -> Result<DominantRoot> {
    let mut t = select_dominant(roots.roots()).ok_or_else(|| Error::invalid("empty root set"))?;
    if t.im.abs() <= SNAP_TOL * t.norm() {
        t.im = 0.0;
    }
    let s = t.norm();
    if !(s > 1.0) {
        return Err(Error::Consistency(format!("largest root modulus {s} is not above 1")));
    }
    Ok(DominantRoot {
        t,
        s,
        theta: normalized_angle(t),
    })
}

/// `θ` folded into `[0, π]`.
pub fn theta_eff(theta: f64) -> f64 {
    if theta <= PI {
        theta
    } else {
        TAU - theta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaValue {
    pub delta: f64,
    /// Set for `θ = 0`, where `U = 0`.
    pub zero_angle: bool,
}

/// `δ(s,θ) = min(1/2, arctan(ln s / θ) / θ)`.
pub fn delta_s_theta(s: f64, theta_eff: f64) -> Result<DeltaValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::invalid(format!("s must exceed 1, got {s}")));
    }
    if !(-THETA_ZERO_TOL..=PI + THETA_ZERO_TOL).contains(&theta_eff) {
        return Err(Error::invalid(format!("theta must lie in [0, π], got {theta_eff}")));
    }
    if theta_eff.abs() <= THETA_ZERO_TOL {
        return Ok(DeltaValue {
            delta: 0.5,
            zero_angle: true,
        });
    }
    Ok(DeltaValue {
        delta: ((s.ln() / theta_eff).atan() / theta_eff).min(0.5),
        zero_angle: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioThreshold {
    pub ratio: Ratio,
    pub dominant: DominantRoot,
    pub theta_eff: f64,
    pub delta_s_theta: f64,
    #[serde(rename = "U")]
    pub u: u64,
    /// `K_{m,ℓm}` is unstable for every multiple `m > N_ell` of `q`.
    #[serde(rename = "N_ell")]
    pub n_ell: u64,
}

pub fn threshold_nell(r: &Ratio, cfg: &SolverConfig) -> Result<RatioThreshold> {
    let dominant = dominant_root(r, cfg)?;
    let th = theta_eff(dominant.theta);
    let d = delta_s_theta(dominant.s, th)?;
    let u = if d.zero_angle { 0 } else { (1.0 / d.delta).ceil() as u64 };
    Ok(RatioThreshold {
        ratio: *r,
        dominant,
        theta_eff: th,
        delta_s_theta: d.delta,
        u,
        n_ell: u64::from(r.q) * u,
    })
}

/// `s^{1/r} cos(θ_eff / r)` with `r = m/q`: the largest real part in the
/// dominant root family of `Φ(K_{m,ℓm})`.
pub fn closed_form_max_re(r: &Ratio, dominant: &DominantRoot, m: u32) -> Result<f64> {
    if m == 0 || !m.is_multiple_of(r.q) {
        return Err(Error::invalid(format!(
            "m = {m} is not a positive multiple of q = {}",
            r.q
        )));
    }
    let rr = (m / r.q) as f64;
    Ok(dominant.s.powf(1.0 / rr) * (theta_eff(dominant.theta) / rr).cos())
}

/// The family point `s^{1/r} e^{i θ_eff / r}` in `y` coordinates.
pub fn closed_form_point(r: &Ratio, dominant: &DominantRoot, m: u32) -> Result<ComplexPoint> {
    closed_form_max_re(r, dominant, m)?;
    let rr = (m / r.q) as f64;
    Ok(Complex64::from_polar(
        dominant.s.powf(1.0 / rr),
        theta_eff(dominant.theta) / rr,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessScan {
    pub ratio: Ratio,
    /// Smallest scanned `m` with an unstable verdict.
    pub m_star: Option<u32>,
    pub report: Option<StabilityReport>,
    /// One cell per scanned `m`, ascending.
    pub cells: Vec<GridCell>,
}

/// Classifies `K_{m,ℓm}` for `m = q, 2q, ..., <= m_max` from the full root
/// set and reports the first unstable `m`.
pub fn instability_witness(r: &Ratio, m_max: u32, cfg: &SolverConfig, tol: f64) -> Result<WitnessScan> {
    if m_max < r.q {
        return Err(Error::invalid(format!("m_max must be at least q = {}", r.q)));
    }
    cfg.validate()?;
    let ms: Vec<u32> = (1..=m_max / r.q).map(|j| j * r.q).collect();
    let cells: Vec<GridCell> = ms
        .into_par_iter()
        .map(|m| {
            let outcome = match r.scale(m) {
                Some(n) => classify_bipartite(m, n, cfg, tol),
                None => Err(Error::invalid(format!("ℓ·m overflows for m = {m}"))),
            };
            GridCell {
                m,
                n: r.scale(m).unwrap_or(0),
                outcome,
            }
        })
        .collect();
    let first = cells
        .iter()
        .find(|c| matches!(&c.outcome, Ok(rep) if rep.verdict == Verdict::Unstable));
    Ok(WitnessScan {
        ratio: *r,
        m_star: first.map(|c| c.m),
        report: first.and_then(|c| c.outcome.clone().ok()),
        cells,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    /// Weierstrass iteration, independent of the solver under test.
    fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let eval = |z: Complex64| {
            coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c / lead)
        };
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
        for _ in 0..2000 {
            let mut delta: f64 = 0.0;
            for i in 0..n {
                let denom = (0..n)
                    .filter(|&j| j != i)
                    .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
                let step = eval(z[i]) / denom;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-15 {
                break;
            }
        }
        z
    }

    fn g_coeffs(p: u32, q: u32) -> Vec<f64> {
        let mut c = vec![0.0; p as usize + 1];
        c[0] = -1.0;
        c[q as usize] += 1.0;
        c[p as usize] += 1.0;
        c
    }

    #[test]
    fn ratio_reduction() {
        let r = make_ratio(6, 4).unwrap();
        assert_eq!((r.p(), r.q()), (3, 2));
        assert_eq!(make_ratio(2, 1).unwrap().to_string(), "2/1");
        assert!(make_ratio(3, 3).is_err());
        assert!(make_ratio(1, 2).is_err());
        assert!(make_ratio(1, 0).is_err());
        assert_eq!(r.scale(4), Some(6));
        assert_eq!(r.scale(3), None);
    }

    #[test]
    fn delta_formula() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let d = delta_s_theta(phi, PI).unwrap();
        assert!((d.delta - 0.048380912622618037).abs() < 1e-15);
        assert!(!d.zero_angle);
        assert_eq!(delta_s_theta(std::f64::consts::E, 1.0).unwrap().delta, 0.5);
        let d = delta_s_theta(2.0, 0.0).unwrap();
        assert!(d.zero_angle && d.delta == 0.5);
        assert!(delta_s_theta(1.0, 1.0).is_err());
        assert!(delta_s_theta(2.0, 4.0).is_err());
        assert_eq!(theta_eff(1.0), 1.0);
        assert!((theta_eff(TAU - 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dominant_selection_rules() {
        let c = Complex64::new;
        // conjugates tie on modulus and real part
        assert_eq!(
            select_dominant(&[c(0.5, -2.0), c(0.5, 2.0), c(0.1, 0.1)]),
            Some(c(0.5, 2.0))
        );
        // modulus tie broken by real part
        assert_eq!(select_dominant(&[c(-2.0, 0.0), c(2.0, 0.0)]), Some(c(2.0, 0.0)));
        assert_eq!(select_dominant(&[]), None);
    }

    #[test]
    fn dominant_against_oracle() {
        let cfg = SolverConfig::default();
        for p in 2..=12u32 {
            for q in 1..p {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let r = make_ratio(p, q).unwrap();
                let d = dominant_root(&r, &cfg).unwrap();
                let oracle = select_dominant(&durand_kerner(&g_coeffs(p, q))).unwrap();
                assert!((d.s - oracle.norm()).abs() < 1e-9, "{r}");
                assert!(
                    (d.t - oracle).norm() < 1e-8 || (d.t.im == 0.0 && oracle.im.abs() < 1e-8),
                    "{r}: {} vs {oracle}",
                    d.t
                );
                assert!(d.s > 1.0);
                assert!((0.0..TAU).contains(&d.theta));
                let roots = trinomial_roots(&r.trinomial(), &cfg).unwrap();
                assert!((roots.modulus_product() - 1.0).abs() < 1e-8, "{r}");
            }
        }
    }

    #[test]
    fn frozen_thresholds() {
        let cfg = SolverConfig::default();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let t = threshold_nell(&make_ratio(2, 1).unwrap(), &cfg).unwrap();
        assert!((t.dominant.t.re + phi).abs() < 1e-14);
        assert_eq!(t.dominant.t.im, 0.0);
        assert_eq!(t.dominant.theta, PI);
        assert!((t.delta_s_theta - 0.048380912622618037).abs() < 1e-14);
        assert_eq!((t.u, t.n_ell), (21, 21));

        let cases = [
            (
                (3, 2),
                (-0.87743883312334638, 0.74486176661974424),
                2.4377349322883167,
                0.023633651358705819,
                43,
                86,
            ),
            (
                (5, 3),
                (0.2178532193922913, 1.1669512456648499),
                1.3862350467589837,
                0.088807229455012877,
                12,
                36,
            ),
            (
                (3, 1),
                (-0.34116390191400966, 1.1615413999972519),
                1.8564785414713025,
                0.05525922126118149,
                19,
                19,
            ),
        ];
        for ((p, q), (re, im), theta, delta, u, n) in cases {
            let t = threshold_nell(&make_ratio(p, q).unwrap(), &cfg).unwrap();
            assert!((t.dominant.t - Complex64::new(re, im)).norm() < 1e-13, "{p}/{q}");
            assert!((t.dominant.theta - theta).abs() < 1e-13);
            assert!((t.delta_s_theta - delta).abs() < 1e-13);
            assert_eq!((t.u, t.n_ell), (u, n), "{p}/{q}");
        }
        for ((p, q), n) in [((4, 3), 93), ((5, 2), 18), ((7, 4), 28)] {
            assert_eq!(
                threshold_nell(&make_ratio(p, q).unwrap(), &cfg).unwrap().n_ell,
                n,
                "{p}/{q}"
            );
        }
        let t = threshold_nell(&make_ratio(4, 3).unwrap(), &cfg).unwrap();
        assert!((t.dominant.t.re + 1.3802775690976141).abs() < 1e-13);
    }

    #[test]
    fn closed_form_onset() {
        let cfg = SolverConfig::default();
        let r = make_ratio(2, 1).unwrap();
        let d = dominant_root(&r, &cfg).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let v11 = closed_form_max_re(&r, &d, 11).unwrap();
        let v10 = closed_form_max_re(&r, &d, 10).unwrap();
        assert!((v11 - phi.powf(1.0 / 11.0) * (PI / 11.0).cos()).abs() < 1e-14);
        assert!(v11 > 1.0 && v10 < 1.0);
        assert!((v11 - 1.0023991163).abs() < 1e-9);
        assert!((v10 - 0.99794).abs() < 1e-5);
        let crossings = (2..200)
            .filter(|&m| {
                let a = closed_form_max_re(&r, &d, m).unwrap() - 1.0;
                let b = closed_form_max_re(&r, &d, m + 1).unwrap() - 1.0;
                a.signum() != b.signum()
            })
            .collect::<Vec<_>>();
        assert_eq!(crossings, vec![10]);
        assert!((closed_form_max_re(&r, &d, 1).unwrap() + phi).abs() < 1e-14);
        assert!(closed_form_max_re(&make_ratio(3, 2).unwrap(), &d, 3).is_err());
    }

    #[test]
    fn witness_scan() {
        let cfg = SolverConfig::default();
        let r = make_ratio(2, 1).unwrap();
        let w = instability_witness(&r, 30, &cfg, 1e-9).unwrap();
        assert_eq!(w.m_star, Some(11));
        assert_eq!(w.cells.len(), 30);
        assert_eq!(w.report.unwrap().graph_label, "K_{11,22}");
        assert_eq!(instability_witness(&r, 10, &cfg, 1e-9).unwrap().m_star, None);
        let r = make_ratio(3, 2).unwrap();
        assert!(instability_witness(&r, 1, &cfg, 1e-9).is_err());
        let w = instability_witness(&r, 100, &cfg, 1e-9).unwrap();
        assert_eq!(w.m_star, Some(44));
        assert!(w.cells.iter().all(|c| c.m % 2 == 0 && c.n == 3 * c.m / 2));
    }

    #[test]
    fn family_point_is_a_root() {
        let cfg = SolverConfig::default();
        for (p, q, m) in [(2, 1, 11), (3, 2, 8), (5, 3, 9), (3, 1, 4)] {
            let r = make_ratio(p, q).unwrap();
            let d = dominant_root(&r, &cfg).unwrap();
            let want = closed_form_point(&r, &d, m).unwrap();
            let phi = crate::graphs::phi_trinomial(m, r.scale(m).unwrap()).unwrap();
            let roots = trinomial_roots(&phi, &cfg).unwrap();
            let nearest = roots
                .roots()
                .iter()
                .map(|z| (z - want).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "{p}/{q} m={m}: {nearest}");
        }
    }
}
