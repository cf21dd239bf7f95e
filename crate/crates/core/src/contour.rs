//! Numerical Rouché checks on rectangular contours.
//!
//! For a pair `(f, g)` and a rectangle, [`rouche_margin`] samples
//! `|f(z)| - |f(z) + g(z)|` around the boundary; a positive minimum is
//! numerical evidence (not a certificate) that `f` and `g` have equally many
//! zeros inside. [`winding_zero_count`] counts those zeros through the
//! argument principle.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::cpoly::{self, ComplexPoint};
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES_PER_EDGE: usize = 4096;
pub const MIN_SAMPLES_PER_EDGE: usize = 64;

/// Stop refining a local minimum once the bracket's margin spread drops
/// below this.
const REFINE_SPREAD: f64 = 1e-3;
const REFINE_DEPTH: usize = 20;
/// Local minima refined per contour, smallest first.
const REFINE_CANDIDATES: usize = 16;
const PHASE_STEP_LIMIT: f64 = PI / 2.0;
const PHASE_DEPTH: usize = 40;
const ZERO_THRESHOLD: f64 = 1e-12;

/// Axis-aligned rectangle traversed counterclockwise from the corner
/// `(re_max, im_min)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub samples_per_edge: usize,
}

impl ContourSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, samples_per_edge: usize) -> Result<Self> {
        let c = ContourSpec {
            re_min,
            re_max,
            im_min,
            im_max,
            samples_per_edge,
        };
        c.validate()?;
        Ok(c)
    }

    /// `[-3, 1] x [-2, 2]`, whose right edge is the line `Re y = 1`.
    pub fn gamma() -> Self {
        ContourSpec {
            re_min: -3.0,
            re_max: 1.0,
            im_min: -2.0,
            im_max: 2.0,
            samples_per_edge: DEFAULT_SAMPLES_PER_EDGE,
        }
    }

    /// `[-3, 0] x [-2, 2]`, the same box with right edge `Re x = 0`.
    pub fn beta() -> Self {
        ContourSpec {
            re_max: 0.0,
            ..Self::gamma()
        }
    }

    pub fn with_samples(mut self, samples_per_edge: usize) -> Self {
        self.samples_per_edge = samples_per_edge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::invalid(format!("degenerate rectangle {self:?}")));
        }
        if self.samples_per_edge < MIN_SAMPLES_PER_EDGE {
            return Err(Error::invalid(format!(
                "samples_per_edge must be at least {MIN_SAMPLES_PER_EDGE}, got {}",
                self.samples_per_edge
            )));
        }
        Ok(())
    }

    fn corners(&self) -> [ComplexPoint; 4] {
        [
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
            Complex64::new(self.re_min, self.im_min),
        ]
    }

    /// Point at arc parameter `s` in `[0, 4)`: edge `floor(s)`, local
    /// fraction `s - floor(s)`.
    pub fn point_at(&self, s: f64) -> ComplexPoint {
        let s = s.rem_euclid(4.0);
        let edge = (s.floor() as usize).min(3);
        let frac = s - edge as f64;
        let corners = self.corners();
        let a = corners[edge];
        let b = corners[(edge + 1) % 4];
        a + (b - a) * frac
    }

    /// Boundary samples; every corner appears exactly once.
    pub fn samples(&self) -> Vec<ComplexPoint> {
        let per = self.samples_per_edge;
        (0..4 * per).map(|i| self.point_at(i as f64 / per as f64)).collect()
    }

    pub fn strictly_contains(&self, z: ComplexPoint) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }
}

/// A complex function usable on contours.
pub type ComplexFn = Arc<dyn Fn(ComplexPoint) -> ComplexPoint + Send + Sync>;

/// A Rouché pair with human-readable descriptions of both functions.
#[derive(Clone)]
pub struct RouchePair {
    pub label: String,
    pub f: ComplexFn,
    pub g: ComplexFn,
    pub f_text: String,
    pub g_text: String,
}

impl fmt::Debug for RouchePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RouchePair")
            .field("label", &self.label)
            .field("f", &self.f_text)
            .field("g", &self.g_text)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginReport {
    /// Minimum of `|f(z)| - |f(z) + g(z)|` over the sampled contour.
    pub min_margin: f64,
    #[serde(serialize_with = "cpoly::serialize_point")]
    pub argmin_point: ComplexPoint,
    /// Whether bisection refinement improved on the raw sample minimum.
    pub refined: bool,
}

fn checked(func: &ComplexFn, z: ComplexPoint) -> Result<ComplexPoint> {
    let v = func(z);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { re: z.re, im: z.im })
    }
}

fn margin_at(pair: &RouchePair, z: ComplexPoint) -> Result<f64> {
    let f = checked(&pair.f, z)?;
    let g = checked(&pair.g, z)?;
    Ok(f.norm() - (f + g).norm())
}

/// Minimum Rouché margin over the contour, with bisection refinement
/// around the smallest local minima of the samples.
pub fn rouche_margin(pair: &RouchePair, c: &ContourSpec) -> Result<MarginReport> {
    c.validate()?;
    let per = c.samples_per_edge as f64;
    let total = 4 * c.samples_per_edge;
    let margins = (0..total)
        .map(|i| margin_at(pair, c.point_at(i as f64 / per)))
        .collect::<Result<Vec<f64>>>()?;

    let (mut best_idx, mut best) = (0, margins[0]);
    for (i, &v) in margins.iter().enumerate() {
        if v < best {
            best = v;
            best_idx = i;
        }
    }
    let mut best_s = best_idx as f64 / per;
    let mut refined = false;

    let mut minima: Vec<usize> = (0..total)
        .filter(|&i| {
            let prev = margins[(i + total - 1) % total];
            let next = margins[(i + 1) % total];
            margins[i] <= prev && margins[i] <= next
        })
        .collect();
    minima.sort_by(|&a, &b| margins[a].total_cmp(&margins[b]).then(a.cmp(&b)));
    minima.truncate(REFINE_CANDIDATES);

    for i in minima {
        let (s, v) = refine_minimum(pair, c, i as f64 / per, 1.0 / per, margins[i])?;
        if v < best {
            best = v;
            best_s = s;
            refined = true;
        }
    }
    Ok(MarginReport {
        min_margin: best,
        argmin_point: c.point_at(best_s),
        refined,
    })
}

/// Shrinks a bracket `[s - h, s + h]` around a sampled local minimum,
/// keeping the best of the centre and the two half-way points each round.
fn refine_minimum(pair: &RouchePair, c: &ContourSpec, mut s: f64, mut h: f64, mut v: f64) -> Result<(f64, f64)> {
    for _ in 0..REFINE_DEPTH {
        h /= 2.0;
        let left = margin_at(pair, c.point_at(s - h))?;
        let right = margin_at(pair, c.point_at(s + h))?;
        let spread = (left - v).abs().max((right - v).abs());
        if left < v && left <= right {
            s -= h;
            v = left;
        } else if right < v {
            s += h;
            v = right;
        }
        if spread < REFINE_SPREAD {
            break;
        }
    }
    Ok((s.rem_euclid(4.0), v))
}

/// Zeros of `func` enclosed by the contour, by the argument principle.
///
/// Phase is followed along the boundary by nearest-branch continuation;
/// whenever two consecutive samples differ in phase by more than `π/2` the
/// step is bisected.
pub fn winding_zero_count(func: &ComplexFn, c: &ContourSpec) -> Result<i64> {
    c.validate()?;
    let per = c.samples_per_edge as f64;
    let total = 4 * c.samples_per_edge;
    let value_at = |s: f64| -> Result<ComplexPoint> {
        let z = c.point_at(s);
        let v = checked(func, z)?;
        if v.norm() < ZERO_THRESHOLD {
            return Err(Error::ZeroOnContour { re: z.re, im: z.im });
        }
        Ok(v)
    };
    let first = value_at(0.0)?;
    let mut prev = first;
    let mut total_phase = 0.0;
    for i in 1..=total {
        let s0 = (i - 1) as f64 / per;
        let s1 = i as f64 / per;
        let next = if i == total { first } else { value_at(s1)? };
        total_phase += phase_change(c, &value_at, (s0, prev), (s1, next), 0)?;
        prev = next;
    }
    Ok((total_phase / (2.0 * PI)).round() as i64)
}

fn phase_change(
    c: &ContourSpec,
    value_at: &dyn Fn(f64) -> Result<ComplexPoint>,
    (s0, v0): (f64, ComplexPoint),
    (s1, v1): (f64, ComplexPoint),
    depth: usize,
) -> Result<f64> {
    let step = (v1 / v0).arg();
    if step.abs() <= PHASE_STEP_LIMIT {
        return Ok(step);
    }
    let mid = 0.5 * (s0 + s1);
    if depth >= PHASE_DEPTH {
        let z = c.point_at(mid);
        return Err(Error::RefinementDepth {
            depth,
            re: z.re,
            im: z.im,
        });
    }
    let vm = value_at(mid)?;
    Ok(phase_change(c, value_at, (s0, v0), (mid, vm), depth + 1)?
        + phase_change(c, value_at, (mid, vm), (s1, v1), depth + 1)?)
}

/// The parameterised Rouché pairs behind the stability arguments for
/// `K_{m,m+1}`, `K_{2,n}`, `K_{3,n}` and `K_{m,m+k}`, all on `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "scenario", rename_all = "lowercase")]
pub enum Scenario {
    /// `f = -z^{m+1} - z^m`, `g = Φ(K_{m,m+1})`, `m >= 1`
    P21 { m: u32 },
    /// `f = -z^n`, `g = Φ(K_{2,n})`, `n >= 4`
    P22 { n: u32 },
    /// `f = -Φ(K_{1,n})`, `g = Φ(K_{3,n})`, `n >= 5`
    P23 { n: u32 },
    /// `f = -z^{m+k} - z^m`, `g = Φ(K_{m,m+k})`, `m >= 1`
    T3 { m: u32, k: u32 },
}

fn zpow(z: ComplexPoint, e: u32) -> ComplexPoint {
    z.powu(e)
}

fn mono_text(e: u32) -> String {
    match e {
        0 => "1".into(),
        1 => "z".into(),
        _ => format!("z^{e}"),
    }
}

impl Scenario {
    pub fn label(&self) -> String {
        match *self {
            Scenario::P21 { m } => format!("p21(m={m})"),
            Scenario::P22 { n } => format!("p22(n={n})"),
            Scenario::P23 { n } => format!("p23(n={n})"),
            Scenario::T3 { m, k } => format!("t3(m={m},k={k})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scenario::P21 { m: 0 } | Scenario::T3 { m: 0, .. } => Err(Error::invalid("m must be at least 1")),
            Scenario::P22 { n } if n < 4 => Err(Error::invalid(format!("p22 requires n >= 4, got {n}"))),
            Scenario::P23 { n } if n < 5 => Err(Error::invalid(format!("p23 requires n >= 5, got {n}"))),
            _ => Ok(()),
        }
    }

    /// Degree of `g`, which is also the number of zeros `f` has inside `γ`.
    pub fn degree(&self) -> u32 {
        match *self {
            Scenario::P21 { m } => m + 1,
            Scenario::P22 { n } | Scenario::P23 { n } => n,
            Scenario::T3 { m, k } => m + k,
        }
    }

    /// The Rouché pair and its contour `γ`.
    pub fn build(&self) -> Result<(RouchePair, ContourSpec)> {
        self.validate()?;
        let one = Complex64::new(1.0, 0.0);
        let (f, g, f_text, g_text): (ComplexFn, ComplexFn, String, String) = match *self {
            Scenario::P21 { m } => (
                Arc::new(move |z| -zpow(z, m + 1) - zpow(z, m)),
                Arc::new(move |z| zpow(z, m + 1) + zpow(z, m) - one),
                format!("-{} - {}", mono_text(m + 1), mono_text(m)),
                format!("{} + {} - 1", mono_text(m + 1), mono_text(m)),
            ),
            Scenario::P22 { n } => (
                Arc::new(move |z| -zpow(z, n)),
                Arc::new(move |z| zpow(z, n) + z * z - one),
                format!("-{}", mono_text(n)),
                format!("{} + z^2 - 1", mono_text(n)),
            ),
            Scenario::P23 { n } => (
                Arc::new(move |z| -zpow(z, n) - z + one),
                Arc::new(move |z| zpow(z, n) + z * z * z - one),
                format!("-{} - z + 1", mono_text(n)),
                format!("{} + z^3 - 1", mono_text(n)),
            ),
            Scenario::T3 { m, k } => (
                Arc::new(move |z| -zpow(z, m + k) - zpow(z, m)),
                Arc::new(move |z| zpow(z, m + k) + zpow(z, m) - one),
                format!("-{} - {}", mono_text(m + k), mono_text(m)),
                format!("{} + {} - 1", mono_text(m + k), mono_text(m)),
            ),
        };
        Ok((
            RouchePair {
                label: self.label(),
                f,
                g,
                f_text,
                g_text,
            },
            ContourSpec::gamma(),
        ))
    }
}

/// The scenario suite within each argument's parameter range:
/// `P21(1..=max)`, `P22(4..=max)`, `P23(5..=max)`, `T3(1..=max, 0..=k_max)`.
pub fn builtin_scenarios(max: u32, k_max: u32) -> Vec<Scenario> {
    let mut out = Vec::new();
    out.extend((1..=max).map(|m| Scenario::P21 { m }));
    out.extend((4..=max).map(|n| Scenario::P22 { n }));
    out.extend((5..=max).map(|n| Scenario::P23 { n }));
    for k in 0..=k_max {
        out.extend((1..=max).map(|m| Scenario::T3 { m, k }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn func(f: impl Fn(ComplexPoint) -> ComplexPoint + Send + Sync + 'static) -> ComplexFn {
        Arc::new(f)
    }

    #[test]
    fn sampling_layout() {
        let c = ContourSpec::new(-1.0, 1.0, -1.0, 1.0, 64).unwrap();
        let pts = c.samples();
        assert_eq!(pts.len(), 256);
        assert_eq!(pts[0], Complex64::new(1.0, -1.0));
        assert_eq!(pts[64], Complex64::new(1.0, 1.0));
        assert_eq!(pts[128], Complex64::new(-1.0, 1.0));
        assert_eq!(pts[192], Complex64::new(-1.0, -1.0));
        // counterclockwise: first edge goes up
        assert!(pts[1].im > pts[0].im);
    }

    #[test]
    fn contour_validation() {
        assert!(ContourSpec::new(1.0, 1.0, -1.0, 1.0, 64).is_err());
        assert!(ContourSpec::new(-1.0, 1.0, -1.0, 1.0, 63).is_err());
        assert!(ContourSpec::new(-1.0, 1.0, 1.0, -1.0, 64).is_err());
        assert_eq!(ContourSpec::beta().re_max, 0.0);
    }

    #[test]
    fn winding_counts() {
        let c = ContourSpec::new(-1.0, 1.0, -1.0, 1.0, 256).unwrap();
        assert_eq!(winding_zero_count(&func(|z| z * z * z), &c).unwrap(), 3);
        assert_eq!(winding_zero_count(&func(|z| z - 5.0), &c).unwrap(), 0);
        assert_eq!(winding_zero_count(&func(|z| 1.0 / (z * z)), &c).unwrap(), -2);
    }

    #[test]
    fn zero_on_contour_detected() {
        let c = ContourSpec::new(-1.0, 1.0, -1.0, 1.0, 64).unwrap();
        let err = winding_zero_count(&func(|z| z - 1.0), &c).unwrap_err();
        assert!(matches!(err, Error::ZeroOnContour { .. }));
    }

    #[test]
    fn non_finite_detected() {
        let c = ContourSpec::new(-1.0, 1.0, -1.0, 1.0, 64).unwrap();
        let err = winding_zero_count(&func(|_| Complex64::new(f64::NAN, 0.0)), &c).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn scenario_texts() {
        let (p, c) = Scenario::P21 { m: 3 }.build().unwrap();
        assert_eq!(p.f_text, "-z^4 - z^3");
        assert_eq!(p.g_text, "z^4 + z^3 - 1");
        assert_eq!(c, ContourSpec::gamma());
        let (p, _) = Scenario::T3 { m: 10, k: 4 }.build().unwrap();
        assert_eq!(p.f_text, "-z^14 - z^10");
        assert_eq!(p.g_text, "z^14 + z^10 - 1");
        let (p, _) = Scenario::P23 { n: 5 }.build().unwrap();
        assert_eq!(p.f_text, "-z^5 - z + 1");
        assert_eq!(p.g_text, "z^5 + z^3 - 1");
        assert!(Scenario::P22 { n: 3 }.build().is_err());
        assert!(Scenario::P23 { n: 4 }.build().is_err());
        assert!(Scenario::P21 { m: 0 }.build().is_err());
    }

    #[test]
    fn p21_margin_matches_closed_form() {
        // margin = |z|^m |z + 1| - 1, minimised at z = 1 where it equals 1
        let m = 5;
        let (pair, c) = Scenario::P21 { m }.build().unwrap();
        let rep = rouche_margin(&pair, &c).unwrap();
        assert!((rep.min_margin - 1.0).abs() < 1e-12);
        assert!((rep.argmin_point - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn margins_positive_and_counts_agree() {
        for s in [
            Scenario::P22 { n: 6 },
            Scenario::P23 { n: 7 },
            Scenario::T3 { m: 3, k: 6 },
        ] {
            let (pair, c) = s.build().unwrap();
            let rep = rouche_margin(&pair, &c).unwrap();
            assert!(rep.min_margin > 0.0, "{s:?}: {rep:?}");
            let nf = winding_zero_count(&pair.f, &c).unwrap();
            let ng = winding_zero_count(&pair.g, &c).unwrap();
            assert_eq!(nf, ng);
            assert_eq!(ng, s.degree() as i64);
        }
    }

    #[test]
    fn refinement_finds_off_grid_minimum() {
        // |f| - |f+g| = |z - z0| - 0 with z0 just off a sample on the right edge
        let z0 = Complex64::new(1.0, 0.123_456_7);
        let pair = RouchePair {
            label: "dist".into(),
            f: func(move |z| z - z0),
            g: func(move |z| -(z - z0)),
            f_text: String::new(),
            g_text: String::new(),
        };
        let c = ContourSpec::new(-1.0, 1.0, -1.0, 1.0, 64).unwrap();
        let rep = rouche_margin(&pair, &c).unwrap();
        assert!(rep.refined);
        assert!(rep.min_margin < 1e-3);
    }

    #[test]
    fn suite_listing() {
        let s = builtin_scenarios(6, 2);
        assert_eq!(s.len(), 6 + 3 + 2 + 3 * 6);
        assert!(s.iter().all(|x| x.validate().is_ok()));
    }
}
