//! Hurwitz stability of independence polynomials.
//!
//! A graph is stable when every independence root lies in the closed left
//! half-plane. Numerically the verdict carries a tolerance band: roots whose
//! real part is within `tol` of zero give an indeterminate verdict.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::cpoly::{self, shift_roots_to_x, ComplexPoint};
use crate::error::{Error, Result};
use crate::graphs::phi_trinomial;
use crate::numfmt::fmt_sig15;
use crate::roots::{trinomial_roots, RootSet, SolverConfig};

pub const DEFAULT_STABILITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Indeterminate => "indeterminate",
        }
    }

    /// `stable` iff `max_re_x < -tol`, `unstable` iff `max_re_x > tol`.
    pub fn from_max_real_part(max_re_x: f64, tol: f64) -> Verdict {
        if max_re_x < -tol {
            Verdict::Stable
        } else if max_re_x > tol {
            Verdict::Unstable
        } else {
            Verdict::Indeterminate
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub graph_label: String,
    pub verdict: Verdict,
    /// Largest real part over the independence roots.
    pub max_real_part_x: f64,
    /// The same in the shifted coordinate `y = x + 1`.
    pub max_real_part_y: f64,
    /// A root attaining the maximum, reported for unstable verdicts.
    #[serde(serialize_with = "cpoly::serialize_opt_point")]
    pub witness_root: Option<ComplexPoint>,
    /// `-max_real_part_x`
    pub margin: f64,
    pub tolerance: f64,
}

/// Root of largest real part; among conjugates the one with `Im >= 0`.
fn rightmost(roots: &[ComplexPoint]) -> Option<ComplexPoint> {
    roots.iter().copied().max_by(|a, b| {
        a.re.total_cmp(&b.re)
            .then_with(|| (a.im >= 0.0).cmp(&(b.im >= 0.0)))
            .then_with(|| b.im.abs().total_cmp(&a.im.abs()))
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "stability tolerance must be positive, got {tol}"
        )))
    }
}

/// Classifies a root multiset given in `x` coordinates.
pub fn classify_rootset(label: &str, roots_x: &RootSet, tol: f64) -> Result<StabilityReport> {
    check_tol(tol)?;
    let top = rightmost(roots_x.roots()).ok_or_else(|| Error::invalid("empty root set"))?;
    let verdict = Verdict::from_max_real_part(top.re, tol);
    Ok(StabilityReport {
        graph_label: label.to_string(),
        verdict,
        max_real_part_x: top.re,
        max_real_part_y: top.re + 1.0,
        witness_root: (verdict == Verdict::Unstable).then_some(top),
        margin: -top.re,
        tolerance: tol,
    })
}

pub fn bipartite_label(m: u32, n: u32) -> String {
    format!("K_{{{m},{n}}}")
}

/// Solves `Φ(K_{m,n})`, shifts the roots to `x = y - 1` and classifies.
pub fn classify_bipartite(m: u32, n: u32, cfg: &SolverConfig, tol: f64) -> Result<StabilityReport> {
    check_tol(tol)?;
    let roots_x = bipartite_roots_x(m, n, cfg)?;
    classify_rootset(&bipartite_label(m, n), &roots_x, tol)
}

/// Independence roots of `K_{m,n}` in `x` coordinates.
pub fn bipartite_roots_x(m: u32, n: u32, cfg: &SolverConfig) -> Result<RootSet> {
    let phi = phi_trinomial(m, n)?;
    Ok(shift_roots_to_x(&trinomial_roots(&phi, cfg)?))
}

/// One cell of a stability scan.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCell {
    pub m: u32,
    pub n: u32,
    pub outcome: Result<StabilityReport>,
}

/// Classifies every `K_{m,n}` with `m <= m_max`, `m <= n <= n_max`, ordered
/// by `m` then `n`. Cells are computed in parallel; a solver failure is kept
/// in its cell and the scan continues.
pub fn stability_grid(m_max: u32, n_max: u32, cfg: &SolverConfig, tol: f64) -> Result<Vec<GridCell>> {
    if m_max == 0 || n_max == 0 {
        return Err(Error::invalid("grid bounds must be at least 1"));
    }
    check_tol(tol)?;
    cfg.validate()?;
    let pairs: Vec<(u32, u32)> = (1..=m_max.min(n_max))
        .flat_map(|m| (m..=n_max).map(move |n| (m, n)))
        .collect();
    Ok(pairs
        .into_par_iter()
        .map(|(m, n)| GridCell {
            m,
            n,
            outcome: classify_bipartite(m, n, cfg, tol),
        })
        .collect())
}

pub const GRID_CSV_HEADER: &str = "m,n,verdict,max_re_x,witness_re,witness_im";

/// Writes the grid as CSV. Failed cells carry verdict `error` and empty
/// numeric fields.
pub fn write_grid_csv<W: Write>(cells: &[GridCell], mut out: W) -> io::Result<()> {
    writeln!(out, "{GRID_CSV_HEADER}")?;
    for cell in cells {
        match &cell.outcome {
            Ok(report) => {
                let (wre, wim) = match report.witness_root {
                    Some(w) => (fmt_sig15(w.re), fmt_sig15(w.im)),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    cell.m,
                    cell.n,
                    report.verdict.as_str(),
                    fmt_sig15(report.max_real_part_x),
                    wre,
                    wim
                )?;
            }
            Err(_) => writeln!(out, "{},{},error,,,", cell.m, cell.n)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> ComplexPoint {
        Complex64::new(re, im)
    }

    #[test]
    fn verdict_band() {
        assert_eq!(Verdict::from_max_real_part(-1e-3, 1e-9), Verdict::Stable);
        assert_eq!(Verdict::from_max_real_part(1e-3, 1e-9), Verdict::Unstable);
        assert_eq!(Verdict::from_max_real_part(0.0, 1e-9), Verdict::Indeterminate);
        assert_eq!(Verdict::from_max_real_part(-1e-9, 1e-9), Verdict::Indeterminate);
    }

    #[test]
    fn rootset_classification() {
        let r = classify_rootset("a", &RootSet::from_points(vec![c(-0.5, 0.0)]), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert_eq!(r.margin, 0.5);
        assert_eq!(r.witness_root, None);

        let r = classify_rootset("b", &RootSet::from_points(vec![c(-1.0, 2.0), c(-1.0, -2.0)]), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);

        let r = classify_rootset(
            "c",
            &RootSet::from_points(vec![c(0.0024, -0.29), c(0.0024, 0.29)]),
            1e-9,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Unstable);
        assert_eq!(r.witness_root, Some(c(0.0024, 0.29)));
        assert!((r.max_real_part_y - 1.0024).abs() < 1e-15);

        assert!(classify_rootset("d", &RootSet::from_points(vec![]), 1e-9).is_err());
        assert!(classify_rootset("e", &RootSet::from_points(vec![c(0.0, 0.0)]), 0.0).is_err());
    }

    #[test]
    fn bipartite_cases() {
        let cfg = SolverConfig::default();
        let r = classify_bipartite(4, 4, &cfg, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert_eq!(r.graph_label, "K_{4,4}");
        assert_eq!(classify_bipartite(1, 5, &cfg, 1e-9).unwrap().verdict, Verdict::Stable);

        let r = classify_bipartite(11, 22, &cfg, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Unstable);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let expected = phi.powf(1.0 / 11.0) * (std::f64::consts::PI / 11.0).cos() - 1.0;
        assert!((r.max_real_part_x - expected).abs() < 1e-12);
        let w = r.witness_root.unwrap();
        assert!(w.im > 0.0);
        assert!((w.re - expected).abs() < 1e-12);
    }

    #[test]
    fn grid_small() {
        let cfg = SolverConfig::default();
        let cells = stability_grid(1, 1, &cfg, 1e-9).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].outcome.as_ref().unwrap().verdict, Verdict::Stable);

        let cells = stability_grid(3, 30, &cfg, 1e-9).unwrap();
        assert_eq!(cells.len(), 30 + 29 + 28);
        assert!(cells
            .iter()
            .all(|c| c.outcome.as_ref().unwrap().verdict == Verdict::Stable));
        // ordering is by m then n
        assert_eq!((cells[30].m, cells[30].n), (2, 2));
        assert!(stability_grid(0, 3, &cfg, 1e-9).is_err());
    }

    #[test]
    fn grid_csv() {
        let cfg = SolverConfig::default();
        let cells: Vec<GridCell> = stability_grid(11, 22, &cfg, 1e-9)
            .unwrap()
            .into_iter()
            .filter(|c| (c.m, c.n) == (1, 1) || (c.m, c.n) == (11, 22))
            .collect();
        let mut buf = Vec::new();
        write_grid_csv(&cells, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], GRID_CSV_HEADER);
        assert_eq!(lines[1], "1,1,stable,-0.5,,");
        assert!(lines[2].starts_with("11,22,unstable,0.0023991163"), "{}", lines[2]);

        let failed = vec![GridCell {
            m: 2,
            n: 3,
            outcome: Err(Error::invalid("x")),
        }];
        let mut buf = Vec::new();
        write_grid_csv(&failed, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().nth(1), Some("2,3,error,,,"));
    }
}
