use std::fmt::Write as _;
use std::fs;

use indstab::contour::{builtin_scenarios, rouche_margin, winding_zero_count, ContourSpec, MarginReport, Scenario};
use indstab::cpoly::{self, shift_roots_to_x, ComplexPoint};
use indstab::graphs::{
    independence_polynomial_bipartite, independence_polynomial_bruteforce, phi_trinomial, SimpleGraph,
    ENUMERATION_LIMIT,
};
use indstab::intpoly::IntPolynomial;
use indstab::numfmt::fmt_sig15;
use indstab::pk::{threshold_nk, threshold_table, write_ck_table_csv, BalancedThreshold};
use indstab::ratio::{instability_witness, make_ratio, threshold_nell, Ratio, RatioThreshold};
use indstab::roots::{trinomial_roots, SolverKind};
use indstab::stability::{
    bipartite_label, classify_bipartite, stability_grid, write_grid_csv, GridCell, StabilityReport, GRID_CSV_HEADER,
};
use indstab::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::json_text;
use crate::{Command, Coords};

pub const POINTS_CSV_HEADER: &str = "re,im";
pub const ROUCHE_CSV_HEADER: &str = "scenario,min_margin,argmin_re,argmin_im,zeros_f,zeros_g,degree,holds";
pub const WITNESS_CSV_HEADER: &str = "m,n,verdict,max_re_x";

/// Produces the output document for a subcommand.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<String, CliError> {
    match cmd {
        Command::Indpoly { m, n, graph, check } => indpoly(*m, *n, graph.as_deref(), *check, cfg),
        Command::Stability { m, n } => stability(*m, *n, cfg),
        Command::Grid { m_max, n_max } => grid(*m_max, *n_max, cfg),
        Command::Roots { m, n, coords } => roots(*m, *n, *coords, cfg, Format::Json),
        Command::Scatter { m, n } => roots(*m, *n, Coords::X, cfg, Format::Csv),
        Command::Rouche {
            scenario,
            m,
            n,
            k,
            suite,
            max,
            k_max,
        } => {
            if *suite {
                rouche_suite(*max, *k_max, cfg)
            } else {
                let s = parse_scenario(scenario.as_deref().unwrap_or_default(), *m, *n, *k)?;
                rouche_one(s, cfg)
            }
        }
        Command::Ck { k, table, k_max } => match (table, k, k_max) {
            (true, _, Some(k_max)) => ck_table(*k_max, cfg),
            (false, Some(k), _) => threshold_doc(*k, cfg, true),
            _ => Err(CliError::usage("ck needs --k K or --table --k-max K")),
        },
        Command::Nk { k } => threshold_doc(*k, cfg, false),
        Command::Nell { p, q } => nell(*p, *q, cfg),
        Command::Witness { p, q, m_max } => witness(*p, *q, *m_max, cfg),
    }
}

fn format_or(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn json_only(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::usage(format!("{what} has no CSV form"))),
        _ => Ok(()),
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<String, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct IndpolyDoc {
    graph: String,
    vertex_count: usize,
    edge_count: usize,
    degree: Option<usize>,
    /// Lowest degree first.
    coefficients: IntPolynomial,
    polynomial: String,
    method: &'static str,
    /// `Φ(y) = i(y - 1)` for complete bipartite input.
    #[serde(skip_serializing_if = "Option::is_none")]
    trinomial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumeration_agrees: Option<bool>,
}

fn indpoly(
    m: Option<u32>,
    n: Option<u32>,
    graph: Option<&std::path::Path>,
    check: bool,
    cfg: &RunConfig,
) -> Result<String, CliError> {
    let doc = match (graph, m, n) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let g = SimpleGraph::parse_edge_list(&text)?;
            let poly = independence_polynomial_bruteforce(&g)?;
            IndpolyDoc {
                graph: path.display().to_string(),
                vertex_count: g.vertex_count(),
                edge_count: g.edge_count(),
                degree: poly.degree(),
                polynomial: poly.to_string(),
                coefficients: poly,
                method: "enumeration",
                trinomial: None,
                enumeration_agrees: None,
            }
        }
        (None, Some(m), Some(n)) => {
            let poly = independence_polynomial_bipartite(m as usize, n as usize)?;
            let phi = phi_trinomial(m, n)?;
            let agrees = if check {
                if (m + n) as usize > ENUMERATION_LIMIT {
                    return Err(Error::SizeLimit {
                        vertex_count: (m + n) as usize,
                        limit: ENUMERATION_LIMIT,
                    }
                    .into());
                }
                let g = SimpleGraph::complete_bipartite(m as usize, n as usize);
                Some(independence_polynomial_bruteforce(&g)? == poly)
            } else {
                None
            };
            IndpolyDoc {
                graph: bipartite_label(m, n),
                vertex_count: (m + n) as usize,
                edge_count: (m * n) as usize,
                degree: poly.degree(),
                polynomial: poly.to_string(),
                coefficients: poly,
                method: "closed_form",
                trinomial: Some(phi.describe()),
                enumeration_agrees: agrees,
            }
        }
        _ => return Err(CliError::usage("indpoly needs --m and --n, or --graph FILE")),
    };
    match format_or(cfg, Format::Json) {
        Format::Json => json_text(&doc),
        Format::Csv => {
            let mut out = String::from("k,coefficient\n");
            for (k, c) in doc.coefficients.coefficients().iter().enumerate() {
                writeln!(out, "{k},{c}").unwrap();
            }
            Ok(out)
        }
    }
}

fn report_row(m: u32, n: u32, r: &StabilityReport) -> String {
    let (wre, wim) = match r.witness_root {
        Some(w) => (fmt_sig15(w.re), fmt_sig15(w.im)),
        None => (String::new(), String::new()),
    };
    format!(
        "{m},{n},{},{},{wre},{wim}\n",
        r.verdict.as_str(),
        fmt_sig15(r.max_real_part_x)
    )
}

fn stability(m: u32, n: u32, cfg: &RunConfig) -> Result<String, CliError> {
    let report = classify_bipartite(m, n, &cfg.solver(), cfg.stability_tol)?;
    match format_or(cfg, Format::Json) {
        Format::Json => json_text(&report),
        Format::Csv => Ok(format!("{GRID_CSV_HEADER}\n{}", report_row(m, n, &report))),
    }
}

#[derive(Serialize)]
struct GridRow {
    m: u32,
    n: u32,
    verdict: &'static str,
    max_re_x: Option<f64>,
    #[serde(serialize_with = "cpoly::serialize_opt_point")]
    witness_root: Option<ComplexPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn grid_rows(cells: &[GridCell]) -> Vec<GridRow> {
    cells
        .iter()
        .map(|c| match &c.outcome {
            Ok(r) => GridRow {
                m: c.m,
                n: c.n,
                verdict: r.verdict.as_str(),
                max_re_x: Some(r.max_real_part_x),
                witness_root: r.witness_root,
                error: None,
            },
            Err(e) => GridRow {
                m: c.m,
                n: c.n,
                verdict: "error",
                max_re_x: None,
                witness_root: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn grid(m_max: u32, n_max: u32, cfg: &RunConfig) -> Result<String, CliError> {
    let cells = stability_grid(m_max, n_max, &cfg.solver(), cfg.stability_tol)?;
    let failed = cells.iter().filter(|c| c.outcome.is_err()).count();
    if failed > 0 {
        log::warn!("{failed} grid cells failed");
    }
    match format_or(cfg, Format::Csv) {
        Format::Csv => csv_bytes(|buf| write_grid_csv(&cells, buf)),
        Format::Json => json_text(&grid_rows(&cells)),
    }
}

#[derive(Serialize)]
struct RootsDoc {
    graph: String,
    trinomial: String,
    coordinates: &'static str,
    solver: SolverKind,
    iterations_used: usize,
    max_residual: f64,
    #[serde(serialize_with = "cpoly::serialize_points")]
    roots: Vec<ComplexPoint>,
}

fn roots(m: u32, n: u32, coords: Coords, cfg: &RunConfig, default: Format) -> Result<String, CliError> {
    let phi = phi_trinomial(m, n)?;
    let in_y = trinomial_roots(&phi, &cfg.solver())?;
    let set = match coords {
        Coords::X => shift_roots_to_x(&in_y),
        Coords::Y => in_y,
    };
    match format_or(cfg, default) {
        Format::Csv => {
            let mut out = format!("{POINTS_CSV_HEADER}\n");
            for z in set.roots() {
                writeln!(out, "{},{}", fmt_sig15(z.re), fmt_sig15(z.im)).unwrap();
            }
            Ok(out)
        }
        Format::Json => json_text(&RootsDoc {
            graph: bipartite_label(m, n),
            trinomial: phi.describe(),
            coordinates: match coords {
                Coords::X => "x",
                Coords::Y => "y",
            },
            solver: set.solver(),
            iterations_used: set.iterations_used(),
            max_residual: set.max_residual(),
            roots: set.roots().to_vec(),
        }),
    }
}

fn parse_scenario(name: &str, m: Option<u32>, n: Option<u32>, k: Option<u32>) -> Result<Scenario, CliError> {
    let need = |v: Option<u32>, flag: &str| v.ok_or_else(|| CliError::usage(format!("scenario {name} needs --{flag}")));
    let s = match name {
        "p21" => Scenario::P21 { m: need(m, "m")? },
        "p22" => Scenario::P22 { n: need(n, "n")? },
        "p23" => Scenario::P23 { n: need(n, "n")? },
        "t3" => Scenario::T3 {
            m: need(m, "m")?,
            k: need(k, "k")?,
        },
        other => {
            return Err(CliError::usage(format!(
                "unknown scenario {other:?} (p21, p22, p23, t3)"
            )))
        }
    };
    s.validate()?;
    Ok(s)
}

#[derive(Serialize)]
struct RoucheDoc {
    scenario: String,
    f: String,
    g: String,
    contour: ContourSpec,
    #[serde(flatten)]
    margin: MarginReport,
    zeros_f: i64,
    zeros_g: i64,
    degree: u32,
    /// Margin positive and both counts equal to the degree.
    holds: bool,
    evidence: &'static str,
}

fn rouche_eval(s: Scenario, cfg: &RunConfig) -> Result<RoucheDoc, Error> {
    let (pair, gamma) = s.build()?;
    let contour = gamma.with_samples(cfg.samples_per_edge);
    let margin = rouche_margin(&pair, &contour)?;
    let zeros_f = winding_zero_count(&pair.f, &contour)?;
    let zeros_g = winding_zero_count(&pair.g, &contour)?;
    let degree = s.degree();
    Ok(RoucheDoc {
        scenario: pair.label,
        f: pair.f_text,
        g: pair.g_text,
        contour,
        holds: margin.min_margin > 0.0 && zeros_f == degree as i64 && zeros_g == degree as i64,
        margin,
        zeros_f,
        zeros_g,
        degree,
        evidence: "numerical verification",
    })
}

fn rouche_csv(docs: &[RoucheDoc]) -> String {
    let mut out = format!("{ROUCHE_CSV_HEADER}\n");
    for d in docs {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            d.scenario,
            fmt_sig15(d.margin.min_margin),
            fmt_sig15(d.margin.argmin_point.re),
            fmt_sig15(d.margin.argmin_point.im),
            d.zeros_f,
            d.zeros_g,
            d.degree,
            d.holds
        )
        .unwrap();
    }
    out
}

fn rouche_one(s: Scenario, cfg: &RunConfig) -> Result<String, CliError> {
    let doc = rouche_eval(s, cfg)?;
    match format_or(cfg, Format::Json) {
        Format::Json => json_text(&doc),
        Format::Csv => Ok(rouche_csv(std::slice::from_ref(&doc))),
    }
}

fn rouche_suite(max: u32, k_max: u32, cfg: &RunConfig) -> Result<String, CliError> {
    let docs = builtin_scenarios(max, k_max)
        .into_par_iter()
        .map(|s| rouche_eval(s, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    match format_or(cfg, Format::Json) {
        Format::Json => json_text(&docs),
        Format::Csv => Ok(rouche_csv(&docs)),
    }
}

fn ck_table(k_max: u32, cfg: &RunConfig) -> Result<String, CliError> {
    let rows = threshold_table(k_max)?;
    match format_or(cfg, Format::Csv) {
        Format::Csv => csv_bytes(|buf| write_ck_table_csv(&rows, buf)),
        Format::Json => json_text(&rows),
    }
}

fn threshold_doc(k: u32, cfg: &RunConfig, csv_ok: bool) -> Result<String, CliError> {
    let t: BalancedThreshold = threshold_nk(k)?;
    match format_or(cfg, Format::Json) {
        Format::Csv if csv_ok => csv_bytes(|buf| write_ck_table_csv(std::slice::from_ref(&t), buf)),
        Format::Csv => Err(CliError::usage("nk has no CSV form; use ck --table")),
        Format::Json => json_text(&t),
    }
}

fn ratio(p: u32, q: u32) -> Result<Ratio, CliError> {
    Ok(make_ratio(p, q)?)
}

fn nell(p: u32, q: u32, cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg, "nell")?;
    let t: RatioThreshold = threshold_nell(&ratio(p, q)?, &cfg.solver())?;
    json_text(&t)
}

#[derive(Serialize)]
struct MarginRow {
    m: u32,
    n: u32,
    verdict: &'static str,
    max_re_x: Option<f64>,
}

#[derive(Serialize)]
struct WitnessDoc {
    ratio: Ratio,
    m_max: u32,
    /// First scanned m with an unstable verdict.
    m_star: Option<u32>,
    /// Instability is guaranteed for every multiple of q beyond this.
    #[serde(rename = "N_ell")]
    n_ell: u64,
    report: Option<StabilityReport>,
    per_m_margins: Vec<MarginRow>,
}

fn witness(p: u32, q: u32, m_max: u32, cfg: &RunConfig) -> Result<String, CliError> {
    let r = ratio(p, q)?;
    let solver = cfg.solver();
    let threshold = threshold_nell(&r, &solver)?;
    let scan = instability_witness(&r, m_max, &solver, cfg.stability_tol)?;
    let rows: Vec<MarginRow> = scan
        .cells
        .iter()
        .map(|c| match &c.outcome {
            Ok(rep) => MarginRow {
                m: c.m,
                n: c.n,
                verdict: rep.verdict.as_str(),
                max_re_x: Some(rep.max_real_part_x),
            },
            Err(_) => MarginRow {
                m: c.m,
                n: c.n,
                verdict: "error",
                max_re_x: None,
            },
        })
        .collect();
    match format_or(cfg, Format::Json) {
        Format::Json => json_text(&WitnessDoc {
            ratio: r,
            m_max,
            m_star: scan.m_star,
            n_ell: threshold.n_ell,
            report: scan.report,
            per_m_margins: rows,
        }),
        Format::Csv => {
            let mut out = format!("{WITNESS_CSV_HEADER}\n");
            for row in rows {
                let re = row.max_re_x.map(fmt_sig15).unwrap_or_default();
                writeln!(out, "{},{},{},{re}", row.m, row.n, row.verdict).unwrap();
            }
            Ok(out)
        }
    }
}
