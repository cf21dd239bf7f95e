//! The boundary polynomials `P_k(t) = t^{2k} + 1 + 2 t^k cos(kθ)` with
//! `t = sec θ`, their minima `c_k` on `[1, √5]`, and the stability threshold
//! `N(k)` for `K_{m,m+k}`.
//!
//! On the edge `Re z = 1` of the contour, `|z^k + 1|^2 = P_k(sec θ)`.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intpoly::IntPolynomial;

/// Grid size of the scan preceding golden-section refinement.
pub const DEFAULT_SCAN_POINTS: usize = 10_001;
pub const DEFAULT_MINIMIZE_TOL: f64 = 1e-12;
/// Bisection tolerance on `t` for `δ(k)`.
pub const DELTA_BISECTION_TOL: f64 = 1e-12;

/// Upper end of the `t` interval.
pub fn interval_end() -> f64 {
    5f64.sqrt()
}

/// `√5 - 1`, the value of `δ(k)` when `P_k` never drops below 2.
pub fn max_delta() -> f64 {
    5f64.sqrt() - 1.0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PkPolynomial {
    k: u32,
    coefficients: IntPolynomial,
}

impl PkPolynomial {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.coefficients
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.eval_f64(t)
    }

    pub fn to_text(&self) -> String {
        self.coefficients.display_with("t")
    }
}

/// `P_k` as an exact integer polynomial in `t`.
///
/// `D_j = 2 t^j cos(jθ)` obeys `D_j = 2 D_{j-1} - t^2 D_{j-2}` with
/// `D_0 = D_1 = 2`, since `t cos θ = 1`.
pub fn pk_polynomial(k: u32) -> Result<PkPolynomial> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    let two = IntPolynomial::from_i64(&[2]);
    let mut prev = two.clone();
    let mut cur = two.clone();
    for _ in 2..=k {
        let next = &(&cur * &two) - &prev.shift_up(2);
        prev = cur;
        cur = next;
    }
    let head = &IntPolynomial::monomial(BigInt::from(1), 2 * k as usize) + &IntPolynomial::one();
    Ok(PkPolynomial {
        k,
        coefficients: &head + &cur,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Minimum {
    pub argmin: f64,
    pub min_value: f64,
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!("need lo < hi, got [{lo}, {hi}]")))
    }
}

/// Scan, then golden section on the bracket around the best grid point.
/// Endpoints count as candidates.
pub fn minimize_on_interval(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<Minimum> {
    check_interval(lo, hi)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = DEFAULT_SCAN_POINTS;
    let h = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| if i == n - 1 { hi } else { lo + h * i as f64 };
    let (best_i, best_v) = (0..n)
        .map(|i| (i, f(at(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if !best_v.is_finite() {
        return Err(Error::invalid("objective is not finite on the interval"));
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(n - 1));
    let (x, v) = golden_section(&f, a, b, tol);
    Ok(if v < best_v {
        Minimum {
            argmin: x,
            min_value: v,
        }
    } else {
        Minimum {
            argmin: at(best_i),
            min_value: best_v,
        }
    })
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let xtol = tol.sqrt().max(4.0 * f64::EPSILON);
    while (b - a) > xtol * (1.0 + c.abs().max(d.abs())) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `minimize_on_interval` for a polynomial, followed by Newton polish on
/// the derivative.
pub fn minimize_polynomial(p: &IntPolynomial, lo: f64, hi: f64, tol: f64) -> Result<Minimum> {
    let mut best = minimize_on_interval(|t| p.eval_f64(t), lo, hi, tol)?;
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let mut x = best.argmin;
    for _ in 0..8 {
        let curvature = d2.eval_f64(x);
        if !(curvature > 0.0) {
            break;
        }
        let next = x - d1.eval_f64(x) / curvature;
        if !(lo..=hi).contains(&next) || next == x {
            break;
        }
        x = next;
    }
    let v = p.eval_f64(x);
    if v < best.min_value {
        best = Minimum {
            argmin: x,
            min_value: v,
        };
    }
    Ok(best)
}

/// `c_k = min P_k` on `[1, √5]` and its minimizer.
pub fn ck(k: u32) -> Result<Minimum> {
    let pk = pk_polynomial(k)?;
    minimize_polynomial(pk.polynomial(), 1.0, interval_end(), DEFAULT_MINIMIZE_TOL)
}

/// Largest `δ <= √5 - 1` with `P_k >= 2` on `[1, 1 + δ]`.
pub fn delta_k(k: u32) -> Result<f64> {
    let pk = pk_polynomial(k)?;
    Ok(delta_for(&pk))
}

fn delta_for(pk: &PkPolynomial) -> f64 {
    let end = interval_end();
    let n = DEFAULT_SCAN_POINTS;
    let h = (end - 1.0) / (n - 1) as f64;
    let below = |t: f64| pk.eval(t) < 2.0;
    let Some(i) = (1..n).find(|&i| below(1.0 + h * i as f64)) else {
        return max_delta();
    };
    let mut lo = 1.0 + h * (i - 1) as f64;
    let mut hi = 1.0 + h * i as f64;
    while hi - lo > DELTA_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo - 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalancedThreshold {
    pub k: u32,
    pub coefficients: IntPolynomial,
    pub c_k: f64,
    pub minimizer_t: f64,
    pub delta_k: f64,
    /// `K_{m,m+k}` is stable for every `m > N_k`.
    #[serde(rename = "N_k")]
    pub n_k: u64,
}

/// `N(k) = ⌈ln(1/c_k) / (2 ln(1 + δ(k)))⌉`, or 0 when `c_k > 1`.
pub fn threshold_nk(k: u32) -> Result<BalancedThreshold> {
    let pk = pk_polynomial(k)?;
    let min = minimize_polynomial(pk.polynomial(), 1.0, interval_end(), DEFAULT_MINIMIZE_TOL)?;
    let delta = delta_for(&pk);
    if !(min.min_value > 0.0) {
        return Err(Error::Consistency(format!("c_{k} = {} is not positive", min.min_value)));
    }
    let n_k = if min.min_value > 1.0 {
        0
    } else {
        ((1.0 / min.min_value).ln() / (2.0 * (1.0 + delta).ln())).ceil() as u64
    };
    Ok(BalancedThreshold {
        k,
        coefficients: pk.coefficients,
        c_k: min.min_value,
        minimizer_t: min.argmin,
        delta_k: delta,
        n_k,
    })
}

/// Thresholds for `k = 2..=k_max`, computed in parallel.
pub fn threshold_table(k_max: u32) -> Result<Vec<BalancedThreshold>> {
    if k_max < 2 {
        return Err(Error::invalid(format!("k_max must be at least 2, got {k_max}")));
    }
    (2..=k_max).into_par_iter().map(threshold_nk).collect()
}

/// Whether stability of `K_{m,m+k}` follows from the threshold, i.e.
/// `m > N(k)`. Cells with `m <= N(k)` are outside the guarantee.
pub fn guarantee_covers(threshold: &BalancedThreshold, m: u32) -> bool {
    u64::from(m) > threshold.n_k
}

pub const CK_TABLE_CSV_HEADER: &str = "k,c_k,minimizer_t,delta_k,N_k";

pub fn write_ck_table_csv<W: std::io::Write>(rows: &[BalancedThreshold], mut out: W) -> std::io::Result<()> {
    use crate::numfmt::fmt_sig15;
    writeln!(out, "{CK_TABLE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            fmt_sig15(r.c_k),
            fmt_sig15(r.minimizer_t),
            fmt_sig15(r.delta_k),
            r.n_k
        )?;
    }
    Ok(())
}
