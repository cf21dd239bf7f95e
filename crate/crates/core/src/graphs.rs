//! Simple graphs and their independence polynomials.
//!
//! Two routes are provided: exhaustive enumeration for arbitrary small
//! graphs, and the closed form `(1+x)^n + (1+x)^m - 1` for `K_{m,n}`. The
//! first exists to certify the second.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::intpoly::IntPolynomial;

/// Largest vertex count accepted by [`independence_polynomial_bruteforce`].
pub const ENUMERATION_LIMIT: usize = 24;

/// Simple undirected graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SimpleGraph {
    /// Builds a graph, rejecting self-loops, repeated edges and endpoints
    /// outside `0..vertex_count`. Edges are stored as `(min, max)`.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(SimpleGraph {
            vertex_count,
            edges: set,
        })
    }

    pub fn empty(vertex_count: usize) -> Self {
        SimpleGraph {
            vertex_count,
            edges: BTreeSet::new(),
        }
    }

    pub fn complete(vertex_count: usize) -> Self {
        let edges = (0..vertex_count)
            .flat_map(|u| (u + 1..vertex_count).map(move |v| (u, v)))
            .collect();
        SimpleGraph { vertex_count, edges }
    }

    /// `K_{m,n}` with parts `0..m` and `m..m+n`.
    pub fn complete_bipartite(m: usize, n: usize) -> Self {
        let edges = (0..m).flat_map(|u| (m..m + n).map(move |v| (u, v))).collect();
        SimpleGraph {
            vertex_count: m + n,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Parses the edge-list format: a `p <vertex_count>` header, then one
    /// `<u> <v>` pair per line. Blank lines and lines starting with `#` are
    /// skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut vertex_count = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            match (vertex_count, fields.as_slice()) {
                (None, ["p", count]) => {
                    let n = count
                        .parse::<usize>()
                        .map_err(|e| parse_err(format!("bad vertex count {count:?}: {e}")))?;
                    vertex_count = Some(n);
                }
                (None, _) => {
                    return Err(parse_err("expected header `p <vertex_count>`".into()));
                }
                (Some(_), [u, v]) => {
                    let u = u
                        .parse::<usize>()
                        .map_err(|e| parse_err(format!("bad vertex {u:?}: {e}")))?;
                    let v = v
                        .parse::<usize>()
                        .map_err(|e| parse_err(format!("bad vertex {v:?}: {e}")))?;
                    edges.push((u, v));
                }
                (Some(_), _) => {
                    return Err(parse_err(format!("expected `<u> <v>`, got {line:?}")));
                }
            }
        }
        let vertex_count = vertex_count.ok_or_else(|| Error::Parse {
            line: 0,
            message: "missing `p <vertex_count>` header".into(),
        })?;
        SimpleGraph::new(vertex_count, edges)
    }
}

/// `y^n + y^m - 1` with `m <= n`: the independence polynomial of `K_{m,n}`
/// after the shift `y = 1 + x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TrinomialSpec {
    n: u32,
    m: u32,
}

impl TrinomialSpec {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("trinomial exponents must be positive"));
        }
        if m > n {
            return Err(Error::invalid(format!(
                "trinomial requires m <= n, got m = {m}, n = {n}"
            )));
        }
        Ok(TrinomialSpec { n, m })
    }

    /// Larger exponent; the degree.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Smaller exponent.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.n as usize
    }

    /// Equal exponents collapse to `2y^n - 1`.
    pub fn is_equal_exponent(&self) -> bool {
        self.n == self.m
    }

    /// Dense exact expansion in `y`.
    pub fn to_int_polynomial(&self) -> IntPolynomial {
        let mut coeffs = vec![BigInt::from(0); self.n as usize + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[self.n as usize] += BigInt::one();
        coeffs[self.m as usize] += BigInt::one();
        IntPolynomial::new(coeffs)
    }

    /// Human-readable form, e.g. `y^3 + y^2 - 1` or `2y^4 - 1`.
    pub fn describe(&self) -> String {
        self.to_int_polynomial().display_with("y")
    }
}

/// Independence polynomial by exhaustive enumeration of vertex subsets.
///
/// Subset `S` is independent iff `S \ {v}` is and `v` has no neighbour in
/// `S`, where `v` is the lowest vertex of `S`; one table entry per subset.
pub fn independence_polynomial_bruteforce(g: &SimpleGraph) -> Result<IntPolynomial> {
    let n = g.vertex_count();
    if n > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit {
            vertex_count: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut adjacency = vec![0u32; n];
    for (u, v) in g.edges() {
        adjacency[u] |= 1 << v;
        adjacency[v] |= 1 << u;
    }
    let subsets = 1usize << n;
    let mut independent = vec![false; subsets];
    let mut counts = vec![0u64; n + 1];
    independent[0] = true;
    counts[0] = 1;
    for mask in 1..subsets {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        if independent[rest] && adjacency[low] & (mask as u32) == 0 {
            independent[mask] = true;
            counts[mask.count_ones() as usize] += 1;
        }
    }
    Ok(IntPolynomial::new(counts.into_iter().map(BigInt::from).collect()))
}

/// `i(K_{m,n}, x) = (1+x)^n + (1+x)^m - 1`, expanded exactly.
pub fn independence_polynomial_bipartite(m: usize, n: usize) -> Result<IntPolynomial> {
    if m == 0 || n == 0 {
        return Err(Error::invalid(format!(
            "complete bipartite graph needs non-empty parts, got K_{{{m},{n}}}"
        )));
    }
    let sum = &IntPolynomial::one_plus_x_pow(n) + &IntPolynomial::one_plus_x_pow(m);
    Ok(&sum - &IntPolynomial::one())
}

/// The shifted form `Φ(K_{m,n}, y) = y^max + y^min - 1`.
pub fn phi_trinomial(m: u32, n: u32) -> Result<TrinomialSpec> {
    if m == 0 || n == 0 {
        return Err(Error::invalid(format!(
            "complete bipartite graph needs non-empty parts, got K_{{{m},{n}}}"
        )));
    }
    TrinomialSpec::new(m.max(n), m.min(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bruteforce_small_graphs() {
        assert_eq!(
            independence_polynomial_bruteforce(&SimpleGraph::empty(3)).unwrap(),
            IntPolynomial::from_i64(&[1, 3, 3, 1])
        );
        assert_eq!(
            independence_polynomial_bruteforce(&SimpleGraph::complete(3)).unwrap(),
            IntPolynomial::from_i64(&[1, 3])
        );
        // 5 singletons, C(2,2) + C(3,2) = 4 same-side pairs, one same-side triple.
        let k23 = SimpleGraph::new(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(
            independence_polynomial_bruteforce(&k23).unwrap(),
            IntPolynomial::from_i64(&[1, 5, 4, 1])
        );
        assert_eq!(
            independence_polynomial_bruteforce(&SimpleGraph::empty(0)).unwrap(),
            IntPolynomial::one()
        );
    }

    #[test]
    fn bruteforce_size_limit() {
        let err = independence_polynomial_bruteforce(&SimpleGraph::empty(25)).unwrap_err();
        assert_eq!(
            err,
            Error::SizeLimit {
                vertex_count: 25,
                limit: 24
            }
        );
    }

    #[test]
    fn bipartite_closed_form() {
        assert_eq!(
            independence_polynomial_bipartite(1, 1).unwrap(),
            IntPolynomial::from_i64(&[1, 2])
        );
        assert_eq!(
            independence_polynomial_bipartite(2, 3).unwrap(),
            IntPolynomial::from_i64(&[1, 5, 4, 1])
        );
        assert_eq!(
            independence_polynomial_bipartite(1, 3).unwrap(),
            IntPolynomial::from_i64(&[1, 4, 3, 1])
        );
        assert!(independence_polynomial_bipartite(0, 3).is_err());
        assert!(independence_polynomial_bipartite(3, 0).is_err());
    }

    #[test]
    fn phi_forms() {
        let t = phi_trinomial(2, 3).unwrap();
        assert_eq!((t.n(), t.m()), (3, 2));
        assert_eq!(t.describe(), "y^3 + y^2 - 1");
        let eq = phi_trinomial(4, 4).unwrap();
        assert!(eq.is_equal_exponent());
        assert_eq!(eq.describe(), "2y^4 - 1");
        assert_eq!(phi_trinomial(5, 1).unwrap().describe(), "y^5 + y - 1");
        assert!(phi_trinomial(0, 1).is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(SimpleGraph::new(2, [(0, 0)]).is_err());
        assert!(SimpleGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(SimpleGraph::new(2, [(0, 2)]).is_err());
        assert_eq!(SimpleGraph::complete_bipartite(2, 3).edge_count(), 6);
    }

    #[test]
    fn edge_list_parsing() {
        let text = "# triangle plus an isolated vertex\np 4\n0 1\n1 2\n\n# closing edge\n2 0\n";
        let g = SimpleGraph::parse_edge_list(text).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        // (1 + 3x)(1 + x): the isolated vertex joins any independent set.
        assert_eq!(
            independence_polynomial_bruteforce(&g).unwrap(),
            IntPolynomial::from_i64(&[1, 4, 3])
        );

        assert!(matches!(
            SimpleGraph::parse_edge_list("0 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            SimpleGraph::parse_edge_list("p 3\n0 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            SimpleGraph::parse_edge_list("# nothing\n"),
            Err(Error::Parse { line: 0, .. })
        ));
        assert!(SimpleGraph::parse_edge_list("p 2\n0 5\n").is_err());
    }
}
