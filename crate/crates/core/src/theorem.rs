//! Margins for the four eigenvalue inequalities and for the identities and
//! lemmas their proof goes through.
//!
//! Every check returns a signed margin (left side minus right side) that is
//! nonnegative exactly when the claim holds; verdicts are derived from
//! margins with the tolerance [`EPSILON`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::serialize_sig12_opt;
use crate::graph::Graph;
use crate::io::write_graph6;
use crate::spectral::{self, laplacian, SpectralError};

/// Absolute tolerance on margins.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("the vector must be nonempty")]
    EmptyVector,
    #[error("the lemma needs k >= 1 and l >= 1, got k = {k}, l = {ell}")]
    LemmaScope { k: usize, ell: usize },
}

/// The four inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// `λ′₂(G) ≥ 1`.
    Main,
    /// `n λ₂(G) ≥ λ₂(G²)`.
    Power,
    /// `λ₂(G) ≥ 1 − |D_G|/n`.
    Ecc,
    /// `λ₂(G) + λ₂(Ḡ) ≥ 1`.
    Ng,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Main, Check::Power, Check::Ecc, Check::Ng];

    pub fn name(self) -> &'static str {
        match self {
            Check::Main => "main",
            Check::Power => "power",
            Check::Ecc => "ecc",
            Check::Ng => "ng",
        }
    }

    pub fn margin(self, g: &Graph) -> Result<f64, TheoremError> {
        match self {
            Check::Main => check_main(g),
            Check::Power => check_power(g),
            Check::Ecc => check_ecc(g),
            Check::Ng => check_ng(g),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check {s:?}, expected one of main, power, ecc, ng"))
    }
}

fn require_order(g: &Graph) -> Result<usize, TheoremError> {
    let n = g.order();
    if n < 2 {
        return Err(SpectralError::OrderTooSmall(n).into());
    }
    Ok(n)
}

/// `λ′₂(G) − 1`.
pub fn check_main(g: &Graph) -> Result<f64, TheoremError> {
    require_order(g)?;
    Ok(spectral::lambda2_prime(g)? - 1.0)
}

/// `n λ₂(G) − λ₂(G²)`.
pub fn check_power(g: &Graph) -> Result<f64, TheoremError> {
    let n = require_order(g)?;
    Ok(power_margin(n, spectral::lambda2(g)?, &g.square())?)
}

fn power_margin(n: usize, lambda2: f64, square: &Graph) -> Result<f64, SpectralError> {
    Ok(n as f64 * lambda2 - spectral::lambda2(square)?)
}

/// `λ₂(G) − (1 − |D_G|/n)`.
pub fn check_ecc(g: &Graph) -> Result<f64, TheoremError> {
    let n = require_order(g)?;
    Ok(ecc_margin(n, spectral::lambda2(g)?, g.far_set().len()))
}

fn ecc_margin(n: usize, lambda2: f64, far_count: usize) -> f64 {
    lambda2 - (1.0 - far_count as f64 / n as f64)
}

/// `λ₂(G) + λ₂(Ḡ) − 1`.
pub fn check_ng(g: &Graph) -> Result<f64, TheoremError> {
    require_order(g)?;
    Ok(spectral::lambda2(g)? + spectral::lambda2(&g.complement())? - 1.0)
}

/// Whether `|margin| ≤ tolerance` for each check that was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EqualityFlags {
    pub main: Option<bool>,
    pub power: Option<bool>,
    pub ecc: Option<bool>,
    pub ng: Option<bool>,
}

/// All four margins for one graph. Margins of checks that were not
/// requested are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub graph6: String,
    pub n: usize,
    #[serde(serialize_with = "serialize_sig12_opt")]
    pub margin_main: Option<f64>,
    #[serde(serialize_with = "serialize_sig12_opt")]
    pub margin_power: Option<f64>,
    #[serde(serialize_with = "serialize_sig12_opt")]
    pub margin_ecc: Option<f64>,
    #[serde(serialize_with = "serialize_sig12_opt")]
    pub margin_ng: Option<f64>,
    pub far_count: usize,
    pub equality_flags: EqualityFlags,
}

impl CheckReport {
    pub const CSV_HEADER: &'static str = "graph6,n,margin_main,margin_power,margin_ecc,margin_ng,far_count";

    /// Evaluates every check with the default tolerance.
    pub fn evaluate(g: &Graph) -> Result<Self, TheoremError> {
        Self::evaluate_checks(g, &Check::ALL, EPSILON)
    }

    /// Evaluates the selected checks, sharing `λ₂(G)` between them.
    pub fn evaluate_checks(g: &Graph, checks: &[Check], tolerance: f64) -> Result<Self, TheoremError> {
        let n = require_order(g)?;
        let want = |c: Check| checks.contains(&c);
        let far_count = g.far_set().len();
        let lambda2 = if want(Check::Power) || want(Check::Ecc) || want(Check::Ng) {
            Some(spectral::lambda2(g)?)
        } else {
            None
        };

        let margin_main = want(Check::Main).then(|| check_main(g)).transpose()?;
        let margin_power = match (want(Check::Power), lambda2) {
            (true, Some(l)) => Some(power_margin(n, l, &g.square())?),
            _ => None,
        };
        let margin_ecc = match (want(Check::Ecc), lambda2) {
            (true, Some(l)) => Some(ecc_margin(n, l, far_count)),
            _ => None,
        };
        let margin_ng = match (want(Check::Ng), lambda2) {
            (true, Some(l)) => Some(l + spectral::lambda2(&g.complement())? - 1.0),
            _ => None,
        };

        let flag = |m: Option<f64>| m.map(|v| v.abs() <= tolerance);
        Ok(Self {
            graph6: write_graph6(g).expect("graph order is within the graph6 limit"),
            n,
            margin_main,
            margin_power,
            margin_ecc,
            margin_ng,
            far_count,
            equality_flags: EqualityFlags {
                main: flag(margin_main),
                power: flag(margin_power),
                ecc: flag(margin_ecc),
                ng: flag(margin_ng),
            },
        })
    }

    pub fn margin(&self, check: Check) -> Option<f64> {
        match check {
            Check::Main => self.margin_main,
            Check::Power => self.margin_power,
            Check::Ecc => self.margin_ecc,
            Check::Ng => self.margin_ng,
        }
    }

    /// Checks whose margin is below `-tolerance`.
    pub fn violations(&self, tolerance: f64) -> impl Iterator<Item = (Check, f64)> + '_ {
        Check::ALL
            .into_iter()
            .filter_map(move |c| self.margin(c).filter(|m| *m < -tolerance).map(|m| (c, m)))
    }

    pub fn to_csv_row(&self) -> String {
        let m = |v: Option<f64>| v.map(crate::format::sig12).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.graph6,
            self.n,
            m(self.margin_main),
            m(self.margin_power),
            m(self.margin_ecc),
            m(self.margin_ng),
            self.far_count
        )
    }
}

fn check_len(g: &Graph, x: &[f64]) -> Result<(), TheoremError> {
    if x.len() != g.order() {
        return Err(SpectralError::DimensionMismatch {
            expected: g.order(),
            found: x.len(),
        }
        .into());
    }
    Ok(())
}

fn check_vertex(g: &Graph, v: usize) -> Result<(), TheoremError> {
    if v >= g.order() {
        return Err(TheoremError::VertexOutOfRange {
            vertex: v,
            n: g.order(),
        });
    }
    Ok(())
}

#[inline]
fn sq_diff(x: &[f64], r: usize, s: usize) -> f64 {
    (x[r] - x[s]) * (x[r] - x[s])
}

fn pair_sum(pairs: impl IntoIterator<Item = (usize, usize)>, x: &[f64]) -> f64 {
    pairs.into_iter().map(|(r, s)| sq_diff(x, r, s)).sum()
}

/// `n zᵀL(G)z − zᵀL(G²)z`, the quadratic-form version of the main inequality.
pub fn quadratic_inequality(g: &Graph, z: &[f64]) -> Result<f64, TheoremError> {
    let n = require_order(g)?;
    check_len(g, z)?;
    let lg = laplacian(g).quadratic_form(z)?;
    let lg2 = laplacian(&g.square()).quadratic_form(z)?;
    Ok(n as f64 * lg - lg2)
}

/// Whether `(n−1) Σ_E (x_r−x_s)² < Σ_{π(G)} (x_r−x_s)²` holds strictly.
/// The main inequality says this never happens.
pub fn contrary_assumption(g: &Graph, x: &[f64]) -> Result<bool, TheoremError> {
    check_len(g, x)?;
    let (lhs, rhs) = contrary_sides(g, x);
    Ok(lhs < rhs)
}

fn contrary_sides(g: &Graph, x: &[f64]) -> (f64, f64) {
    let n = g.order();
    let sq = g.square();
    let mut edges = 0.0;
    let mut pi = 0.0;
    for (r, s) in sq.edges() {
        if g.has_edge(r, s) {
            edges += sq_diff(x, r, s);
        } else {
            pi += sq_diff(x, r, s);
        }
    }
    ((n as f64 - 1.0) * edges, pi)
}

/// Both sides of an exact identity, evaluated in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentitySides {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    pub fn magnitude(&self) -> f64 {
        self.lhs.abs().max(self.rhs.abs())
    }
}

/// `Σ_{{r,s} ⊆ N_k} (x_r−x_s)²` against `d_k Σ_{r∈N_k} (x_r−x_k)² − p_k²`
/// with `p_k = Σ_{r∈N_k} (x_k − x_r)`.
pub fn neighborhood_identity(g: &Graph, x: &[f64], k: usize) -> Result<IdentitySides, TheoremError> {
    check_len(g, x)?;
    check_vertex(g, k)?;
    let nbrs: Vec<usize> = g.neighbors(k).collect();
    if nbrs.is_empty() {
        return Ok(IdentitySides { lhs: 0.0, rhs: 0.0 });
    }
    let d = nbrs.len() as f64;
    let mut lhs = 0.0;
    for (a, &r) in nbrs.iter().enumerate() {
        for &s in &nbrs[a + 1..] {
            lhs += sq_diff(x, r, s);
        }
    }
    let p: f64 = nbrs.iter().map(|&r| x[k] - x[r]).sum();
    let spread: f64 = nbrs.iter().map(|&r| sq_diff(x, r, k)).sum();
    Ok(IdentitySides {
        lhs,
        rhs: d * spread - p * p,
    })
}

pub fn neighborhood_identity_residual(g: &Graph, x: &[f64], k: usize) -> Result<f64, TheoremError> {
    Ok(neighborhood_identity(g, x, k)?.residual())
}

/// `Σ_r (z_r − mean)²` against `(1/n) Σ_{all pairs} (z_r − z_s)²`.
///
/// Note that the pair sum runs over all unordered pairs of vertices: the
/// identity is false if the pairs are restricted to the edges of a graph.
pub fn mean_identity(z: &[f64]) -> Result<IdentitySides, TheoremError> {
    if z.is_empty() {
        return Err(TheoremError::EmptyVector);
    }
    let n = z.len();
    let lhs = spectral::project_mean_zero(z).iter().map(|v| v * v).sum();
    let pairs: f64 = crate::graph::vertex_pairs(n).map(|(r, s)| sq_diff(z, r, s)).sum();
    Ok(IdentitySides {
        lhs,
        rhs: pairs / n as f64,
    })
}

pub fn identity_mean(z: &[f64]) -> Result<f64, TheoremError> {
    Ok(mean_identity(z)?.residual())
}

/// `z² + ℓ Σ y_r² − ℓ s²/(k+ℓ)` with `s = z + Σ y_r` and `k = ys.len()`.
pub fn cs_lemma_check(z: f64, ys: &[f64], ell: usize) -> Result<f64, TheoremError> {
    let k = ys.len();
    if k == 0 || ell == 0 {
        return Err(TheoremError::LemmaScope { k, ell });
    }
    let l = ell as f64;
    let s = z + ys.iter().sum::<f64>();
    Ok(z * z + l * ys.iter().map(|y| y * y).sum::<f64>() - l * s * s / (k + ell) as f64)
}

/// `Σ_E (d_r+d_s)(x_r−x_s)² − Σ_{all pairs} |N_r∩N_s| (x_r−x_s)²`.
pub fn common_neighbor_bound(g: &Graph, x: &[f64]) -> Result<f64, TheoremError> {
    check_len(g, x)?;
    let upper: f64 = g
        .edges()
        .map(|(r, s)| (g.degree(r) + g.degree(s)) as f64 * sq_diff(x, r, s))
        .sum();
    let shared: f64 = crate::graph::vertex_pairs(g.order())
        .map(|(r, s)| g.common_neighbors(r, s) as f64 * sq_diff(x, r, s))
        .sum();
    Ok(upper - shared)
}

/// Intermediate quantities of the split of a graph along one edge `{i, j}`
/// into `G₁` (edges touching `i` or `j`) and `G₂` (`i` and `j` deleted).
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Endpoints after normalizing to `|Y| ≥ |X|`.
    pub i: usize,
    pub j: usize,
    /// The endpoints were exchanged and `x` negated during normalization.
    pub swapped: bool,
    /// `N_i ∖ (N_j ∪ {j})`.
    pub x_set: Vec<usize>,
    /// `N_j ∖ (N_i ∪ {i})`.
    pub y_set: Vec<usize>,
    /// `N_i ∩ N_j`.
    pub z_set: Vec<usize>,
    /// `N_i ∪ N_j = V`.
    pub dominating: bool,
    /// `x_j < x_i`.
    pub ordered: bool,
    /// `x_j < x_r < x_i` for every `r` in `Z`.
    pub z_between: bool,
    /// `(n−1) Σ_{E(G₁)} ℓ² − Σ_{π(G₁)} ℓ²`.
    pub g1_margin: f64,
    /// `(n−3) Σ_{E(G₂)} ℓ² − Σ_{π(G₂)} ℓ²`.
    pub g2_margin: f64,
    /// Every distance-two pair of `G` between `X` and `Y` is a distance-two pair of `G₂`.
    pub pi_subset_ok: bool,
    /// `Σ_{π(G₁)} ℓ² + Σ_{X×Y ∩ π(G)} ℓ² − Σ_{π(G)} ℓ²`.
    pub cover_margin: f64,
    /// `(n−1)(Σ_{E(G₁)} ℓ² + Σ_{E(G₂)} ℓ²) − Σ_{π(G)} ℓ²`.
    pub combine_margin: f64,
    /// `p_i + Σ_{r∈X} (x_r − x_i)`, for the normalized `x`.
    pub a: f64,
    /// `−p_j − Σ_{r∈Y} (x_r − x_j)`, for the normalized `x`.
    pub b: f64,
}

impl Decomposition {
    /// The conditions under which the `G₁` inequality is established:
    /// a dominating edge with `x_j < x_i` and every `x_r`, `r ∈ Z`, strictly
    /// between them.
    pub fn hypotheses_hold(&self) -> bool {
        self.dominating && self.ordered && self.z_between
    }
}

pub fn g1_g2_decomposition(g: &Graph, i: usize, j: usize, x: &[f64]) -> Result<Decomposition, TheoremError> {
    check_len(g, x)?;
    check_vertex(g, i)?;
    check_vertex(g, j)?;
    if i == j || !g.has_edge(i, j) {
        return Err(TheoremError::NotAnEdge(i, j));
    }
    let n = g.order();

    let split = |i: usize, j: usize| {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut zs = Vec::new();
        for v in 0..n {
            let (in_i, in_j) = (g.has_edge(i, v), g.has_edge(j, v));
            match (in_i, in_j) {
                (true, true) => zs.push(v),
                (true, false) if v != j => xs.push(v),
                (false, true) if v != i => ys.push(v),
                _ => {}
            }
        }
        (xs, ys, zs)
    };
    let (mut xs, mut ys, mut zs) = split(i, j);
    let swapped = ys.len() < xs.len();
    let (i, j) = if swapped { (j, i) } else { (i, j) };
    if swapped {
        (xs, ys, zs) = split(i, j);
    }
    let x: Vec<f64> = if swapped {
        x.iter().map(|v| -v).collect()
    } else {
        x.to_vec()
    };

    let dominating = (0..n).all(|v| g.has_edge(i, v) || g.has_edge(j, v));
    let ordered = x[j] < x[i];
    let z_between = zs.iter().all(|&r| x[j] < x[r] && x[r] < x[i]);

    let touches = |r: usize, s: usize| r == i || r == j || s == i || s == j;
    let g1 = g.filter_edges(touches);
    let e_g1 = pair_sum(g1.edges(), &x);
    let pi_g1 = pair_sum(g1.distance_two_pairs(), &x);
    let g1_margin = (n as f64 - 1.0) * e_g1 - pi_g1;

    let rest: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
    let (e_g2, g2_margin, g2) = if rest.is_empty() {
        (0.0, 0.0, None)
    } else {
        let g2 = g.induced_subgraph(&rest).expect("vertices come from g");
        let x2: Vec<f64> = rest.iter().map(|&v| x[v]).collect();
        let e = pair_sum(g2.edges(), &x2);
        let pi = pair_sum(g2.distance_two_pairs(), &x2);
        (e, (n as f64 - 3.0) * e - pi, Some(g2))
    };

    let pi_g = g.distance_two_pairs();
    let index_in_rest = |v: usize| rest.binary_search(&v).expect("X and Y avoid i and j");
    let mut pi_subset_ok = true;
    let mut cross = 0.0;
    for &(r, s) in &pi_g {
        let across = (xs.contains(&r) && ys.contains(&s)) || (xs.contains(&s) && ys.contains(&r));
        if !across {
            continue;
        }
        cross += sq_diff(&x, r, s);
        let in_g2 = g2.as_ref().is_some_and(|h| {
            let (a, b) = (index_in_rest(r), index_in_rest(s));
            !h.has_edge(a, b) && h.common_neighbors(a, b) > 0
        });
        pi_subset_ok &= in_g2;
    }
    let pi_total = pair_sum(pi_g.iter().copied(), &x);

    let p_i: f64 = g.neighbors(i).map(|r| x[i] - x[r]).sum();
    let p_j: f64 = g.neighbors(j).map(|r| x[j] - x[r]).sum();
    let a = p_i + xs.iter().map(|&r| x[r] - x[i]).sum::<f64>();
    let b = -p_j - ys.iter().map(|&r| x[r] - x[j]).sum::<f64>();

    Ok(Decomposition {
        i,
        j,
        swapped,
        x_set: xs,
        y_set: ys,
        z_set: zs,
        dominating,
        ordered,
        z_between,
        g1_margin,
        g2_margin,
        pi_subset_ok,
        cover_margin: pi_g1 + cross - pi_total,
        combine_margin: (n as f64 - 1.0) * (e_g1 + e_g2) - pi_total,
        a,
        b,
    })
}

/// `λ₂(G) − #{v : deg(v) = n−1}`.
pub fn dominating_vertex_bound(g: &Graph) -> Result<f64, TheoremError> {
    let n = require_order(g)?;
    let full = g.degrees().iter().filter(|&&d| d == n - 1).count();
    Ok(spectral::lambda2(g)? - full as f64)
}

/// Whether the far sets of `G` and its complement are disjoint.
pub fn far_sets_disjoint(g: &Graph) -> bool {
    let ours = g.far_set();
    let theirs = g.complement().far_set();
    ours.iter().all(|v| theirs.binary_search(v).is_err())
}
