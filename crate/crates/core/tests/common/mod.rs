//! Reference computations that share no code with the library solver.
//!
//! Matrices are rebuilt from the edge set, distances come from
//! Floyd–Warshall, and eigenvalues come from Householder tridiagonalization
//! followed by Sturm-sequence bisection. The characteristic polynomial is
//! computed separately with Leverrier–Faddeev.

#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sqlap_core::Graph;

pub type Dense = Vec<Vec<f64>>;

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.order();
    (0..n)
        .map(|r| (0..n).map(|s| g.has_edge(r, s)).collect())
        .collect()
}

/// All-pairs distances, `None` for unreachable pairs.
pub fn floyd_warshall(adj: &[Vec<bool>]) -> Vec<Vec<Option<u32>>> {
    let n = adj.len();
    let mut d: Vec<Vec<Option<u32>>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|s| {
                    if r == s {
                        Some(0)
                    } else if adj[r][s] {
                        Some(1)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for r in 0..n {
            for s in 0..n {
                if let (Some(a), Some(b)) = (d[r][k], d[k][s]) {
                    if d[r][s].is_none_or(|c| a + b < c) {
                        d[r][s] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn laplacian_of(adj: &[Vec<bool>]) -> Dense {
    let n = adj.len();
    let mut m = vec![vec![0.0; n]; n];
    for r in 0..n {
        for s in 0..n {
            if r != s && adj[r][s] {
                m[r][s] = -1.0;
                m[r][r] += 1.0;
            }
        }
    }
    m
}

fn distance_graph(g: &Graph, keep: impl Fn(Option<u32>) -> bool) -> Vec<Vec<bool>> {
    let d = floyd_warshall(&adjacency(g));
    let n = g.order();
    (0..n)
        .map(|r| (0..n).map(|s| r != s && keep(d[r][s])).collect())
        .collect()
}

pub fn laplacian(g: &Graph) -> Dense {
    laplacian_of(&adjacency(g))
}

pub fn square_laplacian(g: &Graph) -> Dense {
    laplacian_of(&distance_graph(g, |d| d.is_some_and(|d| d <= 2)))
}

pub fn combined(g: &Graph) -> Dense {
    let n = g.order();
    let mut m = laplacian(g);
    let far = laplacian_of(&distance_graph(g, |d| d.is_none_or(|d| d >= 3)));
    for r in 0..n {
        for s in 0..n {
            m[r][s] += far[r][s] / n as f64;
        }
    }
    m
}

/// Householder reduction to a symmetric tridiagonal matrix, returned as
/// `(diagonal, subdiagonal)`.
pub fn tridiagonalize(a: &Dense) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut m = a.clone();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let mut v: Vec<f64> = (k + 1..n).map(|r| m[r][k]).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = if v[0] > 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            off.push(m[k + 1][k]);
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        let size = v.len();
        let p: Vec<f64> = (0..size)
            .map(|r| (0..size).map(|s| m[k + 1 + r][k + 1 + s] * v[s]).sum())
            .collect();
        let c: f64 = (0..size).map(|r| v[r] * p[r]).sum();
        let w: Vec<f64> = (0..size).map(|r| p[r] - c * v[r]).collect();
        for r in 0..size {
            for s in 0..size {
                m[k + 1 + r][k + 1 + s] -= 2.0 * (v[r] * w[s] + w[r] * v[s]);
            }
        }
        off.push(alpha);
    }
    ((0..n).map(|r| m[r][r]).collect(), off)
}

/// Number of eigenvalues of the tridiagonal `(d, e)` strictly below `x`,
/// from the signs of the Sturm sequence.
pub fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..d.len() {
        let coupling = if k == 0 { 0.0 } else { e[k - 1] * e[k - 1] / q };
        q = d[k] - x - coupling;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Ascending eigenvalues by Sturm bisection after tridiagonalization.
pub fn eigenvalues(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let (d, e) = tridiagonalize(a);
    let radius = (0..n)
        .map(|k| {
            let left = if k > 0 { e[k - 1].abs() } else { 0.0 };
            let right = if k + 1 < n { e[k].abs() } else { 0.0 };
            d[k].abs() + left + right
        })
        .fold(0.0, f64::max);
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break mid;
                }
                if count_below(&d, &e, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        })
        .collect()
}

/// Coefficients `c` of `det(xI − A) = Σ c[k] x^(n−k)`, with `c[0] = 1`.
pub fn leverrier_faddeev(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{k−1} I, c_k = −tr(A M_k) / k
        let mut next = vec![vec![0.0; n]; n];
        for r in 0..n {
            for s in 0..n {
                next[r][s] = (0..n).map(|t| a[r][t] * m[t][s]).sum::<f64>();
            }
            next[r][r] += c[k - 1];
        }
        let trace: f64 = (0..n)
            .map(|r| (0..n).map(|t| a[r][t] * next[t][r]).sum::<f64>())
            .sum();
        c[k] = -trace / k as f64;
        m = next;
    }
    c
}

/// Coefficients of `Π (x − λ)` in the same layout as `leverrier_faddeev`.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &root in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &v) in c.iter().enumerate() {
            next[k] += v;
            next[k + 1] -= root * v;
        }
        c = next;
    }
    c
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Every labeled graph on `n` vertices, built edge by edge from the mask.
pub fn labeled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|r| (r + 1..n).map(move |s| (r, s))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::build(n, &edges).unwrap()
    })
}

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.unit() * bound as f64) as usize
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn graph(&mut self, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for r in 0..n {
            for s in r + 1..n {
                if self.unit() < p {
                    edges.push((r, s));
                }
            }
        }
        Graph::build(n, &edges).unwrap()
    }

    /// Uniform entries, occasionally rescaled or rounded to small integers.
    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        let style = self.below(4);
        let scale = 10f64.powi(self.range(0, 6) as i32 - 3);
        (0..n)
            .map(|_| match style {
                0 => (self.symmetric() * 3.0).round(),
                _ => self.symmetric() * scale,
            })
            .collect()
    }
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn path_spectrum(n: usize) -> Vec<f64> {
    let angle = |k: usize| k as f64 * std::f64::consts::PI / (2 * n) as f64;
    sorted((0..n).map(|k| 4.0 * angle(k).sin().powi(2)).collect())
}

pub fn cycle_spectrum(n: usize) -> Vec<f64> {
    let angle = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    sorted((0..n).map(|k| 2.0 - 2.0 * angle(k).cos()).collect())
}

pub fn complete_spectrum(n: usize) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(std::iter::repeat_n(n as f64, n - 1))
        .collect()
}

pub fn star_spectrum(n: usize) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(std::iter::repeat_n(1.0, n - 2));
    v.push(n as f64);
    v
}

/// Vertices whose eccentricity is at least 3, unreachable counting as infinite.
pub fn far_count(g: &Graph) -> usize {
    let d = floyd_warshall(&adjacency(g));
    d.iter()
        .filter(|row| row.iter().any(|x| x.is_none_or(|x| x >= 3)))
        .count()
}

/// The four margins in the order main, power, ecc, ng.
pub fn margins(g: &Graph) -> [f64; 4] {
    let n = g.order() as f64;
    let l2 = eigenvalues(&laplacian(g))[1];
    let sq2 = eigenvalues(&square_laplacian(g))[1];
    let comb2 = eigenvalues(&combined(g))[1];
    let comp = adjacency(g)
        .iter()
        .enumerate()
        .map(|(r, row)| row.iter().enumerate().map(|(s, &e)| r != s && !e).collect())
        .collect::<Vec<Vec<bool>>>();
    let comp2 = eigenvalues(&laplacian_of(&comp))[1];
    [
        comb2 - 1.0,
        n * l2 - sq2,
        l2 - (1.0 - far_count(g) as f64 / n),
        l2 + comp2 - 1.0,
    ]
}
