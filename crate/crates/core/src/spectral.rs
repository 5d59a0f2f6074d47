//! Dense symmetric matrices, graph Laplacians and a cyclic Jacobi eigensolver.

use thiserror::Error;

use crate::graph::Graph;

/// Relative off-diagonal Frobenius norm at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("order n = {0} is out of scope, the checks need order n >= 2")]
    OrderTooSmall(usize),
    #[error("Jacobi did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },
}

/// A dense real symmetric matrix, stored in full row-major form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Assembles a matrix from its upper triangle; `f(r, s)` is called for
    /// `r <= s` only and mirrored, so the result is exactly symmetric.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            for s in r..n {
                let v = f(r, s);
                m.data[r * n + s] = v;
                m.data[s * n + r] = v;
            }
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.data[r * self.n + s]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|r| self.get(r, r)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &SymmetricMatrix, scale: f64) -> Result<Self, SpectralError> {
        if other.n != self.n {
            return Err(SpectralError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self { n: self.n, data })
    }

    pub fn mul_vec(&self, z: &[f64]) -> Result<Vec<f64>, SpectralError> {
        self.check_dim(z)?;
        Ok((0..self.n)
            .map(|r| self.row(r).iter().zip(z).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `zᵀ M z`.
    pub fn quadratic_form(&self, z: &[f64]) -> Result<f64, SpectralError> {
        let mz = self.mul_vec(z)?;
        Ok(mz.iter().zip(z).map(|(a, b)| a * b).sum())
    }

    fn check_dim(&self, z: &[f64]) -> Result<(), SpectralError> {
        if z.len() != self.n {
            return Err(SpectralError::DimensionMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        Ok(())
    }

    /// All eigenvalues, ascending, by the cyclic Jacobi method.
    ///
    /// Rotations run row by row over the upper triangle. During the first
    /// three sweeps pivots below a fifth of the mean off-diagonal magnitude
    /// are skipped; later, pivots too small to change either diagonal entry
    /// are zeroed without rotating.
    pub fn eigenvalues(&self) -> Result<Spectrum, SpectralError> {
        let n = self.n;
        let mut a = self.data.clone();
        let target = JACOBI_TOLERANCE * self.frobenius_norm();

        let mut sweeps = 0;
        loop {
            let residual = offdiag_norm(&a, n);
            if residual <= target {
                let mut values: Vec<f64> = (0..n).map(|r| a[r * n + r]).collect();
                values.sort_by(f64::total_cmp);
                return Ok(Spectrum {
                    values,
                    offdiag_residual: residual,
                    sweeps,
                });
            }
            if sweeps == JACOBI_MAX_SWEEPS {
                return Err(SpectralError::NotConverged { sweeps, residual });
            }
            sweeps += 1;

            let threshold = if sweeps <= 3 {
                let abs_sum: f64 = (0..n)
                    .flat_map(|r| (r + 1..n).map(move |s| (r, s)))
                    .map(|(r, s)| a[r * n + s].abs())
                    .sum();
                0.2 * abs_sum / (n * n) as f64
            } else {
                0.0
            };

            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let g = 100.0 * apq.abs();
                    if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                        a[p * n + q] = 0.0;
                        a[q * n + p] = 0.0;
                        continue;
                    }
                    if apq.abs() < threshold {
                        continue;
                    }
                    rotate(&mut a, n, p, q);
                }
            }
        }
    }
}

fn offdiag_norm(a: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for r in 0..n {
        for v in &a[r * n + r + 1..(r + 1) * n] {
            acc += v * v;
        }
    }
    (2.0 * acc).sqrt()
}

/// Applies the Jacobi rotation that annihilates entry `(p, q)`.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
}

/// Eigenvalues in ascending order with the solver's convergence record.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Off-diagonal Frobenius norm of the final iterate.
    pub offdiag_residual: f64,
    pub sweeps: usize,
}

impl Spectrum {
    /// `values[1]`; no attempt is made to identify the zero eigenvalue.
    pub fn second_smallest(&self) -> Option<f64> {
        self.values.get(1).copied()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `L(G) = D(G) - A(G)`.
pub fn laplacian(g: &Graph) -> SymmetricMatrix {
    let n = g.order();
    let mut m = SymmetricMatrix::zeros(n);
    for r in 0..n {
        m.data[r * n + r] = g.degree(r) as f64;
        for s in g.neighbors(r) {
            m.data[r * n + s] = -1.0;
        }
    }
    m
}

/// `L(G) + (1/n) L(complement of G²)`.
pub fn combined_matrix(g: &Graph) -> Result<SymmetricMatrix, SpectralError> {
    let n = g.order();
    if n < 2 {
        return Err(SpectralError::OrderTooSmall(n));
    }
    let far = g.square().complement();
    laplacian(g).add_scaled(&laplacian(&far), 1.0 / n as f64)
}

fn second_eigenvalue(m: &SymmetricMatrix) -> Result<f64, SpectralError> {
    let spectrum = m.eigenvalues()?;
    spectrum
        .second_smallest()
        .ok_or(SpectralError::OrderTooSmall(m.order()))
}

/// Algebraic connectivity: the second-smallest Laplacian eigenvalue.
pub fn lambda2(g: &Graph) -> Result<f64, SpectralError> {
    if g.order() < 2 {
        return Err(SpectralError::OrderTooSmall(g.order()));
    }
    second_eigenvalue(&laplacian(g))
}

/// Second-smallest eigenvalue of [`combined_matrix`].
pub fn lambda2_prime(g: &Graph) -> Result<f64, SpectralError> {
    second_eigenvalue(&combined_matrix(g)?)
}

/// `Σ_{{r,s} ∈ E} (z_r - z_s)²`, the Laplacian quadratic form summed edge by edge.
pub fn edge_sum(g: &Graph, z: &[f64]) -> Result<f64, SpectralError> {
    if z.len() != g.order() {
        return Err(SpectralError::DimensionMismatch {
            expected: g.order(),
            found: z.len(),
        });
    }
    Ok(g.edges().map(|(r, s)| (z[r] - z[s]).powi(2)).sum())
}

/// Subtracts the mean from every coordinate.
pub fn project_mean_zero(z: &[f64]) -> Vec<f64> {
    if z.is_empty() {
        return Vec::new();
    }
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    z.iter().map(|v| v - mean).collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::search::gnp;
    use proptest::prelude::*;

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() <= tol, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn laplacian_examples() {
        let k2 = laplacian(&Graph::complete(2).unwrap());
        assert_eq!(k2.row(0), &[1.0, -1.0]);
        assert_eq!(k2.row(1), &[-1.0, 1.0]);
        let p3 = laplacian(&Graph::path(3).unwrap());
        assert_eq!(p3.row(0), &[1.0, -1.0, 0.0]);
        assert_eq!(p3.row(1), &[-1.0, 2.0, -1.0]);
        assert_eq!(p3.row(2), &[0.0, -1.0, 1.0]);
    }

    #[test]
    fn combined_matrix_examples() {
        let star = Graph::star(4).unwrap();
        assert_eq!(combined_matrix(&star).unwrap(), laplacian(&star));

        let p4 = Graph::path(4).unwrap();
        let one_edge = Graph::build(4, &[(0, 3)]).unwrap();
        let expected = laplacian(&p4).add_scaled(&laplacian(&one_edge), 0.25).unwrap();
        assert_eq!(combined_matrix(&p4).unwrap(), expected);
        assert_eq!(combined_matrix(&p4).unwrap().get(0, 3), -0.25);

        assert_eq!(
            combined_matrix(&Graph::empty(1).unwrap()),
            Err(SpectralError::OrderTooSmall(1))
        );
    }

    #[test]
    fn combined_matrix_annihilates_ones() {
        for seed in 0..20 {
            let g = gnp(9, 0.4, seed).unwrap();
            let m = combined_matrix(&g).unwrap();
            let y = m.mul_vec(&[1.0; 9]).unwrap();
            assert!(y.iter().all(|v| v.abs() < 1e-15), "{y:?}");
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let k4 = laplacian(&Graph::complete(4).unwrap()).eigenvalues().unwrap();
        assert_close(&k4.values, &[0.0, 4.0, 4.0, 4.0], 1e-12);

        let s2 = 2f64.sqrt();
        let p4 = laplacian(&Graph::path(4).unwrap()).eigenvalues().unwrap();
        assert_close(&p4.values, &[0.0, 2.0 - s2, 2.0, 2.0 + s2], 1e-12);
        let by_sine: Vec<f64> = (0..4)
            .map(|k| 4.0 * (k as f64 * PI / 8.0).sin().powi(2))
            .collect();
        assert_close(&p4.values, &by_sine, 1e-12);

        let c5 = laplacian(&Graph::cycle(5).unwrap()).eigenvalues().unwrap();
        let a = 2.0 - 2.0 * (2.0 * PI / 5.0).cos();
        let b = 2.0 - 2.0 * (4.0 * PI / 5.0).cos();
        assert_close(&c5.values, &[0.0, a, a, b, b], 1e-12);
    }

    #[test]
    fn eigenvalues_of_trivial_matrices() {
        let z = SymmetricMatrix::zeros(3).eigenvalues().unwrap();
        assert_eq!(z.values, vec![0.0; 3]);
        assert_eq!(z.sweeps, 0);
        let one = SymmetricMatrix::from_upper(1, |_, _| 7.5).eigenvalues().unwrap();
        assert_eq!(one.values, vec![7.5]);
        assert!(SymmetricMatrix::zeros(0).eigenvalues().unwrap().values.is_empty());
    }

    #[test]
    fn eigenvalues_of_a_non_laplacian() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3; [[0,1],[1,0]] has ±1.
        let m = SymmetricMatrix::from_upper(2, |r, s| if r == s { 2.0 } else { 1.0 });
        assert_close(&m.eigenvalues().unwrap().values, &[1.0, 3.0], 1e-14);
        let m = SymmetricMatrix::from_upper(2, |r, s| if r == s { 0.0 } else { 1.0 });
        assert_close(&m.eigenvalues().unwrap().values, &[-1.0, 1.0], 1e-14);
    }

    #[test]
    fn residual_meets_the_tolerance() {
        let g = gnp(40, 0.3, 11).unwrap();
        let m = laplacian(&g);
        let s = m.eigenvalues().unwrap();
        assert!(s.offdiag_residual <= JACOBI_TOLERANCE * m.frobenius_norm());
        assert!(s.sweeps > 0 && s.sweeps < JACOBI_MAX_SWEEPS);
    }

    #[test]
    fn lambda2_examples() {
        for n in 2..12 {
            let l = lambda2(&Graph::complete(n).unwrap()).unwrap();
            assert!((l - n as f64).abs() < 1e-12);
        }
        let l = lambda2(&Graph::path(4).unwrap()).unwrap();
        assert!((l - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let two_k2 = Graph::build(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(lambda2(&two_k2).unwrap().abs() < 1e-9);
        assert_eq!(
            lambda2(&Graph::empty(1).unwrap()),
            Err(SpectralError::OrderTooSmall(1))
        );
    }

    #[test]
    fn lambda2_prime_examples() {
        assert!((lambda2_prime(&Graph::star(4).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambda2_prime(&Graph::complete(4).unwrap()).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_examples() {
        let k2 = laplacian(&Graph::complete(2).unwrap());
        assert_eq!(k2.quadratic_form(&[1.0, -1.0]).unwrap(), 4.0);
        let p3 = laplacian(&Graph::path(3).unwrap());
        assert_eq!(p3.quadratic_form(&[1.0, 0.0, -1.0]).unwrap(), 2.0);
        assert_eq!(p3.quadratic_form(&[1.0; 3]).unwrap(), 0.0);
        assert_eq!(
            p3.quadratic_form(&[1.0; 2]),
            Err(SpectralError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn project_mean_zero_examples() {
        assert_eq!(project_mean_zero(&[1.0, 1.0, 1.0]), vec![0.0; 3]);
        assert_eq!(project_mean_zero(&[1.0, 0.0, -1.0]), vec![1.0, 0.0, -1.0]);
        assert_eq!(
            project_mean_zero(&[2.0, 0.0, 0.0, 0.0]),
            vec![1.5, -0.5, -0.5, -0.5]
        );
    }

    fn graph_and_vector() -> impl Strategy<Value = (Graph, Vec<f64>)> {
        (2usize..25, any::<u64>(), 0.0f64..=1.0).prop_flat_map(|(n, seed, p)| {
            let g = gnp(n, p, seed).unwrap();
            (Just(g), proptest::collection::vec(-10.0f64..10.0, n))
        })
    }

    proptest! {
        #[test]
        fn spectra_are_nonnegative_and_trace_preserving((g, _) in graph_and_vector()) {
            for m in [laplacian(&g), combined_matrix(&g).unwrap()] {
                let s = m.eigenvalues().unwrap();
                prop_assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
                prop_assert!(s.values.iter().all(|&v| v >= -1e-9));
                prop_assert!(s.values[0].abs() <= 1e-9);
                let tr = m.trace();
                prop_assert!((s.sum() - tr).abs() <= 1e-9 * tr.abs().max(1.0));
            }
        }

        #[test]
        fn quadratic_form_matches_edge_sum((g, z) in graph_and_vector()) {
            let q = laplacian(&g).quadratic_form(&z).unwrap();
            let e = edge_sum(&g, &z).unwrap();
            prop_assert!((q - e).abs() <= 1e-10 * e.abs().max(1e-300));
        }

        #[test]
        fn quadratic_form_is_translation_invariant((g, z) in graph_and_vector(), c in -10.0f64..10.0) {
            let l = laplacian(&g);
            let a = l.quadratic_form(&z).unwrap();
            let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
            let b = l.quadratic_form(&shifted).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn projection_sums_to_zero(z in proptest::collection::vec(-1e3f64..1e3, 1..40)) {
            let y = project_mean_zero(&z);
            prop_assert!(y.iter().sum::<f64>().abs() <= 1e-9);
            let spread = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - v.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!((spread(&y) - spread(&z)).abs() <= 1e-9);
        }
    }
}
