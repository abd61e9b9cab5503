//! Finite metric spaces as dense, validated distance matrices.
//!
//! Construction enforces the structural invariants (square shape, symmetry
//! within [`EPS`](crate::EPS) followed by symmetrization, zero diagonal,
//! strictly positive off-diagonal, distinct labels). Triangle inequalities
//! are checked separately by [`validate`](FiniteMetricSpace::validate),
//! which works for any exponent p ∈ [1, ∞].

use std::collections::BTreeSet;

use crate::arith::p_sum_f;
use crate::error::{Error, Result, TriangleViolation};
use crate::exponent::PExponent;
use crate::{Budget, EPS};

/// A labeled finite point set with a symmetric non-negative distance matrix,
/// stored dense and row-major. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
}

/// Outcome of a successful validation: the largest exponent class among
/// {1, requested p, ∞} that the space satisfies. A p-metric space is
/// automatically a q-metric space for every q ≤ p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceClass {
    pub verified_p: PExponent,
}

impl SpaceClass {
    pub fn is_ultrametric(&self) -> bool {
        self.verified_p.is_infinity()
    }
}

/// The sorted set of distance values occurring in a space. Full spectra
/// start at 0; truncated spectra (`spectrum_eps`) may not.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    fn from_sorted(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Deduplicates a sorted list with absolute tolerance [`EPS`].
fn dedup_eps(mut sorted: Vec<f64>) -> Vec<f64> {
    sorted.dedup_by(|next, kept| *next - *kept <= EPS);
    sorted
}

impl FiniteMetricSpace {
    /// Builds a space from labels and a full square matrix, enforcing the
    /// structural invariants. Near-symmetric input (entries differing by at
    /// most [`EPS`]) is symmetrized by averaging.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::structural("empty label list"));
        }
        {
            let mut seen = BTreeSet::new();
            for l in &labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::structural(format!("duplicate label {l:?}")));
                }
            }
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::structural(format!(
                "matrix shape does not match {n} labels"
            )));
        }
        let mut dist = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::structural(format!(
                        "entry ({i},{j}) = {v} not finite"
                    )));
                }
                if v < 0.0 {
                    return Err(Error::structural(format!("negative entry ({i},{j}) = {v}")));
                }
            }
        }
        for i in 0..n {
            if rows[i][i].abs() > EPS {
                return Err(Error::structural(format!(
                    "nonzero diagonal entry ({i},{i}) = {}",
                    rows[i][i]
                )));
            }
            for j in (i + 1)..n {
                if (rows[i][j] - rows[j][i]).abs() > EPS {
                    return Err(Error::structural(format!(
                        "asymmetric entries ({i},{j}) = {} vs ({j},{i}) = {}",
                        rows[i][j], rows[j][i]
                    )));
                }
                let v = 0.5 * (rows[i][j] + rows[j][i]);
                if v <= 0.0 {
                    return Err(Error::structural(format!(
                        "zero off-diagonal entry ({i},{j}); points {:?} and {:?} coincide",
                        labels[i], labels[j]
                    )));
                }
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Internal constructor for matrices produced by trusted code paths
    /// (projections, quotients, generators). Invariants are debug-checked.
    pub(crate) fn from_parts(labels: Vec<String>, dist: Vec<f64>) -> Self {
        debug_assert_eq!(dist.len(), labels.len() * labels.len());
        let n = labels.len();
        debug_assert!((0..n).all(|i| dist[i * n + i] == 0.0));
        debug_assert!((0..n).all(|i| (0..n)
            .all(|j| i == j || (dist[i * n + j] > 0.0 && dist[i * n + j] == dist[j * n + i]))));
        FiniteMetricSpace { labels, dist }
    }

    /// The n-point space Δ_n(a) with every interpoint distance equal to `a`.
    pub fn delta(n: usize, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::structural("empty label list"));
        }
        if a <= 0.0 || a.is_nan() {
            return Err(Error::invalid(format!(
                "delta spacing must be positive, got {a}"
            )));
        }
        let mut dist = vec![a; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        Ok(FiniteMetricSpace {
            labels: default_labels(n),
            dist,
        })
    }

    /// A finite subset of the real line with the Euclidean metric; labels
    /// are the coordinate values.
    pub fn line(points: &[f64]) -> Result<Self> {
        let labels = points.iter().map(|x| format!("{x}")).collect();
        let rows = points
            .iter()
            .map(|&a| points.iter().map(|&b| (a - b).abs()).collect())
            .collect();
        Self::new(labels, rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty spaces
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| self.dist[i * n..(i + 1) * n].to_vec())
            .collect()
    }

    /// The space `c·X` with every distance scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::invalid(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * c).collect(),
        })
    }

    /// Reorders points by `perm` (new index i holds old point `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::invalid("not a permutation of the point set"));
        }
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = self.dist(perm[i], perm[j]);
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// The subspace on `indices` (distinct, non-empty).
    pub fn restriction(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("restriction to an empty subset"));
        }
        let n = self.len();
        let mut seen = vec![false; n];
        for &i in indices {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid(
                    "restriction indices must be distinct and in range",
                ));
            }
        }
        let m = indices.len();
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let mut dist = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                dist[a * m + b] = self.dist(indices[a], indices[b]);
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Checks the p-triangle inequality on every triple, within [`EPS`].
    /// On success reports the largest verified class among {1, p, ∞}; on
    /// failure reports the first violating triple and its slack.
    pub fn validate(&self, p: PExponent) -> Result<SpaceClass> {
        self.check_triangles(p)?;
        let verified_p = if p.is_infinity() || self.check_triangles(PExponent::INFINITY).is_ok() {
            PExponent::INFINITY
        } else {
            p
        };
        Ok(SpaceClass { verified_p })
    }

    pub fn is_ultrametric(&self) -> bool {
        self.check_triangles(PExponent::INFINITY).is_ok()
    }

    fn check_triangles(&self, p: PExponent) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let d_ij = self.dist(i, j);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let bound = p_sum_f(self.dist(i, k), self.dist(k, j), p);
                    if d_ij > bound + EPS {
                        return Err(Error::Triangle {
                            p,
                            v: TriangleViolation {
                                i,
                                k,
                                j,
                                lhs: d_ij,
                                bound,
                                slack: d_ij - bound,
                            },
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest distance (0 for a one-point space).
    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// Smallest positive distance; an error on one-point spaces, which have
    /// no positive entries.
    pub fn separation(&self) -> Result<f64> {
        let n = self.len();
        let mut sep = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                sep = sep.min(self.dist(i, j));
            }
        }
        if sep.is_finite() {
            Ok(sep)
        } else {
            Err(Error::invalid(
                "separation is undefined for a one-point space",
            ))
        }
    }

    /// The spectrum spec(X): sorted distinct distance values including 0,
    /// deduplicated with [`EPS`].
    pub fn spectrum(&self) -> Spectrum {
        let n = self.len();
        let mut vals = vec![0.0];
        for i in 0..n {
            for j in (i + 1)..n {
                vals.push(self.dist(i, j));
            }
        }
        vals.sort_by(f64::total_cmp);
        Spectrum::from_sorted(dedup_eps(vals))
    }

    /// The truncated spectrum spec_ε(X) = {t ∈ spec(X) : t ≥ ε}.
    pub fn spectrum_eps(&self, eps: f64) -> Spectrum {
        let values = self
            .spectrum()
            .values
            .into_iter()
            .filter(|&t| t >= eps)
            .collect();
        Spectrum::from_sorted(values)
    }

    /// The curvature set K_n(X): all n×n matrices `(d(x_i, x_j))_{ij}` over
    /// tuples in X^n, deduplicated by exact bit pattern and returned in a
    /// deterministic order. Guarded by `budget.max_tuples`.
    pub fn curvature_set(&self, n: usize, budget: &Budget) -> Result<Vec<Vec<f64>>> {
        if n == 0 {
            return Err(Error::invalid("curvature set order must be >= 1"));
        }
        let m = self.len() as u128;
        let tuples = m.checked_pow(n as u32).unwrap_or(u128::MAX);
        if tuples > budget.max_tuples {
            return Err(Error::Budget {
                what: format!("curvature set K_{n} of a {}-point space", self.len()),
                needed: tuples,
                limit: budget.max_tuples,
            });
        }
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut tuple = vec![0usize; n];
        loop {
            let mut mat = Vec::with_capacity(n * n);
            for &a in &tuple {
                for &b in &tuple {
                    mat.push(self.dist(a, b).to_bits());
                }
            }
            seen.insert(mat);
            // Advance the odometer.
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(seen
                        .into_iter()
                        .map(|m| m.into_iter().map(f64::from_bits).collect())
                        .collect());
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < self.len() {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }
}
