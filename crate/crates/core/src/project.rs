//! The canonical projections `𝔖_p` from finite metric spaces onto finite
//! p-metric spaces, via path infimization of p-sums of edge weights:
//! `d^(p)(x, x') = inf over point sequences of ⊞_p d(x_i, x_{i+1})`.
//!
//! For finite p the optimal sequence never revisits a point, so the
//! all-pairs closure of the p-th-power matrix (Floyd-Warshall) is exact.
//! For p = ∞ the projection is the single-linkage ultrametric (minimax
//! path cost), computed by Kruskal-style agglomeration; the Floyd-Warshall
//! max-min closure is kept alongside as an oracle.

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::space::FiniteMetricSpace;
use crate::EPS;

/// A projected space together with the partition of the original points
/// into zero-distance classes. For finite inputs with positive distances
/// the partition is trivial (all singletons); the collapse path exists
/// because floating-point shortest paths can in principle produce
/// near-zero values even though exact arithmetic cannot.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub space: FiniteMetricSpace,
    /// Blocks of original point indices, each sorted, ordered by first
    /// element. Singleton blocks everywhere in the expected case.
    pub collapsed: Vec<Vec<usize>>,
}

impl ProjectionResult {
    pub fn is_collapse_trivial(&self) -> bool {
        self.collapsed.iter().all(|b| b.len() == 1)
    }
}

/// Applies `𝔖_p`. The input must be a valid 1-metric; the output
/// validates as a p-metric, is entrywise dominated by the input, and is a
/// fixed point when the input already is a p-metric.
pub fn project(space: &FiniteMetricSpace, p: PExponent) -> Result<ProjectionResult> {
    space.validate(PExponent::ONE)?;
    let n = space.len();
    let projected = if p.is_infinity() {
        single_linkage_kruskal(space)
    } else if p.get() == 1.0 {
        space.matrix().to_vec()
    } else {
        let pv = p.get();
        let mut w: Vec<f64> = space.matrix().iter().map(|d| d.powf(pv)).collect();
        floyd_warshall_min_plus(&mut w, n);
        let inv = 1.0 / pv;
        w.iter_mut().for_each(|v| *v = v.powf(inv));
        w
    };
    Ok(collapse(space, projected))
}

fn floyd_warshall_min_plus(w: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            let wik = w[i * n + k];
            for j in 0..n {
                let via = wik + w[k * n + j];
                if via < w[i * n + j] {
                    w[i * n + j] = via;
                }
            }
        }
    }
}

/// Single-linkage ultrametric by ascending-edge agglomeration: when the
/// edge (i, j) of weight w first connects two components, every cross pair
/// gets minimax cost w. Output is exactly the minimax path cost matrix.
fn single_linkage_kruskal(space: &FiniteMetricSpace) -> Vec<f64> {
    let n = space.len();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    edges.sort_by(|a, b| space.dist(a.0, a.1).total_cmp(&space.dist(b.0, b.1)));

    let mut out = vec![0.0; n * n];
    let mut comp: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut remaining = n - 1;
    for (i, j) in edges {
        if remaining == 0 {
            break;
        }
        let (ci, cj) = (comp[i], comp[j]);
        if ci == cj {
            continue;
        }
        let w = space.dist(i, j);
        let (keep, absorb) = if members[ci].len() >= members[cj].len() {
            (ci, cj)
        } else {
            (cj, ci)
        };
        for &a in &members[keep] {
            for &b in &members[absorb] {
                out[a * n + b] = w;
                out[b * n + a] = w;
            }
        }
        let absorbed = std::mem::take(&mut members[absorb]);
        for &b in &absorbed {
            comp[b] = keep;
        }
        members[keep].extend(absorbed);
        remaining -= 1;
    }
    out
}

/// The max-min closure of the distance matrix by Floyd-Warshall over the
/// (min, max) semiring. Mathematically identical to the Kruskal route and
/// kept as an independent oracle for it.
pub fn single_linkage_maxmin(space: &FiniteMetricSpace) -> Vec<f64> {
    let n = space.len();
    let mut w = space.matrix().to_vec();
    for k in 0..n {
        for i in 0..n {
            let wik = w[i * n + k];
            for j in 0..n {
                let via = wik.max(w[k * n + j]);
                if via < w[i * n + j] {
                    w[i * n + j] = via;
                }
            }
        }
    }
    w
}

/// Merges points at projected distance <= EPS (union-find), then builds
/// the quotient space. Trivial for genuine finite metric inputs.
fn collapse(space: &FiniteMetricSpace, projected: Vec<f64>) -> ProjectionResult {
    let n = space.len();
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if projected[i * n + j] <= EPS {
                let (ri, rj) = (find(&mut root, i), find(&mut root, j));
                if ri != rj {
                    root[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut root, i);
        if block_of[r] == usize::MAX {
            block_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        block_of[i] = block_of[r];
        blocks[block_of[r]].push(i);
    }

    if blocks.len() == n {
        let space = FiniteMetricSpace::from_parts(space.labels().to_vec(), projected);
        return ProjectionResult {
            space,
            collapsed: blocks,
        };
    }

    let m = blocks.len();
    let labels = blocks
        .iter()
        .map(|b| {
            let mut ls: Vec<&str> = b.iter().map(|&i| space.labels()[i].as_str()).collect();
            ls.sort_unstable();
            ls.join("+")
        })
        .collect();
    let mut dist = vec![0.0; m * m];
    for a in 0..m {
        for b in (a + 1)..m {
            let d = projected[blocks[a][0] * n + blocks[b][0]];
            dist[a * m + b] = d;
            dist[b * m + a] = d;
        }
    }
    ProjectionResult {
        space: FiniteMetricSpace::from_parts(labels, dist),
        collapsed: blocks,
    }
}

/// The snowflake transform `S_w`: every distance raised to `power > 0`,
/// labels preserved. `S_{1/p}` carries metric spaces into p-metric spaces
/// and `S_p` back.
pub fn snowflake(space: &FiniteMetricSpace, power: f64) -> Result<FiniteMetricSpace> {
    if power <= 0.0 || !power.is_finite() {
        return Err(Error::invalid(format!(
            "snowflake power must be a positive real, got {power}"
        )));
    }
    if power == 1.0 {
        return Ok(space.clone());
    }
    let dist = space.matrix().iter().map(|d| d.powf(power)).collect();
    Ok(FiniteMetricSpace::from_parts(space.labels().to_vec(), dist))
}

/// Checks `𝔖_p ∘ 𝔖_q = 𝔖_p` on a concrete space: projects at q then p,
/// projects at p directly, and compares entrywise within EPS. Requires
/// q < p.
pub fn project_composition_check(
    space: &FiniteMetricSpace,
    q: PExponent,
    p: PExponent,
) -> Result<bool> {
    if q >= p {
        return Err(Error::invalid(format!(
            "composition check needs q < p, got q = {q}, p = {p}"
        )));
    }
    let via_q = project(&project(space, q)?.space, p)?.space;
    let direct = project(space, p)?.space;
    if via_q.len() != direct.len() {
        return Ok(false);
    }
    Ok(via_q
        .matrix()
        .iter()
        .zip(direct.matrix())
        .all(|(a, b)| (a - b).abs() <= EPS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    const INF: PExponent = PExponent::INFINITY;

    #[test]
    fn line_three_points_at_p2() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
        let r = project(&x, pe(2.0)).unwrap();
        assert!(r.is_collapse_trivial());
        let y = &r.space;
        assert!((y.dist(0, 2) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(y.dist(0, 1), 1.0);
        assert_eq!(y.dist(1, 2), 1.0);
        assert!(y.validate(pe(2.0)).is_ok());
        // diam(L_n^(p)) = n^{1/p} with n = 2
        assert!((y.diameter() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_fixes_p_metric_spaces() {
        // Δ_3(2) is an ultrametric, hence a p-metric for every p.
        let x = FiniteMetricSpace::delta(3, 2.0).unwrap();
        for p in [pe(1.0), pe(2.0), pe(7.0), INF] {
            let r = project(&x, p).unwrap();
            assert_eq!(r.space.matrix(), x.matrix());
        }
        // A snowflaked line is a 2-metric and must be fixed by 𝔖_2.
        let y = snowflake(
            &FiniteMetricSpace::line(&[0.0, 1.0, 3.0, 3.5]).unwrap(),
            0.5,
        )
        .unwrap();
        let r = project(&y, pe(2.0)).unwrap();
        for (a, b) in r.space.matrix().iter().zip(y.matrix()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_linkage_minimax_example() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).unwrap();
        let r = project(&x, INF).unwrap();
        let u = &r.space;
        assert_eq!(u.dist(0, 1), 1.0);
        assert_eq!(u.dist(1, 2), 2.0);
        assert_eq!(u.dist(0, 2), 2.0);
        assert!(u.validate(INF).unwrap().is_ultrametric());
    }

    #[test]
    fn kruskal_equals_maxmin_closure() {
        let x = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                vec![0.0, 3.0, 5.0, 9.0],
                vec![3.0, 0.0, 4.0, 7.0],
                vec![5.0, 4.0, 0.0, 6.0],
                vec![9.0, 7.0, 6.0, 0.0],
            ],
        )
        .unwrap();
        let via_mst = project(&x, INF).unwrap().space;
        let via_fw = single_linkage_maxmin(&x);
        assert_eq!(via_mst.matrix(), &via_fw[..]);
    }

    #[test]
    fn projected_distances_never_grow() {
        let x = FiniteMetricSpace::line(&[0.0, 0.7, 1.9, 4.0]).unwrap();
        for p in [pe(1.5), pe(2.0), pe(4.0), INF] {
            let r = project(&x, p).unwrap();
            for (a, b) in r.space.matrix().iter().zip(x.matrix()) {
                assert!(*a <= b + EPS);
            }
            assert!(r.space.diameter() <= x.diameter() + EPS);
        }
    }

    #[test]
    fn snowflake_examples() {
        let x = FiniteMetricSpace::delta(2, 4.0).unwrap();
        let half = snowflake(&x, 0.5).unwrap();
        assert_eq!(half.dist(0, 1), 2.0);

        let y = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(snowflake(&y, 1.0).unwrap(), y);

        let z = snowflake(&y, 0.5).unwrap();
        assert!(z.validate(pe(2.0)).is_ok());

        // S_a then S_{1/a} returns to the original within EPS.
        let round = snowflake(&snowflake(&y, 0.37).unwrap(), 1.0 / 0.37).unwrap();
        for (a, b) in round.matrix().iter().zip(y.matrix()) {
            assert!((a - b).abs() < EPS);
        }

        assert!(snowflake(&y, 0.0).is_err());
        assert!(snowflake(&y, -2.0).is_err());
    }

    #[test]
    fn composition_collapses_to_larger_exponent() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 2.5, 3.0, 5.0]).unwrap();
        assert!(project_composition_check(&x, pe(2.0), pe(4.0)).unwrap());
        assert!(project_composition_check(&x, pe(2.0), INF).unwrap());
        assert!(project_composition_check(&x, pe(1.0), pe(2.0)).unwrap());
        assert!(matches!(
            project_composition_check(&x, pe(4.0), pe(2.0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            project_composition_check(&x, pe(2.0), pe(2.0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn scale_equivariance() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 2.0, 4.5]).unwrap();
        for p in [pe(2.0), INF] {
            let lhs = project(&x.scaled(3.25).unwrap(), p).unwrap().space;
            let rhs = project(&x, p).unwrap().space.scaled(3.25).unwrap();
            for (a, b) in lhs.matrix().iter().zip(rhs.matrix()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn snowflake_commutes_with_single_linkage() {
        // On a 2-metric space X: 𝔖_∞(S_2 X) = S_2(𝔖_∞ X).
        let base = FiniteMetricSpace::line(&[0.0, 1.0, 2.5, 3.1]).unwrap();
        let x = snowflake(&base, 0.5).unwrap();
        let lhs = project(&snowflake(&x, 2.0).unwrap(), INF).unwrap().space;
        let rhs = snowflake(&project(&x, INF).unwrap().space, 2.0).unwrap();
        for (a, b) in lhs.matrix().iter().zip(rhs.matrix()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_metric_input() {
        let bad = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 9.0],
                vec![1.0, 0.0, 1.0],
                vec![9.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        assert!(matches!(
            project(&bad, pe(2.0)),
            Err(Error::Triangle { .. })
        ));
    }
}
