//! Gromov-Hausdorff-type distances between finite spaces.
//!
//! `d_GH^(p)(X, Y) = 2^{-1/p} · inf_R dis_p(R)` over correspondences
//! `R ⊆ X×Y` with full projections, where `dis_p` is the supremum of
//! `Λ_p` between matched distances (the coefficient is 1 at p = ∞).
//! At desk scale the infimum is computed exactly, either by raw subset
//! enumeration or through the equivalent map-pair characterization
//! `2^{-1/p} inf_{φ,ψ} max(dis_p(φ), dis_p(ψ), codis_p(φ,ψ))`.
//!
//! For ultrametric spaces, `u_GH = d_GH^(∞)` has a closed form: the least
//! level `t` in the merged spectrum at which the t-closed quotients are
//! isometric. Quotient isometry is decided by canonical signatures, and
//! monotonicity of the quotient chain justifies binary search over levels.

use crate::arith::lambda_p_f;
use crate::dendrogram::{quotient_blocks, quotient_unchecked, signature_unchecked};
use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::space::FiniteMetricSpace;
use crate::{grid, Budget, EPS};

/// A relation between the point sets of two spaces whose projections onto
/// both factors are full.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence { pairs }
    }

    /// The diagonal on a space compared with itself.
    pub fn identity(n: usize) -> Self {
        Correspondence::new((0..n).map(|i| (i, i)).collect())
    }

    /// The full product X×Y.
    pub fn product(nx: usize, ny: usize) -> Self {
        Correspondence::new((0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Checks that every point of both spaces is covered; the error names
    /// the first uncovered point.
    pub fn validate_for(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<()> {
        let (nx, ny) = (x.len(), y.len());
        if let Some(&(i, j)) = self.pairs.iter().find(|&&(i, j)| i >= nx || j >= ny) {
            return Err(Error::invalid(format!(
                "correspondence pair ({i}, {j}) is out of range for {nx}x{ny} spaces"
            )));
        }
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        for &(i, j) in &self.pairs {
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if let Some(i) = seen_x.iter().position(|&s| !s) {
            return Err(Error::invalid(format!(
                "correspondence leaves point {:?} of the first space uncovered",
                x.labels()[i]
            )));
        }
        if let Some(j) = seen_y.iter().position(|&s| !s) {
            return Err(Error::invalid(format!(
                "correspondence leaves point {:?} of the second space uncovered",
                y.labels()[j]
            )));
        }
        Ok(())
    }
}

/// A pair of total maps φ: X→Y and ψ: Y→X as index arrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapPair {
    phi: Vec<usize>,
    psi: Vec<usize>,
}

impl MapPair {
    pub fn new(
        phi: Vec<usize>,
        psi: Vec<usize>,
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
    ) -> Result<Self> {
        if phi.len() != x.len() || phi.iter().any(|&j| j >= y.len()) {
            return Err(Error::invalid("phi must be total on X with values in Y"));
        }
        if psi.len() != y.len() || psi.iter().any(|&i| i >= x.len()) {
            return Err(Error::invalid("psi must be total on Y with values in X"));
        }
        Ok(MapPair { phi, psi })
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn psi(&self) -> &[usize] {
        &self.psi
    }

    /// `max(dis_p(φ), dis_p(ψ), codis_p(φ, ψ))`, the quantity minimized in
    /// the map characterization of `d_GH^(p)` (before the `2^{-1/p}`).
    pub fn distortion_triple(
        &self,
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
        p: PExponent,
    ) -> f64 {
        dis_p_map(&self.phi, x, y, p)
            .max(dis_p_map(&self.psi, y, x, p))
            .max(codis_p_maps(&self.phi, &self.psi, x, y, p))
    }

    /// The induced correspondence `{(x, φ(x))} ∪ {(ψ(y), y)}`, whose
    /// p-distortion equals [`Self::distortion_triple`].
    pub fn correspondence(&self) -> Correspondence {
        let mut pairs: Vec<(usize, usize)> =
            self.phi.iter().enumerate().map(|(i, &j)| (i, j)).collect();
        pairs.extend(self.psi.iter().enumerate().map(|(j, &i)| (i, j)));
        Correspondence::new(pairs)
    }
}

/// How a reported distance was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactEnumeration,
    Structural,
    BoundsOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Correspondence(Correspondence),
    QuotientLevel(f64),
}

/// Either an exact value (`lower == upper`) or a bracketing interval, with
/// the method used and an optimality witness when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub witness: Option<Witness>,
}

impl DistanceReport {
    fn exact(value: f64, method: Method, witness: Option<Witness>) -> Self {
        DistanceReport {
            lower: value,
            upper: value,
            method,
            witness,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value, when the report is not an interval.
    pub fn value(&self) -> Option<f64> {
        self.is_exact().then_some(self.lower)
    }
}

/// The p-distortion of a correspondence:
/// `sup Λ_p(d_X(x, x'), d_Y(y, y'))` over pairs of matched pairs.
pub fn dis_p(
    corr: &Correspondence,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
) -> Result<f64> {
    corr.validate_for(x, y)?;
    let mut worst = 0.0f64;
    for (a, &(i, j)) in corr.pairs.iter().enumerate() {
        for &(i2, j2) in &corr.pairs[a..] {
            worst = worst.max(lambda_p_f(x.dist(i, i2), y.dist(j, j2), p));
        }
    }
    Ok(worst)
}

pub(crate) fn dis_p_map(
    phi: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
) -> f64 {
    let n = x.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max(lambda_p_f(x.dist(i, j), y.dist(phi[i], phi[j]), p));
        }
    }
    worst
}

fn codis_p_maps(
    phi: &[usize],
    psi: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
) -> f64 {
    let mut worst = 0.0f64;
    for (i, &fi) in phi.iter().enumerate() {
        for (j, &gj) in psi.iter().enumerate() {
            worst = worst.max(lambda_p_f(x.dist(i, gj), y.dist(fi, j), p));
        }
    }
    worst
}

/// All total maps from an `from`-point set into a `to`-point set, in
/// lexicographic order.
pub(crate) fn all_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut maps = Vec::new();
    let mut cur = vec![0usize; from];
    loop {
        maps.push(cur.clone());
        let mut pos = from;
        loop {
            if pos == 0 {
                return maps;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < to {
                break;
            }
            cur[pos] = 0;
        }
    }
}

/// Minimizes `max(a_φ, b_ψ, codis(φ, ψ))` over all pairs from two scored
/// candidate lists. Candidates are visited in ascending score order with
/// pruning against the incumbent, which preserves exactness: a skipped
/// pair already has `max(a, b)` no smaller than the final minimum.
/// Returns the best value with the witnessing pair.
pub(crate) fn pruned_pair_min<F>(
    phis: Vec<(f64, Vec<usize>)>,
    psis: Vec<(f64, Vec<usize>)>,
    mut codis: F,
) -> (f64, Vec<usize>, Vec<usize>)
where
    F: FnMut(&[usize], &[usize]) -> f64,
{
    let mut phis = phis;
    let mut psis = psis;
    phis.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    psis.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut best = f64::INFINITY;
    let mut arg: (usize, usize) = (0, 0);
    for (pi, (da, phi)) in phis.iter().enumerate() {
        if *da >= best {
            break;
        }
        for (qi, (db, psi)) in psis.iter().enumerate() {
            let base = da.max(*db);
            if base >= best {
                break;
            }
            let total = base.max(codis(phi, psi));
            if total < best {
                best = total;
                arg = (pi, qi);
            }
        }
    }
    let phi = phis[arg.0].1.clone();
    let psi = psis[arg.1].1.clone();
    (best, phi, psi)
}

fn scored_maps(
    from: &FiniteMetricSpace,
    to: &FiniteMetricSpace,
    p: PExponent,
) -> Vec<(f64, Vec<usize>)> {
    all_maps(from.len(), to.len())
        .into_iter()
        .map(|m| (dis_p_map(&m, from, to, p), m))
        .collect()
}

fn map_pair_count(nx: usize, ny: usize) -> u128 {
    let phis = (ny as u128).checked_pow(nx as u32).unwrap_or(u128::MAX);
    let psis = (nx as u128).checked_pow(ny as u32).unwrap_or(u128::MAX);
    phis.saturating_mul(psis)
}

/// Exact `d_GH^(p)` with an optimal witness correspondence.
///
/// Strategy: raw enumeration of all `2^(#X·#Y)` correspondence subsets
/// while `#X·#Y` stays within `budget.max_raw_product`; otherwise the
/// search runs over map-pair-induced correspondences
/// `{(x, φ(x))} ∪ {(ψ(y), y)}`, which realize the same infimum, while the
/// map-pair count stays within `budget.max_map_pairs`.
pub fn dghp_exact(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
    budget: &Budget,
) -> Result<DistanceReport> {
    let (nx, ny) = (x.len(), y.len());
    let coeff = p.half_pow();
    // The subset mask is 32-bit, so the raw route hard-caps at 30 pairs
    // regardless of the configured budget.
    if nx * ny <= budget.max_raw_product.min(30) as usize {
        let (dis, corr) = min_distortion_raw(x, y, p);
        return Ok(DistanceReport::exact(
            coeff * dis,
            Method::ExactEnumeration,
            Some(Witness::Correspondence(corr)),
        ));
    }
    let pair_count = map_pair_count(nx, ny);
    if pair_count > budget.max_map_pairs {
        return Err(Error::Budget {
            what: format!(
                "exact d_GH^({p}) search on {nx}x{ny} points; use dghp_bounds or, for \
                 ultrametric inputs at p = inf, ugh_structural"
            ),
            needed: pair_count,
            limit: budget.max_map_pairs,
        });
    }
    let (dis, phi, psi) =
        pruned_pair_min(scored_maps(x, y, p), scored_maps(y, x, p), |phi, psi| {
            codis_p_maps(phi, psi, x, y, p)
        });
    let pair = MapPair::new(phi, psi, x, y).expect("search yields total maps");
    Ok(DistanceReport::exact(
        coeff * dis,
        Method::ExactEnumeration,
        Some(Witness::Correspondence(pair.correspondence())),
    ))
}

/// Minimum distortion over every correspondence, by subset enumeration.
fn min_distortion_raw(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
) -> (f64, Correspondence) {
    let (nx, ny) = (x.len(), y.len());
    let m = nx * ny;
    debug_assert!(m <= 30);
    // Λ_p between the distances matched by pair e = (e/ny, e%ny) and pair f.
    let mut lam = vec![0.0f64; m * m];
    for e in 0..m {
        let (i, j) = (e / ny, e % ny);
        for f in 0..m {
            let (i2, j2) = (f / ny, f % ny);
            lam[e * m + f] = lambda_p_f(x.dist(i, i2), y.dist(j, j2), p);
        }
    }
    let row_mask: Vec<u32> = (0..nx)
        .map(|i| (0..ny).fold(0u32, |acc, j| acc | (1 << (i * ny + j))))
        .collect();
    let col_mask: Vec<u32> = (0..ny)
        .map(|j| (0..nx).fold(0u32, |acc, i| acc | (1 << (i * ny + j))))
        .collect();

    let mut best = f64::INFINITY;
    let mut best_mask = 0u32;
    let mut members: Vec<usize> = Vec::with_capacity(m);
    'subset: for mask in 1u32..(1 << m) {
        if row_mask.iter().any(|&r| mask & r == 0) || col_mask.iter().any(|&c| mask & c == 0) {
            continue;
        }
        members.clear();
        let mut bits = mask;
        while bits != 0 {
            members.push(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
        let mut worst = 0.0f64;
        for (a, &e) in members.iter().enumerate() {
            for &f in &members[a..] {
                let v = lam[e * m + f];
                if v > worst {
                    worst = v;
                    if worst >= best {
                        continue 'subset;
                    }
                }
            }
        }
        if worst < best {
            best = worst;
            best_mask = mask;
        }
    }
    let pairs = (0..m)
        .filter(|e| best_mask & (1 << e) != 0)
        .map(|e| (e / ny, e % ny))
        .collect();
    (best, Correspondence::new(pairs))
}

/// `d_GH^(p)` through the Kalton-Ostrovskii map formula:
/// `2^{-1/p} · min over (φ, ψ) of max(dis_p(φ), dis_p(ψ), codis_p(φ, ψ))`.
pub fn dghp_via_maps(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
    budget: &Budget,
) -> Result<f64> {
    let pair_count = map_pair_count(x.len(), y.len());
    if pair_count > budget.max_map_pairs {
        return Err(Error::Budget {
            what: format!(
                "map-pair d_GH^({p}) search on {}x{} points",
                x.len(),
                y.len()
            ),
            needed: pair_count,
            limit: budget.max_map_pairs,
        });
    }
    let (dis, _, _) = pruned_pair_min(scored_maps(x, y, p), scored_maps(y, x, p), |phi, psi| {
        codis_p_maps(phi, psi, x, y, p)
    });
    Ok(p.half_pow() * dis)
}

/// Level-search strategy for [`ugh_structural_with`]. The linear scan is a
/// verification fallback for the binary search, which is justified by
/// quotient monotonicity: quotients isometric at `t` stay isometric at
/// every `s ≥ t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanStrategy {
    #[default]
    Binary,
    Linear,
}

/// Merged candidate levels: `{0} ∪ spec(X) ∪ spec(Y)`, EPS-deduplicated.
fn merged_levels(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<f64> {
    let mut levels: Vec<f64> = x
        .spectrum()
        .values()
        .iter()
        .chain(y.spectrum().values())
        .copied()
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|next, kept| *next - *kept <= EPS);
    levels
}

/// Closed-form `u_GH` between ultrametric spaces: the least merged-spectrum
/// level at which the t-closed quotients have equal canonical signatures.
pub fn ugh_structural(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<DistanceReport> {
    ugh_structural_with(x, y, ScanStrategy::Binary)
}

pub fn ugh_structural_with(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    strategy: ScanStrategy,
) -> Result<DistanceReport> {
    x.validate(PExponent::INFINITY)?;
    y.validate(PExponent::INFINITY)?;
    let levels = merged_levels(x, y);
    let isometric_at = |t: f64| -> bool {
        signature_unchecked(&quotient_unchecked(x, t))
            == signature_unchecked(&quotient_unchecked(y, t))
    };
    debug_assert!(isometric_at(*levels.last().expect("levels contain 0")));
    let t = match strategy {
        ScanStrategy::Linear => *levels
            .iter()
            .find(|&&t| isometric_at(t))
            .expect("isometric at the top level"),
        ScanStrategy::Binary => {
            let (mut lo, mut hi) = (0usize, levels.len() - 1);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if isometric_at(levels[mid]) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            levels[lo]
        }
    };
    Ok(DistanceReport::exact(
        t,
        Method::Structural,
        Some(Witness::QuotientLevel(t)),
    ))
}

/// The codistortion-free variant
/// `max(min_φ dis_∞(φ), min_ψ dis_∞(ψ))`, which coincides with `u_GH` on
/// ultrametric spaces.
pub fn ugh_hat(x: &FiniteMetricSpace, y: &FiniteMetricSpace, budget: &Budget) -> Result<f64> {
    x.validate(PExponent::INFINITY)?;
    y.validate(PExponent::INFINITY)?;
    let (nx, ny) = (x.len(), y.len());
    let count = (ny as u128)
        .checked_pow(nx as u32)
        .and_then(|a| (nx as u128).checked_pow(ny as u32).map(|b| a + b))
        .unwrap_or(u128::MAX);
    if count > budget.max_map_pairs {
        return Err(Error::Budget {
            what: format!("decoupled u_GH map search on {nx}x{ny} points"),
            needed: count,
            limit: budget.max_map_pairs,
        });
    }
    let p = PExponent::INFINITY;
    let best_phi = all_maps(nx, ny)
        .into_iter()
        .map(|m| dis_p_map(&m, x, y, p))
        .fold(f64::INFINITY, f64::min);
    let best_psi = all_maps(ny, nx)
        .into_iter()
        .map(|m| dis_p_map(&m, y, x, p))
        .fold(f64::INFINITY, f64::min);
    Ok(best_phi.max(best_psi))
}

fn checked_subset(space: &FiniteMetricSpace, subset: &[usize], name: &str) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::invalid(format!("subset {name} is empty")));
    }
    let mut s: Vec<usize> = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.last().copied().unwrap_or(0) >= space.len() {
        return Err(Error::invalid(format!(
            "subset {name} has out-of-range indices"
        )));
    }
    Ok(s)
}

/// Hausdorff distance between subsets of an ultrametric space through the
/// structural formula: the least level `t` with `A_c(t) = B_c(t)`.
pub fn hausdorff_ultra(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    let a = checked_subset(space, a, "A")?;
    let b = checked_subset(space, b, "B")?;
    space.validate(PExponent::INFINITY)?;
    let mut levels = vec![0.0];
    levels.extend(
        space
            .spectrum()
            .values()
            .iter()
            .copied()
            .filter(|&t| t > 0.0),
    );
    for t in levels {
        let blocks = quotient_blocks(space, t);
        let mut block_of = vec![usize::MAX; space.len()];
        for (bi, block) in blocks.iter().enumerate() {
            for &i in block {
                block_of[i] = bi;
            }
        }
        let quot_a: std::collections::BTreeSet<usize> = a.iter().map(|&i| block_of[i]).collect();
        let quot_b: std::collections::BTreeSet<usize> = b.iter().map(|&i| block_of[i]).collect();
        if quot_a == quot_b {
            return Ok(t);
        }
    }
    unreachable!("subsets coincide in the one-block quotient at the diameter")
}

/// Hausdorff distance by the direct max-min formula,
/// `max(max_a min_b d(a, b), max_b min_a d(a, b))`. Exact on any space;
/// the independent oracle for [`hausdorff_ultra`].
pub fn hausdorff_direct(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    let a = checked_subset(space, a, "A")?;
    let b = checked_subset(space, b, "B")?;
    let one_sided = |from: &[usize], to: &[usize]| -> f64 {
        from.iter()
            .map(|&i| {
                to.iter()
                    .map(|&j| space.dist(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(one_sided(&a, &b).max(one_sided(&b, &a)))
}

/// The least `ε ≥ 0` with `spec_ε(X) = spec_ε(Y)`: a lower bound for
/// `u_GH`. On finite spaces this infimum equals the first merged-spectrum
/// level whose strictly-above tails agree.
pub fn spectrum_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    x.validate(PExponent::INFINITY)?;
    y.validate(PExponent::INFINITY)?;
    let gx: Vec<i64> = x.spectrum().values().iter().map(|&v| grid(v)).collect();
    let gy: Vec<i64> = y.spectrum().values().iter().map(|&v| grid(v)).collect();
    for t in merged_levels(x, y) {
        let g = grid(t);
        let tail_x: Vec<i64> = gx.iter().copied().filter(|&s| s > g).collect();
        let tail_y: Vec<i64> = gy.iter().copied().filter(|&s| s > g).collect();
        if tail_x == tail_y {
            return Ok(t);
        }
    }
    unreachable!("tails are empty above the largest level")
}

/// `max over n ≤ n_max of min{t : K_n(X_c(t)) = K_n(Y_c(t))}`: the
/// curvature-set lower bound for `u_GH`, which reaches `u_GH` once `n_max`
/// covers the larger point count. Matrices are compared on the EPS grid.
pub fn curvature_lower_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    n_max: usize,
    budget: &Budget,
) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::invalid("curvature bound needs n_max >= 1"));
    }
    x.validate(PExponent::INFINITY)?;
    y.validate(PExponent::INFINITY)?;
    let levels = merged_levels(x, y);
    let snapped_curv =
        |space: &FiniteMetricSpace, n: usize| -> Result<std::collections::BTreeSet<Vec<i64>>> {
            Ok(space
                .curvature_set(n, budget)?
                .into_iter()
                .map(|mat| mat.into_iter().map(grid).collect())
                .collect())
        };
    let mut best = 0.0f64;
    for n in 1..=n_max {
        for &t in &levels {
            let kx = snapped_curv(&quotient_unchecked(x, t), n)?;
            let ky = snapped_curv(&quotient_unchecked(y, t), n)?;
            if kx == ky {
                best = best.max(t);
                break;
            }
        }
    }
    Ok(best)
}

/// Interval bounds for `d_GH^(p)` from diameters, the spectrum bound
/// (p = ∞, ultrametric inputs), and the Hölder upper bound
/// `⌈p⌉^{1/⌈p⌉} (2M)^{1-1/⌈p⌉} d_GH^{1/⌈p⌉}` when exact `d_GH` is within
/// budget.
pub fn dghp_bounds(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
    budget: &Budget,
) -> DistanceReport {
    let coeff = p.half_pow();
    let (dx, dy) = (x.diameter(), y.diameter());
    let mut lower = coeff * lambda_p_f(dx, dy, p);
    let mut upper = coeff * dx.max(dy);
    if p.is_infinity() {
        if let Ok(sb) = spectrum_lower_bound(x, y) {
            lower = lower.max(sb);
        }
    } else if let Ok(report) = dghp_exact(x, y, PExponent::ONE, budget) {
        let dgh = report.lower;
        let cp = p.get().ceil();
        let m = dx.max(dy);
        let holder = cp.powf(1.0 / cp) * (2.0 * m).powf(1.0 - 1.0 / cp) * dgh.powf(1.0 / cp);
        upper = upper.min(holder);
    }
    if upper < lower {
        upper = lower;
    }
    DistanceReport {
        lower,
        upper,
        method: Method::BoundsOnly,
        witness: None,
    }
}

/// Whether `f` is an (ε, p)-isometry: `dis_p(f) ≤ ε` and `f(X)` is an
/// ε-net of Y.
pub fn is_eps_p_isometry(
    f: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    eps: f64,
    p: PExponent,
) -> Result<bool> {
    if f.len() != x.len() || f.iter().any(|&j| j >= y.len()) {
        return Err(Error::invalid("map must be total on X with values in Y"));
    }
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::invalid(format!("epsilon must be >= 0, got {eps}")));
    }
    if dis_p_map(f, x, y, p) > eps {
        return Ok(false);
    }
    let is_net = (0..y.len()).all(|j| {
        f.iter()
            .map(|&fi| y.dist(j, fi))
            .fold(f64::INFINITY, f64::min)
            <= eps
    });
    Ok(is_net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::{project, snowflake};

    fn pe(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    const INF: PExponent = PExponent::INFINITY;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn product_correspondence_distortion_is_diameter() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).unwrap();
        let star = FiniteMetricSpace::delta(1, 1.0).unwrap();
        let corr = Correspondence::product(x.len(), 1);
        assert_eq!(dis_p(&corr, &x, &star, pe(1.0)).unwrap(), x.diameter());
    }

    #[test]
    fn identity_correspondence_has_zero_distortion() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).unwrap();
        let corr = Correspondence::identity(x.len());
        for p in [pe(1.0), pe(2.0), INF] {
            assert_eq!(dis_p(&corr, &x, &x, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn diagonal_between_projected_and_scaled_line() {
        // L_2^(2) against 2^{-1/2}·L_2 under the diagonal, at p = 1.
        let l2 = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
        let proj = project(&l2, pe(2.0)).unwrap().space;
        let scaled = l2.scaled(0.5f64.sqrt()).unwrap();
        let corr = Correspondence::identity(3);
        let got = dis_p(&corr, &proj, &scaled, pe(1.0)).unwrap();
        let want = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (proj.dist(i, j) - scaled.dist(i, j)).abs())
            .fold(0.0f64, f64::max);
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn invalid_correspondence_names_uncovered_point() {
        let x = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let y = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let corr = Correspondence::new(vec![(0, 0), (0, 1)]);
        match dis_p(&corr, &x, &y, pe(1.0)) {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("p1"), "{msg}"),
            other => panic!("expected uncovered-point error, got {other:?}"),
        }
    }

    #[test]
    fn two_point_exact_values() {
        let a = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let b = FiniteMetricSpace::delta(2, 1.5).unwrap();
        let d1 = dghp_exact(&a, &b, pe(1.0), &budget()).unwrap();
        assert!((d1.value().unwrap() - 0.25).abs() < 1e-12);
        let dinf = dghp_exact(&a, &b, INF, &budget()).unwrap();
        assert!((dinf.value().unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn self_distance_is_zero_with_identity_witness() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).unwrap();
        for p in [pe(1.0), pe(2.0), INF] {
            let rep = dghp_exact(&x, &x, p, &budget()).unwrap();
            assert_eq!(rep.value().unwrap(), 0.0);
            match rep.witness {
                Some(Witness::Correspondence(c)) => {
                    assert_eq!(dis_p(&c, &x, &x, p).unwrap(), 0.0);
                }
                other => panic!("expected correspondence witness, got {other:?}"),
            }
        }
    }

    #[test]
    fn raw_and_map_routes_agree() {
        let a = FiniteMetricSpace::line(&[0.0, 1.0, 2.5]).unwrap();
        let b = FiniteMetricSpace::line(&[0.0, 0.8, 1.4, 3.0]).unwrap();
        for p in [pe(1.0), pe(2.0), pe(4.0), INF] {
            let raw = dghp_exact(&a, &b, p, &budget()).unwrap().value().unwrap();
            let maps = dghp_via_maps(&a, &b, p, &budget()).unwrap();
            assert!((raw - maps).abs() < 1e-12, "p={p}: {raw} vs {maps}");
        }
    }

    #[test]
    fn via_maps_two_point_example() {
        let a = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let b = FiniteMetricSpace::delta(2, 1.5).unwrap();
        assert!((dghp_via_maps(&a, &b, pe(1.0), &budget()).unwrap() - 0.25).abs() < 1e-12);
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(dghp_via_maps(&x, &x, pe(2.0), &budget()).unwrap(), 0.0);
    }

    #[test]
    fn map_pair_triple_matches_the_search() {
        let a = FiniteMetricSpace::line(&[0.0, 1.0, 2.5]).unwrap();
        let b = FiniteMetricSpace::line(&[0.0, 0.9]).unwrap();
        for p in [pe(1.0), pe(2.0), INF] {
            let mut best = f64::INFINITY;
            for phi in all_maps(a.len(), b.len()) {
                for psi in all_maps(b.len(), a.len()) {
                    let pair = MapPair::new(phi.clone(), psi, &a, &b).unwrap();
                    let triple = pair.distortion_triple(&a, &b, p);
                    // The induced correspondence realizes exactly the triple.
                    let corr = pair.correspondence();
                    assert!((dis_p(&corr, &a, &b, p).unwrap() - triple).abs() < 1e-12);
                    best = best.min(triple);
                }
            }
            let via = dghp_via_maps(&a, &b, p, &budget()).unwrap();
            assert!((p.half_pow() * best - via).abs() < 1e-12, "p={p}");
        }
        assert!(MapPair::new(vec![0, 0, 5], vec![0, 0], &a, &b).is_err());
        assert!(MapPair::new(vec![0, 0], vec![0, 0], &a, &b).is_err());
    }

    #[test]
    fn budget_error_directs_to_alternatives() {
        let x = FiniteMetricSpace::delta(7, 1.0).unwrap();
        let y = FiniteMetricSpace::delta(7, 2.0).unwrap();
        let tight = Budget {
            max_raw_product: 20,
            max_map_pairs: 1000,
            ..Budget::default()
        };
        match dghp_exact(&x, &y, pe(2.0), &tight) {
            Err(Error::Budget { what, .. }) => {
                assert!(what.contains("dghp_bounds"));
                assert!(what.contains("ugh_structural"));
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn structural_two_point_example() {
        let a = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let b = FiniteMetricSpace::delta(2, 1.5).unwrap();
        let rep = ugh_structural(&a, &b).unwrap();
        assert_eq!(rep.value().unwrap(), 1.5);
        assert_eq!(rep.witness, Some(Witness::QuotientLevel(1.5)));
        assert_eq!(ugh_structural(&a, &a).unwrap().value().unwrap(), 0.0);
    }

    #[test]
    fn structural_distinct_diameters() {
        let a = FiniteMetricSpace::delta(3, 1.0).unwrap();
        let b = FiniteMetricSpace::delta(2, 2.5).unwrap();
        let rep = ugh_structural(&a, &b).unwrap();
        assert_eq!(rep.value().unwrap(), 2.5);
    }

    #[test]
    fn structural_scan_strategies_agree() {
        let a = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0],
            ],
        )
        .unwrap();
        let b = FiniteMetricSpace::delta(3, 2.0).unwrap();
        let fast = ugh_structural_with(&a, &b, ScanStrategy::Binary).unwrap();
        let slow = ugh_structural_with(&a, &b, ScanStrategy::Linear).unwrap();
        assert_eq!(fast.value(), slow.value());
    }

    #[test]
    fn structural_rejects_non_ultrametric() {
        let x = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
        let y = FiniteMetricSpace::delta(2, 1.0).unwrap();
        assert!(matches!(
            ugh_structural(&x, &y),
            Err(Error::Triangle { .. })
        ));
    }

    #[test]
    fn ugh_hat_examples() {
        let a = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let b = FiniteMetricSpace::delta(2, 1.5).unwrap();
        assert!((ugh_hat(&a, &b, &budget()).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(ugh_hat(&a, &a, &budget()).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_examples() {
        let x = FiniteMetricSpace::delta(2, 2.0).unwrap();
        assert_eq!(hausdorff_ultra(&x, &[0], &[0]).unwrap(), 0.0);
        assert_eq!(hausdorff_ultra(&x, &[0], &[1]).unwrap(), 2.0);
        assert_eq!(hausdorff_direct(&x, &[0], &[1]).unwrap(), 2.0);
        assert!(matches!(
            hausdorff_ultra(&x, &[], &[0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn hausdorff_structural_equals_direct_on_tree() {
        let u = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                vec![0.0, 1.0, 3.0, 3.0],
                vec![1.0, 0.0, 3.0, 3.0],
                vec![3.0, 3.0, 0.0, 2.0],
                vec![3.0, 3.0, 2.0, 0.0],
            ],
        )
        .unwrap();
        for (a, b) in [
            (vec![0usize], vec![1usize]),
            (vec![0, 2], vec![1, 3]),
            (vec![0, 1], vec![2, 3]),
            (vec![0, 1, 2, 3], vec![0]),
        ] {
            assert_eq!(
                hausdorff_ultra(&u, &a, &b).unwrap(),
                hausdorff_direct(&u, &a, &b).unwrap(),
                "subsets {a:?} {b:?}"
            );
        }
    }

    #[test]
    fn spectrum_bound_examples() {
        let d2 = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let d3 = FiniteMetricSpace::delta(3, 1.0).unwrap();
        assert_eq!(spectrum_lower_bound(&d2, &d3).unwrap(), 0.0);
        assert_eq!(ugh_structural(&d2, &d3).unwrap().value().unwrap(), 1.0);
        assert_eq!(spectrum_lower_bound(&d2, &d2).unwrap(), 0.0);
        let wide = FiniteMetricSpace::delta(2, 2.0).unwrap();
        assert_eq!(spectrum_lower_bound(&d2, &wide).unwrap(), 2.0);
    }

    #[test]
    fn curvature_bound_separates_delta_spaces() {
        let d2 = FiniteMetricSpace::delta(2, 1.0).unwrap();
        let d3 = FiniteMetricSpace::delta(3, 1.0).unwrap();
        assert_eq!(curvature_lower_bound(&d2, &d3, 3, &budget()).unwrap(), 1.0);
        assert_eq!(curvature_lower_bound(&d2, &d2, 4, &budget()).unwrap(), 0.0);
    }

    #[test]
    fn bounds_collapse_against_one_point_space() {
        let x = FiniteMetricSpace::delta(3, 2.0).unwrap();
        let star = FiniteMetricSpace::delta(1, 1.0).unwrap();
        for p in [pe(1.0), pe(2.0), pe(3.0)] {
            let rep = dghp_bounds(&x, &star, p, &budget());
            let want = p.half_pow() * x.diameter();
            assert!((rep.lower - want).abs() < 1e-12);
            assert!((rep.upper - want).abs() < 1e-9, "p={p}: {rep:?}");
        }
        let same = dghp_bounds(&x, &x, pe(2.0), &budget());
        assert_eq!((same.lower, same.upper), (0.0, 0.0));
    }

    #[test]
    fn bounds_bracket_exact_value() {
        let a = FiniteMetricSpace::line(&[0.0, 1.0, 2.5]).unwrap();
        let b = FiniteMetricSpace::line(&[0.0, 2.0]).unwrap();
        for p in [pe(1.0), pe(1.5), pe(2.0), pe(3.0)] {
            let sa = snowflake(&a, p.recip()).unwrap();
            let sb = snowflake(&b, p.recip()).unwrap();
            let rep = dghp_bounds(&sa, &sb, p, &budget());
            let exact = dghp_exact(&sa, &sb, p, &budget()).unwrap().value().unwrap();
            assert!(rep.lower <= exact + EPS, "p={p}");
            assert!(exact <= rep.upper + EPS, "p={p}");
        }
    }

    #[test]
    fn eps_isometry_examples() {
        let x = FiniteMetricSpace::delta(2, 1.0).unwrap();
        assert!(is_eps_p_isometry(&[0, 1], &x, &x, 0.0, pe(1.0)).unwrap());
        // Constant map into one point of Δ_2(1): dis_1 = 1, image is a 1-net.
        assert!(is_eps_p_isometry(&[0, 0], &x, &x, 1.0, pe(1.0)).unwrap());
        assert!(!is_eps_p_isometry(&[0, 0], &x, &x, 0.5, pe(1.0)).unwrap());
        assert!(is_eps_p_isometry(&[0, 2], &x, &x, 0.0, pe(1.0)).is_err());
    }
}
