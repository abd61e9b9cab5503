//! Seeded generators for random metric, p-metric, and ultrametric spaces.
//!
//! Randomness comes from SplitMix64, pinned here so fixtures are
//! bit-reproducible from a seed across implementations:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Derived draws: `next_f64 = (next_u64 >> 11) · 2^-53` in `[0, 1)`;
//! a bounded index is `next_u64 mod n`.
//!
//! Ultrametric spaces are built from a random dendrogram: n−1 heights
//! drawn from the value range, sorted ascending (duplicates nudged up by
//! one ulp), then realized by merging two random clusters per height.
//! p-metric spaces are snowflakes `S_{1/p}` of random metric spaces whose
//! entries are drawn high enough that the plain triangle inequality holds
//! outright.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::space::{default_labels, FiniteMetricSpace};

/// SplitMix64; see the module docs for the exact recurrence.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index below `n`.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }
}

/// Which axiom class the generated space must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Metric,
    PMetric(PExponent),
    Ultrametric,
}

/// Generator configuration; accepted as JSON and as CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n_points: usize,
    /// `[lo, hi]` with `lo > 0`; generated distances stay within it.
    pub value_range: (f64, f64),
    pub class: ClassKind,
}

const MAX_POINTS: usize = 4096;

fn check_config(cfg: &GenConfig) -> Result<(f64, f64)> {
    let (lo, hi) = cfg.value_range;
    if cfg.n_points == 0 || cfg.n_points > MAX_POINTS {
        return Err(Error::invalid(format!(
            "n_points must be in 1..={MAX_POINTS}, got {}",
            cfg.n_points
        )));
    }
    if lo <= 0.0 || lo.is_nan() || hi < lo || !hi.is_finite() {
        return Err(Error::invalid(format!(
            "value_range needs 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

/// Generates a space of the configured class; deterministic in the seed.
pub fn generate(cfg: &GenConfig) -> Result<FiniteMetricSpace> {
    let (lo, hi) = check_config(cfg)?;
    let mut rng = SplitMix64::new(cfg.seed);
    match cfg.class {
        ClassKind::Metric => Ok(random_metric(&mut rng, cfg.n_points, lo, hi)),
        ClassKind::Ultrametric => Ok(random_ultrametric(&mut rng, cfg.n_points, lo, hi)),
        ClassKind::PMetric(p) => {
            if p.is_infinity() {
                Ok(random_ultrametric(&mut rng, cfg.n_points, lo, hi))
            } else if p.get() == 1.0 {
                Ok(random_metric(&mut rng, cfg.n_points, lo, hi))
            } else {
                random_p_metric(&mut rng, cfg.n_points, p, lo, hi)
            }
        }
    }
}

/// Entries drawn from `[max(lo, hi/2), hi]`: any three such values satisfy
/// the triangle inequality, since each is at most twice any other.
pub(crate) fn random_metric(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> FiniteMetricSpace {
    let floor = lo.max(hi / 2.0);
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.range_f64(floor, hi);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    FiniteMetricSpace::from_parts(default_labels(n), dist)
}

/// Snowflakes a random metric by `1/p`; the base entries are drawn from
/// the p-th powers of the range so the output lands back in `[lo, hi]`.
pub(crate) fn random_p_metric(
    rng: &mut SplitMix64,
    n: usize,
    p: PExponent,
    lo: f64,
    hi: f64,
) -> Result<FiniteMetricSpace> {
    let pv = p.get();
    let (plo, phi) = (lo.powf(pv), hi.powf(pv));
    if !phi.is_finite() || plo <= 0.0 {
        return Err(Error::invalid(format!(
            "value_range [{lo}, {hi}] under- or overflows at exponent p = {p}"
        )));
    }
    let base = random_metric(rng, n, plo, phi);
    let inv = 1.0 / pv;
    let dist = base.matrix().iter().map(|d| d.powf(inv)).collect();
    Ok(FiniteMetricSpace::from_parts(base.labels().to_vec(), dist))
}

/// Random dendrogram realization: heights strictly increase toward the
/// root, so every triple comes out isosceles with the two largest sides
/// equal.
pub(crate) fn random_ultrametric(
    rng: &mut SplitMix64,
    n: usize,
    lo: f64,
    hi: f64,
) -> FiniteMetricSpace {
    let mut heights: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| rng.range_f64(lo, hi))
        .collect();
    heights.sort_by(f64::total_cmp);
    for i in 1..heights.len() {
        if heights[i] <= heights[i - 1] {
            heights[i] = heights[i - 1].next_up();
        }
    }
    let mut dist = vec![0.0; n * n];
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for h in heights {
        let a = rng.below(clusters.len());
        let mut b = rng.below(clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        let (keep, absorb) = (a.min(b), a.max(b));
        for &i in &clusters[keep] {
            for &j in &clusters[absorb] {
                dist[i * n + j] = h;
                dist[j * n + i] = h;
            }
        }
        let merged = clusters.swap_remove(absorb);
        clusters[keep].extend(merged);
    }
    FiniteMetricSpace::from_parts(default_labels(n), dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::PExponent;

    #[test]
    fn one_point_for_every_class() {
        for class in [
            ClassKind::Metric,
            ClassKind::Ultrametric,
            ClassKind::PMetric(PExponent::TWO),
        ] {
            let cfg = GenConfig {
                seed: 1,
                n_points: 1,
                value_range: (1.0, 2.0),
                class,
            };
            assert_eq!(generate(&cfg).unwrap().len(), 1);
        }
    }

    #[test]
    fn deterministic_in_the_seed() {
        let cfg = GenConfig {
            seed: 424242,
            n_points: 5,
            value_range: (1.0, 4.0),
            class: ClassKind::Ultrametric,
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn generated_classes_validate() {
        let mk = |class, seed| GenConfig {
            seed,
            n_points: 6,
            value_range: (1.0, 4.0),
            class,
        };
        let m = generate(&mk(ClassKind::Metric, 7)).unwrap();
        assert!(m.validate(PExponent::ONE).is_ok());

        let p2 = generate(&mk(ClassKind::PMetric(PExponent::TWO), 8)).unwrap();
        assert!(p2.validate(PExponent::TWO).is_ok());

        let u = generate(&mk(ClassKind::Ultrametric, 9)).unwrap();
        assert!(u.validate(PExponent::INFINITY).unwrap().is_ultrametric());
        assert!(u.spectrum().len() <= 6);
    }

    #[test]
    fn rejects_infeasible_configs() {
        let bad_n = GenConfig {
            seed: 0,
            n_points: 0,
            value_range: (1.0, 2.0),
            class: ClassKind::Metric,
        };
        assert!(generate(&bad_n).is_err());
        let bad_range = GenConfig {
            seed: 0,
            n_points: 3,
            value_range: (0.0, 2.0),
            class: ClassKind::Metric,
        };
        assert!(generate(&bad_range).is_err());
        let overflow = GenConfig {
            seed: 0,
            n_points: 3,
            value_range: (1.0, 10.0),
            class: ClassKind::PMetric(PExponent::new(400.0).unwrap()),
        };
        assert!(generate(&overflow).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = GenConfig {
            seed: 11,
            n_points: 4,
            value_range: (0.5, 2.0),
            class: ClassKind::PMetric(PExponent::new(2.5).unwrap()),
        };
        let js = serde_json::to_string(&cfg).unwrap();
        let back: GenConfig = serde_json::from_str(&js).unwrap();
        assert_eq!(cfg, back);
    }
}
