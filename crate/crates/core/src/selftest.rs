//! Seeded property suites over every module, runnable from the CLI
//! (`pgh selftest`) and from the test harness. Each property draws its
//! own deterministic RNG stream from the configured seed, so a given
//! `(seed, cases)` pair always produces the same verdicts.

use crate::arith::{a_p_f, lambda_p_f, p_sum_f};
use crate::dendrogram::{
    canonical_signature, closed_quotient, from_dendrogram, isometric_by_permutation,
    quotient_blocks, to_dendrogram,
};
use crate::exponent::PExponent;
use crate::generate::{random_metric, random_p_metric, random_ultrametric, SplitMix64};
use crate::gh::{
    all_maps, curvature_lower_bound, dghp_bounds, dghp_exact, dghp_via_maps, hausdorff_direct,
    hausdorff_ultra, is_eps_p_isometry, spectrum_lower_bound, ugh_hat, ugh_structural,
    ugh_structural_with, ScanStrategy,
};
use crate::interleave::{check_eps_interleaved, interleaving_distance};
use crate::project::{project, single_linkage_maxmin, snowflake};
use crate::space::FiniteMetricSpace;
use crate::{Budget, EPS};

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub seed: u64,
    pub cases: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 0x5EED,
            cases: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases_run: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub outcomes: Vec<PropertyOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failure.is_none())
    }
}

type CheckResult = std::result::Result<usize, String>;
type Check = fn(&mut SplitMix64, usize) -> CheckResult;

const CHECKS: &[(&str, Check)] = &[
    ("arith.lambda_monotone_in_p", arith_lambda_monotone),
    ("arith.p_sum_anti_monotone_in_p", arith_p_sum_anti_monotone),
    ("arith.inverse_triangle_equivalence", arith_inverse_triangle),
    ("arith.asymmetric_difference_implication", arith_asymmetric),
    ("arith.limit_behavior_at_p64", arith_limit_behavior),
    ("spaces.snowflake_closure", spaces_snowflake_closure),
    ("spaces.inclusion_chain", spaces_inclusion_chain),
    (
        "spaces.curvature_relabeling_invariance",
        spaces_curvature_relabel,
    ),
    ("projections.idempotent_on_p_metrics", proj_idempotent),
    ("projections.maximal_subdominant", proj_subdominant),
    ("projections.scale_equivariance", proj_scale_equivariance),
    ("projections.snowflake_commutation", proj_snowflake_commutes),
    ("projections.diameter_non_increase", proj_diameter),
    ("projections.mst_equals_maxmin_closure", proj_mst_oracle),
    ("projections.stability_bound", proj_stability),
    ("dendrograms.bijection_round_trip", dendro_round_trip),
    (
        "dendrograms.quotient_composition",
        dendro_quotient_composition,
    ),
    ("dendrograms.ball_identity", dendro_ball_identity),
    ("dendrograms.isosceles_triples", dendro_isosceles),
    (
        "dendrograms.signature_soundness",
        dendro_signature_soundness,
    ),
    ("gh.oracle_agreement", gh_oracle_agreement),
    ("gh.monotone_in_p", gh_monotone_in_p),
    ("gh.p_triangle_inequality", gh_p_triangle),
    ("gh.snowflake_isometry", gh_snowflake_isometry),
    ("gh.holder_bound", gh_holder_bound),
    ("gh.diameter_bounds_bracket", gh_bounds_bracket),
    ("gh.hausdorff_structural_oracle", gh_hausdorff_oracle),
    ("gh.lower_bounds_below_ugh", gh_lower_bounds),
    ("gh.ugh_hat_coincides", gh_ugh_hat),
    ("gh.isometry_bridge", gh_isometry_bridge),
    ("gh.approximation_bridge", gh_approximation_bridge),
    ("gh.structural_minimum_attained", gh_structural_minimum),
    ("interleaving.sandwich_vs_dghp", int_sandwich),
    ("interleaving.coincides_with_ugh_at_inf", int_infinity),
    (
        "interleaving.partition_level_equivalence",
        int_partition_equivalence,
    ),
    ("generators.class_contract_and_determinism", gen_contract),
];

/// Runs every property suite; failures carry a short description of the
/// first failing case.
pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let outcomes = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng =
                SplitMix64::new(cfg.seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            match check(&mut rng, cfg.cases.max(1)) {
                Ok(cases_run) => PropertyOutcome {
                    name,
                    cases_run,
                    failure: None,
                },
                Err(msg) => PropertyOutcome {
                    name,
                    cases_run: 0,
                    failure: Some(msg),
                },
            }
        })
        .collect();
    SelftestReport { outcomes }
}

const P_GRID: [f64; 6] = [1.0, 1.5, 2.0, 4.0, 8.0, f64::INFINITY];

fn pe(v: f64) -> PExponent {
    PExponent::new(v).expect("valid grid exponent")
}

fn size(rng: &mut SplitMix64, lo: usize, hi: usize) -> usize {
    lo + rng.below(hi - lo + 1)
}

fn rnd_metric(rng: &mut SplitMix64, lo_n: usize, hi_n: usize) -> FiniteMetricSpace {
    let n = size(rng, lo_n, hi_n);
    random_metric(rng, n, 1.0, 4.0)
}

fn rnd_ultra(rng: &mut SplitMix64, lo_n: usize, hi_n: usize) -> FiniteMetricSpace {
    let n = size(rng, lo_n, hi_n);
    random_ultrametric(rng, n, 1.0, 4.0)
}

fn rnd_pmetric(rng: &mut SplitMix64, lo_n: usize, hi_n: usize, p: PExponent) -> FiniteMetricSpace {
    let n = size(rng, lo_n, hi_n);
    random_p_metric(rng, n, p, 1.0, 3.0).expect("range [1, 3] is feasible at suite exponents")
}

fn budget() -> Budget {
    Budget::default()
}

fn dgh1(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    dghp_exact(x, y, PExponent::ONE, &budget())
        .expect("within budget at suite sizes")
        .value()
        .expect("enumeration is exact")
}

fn dghp(x: &FiniteMetricSpace, y: &FiniteMetricSpace, p: PExponent) -> f64 {
    dghp_exact(x, y, p, &budget())
        .expect("within budget at suite sizes")
        .value()
        .expect("enumeration is exact")
}

// ---- p-arithmetic ----------------------------------------------------

fn arith_lambda_monotone(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let b = rng.range_f64(1e-3, 50.0);
        let a = b + rng.range_f64(1e-3, 50.0);
        let mut prev = 0.0;
        for p in P_GRID {
            let cur = lambda_p_f(a, b, pe(p));
            if cur < prev - 1e-12 {
                return Err(format!("case {case}: Λ_{p}({a}, {b}) = {cur} < {prev}"));
            }
            prev = cur;
        }
    }
    Ok(cases)
}

fn arith_p_sum_anti_monotone(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let a = rng.range_f64(0.0, 50.0);
        let b = rng.range_f64(0.0, 50.0);
        let mut prev = f64::INFINITY;
        for p in P_GRID {
            let cur = p_sum_f(a, b, pe(p));
            if cur > prev + 1e-12 * prev.max(1.0) {
                return Err(format!("case {case}: {a} ⊞_{p} {b} = {cur} > {prev}"));
            }
            prev = cur;
        }
    }
    Ok(cases)
}

fn arith_inverse_triangle(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let (a, b, c) = (
            rng.range_f64(0.0, 20.0),
            rng.range_f64(0.0, 20.0),
            rng.range_f64(0.0, 20.0),
        );
        for p in P_GRID {
            let p = pe(p);
            let lhs = p_sum_f(a, b, p) >= c && p_sum_f(a, c, p) >= b;
            let rhs = a >= lambda_p_f(b, c, p);
            if lhs != rhs {
                let near = (p_sum_f(a, b, p) - c).abs() < 1e-9
                    || (p_sum_f(a, c, p) - b).abs() < 1e-9
                    || (a - lambda_p_f(b, c, p)).abs() < 1e-9;
                if !near {
                    return Err(format!(
                        "case {case}: equivalence fails at p={p} for ({a}, {b}, {c})"
                    ));
                }
            }
        }
    }
    Ok(cases)
}

fn arith_asymmetric(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let (a, b, c) = (
            rng.range_f64(0.0, 20.0),
            rng.range_f64(0.0, 20.0),
            rng.range_f64(0.0, 20.0),
        );
        for p in P_GRID {
            let p = pe(p);
            if lambda_p_f(a, b, p) <= c && (a < a_p_f(b, c, p) - 1e-9 || b < a_p_f(a, c, p) - 1e-9)
            {
                return Err(format!("case {case}: A_p implication fails at p={p}"));
            }
        }
    }
    Ok(cases)
}

fn arith_limit_behavior(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    // Convergence at p = 64 within 1e-6, for operand pairs in [0.1, 10]
    // away from the Λ_∞ discontinuity (ratio at most 0.8) plus the exact
    // diagonal, where Λ is 0 on both sides.
    let p64 = pe(64.0);
    let inf = PExponent::INFINITY;
    for case in 0..cases {
        let a = rng.range_f64(0.1, 10.0);
        let b = a * rng.range_f64(0.0, 0.8);
        if (p_sum_f(a, b, p64) - p_sum_f(a, b, inf)).abs() >= 1e-6 {
            return Err(format!("case {case}: p-sum limit off at ({a}, {b})"));
        }
        if (lambda_p_f(a, b, p64) - lambda_p_f(a, b, inf)).abs() >= 1e-6 {
            return Err(format!("case {case}: Λ limit off at ({a}, {b})"));
        }
        if lambda_p_f(a, a, p64) != 0.0 || lambda_p_f(a, a, inf) != 0.0 {
            return Err(format!("case {case}: Λ diagonal not exactly 0 at a={a}"));
        }
    }
    Ok(cases)
}

// ---- spaces -----------------------------------------------------------

fn spaces_snowflake_closure(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 7);
        for p in [2.0, 4.0, 64.0] {
            let flaked = snowflake(&x, 1.0 / p).map_err(|e| e.to_string())?;
            if flaked.validate(pe(p)).is_err() {
                return Err(format!("case {case}: S_(1/{p}) output is not a {p}-metric"));
            }
        }
    }
    Ok(cases)
}

fn spaces_inclusion_chain(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let u = rnd_ultra(rng, 2, 7);
        for q in [1.0, 2.0, 7.0] {
            if u.validate(pe(q)).is_err() {
                return Err(format!("case {case}: ultrametric fails q = {q}"));
            }
        }
        let x = rnd_pmetric(rng, 2, 7, pe(2.0));
        for q in [1.0, 1.5] {
            if x.validate(pe(q)).is_err() {
                return Err(format!("case {case}: 2-metric fails q = {q}"));
            }
        }
    }
    Ok(cases)
}

fn spaces_curvature_relabel(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 5);
        let mut perm: Vec<usize> = (0..x.len()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let y = x.permuted(&perm).map_err(|e| e.to_string())?;
        let kx = x.curvature_set(3, &budget()).map_err(|e| e.to_string())?;
        let ky = y.curvature_set(3, &budget()).map_err(|e| e.to_string())?;
        if kx != ky {
            return Err(format!("case {case}: K_3 changed under relabeling"));
        }
    }
    Ok(cases)
}

// ---- projections ------------------------------------------------------

fn proj_idempotent(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        for p in [pe(2.0), pe(4.0), PExponent::INFINITY] {
            let x = if p.is_infinity() {
                rnd_ultra(rng, 2, 6)
            } else {
                rnd_pmetric(rng, 2, 6, p)
            };
            let once = project(&x, p).map_err(|e| e.to_string())?.space;
            if once
                .matrix()
                .iter()
                .zip(x.matrix())
                .any(|(a, b)| (a - b).abs() > EPS)
            {
                return Err(format!("case {case}: 𝔖_{p} moved a {p}-metric space"));
            }
        }
    }
    Ok(cases)
}

fn proj_subdominant(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let n = size(rng, 2, 6);
        let x = random_metric(rng, n, 1.0, 4.0);
        for p in [pe(2.0), PExponent::INFINITY] {
            let proj = project(&x, p).map_err(|e| e.to_string())?.space;
            // A random p-metric scaled under d_X must stay under 𝔖_p(X).
            let z = if p.is_infinity() {
                random_ultrametric(rng, n, 1.0, 4.0)
            } else {
                random_p_metric(rng, n, p, 1.0, 4.0).map_err(|e| e.to_string())?
            };
            let mut c = f64::INFINITY;
            for i in 0..n {
                for j in (i + 1)..n {
                    c = c.min(x.dist(i, j) / z.dist(i, j));
                }
            }
            let below = z.scaled(c).map_err(|e| e.to_string())?;
            for i in 0..n {
                for j in 0..n {
                    if below.dist(i, j) > proj.dist(i, j) + 1e-9 {
                        return Err(format!(
                            "case {case}: subdominance fails at p={p}, pair ({i},{j})"
                        ));
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn proj_scale_equivariance(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 6);
        let c = rng.range_f64(0.1, 5.0);
        for p in [pe(2.0), PExponent::INFINITY] {
            let lhs = project(&x.scaled(c).map_err(|e| e.to_string())?, p)
                .map_err(|e| e.to_string())?
                .space;
            let rhs = project(&x, p)
                .map_err(|e| e.to_string())?
                .space
                .scaled(c)
                .map_err(|e| e.to_string())?;
            if lhs
                .matrix()
                .iter()
                .zip(rhs.matrix())
                .any(|(a, b)| (a - b).abs() > 1e-9 * b.max(1.0))
            {
                return Err(format!("case {case}: 𝔖_{p}(c·X) ≠ c·𝔖_{p}(X)"));
            }
        }
    }
    Ok(cases)
}

fn proj_snowflake_commutes(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let p = 2.0;
        let x = rnd_pmetric(rng, 2, 6, pe(p));
        let lhs = project(
            &snowflake(&x, p).map_err(|e| e.to_string())?,
            PExponent::INFINITY,
        )
        .map_err(|e| e.to_string())?
        .space;
        let rhs = snowflake(
            &project(&x, PExponent::INFINITY)
                .map_err(|e| e.to_string())?
                .space,
            p,
        )
        .map_err(|e| e.to_string())?;
        if lhs
            .matrix()
            .iter()
            .zip(rhs.matrix())
            .any(|(a, b)| (a - b).abs() > EPS)
        {
            return Err(format!("case {case}: 𝔖_∞ does not commute with S_{p}"));
        }
    }
    Ok(cases)
}

fn proj_diameter(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 8);
        for p in [pe(1.5), pe(2.0), pe(8.0), PExponent::INFINITY] {
            let proj = project(&x, p).map_err(|e| e.to_string())?.space;
            if proj.diameter() > x.diameter() + EPS {
                return Err(format!("case {case}: diameter grew under 𝔖_{p}"));
            }
        }
    }
    Ok(cases)
}

fn proj_mst_oracle(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 48);
        let kruskal = project(&x, PExponent::INFINITY)
            .map_err(|e| e.to_string())?
            .space;
        let fw = single_linkage_maxmin(&x);
        if kruskal.matrix() != &fw[..] {
            return Err(format!(
                "case {case}: MST route differs from max-min closure"
            ));
        }
    }
    Ok(cases)
}

fn proj_stability(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 4);
        let y = rnd_metric(rng, 2, 4);
        let base = dgh1(&x, &y);
        for p in [pe(2.0), PExponent::INFINITY] {
            let px = project(&x, p).map_err(|e| e.to_string())?.space;
            let py = project(&y, p).map_err(|e| e.to_string())?.space;
            let coef = ((x.len().max(y.len()) - 1) as f64).powf(p.recip());
            if dgh1(&px, &py) > coef * base + 1e-9 {
                return Err(format!("case {case}: stability bound fails at p={p}"));
            }
        }
    }
    Ok(cases)
}

// ---- dendrograms ------------------------------------------------------

fn dendro_round_trip(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 1, 32);
        let back = from_dendrogram(&to_dendrogram(&x).map_err(|e| e.to_string())?);
        if back
            .matrix()
            .iter()
            .zip(x.matrix())
            .any(|(a, b)| (a - b).abs() > EPS)
        {
            return Err(format!(
                "case {case}: dendrogram round trip changed the matrix"
            ));
        }
    }
    Ok(cases)
}

fn dendro_quotient_composition(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 8);
        let spec = x.spectrum().values().to_vec();
        let t = spec[rng.below(spec.len())];
        let s = t.max(spec[rng.below(spec.len())]);
        let direct = closed_quotient(&x, s).map_err(|e| e.to_string())?;
        let via = closed_quotient(&closed_quotient(&x, t).map_err(|e| e.to_string())?, s)
            .map_err(|e| e.to_string())?;
        if via.len() != direct.len() || via.matrix() != direct.matrix() {
            return Err(format!(
                "case {case}: quotient composition differs at t={t}, s={s}"
            ));
        }
    }
    Ok(cases)
}

fn dendro_ball_identity(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 8);
        let t = rng.range_f64(0.0, x.diameter() * 1.1);
        for block in quotient_blocks(&x, t) {
            for &i in &block {
                let ball: Vec<usize> = (0..x.len()).filter(|&j| x.dist(i, j) <= t + EPS).collect();
                if ball != block {
                    return Err(format!("case {case}: block of {i} at {t} is not its ball"));
                }
            }
        }
    }
    Ok(cases)
}

fn dendro_isosceles(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 3, 8);
        let n = x.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut sides = [x.dist(i, j), x.dist(i, k), x.dist(j, k)];
                    sides.sort_by(f64::total_cmp);
                    if (sides[1] - sides[2]).abs() > EPS {
                        return Err(format!("case {case}: triple ({i},{j},{k}) not isosceles"));
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn dendro_signature_soundness(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 1, 5);
        // Half the cases compare against a relabeled copy, half against an
        // independent space of the same size.
        let y = if case % 2 == 0 {
            let mut perm: Vec<usize> = (0..x.len()).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.below(i + 1));
            }
            x.permuted(&perm).map_err(|e| e.to_string())?
        } else {
            random_ultrametric(rng, x.len(), 1.0, 4.0)
        };
        let sig_equal = canonical_signature(&x).map_err(|e| e.to_string())?
            == canonical_signature(&y).map_err(|e| e.to_string())?;
        let iso = isometric_by_permutation(&x, &y);
        if sig_equal != iso {
            return Err(format!(
                "case {case}: signature equality {sig_equal} vs brute-force isometry {iso}"
            ));
        }
    }
    Ok(cases)
}

// ---- gh distances ------------------------------------------------------

fn gh_oracle_agreement(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        for p in [pe(1.0), pe(2.0), PExponent::INFINITY] {
            let exact = dghp(&x, &y, p);
            let via = dghp_via_maps(&x, &y, p, &budget()).map_err(|e| e.to_string())?;
            if (exact - via).abs() > 1e-9 {
                return Err(format!("case {case}: exact {exact} vs maps {via} at p={p}"));
            }
        }
        let structural = ugh_structural(&x, &y)
            .map_err(|e| e.to_string())?
            .value()
            .expect("structural is exact");
        if (dghp(&x, &y, PExponent::INFINITY) - structural).abs() > 1e-9 {
            return Err(format!(
                "case {case}: enumeration disagrees with structural u_GH"
            ));
        }
    }
    Ok(cases)
}

fn gh_monotone_in_p(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 4);
        let y = rnd_metric(rng, 2, 4);
        let mut prev = 0.0;
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let cur = dghp(&x, &y, pe(p));
            if cur < prev - 1e-9 {
                return Err(format!("case {case}: d_GH^({p}) = {cur} < {prev}"));
            }
            prev = cur;
        }
    }
    Ok(cases)
}

fn gh_p_triangle(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_metric(rng, 2, 3);
        let y = rnd_metric(rng, 2, 3);
        let z = rnd_metric(rng, 2, 3);
        for p in [pe(1.0), pe(2.0), PExponent::INFINITY] {
            let (xy, xz, zy) = (dghp(&x, &y, p), dghp(&x, &z, p), dghp(&z, &y, p));
            if xy > p_sum_f(xz, zy, p) + 1e-9 {
                return Err(format!("case {case}: p-triangle fails at p={p}"));
            }
        }
    }
    Ok(cases)
}

fn gh_snowflake_isometry(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        for p in [2.0, 3.0] {
            let x = rnd_pmetric(rng, 2, 4, pe(p));
            let y = rnd_pmetric(rng, 2, 4, pe(p));
            let lhs = dghp(&x, &y, pe(p));
            let sx = snowflake(&x, p).map_err(|e| e.to_string())?;
            let sy = snowflake(&y, p).map_err(|e| e.to_string())?;
            let rhs = dgh1(&sx, &sy).powf(1.0 / p);
            if (lhs - rhs).abs() > 1e-8 {
                return Err(format!(
                    "case {case}: snowflake isometry off at p={p}: {lhs} vs {rhs}"
                ));
            }
        }
    }
    Ok(cases)
}

fn gh_holder_bound(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        for p in [1.5, 2.0, 3.0] {
            let x = rnd_pmetric(rng, 2, 4, pe(p));
            let y = rnd_pmetric(rng, 2, 4, pe(p));
            let dgh = dgh1(&x, &y);
            let dp = dghp(&x, &y, pe(p));
            let m = x.diameter().max(y.diameter());
            let cp = p.ceil();
            let cap = cp.powf(1.0 / cp) * (2.0 * m).powf(1.0 - 1.0 / cp) * dgh.powf(1.0 / cp);
            if dgh > dp + 1e-9 || dp > cap + 1e-9 {
                return Err(format!(
                    "case {case}: Hölder bracket fails at p={p}: {dgh} <= {dp} <= {cap}"
                ));
            }
        }
    }
    Ok(cases)
}

fn gh_bounds_bracket(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        for p in [pe(1.0), pe(2.0), PExponent::INFINITY] {
            let rep = dghp_bounds(&x, &y, p, &budget());
            let exact = dghp(&x, &y, p);
            if rep.lower > exact + 1e-9 || exact > rep.upper + 1e-9 {
                return Err(format!(
                    "case {case}: bounds [{}, {}] miss exact {exact} at p={p}",
                    rep.lower, rep.upper
                ));
            }
        }
    }
    Ok(cases)
}

fn gh_hausdorff_oracle(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 8);
        let pick = |rng: &mut SplitMix64, n: usize| -> Vec<usize> {
            let k = 1 + rng.below(n);
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                idx.swap(i, rng.below(i + 1));
            }
            idx.truncate(k);
            idx
        };
        let a = pick(rng, x.len());
        let b = pick(rng, x.len());
        let structural = hausdorff_ultra(&x, &a, &b).map_err(|e| e.to_string())?;
        let direct = hausdorff_direct(&x, &a, &b).map_err(|e| e.to_string())?;
        if structural != direct {
            return Err(format!(
                "case {case}: structural {structural} vs direct {direct} for {a:?}, {b:?}"
            ));
        }
    }
    Ok(cases)
}

fn gh_lower_bounds(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        let ugh = ugh_structural(&x, &y)
            .map_err(|e| e.to_string())?
            .value()
            .expect("structural is exact");
        let sb = spectrum_lower_bound(&x, &y).map_err(|e| e.to_string())?;
        if sb > ugh + 1e-9 {
            return Err(format!(
                "case {case}: spectrum bound {sb} exceeds u_GH {ugh}"
            ));
        }
        let n_max = x.len().max(y.len()) + 1;
        let cb = curvature_lower_bound(&x, &y, n_max, &budget()).map_err(|e| e.to_string())?;
        if (cb - ugh).abs() > 1e-9 {
            return Err(format!(
                "case {case}: curvature bound {cb} misses u_GH {ugh} at n_max={n_max}"
            ));
        }
    }
    Ok(cases)
}

fn gh_ugh_hat(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        let hat = ugh_hat(&x, &y, &budget()).map_err(|e| e.to_string())?;
        let ugh = ugh_structural(&x, &y)
            .map_err(|e| e.to_string())?
            .value()
            .expect("structural is exact");
        if (hat - ugh).abs() > 1e-9 {
            return Err(format!("case {case}: û_GH {hat} differs from u_GH {ugh}"));
        }
    }
    Ok(cases)
}

fn gh_isometry_bridge(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        for p in [pe(1.0), pe(2.0), PExponent::INFINITY] {
            let d = dghp(&x, &y, p);
            let two = 2f64.powf(p.recip());
            // d_GH^(p) < ε ⇒ a (2^{1/p}ε, p)-isometry exists.
            let eps = d + 1e-6;
            let found = all_maps(x.len(), y.len())
                .into_iter()
                .any(|f| is_eps_p_isometry(&f, &x, &y, two * eps, p).expect("total map"));
            if !found {
                return Err(format!(
                    "case {case}: no (2^(1/p)ε, p)-isometry at p={p}, ε={eps}"
                ));
            }
            // An (ε, p)-isometry ⇒ d_GH^(p) < 2^{1/p}ε; check at the best ε.
            let best = all_maps(x.len(), y.len())
                .into_iter()
                .map(|f| {
                    let dis = (0..x.len())
                        .flat_map(|i| (i + 1..x.len()).map(move |j| (i, j)))
                        .map(|(i, j)| lambda_p_f(x.dist(i, j), y.dist(f[i], f[j]), p))
                        .fold(0.0f64, f64::max);
                    let radius = (0..y.len())
                        .map(|jy| {
                            f.iter()
                                .map(|&fi| y.dist(jy, fi))
                                .fold(f64::INFINITY, f64::min)
                        })
                        .fold(0.0f64, f64::max);
                    dis.max(radius)
                })
                .fold(f64::INFINITY, f64::min);
            if d > two * best + 1e-9 {
                return Err(format!(
                    "case {case}: d_GH^({p}) = {d} above 2^(1/p)·{best}"
                ));
            }
        }
    }
    Ok(cases)
}

fn gh_approximation_bridge(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        for p in [pe(1.0), pe(2.0)] {
            let x = rnd_pmetric(rng, 2, 4, p);
            let y = rnd_pmetric(rng, 2, 4, p);
            let k = 1 + rng.below(x.len().min(y.len()));
            let sample = |rng: &mut SplitMix64, n: usize| -> Vec<usize> {
                let mut idx: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    idx.swap(i, rng.below(i + 1));
                }
                idx.truncate(k);
                idx
            };
            let xs = sample(rng, x.len());
            let ys = sample(rng, y.len());
            let radius = |space: &FiniteMetricSpace, net: &[usize]| -> f64 {
                (0..space.len())
                    .map(|i| {
                        net.iter()
                            .map(|&s| space.dist(i, s))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0f64, f64::max)
            };
            let eps = radius(&x, &xs).max(radius(&y, &ys));
            let mut delta = 0.0f64;
            for (ai, &ia) in xs.iter().enumerate() {
                for (bi, &ib) in xs.iter().enumerate() {
                    delta = delta.max(lambda_p_f(x.dist(ia, ib), y.dist(ys[ai], ys[bi]), p));
                }
            }
            let cap = p_sum_f(delta, 2f64.powf(p.recip()) * eps, p);
            if dghp(&x, &y, p) > cap + 1e-9 {
                return Err(format!("case {case}: approximation bound fails at p={p}"));
            }
        }
    }
    Ok(cases)
}

fn gh_structural_minimum(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 6);
        let y = rnd_ultra(rng, 2, 6);
        let fast = ugh_structural_with(&x, &y, ScanStrategy::Binary)
            .map_err(|e| e.to_string())?
            .value()
            .expect("structural is exact");
        let slow = ugh_structural_with(&x, &y, ScanStrategy::Linear)
            .map_err(|e| e.to_string())?
            .value()
            .expect("structural is exact");
        if fast != slow {
            return Err(format!("case {case}: binary {fast} vs linear {slow}"));
        }
        let in_levels = x
            .spectrum()
            .values()
            .iter()
            .chain(y.spectrum().values())
            .any(|&t| (t - fast).abs() <= EPS);
        if !in_levels {
            return Err(format!(
                "case {case}: u_GH {fast} not a merged-spectrum level"
            ));
        }
        // No smaller level may already make the quotients isometric.
        let mut smaller: Vec<f64> = x
            .spectrum()
            .values()
            .iter()
            .chain(y.spectrum().values())
            .copied()
            .filter(|&t| t < fast - EPS)
            .collect();
        smaller.sort_by(f64::total_cmp);
        for t in smaller {
            let qx = closed_quotient(&x, t).map_err(|e| e.to_string())?;
            let qy = closed_quotient(&y, t).map_err(|e| e.to_string())?;
            if canonical_signature(&qx).map_err(|e| e.to_string())?
                == canonical_signature(&qy).map_err(|e| e.to_string())?
            {
                return Err(format!(
                    "case {case}: quotients already isometric at {t} < {fast}"
                ));
            }
        }
    }
    Ok(cases)
}

// ---- interleaving -------------------------------------------------------

fn int_sandwich(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        for p in [pe(1.0), pe(2.0), PExponent::INFINITY] {
            let di = interleaving_distance(&x, &y, p, &budget())
                .map_err(|e| e.to_string())?
                .value;
            let dg = dghp(&x, &y, p);
            let coeff = p.half_pow();
            if coeff * di > dg + 1e-9 || dg > di + 1e-9 {
                return Err(format!(
                    "case {case}: sandwich fails at p={p}: {coeff}·{di} <= {dg} <= {di}"
                ));
            }
        }
    }
    Ok(cases)
}

fn int_infinity(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 4);
        let y = rnd_ultra(rng, 2, 4);
        let di = interleaving_distance(&x, &y, PExponent::INFINITY, &budget())
            .map_err(|e| e.to_string())?
            .value;
        let ugh = ugh_structural(&x, &y)
            .map_err(|e| e.to_string())?
            .value()
            .expect("structural is exact");
        if (di - ugh).abs() > 1e-9 {
            return Err(format!("case {case}: d_I,∞ {di} differs from u_GH {ugh}"));
        }
    }
    Ok(cases)
}

/// Direct partition-level reading of the interleaving conditions, checked
/// over the merged spectrum levels (block structure is constant between
/// levels and the shifted blocks only grow with t).
fn eps_interleaved_by_partitions(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    phi: &[usize],
    psi: &[usize],
    eps: f64,
) -> bool {
    let block_ids = |space: &FiniteMetricSpace, t: f64| -> Vec<usize> {
        let blocks = quotient_blocks(space, t);
        let mut ids = vec![0usize; space.len()];
        for (bi, block) in blocks.iter().enumerate() {
            for &i in block {
                ids[i] = bi;
            }
        }
        ids
    };
    let mut levels = vec![0.0];
    levels.extend(x.spectrum().values().iter().copied());
    levels.extend(y.spectrum().values().iter().copied());
    for &t in &levels {
        let bx = quotient_blocks(x, t);
        let by = quotient_blocks(y, t);
        let y_shift = block_ids(y, t + eps);
        let x_shift = block_ids(x, t + eps);
        let x_shift2 = block_ids(x, t + 2.0 * eps);
        let y_shift2 = block_ids(y, t + 2.0 * eps);
        for block in &bx {
            let first = block[0];
            if block
                .iter()
                .any(|&b| y_shift[phi[b]] != y_shift[phi[first]])
            {
                return false;
            }
            if block
                .iter()
                .any(|&b| x_shift2[psi[phi[b]]] != x_shift2[first])
            {
                return false;
            }
        }
        for block in &by {
            let first = block[0];
            if block
                .iter()
                .any(|&b| x_shift[psi[b]] != x_shift[psi[first]])
            {
                return false;
            }
            if block
                .iter()
                .any(|&b| y_shift2[phi[psi[b]]] != y_shift2[first])
            {
                return false;
            }
        }
    }
    true
}

fn int_partition_equivalence(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    for case in 0..cases {
        let x = rnd_ultra(rng, 2, 5);
        let y = rnd_ultra(rng, 2, 5);
        let rep =
            interleaving_distance(&x, &y, PExponent::ONE, &budget()).map_err(|e| e.to_string())?;
        let random_phi: Vec<usize> = (0..x.len()).map(|_| rng.below(y.len())).collect();
        let random_psi: Vec<usize> = (0..y.len()).map(|_| rng.below(x.len())).collect();
        let eps_probe = rng.range_f64(0.0, 1.2 * x.diameter().max(y.diameter()));
        let witnesses = [
            (rep.witness_phi.clone(), rep.witness_psi.clone(), rep.value),
            (random_phi.clone(), random_psi.clone(), eps_probe),
            (random_phi, random_psi, rep.value),
        ];
        for (phi, psi, eps) in witnesses {
            let direct =
                check_eps_interleaved(&x, &y, &phi, &psi, eps).map_err(|e| e.to_string())?;
            let partition = eps_interleaved_by_partitions(&x, &y, &phi, &psi, eps);
            if direct != partition {
                return Err(format!(
                    "case {case}: map-level {direct} vs partition-level {partition} at ε={eps}"
                ));
            }
        }
    }
    Ok(cases)
}

// ---- generators ----------------------------------------------------------

fn gen_contract(rng: &mut SplitMix64, cases: usize) -> CheckResult {
    use crate::generate::{generate, ClassKind, GenConfig};
    for case in 0..cases {
        let seed = rng.next_u64();
        let n = size(rng, 1, 8);
        for class in [
            ClassKind::Metric,
            ClassKind::PMetric(pe(2.0)),
            ClassKind::Ultrametric,
        ] {
            let cfg = GenConfig {
                seed,
                n_points: n,
                value_range: (1.0, 4.0),
                class,
            };
            let a = generate(&cfg).map_err(|e| e.to_string())?;
            let b = generate(&cfg).map_err(|e| e.to_string())?;
            if a.matrix() != b.matrix() {
                return Err(format!("case {case}: generation is not deterministic"));
            }
            let wanted = match class {
                ClassKind::Metric => PExponent::ONE,
                ClassKind::PMetric(p) => p,
                ClassKind::Ultrametric => PExponent::INFINITY,
            };
            if a.validate(wanted).is_err() {
                return Err(format!("case {case}: generated space fails class {wanted}"));
            }
            if matches!(class, ClassKind::Ultrametric) && a.spectrum().len() > n {
                return Err(format!(
                    "case {case}: ultrametric spectrum exceeds point count"
                ));
            }
        }
    }
    Ok(cases)
}
