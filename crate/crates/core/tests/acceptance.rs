//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the checked quantity (run with `--nocapture` to see them).
//! Everything is seeded and exact-tolerance; brute-force enumeration is
//! the oracle throughout.

use pgh_core::arith::p_sum;
use pgh_core::dendrogram::{from_dendrogram, to_dendrogram};
use pgh_core::generate::{generate, ClassKind, GenConfig, SplitMix64};
use pgh_core::gh::{
    curvature_lower_bound, dghp_exact, dghp_via_maps, hausdorff_direct, hausdorff_ultra,
    spectrum_lower_bound, ugh_hat, ugh_structural,
};
use pgh_core::interleave::{check_eps_interleaved, interleaving_distance};
use pgh_core::project::{project, single_linkage_maxmin, snowflake};
use pgh_core::{Budget, FiniteMetricSpace, NonNegReal, PExponent};

const TOL: f64 = 1e-9;
const INF: PExponent = PExponent::INFINITY;

fn pe(v: f64) -> PExponent {
    PExponent::new(v).unwrap()
}

fn budget() -> Budget {
    Budget::default()
}

fn delta(n: usize, a: f64) -> FiniteMetricSpace {
    FiniteMetricSpace::delta(n, a).unwrap()
}

fn gen(class: ClassKind, n: usize, seed: u64) -> FiniteMetricSpace {
    generate(&GenConfig {
        seed,
        n_points: n,
        value_range: (1.0, 4.0),
        class,
    })
    .unwrap()
}

fn gen_ultra(rng: &mut SplitMix64, lo: usize, hi: usize) -> FiniteMetricSpace {
    let n = lo + rng.below(hi - lo + 1);
    gen(ClassKind::Ultrametric, n, rng.next_u64())
}

fn gen_metric(rng: &mut SplitMix64, lo: usize, hi: usize) -> FiniteMetricSpace {
    let n = lo + rng.below(hi - lo + 1);
    gen(ClassKind::Metric, n, rng.next_u64())
}

fn gen_pmetric(rng: &mut SplitMix64, lo: usize, hi: usize, p: PExponent) -> FiniteMetricSpace {
    let n = lo + rng.below(hi - lo + 1);
    gen(ClassKind::PMetric(p), n, rng.next_u64())
}

fn dghp(x: &FiniteMetricSpace, y: &FiniteMetricSpace, p: PExponent) -> f64 {
    dghp_exact(x, y, p, &budget()).unwrap().value().unwrap()
}

fn ugh(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    ugh_structural(x, y).unwrap().value().unwrap()
}

#[test]
fn criterion_01_two_point_exact_values() {
    let a = delta(2, 1.0);
    let b = delta(2, 1.5);
    let dgh = dghp(&a, &b, pe(1.0));
    let u = ugh(&a, &b);
    assert!((dgh - 0.25).abs() <= TOL, "d_GH = {dgh}");
    assert!((u - 1.5).abs() <= TOL, "u_GH = {u}");
    println!("criterion 01 PASS: d_GH(Δ2(1), Δ2(1.5)) = {dgh}, u_GH = {u}");
}

#[test]
fn criterion_02_structural_equals_enumeration() {
    let mut rng = SplitMix64::new(0xACC2);
    for case in 0..200 {
        let x = gen_ultra(&mut rng, 2, 4);
        let y = gen_ultra(&mut rng, 2, 4);
        let structural = ugh(&x, &y);
        let exact = dghp(&x, &y, INF);
        let via_maps = dghp_via_maps(&x, &y, INF, &budget()).unwrap();
        assert!(
            (structural - exact).abs() <= TOL && (exact - via_maps).abs() <= TOL,
            "case {case}: {structural} vs {exact} vs {via_maps}"
        );
    }
    println!("criterion 02 PASS: u_GH structural = enumeration = map formula on 200 pairs");
}

#[test]
fn criterion_03_interleaving_coincidence_at_infinity() {
    let mut rng = SplitMix64::new(0xACC2);
    for case in 0..200 {
        let x = gen_ultra(&mut rng, 2, 4);
        let y = gen_ultra(&mut rng, 2, 4);
        let di = interleaving_distance(&x, &y, INF, &budget()).unwrap().value;
        let u = ugh(&x, &y);
        assert!(
            (di - u).abs() <= TOL,
            "case {case}: d_I,inf {di} vs u_GH {u}"
        );
    }
    println!("criterion 03 PASS: d_I,∞ = u_GH on 200 pairs");
}

#[test]
fn criterion_04_interleaving_sandwiches() {
    let mut rng = SplitMix64::new(0xACC4);
    for case in 0..100 {
        let x = gen_ultra(&mut rng, 2, 4);
        let y = gen_ultra(&mut rng, 2, 4);
        for p in [pe(1.0), pe(2.0), INF] {
            let di = interleaving_distance(&x, &y, p, &budget()).unwrap().value;
            let dg = dghp(&x, &y, p);
            let coeff = p.half_pow();
            assert!(
                coeff * di <= dg + TOL && dg <= di + TOL,
                "case {case}, p={p}: {coeff}·{di} <= {dg} <= {di}"
            );
        }
    }
    // Tightness at both ends, exactly.
    let star = delta(1, 1.0);
    let d2 = delta(2, 2.0);
    let d4 = delta(2, 4.0);
    let di_star = interleaving_distance(&d2, &star, pe(1.0), &budget())
        .unwrap()
        .value;
    assert_eq!(di_star, 1.0);
    assert_eq!(dghp(&d2, &star, pe(1.0)), 1.0);
    let di_pair = interleaving_distance(&d2, &d4, pe(1.0), &budget())
        .unwrap()
        .value;
    assert_eq!(di_pair, 2.0);
    assert_eq!(2.0 * dghp(&d2, &d4, pe(1.0)), 2.0);
    println!("criterion 04 PASS: p-sandwiches on 100 pairs, both tightness examples exact");
}

#[test]
fn criterion_05_snowflake_isometry() {
    let mut rng = SplitMix64::new(0xACC5);
    for case in 0..100 {
        for p in [2.0, 3.0] {
            let x = gen_pmetric(&mut rng, 2, 4, pe(p));
            let y = gen_pmetric(&mut rng, 2, 4, pe(p));
            let lhs = dghp(&x, &y, pe(p));
            let rhs = dghp(
                &snowflake(&x, p).unwrap(),
                &snowflake(&y, p).unwrap(),
                pe(1.0),
            )
            .powf(1.0 / p);
            assert!(
                (lhs - rhs).abs() <= 1e-8,
                "case {case}, p={p}: {lhs} vs {rhs}"
            );
        }
    }
    println!("criterion 05 PASS: d_GH^(p) = (d_GH ∘ S_p)^(1/p) on 100 pairs at p ∈ {{2, 3}}");
}

#[test]
fn criterion_06_monotonicity_and_p_triangle() {
    let fixed_pairs = [
        (delta(2, 1.0), delta(2, 1.5)),
        (delta(3, 2.0), delta(2, 2.0)),
        (
            project(&FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap(), pe(2.0))
                .unwrap()
                .space,
            delta(3, 1.0),
        ),
    ];
    for (x, y) in &fixed_pairs {
        let mut prev = 0.0;
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let cur = dghp(x, y, pe(p));
            assert!(cur >= prev - TOL, "monotonicity fails at p={p}");
            prev = cur;
        }
    }
    let mut rng = SplitMix64::new(0xACC6);
    for case in 0..100 {
        let x = gen_metric(&mut rng, 2, 3);
        let y = gen_metric(&mut rng, 2, 3);
        let z = gen_metric(&mut rng, 2, 3);
        for p in [pe(1.0), pe(2.0), pe(4.0), INF] {
            let xy = dghp(&x, &y, p);
            let bound = p_sum(
                NonNegReal::new(dghp(&x, &z, p)).unwrap(),
                NonNegReal::new(dghp(&z, &y, p)).unwrap(),
                p,
            )
            .get();
            assert!(xy <= bound + TOL, "case {case}: p-triangle fails at p={p}");
        }
    }
    println!("criterion 06 PASS: d_GH^(p) monotone in p; p-triangle on 100 triples");
}

#[test]
fn criterion_07_holder_bound() {
    let mut rng = SplitMix64::new(0xACC7);
    for case in 0..100 {
        for p in [1.5, 2.0, 3.0] {
            let x = gen_pmetric(&mut rng, 2, 4, pe(p));
            let y = gen_pmetric(&mut rng, 2, 4, pe(p));
            let dgh = dghp(&x, &y, pe(1.0));
            let dp = dghp(&x, &y, pe(p));
            let m = x.diameter().max(y.diameter());
            let cp = p.ceil();
            let cap = cp.powf(1.0 / cp) * (2.0 * m).powf(1.0 - 1.0 / cp) * dgh.powf(1.0 / cp);
            assert!(
                dgh <= dp + TOL && dp <= cap + TOL,
                "case {case}, p={p}: {dgh} <= {dp} <= {cap}"
            );
        }
    }
    println!("criterion 07 PASS: d_GH ≤ d_GH^(p) ≤ Hölder cap on 100 pairs at p ∈ {{1.5, 2, 3}}");
}

#[test]
fn criterion_08_projection_stability_and_tightness() {
    let mut rng = SplitMix64::new(0xACC8);
    for case in 0..100 {
        let x = gen_metric(&mut rng, 2, 4);
        let y = gen_metric(&mut rng, 2, 4);
        let base = dghp(&x, &y, pe(1.0));
        for p in [pe(2.0), INF] {
            let px = project(&x, p).unwrap().space;
            let py = project(&y, p).unwrap().space;
            let coef = ((x.len().max(y.len()) - 1) as f64).powf(p.recip());
            let lhs = dghp(&px, &py, pe(1.0));
            assert!(
                lhs <= coef * base + TOL,
                "case {case}, p={p}: {lhs} > {coef}·{base}"
            );
        }
    }
    // Tightness: for (L_n^(p), n^(1/p-1)·L_n) at p = 2 the ratio of the
    // projected to the unprojected d_GH equals n^(1/p) exactly.
    let p = 2.0;
    for n in [2usize, 3, 4] {
        let coords: Vec<f64> = (0..=n).map(|i| i as f64).collect();
        let line = FiniteMetricSpace::line(&coords).unwrap();
        let lnp = project(&line, pe(p)).unwrap().space;
        let tilde = line.scaled((n as f64).powf(1.0 / p - 1.0)).unwrap();
        let before = dghp(&lnp, &tilde, pe(1.0));
        let proj_tilde = project(&tilde, pe(p)).unwrap().space;
        let after = dghp(&project(&lnp, pe(p)).unwrap().space, &proj_tilde, pe(1.0));
        let ratio = after / before;
        let nf = n as f64;
        let want = nf.powf(1.0 / p);
        assert!(
            (ratio - want).abs() <= TOL,
            "n={n}: ratio {ratio} vs {want}"
        );
        // The closed forms behind the ratio hold individually as well.
        assert!((proj_tilde.diameter() - nf.powf(2.0 / p - 1.0)).abs() <= TOL);
        assert!((before - 0.5 * (1.0 - nf.powf(1.0 / p - 1.0))).abs() <= TOL);
        assert!((after - 0.5 * (nf.powf(1.0 / p) - nf.powf(2.0 / p - 1.0))).abs() <= TOL);
    }
    println!(
        "criterion 08 PASS: stability bound on 100 pairs; L_n ratio = n^(1/2) for n ∈ {{2,3,4}}"
    );
}

#[test]
fn criterion_09_hausdorff_structural_theorem() {
    let mut rng = SplitMix64::new(0xACC9);
    for case in 0..500 {
        let x = gen_ultra(&mut rng, 2, 8);
        let n = x.len();
        let pick = |rng: &mut SplitMix64| -> Vec<usize> {
            let k = 1 + rng.below(n);
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                idx.swap(i, rng.below(i + 1));
            }
            idx.truncate(k);
            idx
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let structural = hausdorff_ultra(&x, &a, &b).unwrap();
        let direct = hausdorff_direct(&x, &a, &b).unwrap();
        assert_eq!(structural, direct, "case {case}: {a:?} vs {b:?}");
    }
    println!("criterion 09 PASS: structural Hausdorff = direct max-min on 500 triples, exactly");
}

#[test]
fn criterion_10_lower_bounds() {
    let mut rng = SplitMix64::new(0xACC2);
    for case in 0..200 {
        let x = gen_ultra(&mut rng, 2, 4);
        let y = gen_ultra(&mut rng, 2, 4);
        let u = ugh(&x, &y);
        let sb = spectrum_lower_bound(&x, &y).unwrap();
        assert!(sb <= u + TOL, "case {case}: spectrum bound {sb} > u_GH {u}");
        let cb = curvature_lower_bound(&x, &y, 5, &budget()).unwrap();
        assert!(
            (cb - u).abs() <= TOL,
            "case {case}: curvature bound {cb} vs u_GH {u}"
        );
    }
    let d2 = delta(2, 1.0);
    let d3 = delta(3, 1.0);
    assert_eq!(spectrum_lower_bound(&d2, &d3).unwrap(), 0.0);
    assert_eq!(curvature_lower_bound(&d2, &d3, 3, &budget()).unwrap(), 1.0);
    assert_eq!(ugh(&d2, &d3), 1.0);
    println!("criterion 10 PASS: spectrum ≤ u_GH, curvature(n≤5) = u_GH; Δ2/Δ3 gap reproduced");
}

#[test]
fn criterion_11_ugh_hat_equals_ugh() {
    let mut rng = SplitMix64::new(0xACC2);
    for case in 0..200 {
        let x = gen_ultra(&mut rng, 2, 4);
        let y = gen_ultra(&mut rng, 2, 4);
        let hat = ugh_hat(&x, &y, &budget()).unwrap();
        let u = ugh(&x, &y);
        assert!((hat - u).abs() <= TOL, "case {case}: {hat} vs {u}");
    }
    println!("criterion 11 PASS: û_GH = u_GH on 200 pairs");
}

#[test]
fn criterion_12_round_trips() {
    let mut rng = SplitMix64::new(0xACCC);
    for case in 0..200 {
        let x = gen_ultra(&mut rng, 1, 64);
        let back = from_dendrogram(&to_dendrogram(&x).unwrap());
        let ok = back
            .matrix()
            .iter()
            .zip(x.matrix())
            .all(|(a, b)| (a - b).abs() <= TOL);
        assert!(ok, "case {case}: bijection round trip drifted");
    }
    for case in 0..100 {
        let x = gen_metric(&mut rng, 2, 64);
        let mst = project(&x, INF).unwrap().space;
        let fw = single_linkage_maxmin(&x);
        assert_eq!(mst.matrix(), &fw[..], "case {case}: MST vs max-min closure");
    }
    for case in 0..50 {
        let x = gen_metric(&mut rng, 2, 8);
        for (q, p) in [(pe(2.0), pe(4.0)), (pe(2.0), INF)] {
            let via = project(&project(&x, q).unwrap().space, p).unwrap().space;
            let direct = project(&x, p).unwrap().space;
            let ok = via
                .matrix()
                .iter()
                .zip(direct.matrix())
                .all(|(a, b)| (a - b).abs() <= TOL);
            assert!(ok, "case {case}: composition fails at ({q}, {p})");
            let twice = project(&direct, p).unwrap().space;
            let idem = twice
                .matrix()
                .iter()
                .zip(direct.matrix())
                .all(|(a, b)| (a - b).abs() <= TOL);
            assert!(idem, "case {case}: idempotence fails at p={p}");
        }
    }
    println!(
        "criterion 12 PASS: dendrogram bijection (200), MST = max-min (100), composition/idempotence (50)"
    );
}

#[test]
fn criterion_13_interleaving_figure_example() {
    let x = delta(2, 2.0);
    let y = delta(1, 1.0);
    let interleaved_at = |eps: f64| {
        [vec![0usize], vec![1usize]]
            .iter()
            .any(|psi| check_eps_interleaved(&x, &y, &[0, 0], psi, eps).unwrap())
    };
    assert!(interleaved_at(1.0), "must be 1-interleaved");
    assert!(!interleaved_at(0.9), "must not be 0.9-interleaved");
    println!("criterion 13 PASS: Δ2(2) vs one point: 1-interleaved, not 0.9-interleaved");
}
