//! Acceptance suite: one test per release criterion, each printing a
//! PASS line when it holds. Run with `cargo test --test acceptance --
//! --nocapture` to see the lines.

use rand::{Rng, SeedableRng};
use relcrit::criterion::{
    box_counterexample, casselman_check, check_all, check_maximal_reduction, check_parabolic,
    group_case_equivalence, is_restriction_closed, plain_implies_relative, restriction_closure,
    series_probe, verify_witness, CheckOptions, Exponent, ExponentFamily, ProbeClassification,
};
use relcrit::involution::InvolutionData;
use relcrit::jacquet::{borel_exponents, RepSpec};
use relcrit::lattice::{rat, rat_from_int, Rat};
use relcrit::presets::{golden_family, preset};
use relcrit::root_datum::BasedRootDatum;
use std::collections::BTreeMap;
use std::process::Command;

fn run_binary(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_relcrit"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf8 output");
    (stdout, out.status.code().unwrap_or(-1))
}

fn build(name: &str) -> InvolutionData {
    preset(name).unwrap().build().unwrap()
}

#[test]
fn acceptance_01_gl3_golden_run() {
    let (stdout, code) = run_binary(&[
        "check",
        "--preset",
        "gl3_inner",
        "--golden",
        "--lambda-only",
        "--format",
        "machine",
    ]);
    assert_eq!(code, 0);
    let report: relcrit::report::CheckReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.outcome, "pass");
    let minimal = &report.parabolics[0];
    assert_eq!(minimal.rays, vec![vec![1, 0, -1]]);
    let labels: Vec<&str> = minimal.exponents.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(labels, vec!["chi_1", "chi_2", "chi_3"]);
    for e in &minimal.exponents {
        assert_eq!(e.status, "pass");
    }
    let pairings: Vec<&str> = minimal
        .exponents
        .iter()
        .map(|e| e.ray_pairings[0].as_str())
        .collect();
    assert_eq!(pairings, vec!["1", "2", "1"]);
    let normalized = report.normalized_calculus.as_ref().unwrap();
    let norm: Vec<&str> = normalized
        .iter()
        .map(|e| e.ray_pairings[0].as_str())
        .collect();
    assert_eq!(norm, vec!["1/2", "1", "1/2"]);
    // the human report states the verdict in words
    let (table, code) = run_binary(&[
        "check",
        "--preset",
        "gl3_inner",
        "--golden",
        "--lambda-only",
    ]);
    assert_eq!(code, 0);
    assert!(table.contains("PASS (H-square integrable w.r.t. lambda)"));
    println!("ACCEPTANCE 01 PASS - rank-3 golden run certifies pairings 1, 2, 1 (1/2, 1, 1/2 normalized) on ray (1,0,-1)");
}

#[test]
fn acceptance_02_gl4_golden_run() {
    let (stdout, code) = run_binary(&[
        "check",
        "--preset",
        "gl4_symplectic",
        "--golden",
        "--lambda-only",
        "--format",
        "machine",
    ]);
    assert_eq!(code, 0);
    let report: relcrit::report::CheckReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.outcome, "pass");
    let minimal = &report.parabolics[0];
    assert_eq!(minimal.rays, vec![vec![1, 1, 0, 0]]);
    let cross = minimal
        .exponents
        .iter()
        .find(|e| e.label == "w_cross")
        .unwrap();
    assert_eq!(cross.status, "pass");
    assert_eq!(cross.ray_pairings, vec!["1".to_string()]);
    // the unsupported twists are filtered, not checked
    for label in ["w_identity", "w_block_swap"] {
        let e = minimal.exponents.iter().find(|e| e.label == label).unwrap();
        assert_eq!(e.status, "skipped");
    }
    println!("ACCEPTANCE 02 PASS - rank-4 golden run certifies the single supported exponent pairing to 1 on ray (1,1,0,0) modulo the center");
}

#[test]
fn acceptance_03_coset_counts() {
    let rd3 = BasedRootDatum::gl(3);
    let reps3 = rd3.coset_reps(&[1], None, 1000).unwrap();
    assert_eq!(reps3.len(), 3);
    let perms3: std::collections::BTreeSet<Vec<usize>> =
        reps3.iter().map(|w| w.as_permutation().unwrap()).collect();
    let expect3: std::collections::BTreeSet<Vec<usize>> =
        [vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0]]
            .into_iter()
            .collect();
    assert_eq!(perms3, expect3);

    let rd4 = BasedRootDatum::gl(4);
    let reps4 = rd4.coset_reps(&[0, 2], Some(&[0, 2]), 1000).unwrap();
    assert_eq!(reps4.len(), 3);
    let perms4: std::collections::BTreeSet<Vec<usize>> =
        reps4.iter().map(|w| w.as_permutation().unwrap()).collect();
    let expect4: std::collections::BTreeSet<Vec<usize>> =
        [vec![0, 1, 2, 3], vec![0, 2, 1, 3], vec![2, 3, 0, 1]]
            .into_iter()
            .collect();
    assert_eq!(perms4, expect4);
    println!("ACCEPTANCE 03 PASS - coset representatives match the displayed permutations (3 single cosets, 3 double cosets)");
}

fn random_full_family(
    rd: &BasedRootDatum,
    rng: &mut impl Rng,
) -> BTreeMap<Vec<usize>, Vec<Exponent>> {
    let mut family = BTreeMap::new();
    for bits in 0..(1u32 << rd.simple_count()) {
        let subset: Vec<usize> = (0..rd.simple_count())
            .filter(|k| bits & (1 << k) != 0)
            .collect();
        if subset.len() == rd.simple_count() {
            continue;
        }
        let count = rng.gen_range(1..=2);
        let exponents: Vec<Exponent> = (0..count)
            .map(|j| {
                let v: Vec<Rat> = (0..rd.rank())
                    .map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=4)))
                    .collect();
                Exponent::new(&format!("r{bits}_{j}"), v, true)
            })
            .collect();
        family.insert(subset, exponents);
    }
    family
}

#[test]
fn acceptance_04_group_case_equivalence() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    for n in [2usize, 3] {
        let rd = BasedRootDatum::gl(n);
        for _ in 0..50 {
            let family = random_full_family(&rd, &mut rng);
            let report = group_case_equivalence(&rd, &family).unwrap();
            assert!(report.agree, "engines disagree on {family:?}");
        }
    }
    // named anchors: the square-integrable staircase passes both engines,
    // its negative fails both
    let rd = BasedRootDatum::gl(2);
    let mut steinberg = BTreeMap::new();
    steinberg.insert(
        vec![],
        vec![Exponent::new("st", vec![rat(1, 2), rat(-1, 2)], true)],
    );
    let r = group_case_equivalence(&rd, &steinberg).unwrap();
    assert!(r.agree && r.plain.pass && r.relative.pass);
    let mut trivial = BTreeMap::new();
    trivial.insert(
        vec![],
        vec![Exponent::new("triv", vec![rat(-1, 2), rat(1, 2)], true)],
    );
    let r = group_case_equivalence(&rd, &trivial).unwrap();
    assert!(r.agree && !r.plain.pass && !r.relative.pass);
    println!("ACCEPTANCE 04 PASS - doubled-datum engine equals the plain engine on 100 random families and both named anchors");
}

/// Precomputed box of split-component points for the exhaustive oracle.
struct OracleBox {
    /// Cone points outside the central lattice, ambient i64 coordinates.
    points: Vec<Vec<i64>>,
}

fn oracle_box(data: &InvolutionData, radius: i64) -> OracleBox {
    let subset = &data.sigma_split_subsets()[0];
    let lattice = &subset.s_lattice;
    let rank = lattice.rank();
    let mut coords = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for c in &coords {
            for v in -radius..=radius {
                let mut c2: Vec<i64> = c.clone();
                c2.push(v);
                next.push(c2);
            }
        }
        coords = next;
    }
    let mut points = Vec::new();
    for c in coords {
        let ic: Vec<relcrit::lattice::Int> = c.iter().map(|&x| relcrit::lattice::int(x)).collect();
        let y = lattice.point_from_coords(&ic);
        let in_cone = (0..data.dbar_len())
            .filter(|k| !subset.ibar.contains(k))
            .all(|k| data.pair_dbar(k, &y) >= relcrit::lattice::int(0));
        if !in_cone || data.z0_lattice().contains(&y) {
            continue;
        }
        points.push(y.iter().map(|x| i64::try_from(x).unwrap()).collect());
    }
    OracleBox { points }
}

#[test]
fn acceptance_05_cone_oracle_soundness() {
    // every exponent vector with entries p/q, p in -2..2, q in {1,2}; the
    // doubled entries live in -4..4
    for name in ["gl3_inner", "gl4_symplectic", "group_case(2)"] {
        let data = build(name);
        let subset = data.sigma_split_subsets()[0].clone();
        let rank = data.base().rank();
        let oracle = oracle_box(&data, 10);
        let mut grid = vec![vec![]];
        for _ in 0..rank {
            let mut next = Vec::new();
            for g in &grid {
                for doubled in [-4i64, -3, -2, -1, 0, 1, 2, 3, 4] {
                    let mut g2: Vec<i64> = g.clone();
                    g2.push(doubled);
                    next.push(g2);
                }
            }
            grid = next;
        }
        let mut pass_count = 0usize;
        for doubled in &grid {
            let vector: Vec<Rat> = doubled.iter().map(|&p| rat(p, 2)).collect();
            let e = Exponent::new("grid", vector, true);
            let verdict = check_parabolic(
                &data,
                &subset,
                std::slice::from_ref(&e),
                CheckOptions::default(),
            )
            .unwrap();
            // oracle: a cone point outside the center with 2<e, y> <= 0
            let counter = oracle.points.iter().find(|p| {
                doubled
                    .iter()
                    .zip(p.iter())
                    .map(|(a, b)| a * b)
                    .sum::<i64>()
                    <= 0
            });
            if verdict.pass {
                pass_count += 1;
                assert!(
                    counter.is_none(),
                    "{name}: engine passes {doubled:?} but the box refutes it at {counter:?}"
                );
            } else {
                let w = verdict.witness.expect("failing checks carry witnesses");
                assert!(
                    verify_witness(&data, &subset, &e, &w.point),
                    "{name}: witness for {doubled:?} does not verify"
                );
            }
        }
        assert!(pass_count > 0, "{name}: grid contains passing exponents");
    }
    println!("ACCEPTANCE 05 PASS - engine verdicts agree with exhaustive radius-10 box enumeration on the half-integer grid for all presets");
}

#[test]
fn acceptance_06_partition() {
    for name in [
        "gl3_inner",
        "gl4_symplectic",
        "group_case(2)",
        "group_case(3)",
    ] {
        let data = build(name);
        for threshold in [1i64, 2, 3] {
            match relcrit::cone::partition_check(&data, threshold, 8) {
                relcrit::cone::PartitionOutcome::Ok { .. } => {}
                relcrit::cone::PartitionOutcome::Violation { point, containing } => panic!(
                    "{name} threshold {threshold}: partition violated at {point:?} ({containing:?})"
                ),
            }
        }
    }
    println!("ACCEPTANCE 06 PASS - sliced regions partition the dominant cone (0 overlaps, 0 gaps) for thresholds 1..3 and radius 8 on all four presets");
}

#[test]
fn acceptance_07_maximal_reduction() {
    let data = build("group_case(3)");
    let mut rng = rand::rngs::StdRng::seed_from_u64(4711);
    let minimal = data.sigma_split_subsets()[0].i.clone();
    for trial in 0..100 {
        let mut family = ExponentFamily::new(false);
        let count = rng.gen_range(1..=3);
        for j in 0..count {
            let v: Vec<Rat> = (0..data.base().rank())
                .map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=4)))
                .collect();
            family.insert(
                &minimal,
                Exponent::new(&format!("t{trial}_{j}"), v, rng.gen_bool(0.8)),
            );
        }
        // sometimes declare an intermediate subset as well
        if rng.gen_bool(0.4) {
            let subsets = data.sigma_split_subsets();
            let pick = &subsets[rng.gen_range(0..subsets.len() - 1)];
            let v: Vec<Rat> = (0..data.base().rank())
                .map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=4)))
                .collect();
            family.insert(
                &pick.i.clone(),
                Exponent::new(&format!("x{trial}"), v, true),
            );
        }
        let closed = restriction_closure(&data, &family).unwrap();
        assert!(is_restriction_closed(&data, &closed).unwrap());
        for lambda_only in [false, true] {
            let opts = CheckOptions {
                lambda_only,
                unitary: false,
            };
            let report = check_maximal_reduction(&data, &closed, opts).unwrap();
            assert!(
                report.agree,
                "trial {trial}: maximal-only and full verdicts disagree"
            );
        }
    }
    println!("ACCEPTANCE 07 PASS - maximal-subset verdict equals the full verdict on 100 random restriction-closed families");
}

#[test]
fn acceptance_08_plain_implies_relative() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(9001);
    for name in ["gl3_inner", "gl4_symplectic", "group_case(2)"] {
        let data = build(name);
        let rd = data.base().clone();
        let mut nonvacuous = 0usize;
        for trial in 0..100 {
            // mix random families with guaranteed-dominant ones so the
            // implication is exercised non-vacuously
            let family = if trial % 10 == 0 {
                let mut dominant = BTreeMap::new();
                for bits in 0..(1u32 << rd.simple_count()) {
                    let subset: Vec<usize> = (0..rd.simple_count())
                        .filter(|k| bits & (1 << k) != 0)
                        .collect();
                    if subset.len() == rd.simple_count() {
                        continue;
                    }
                    let p = rd.parabolic(&subset);
                    let vector: Vec<Rat> = p
                        .two_rho
                        .iter()
                        .map(|x| Rat::new(x.clone(), relcrit::lattice::int(2)))
                        .collect();
                    dominant.insert(subset, vec![Exponent::new("rho", vector, true)]);
                }
                dominant
            } else {
                random_full_family(&rd, &mut rng)
            };
            let report = plain_implies_relative(&data, &family).unwrap();
            assert!(report.holds, "{name} trial {trial}: implication failed");
            if report.plain_pass {
                nonvacuous += 1;
            }
        }
        assert!(nonvacuous >= 10, "{name}: implication never exercised");
    }
    println!("ACCEPTANCE 08 PASS - plain square integrability forces the relative verdict on 100 families per preset, non-vacuously");
}

#[test]
fn acceptance_09_series_probe_consistency() {
    let radii = [4usize, 8, 12, 16];
    let bound = 0.5 + 0.05; // q^{-1} + 0.05 at q = 2
    for name in ["gl3_inner", "gl4_symplectic"] {
        let desc = preset(name).unwrap();
        let data = desc.build().unwrap();
        let golden = desc.golden.as_ref().unwrap();
        let subset = data.subset_by_i(&golden.parabolic).unwrap();
        for g in &golden.exponents {
            if !g.lambda_support {
                continue;
            }
            let e = Exponent::new(&g.label, g.vector.clone(), true);
            let probe = series_probe(&data, subset, &e, 1, 2, &radii).unwrap();
            assert_eq!(
                probe.classification,
                ProbeClassification::Convergent,
                "{name}/{}",
                g.label
            );
            let ratio = probe.tail_ratio.unwrap();
            assert!(
                ratio <= bound,
                "{name}/{}: tail ratio {ratio} above {bound}",
                g.label
            );
        }
        // zero exponent diverges
        let zero = Exponent::new(
            "zero",
            vec![Rat::new(relcrit::lattice::int(0), relcrit::lattice::int(1)); data.base().rank()],
            true,
        );
        let probe = series_probe(&data, subset, &zero, 0, 2, &radii).unwrap();
        assert_eq!(probe.classification, ProbeClassification::Divergent);

        // classification matches the checker on 20 non-borderline exponents
        let mut rng = rand::rngs::StdRng::seed_from_u64(777);
        let m = data.dbar_len();
        for trial in 0..20 {
            let choices = [-4i64, -3, -2, -1, 1, 2, 3, 4];
            let coeffs: Vec<Rat> = (0..m)
                .map(|_| rat(choices[rng.gen_range(0..8)], 2))
                .collect();
            let mut vector = vec![
                Rat::new(relcrit::lattice::int(0), relcrit::lattice::int(1));
                data.base().rank()
            ];
            for (k, c) in coeffs.iter().enumerate() {
                for (vi, fi) in vector.iter_mut().zip(data.dbar_integral(k)) {
                    *vi += c * rat_from_int(fi);
                }
            }
            let e = Exponent::new(&format!("rnd{trial}"), vector, true);
            let check = check_parabolic(
                &data,
                subset,
                std::slice::from_ref(&e),
                CheckOptions::default(),
            )
            .unwrap();
            let probe = series_probe(&data, subset, &e, 1, 2, &radii).unwrap();
            match probe.classification {
                ProbeClassification::Convergent => assert!(check.pass, "{name} trial {trial}"),
                ProbeClassification::Divergent => assert!(!check.pass, "{name} trial {trial}"),
                ProbeClassification::Inconclusive => {
                    panic!("{name} trial {trial}: inconclusive on a non-borderline exponent")
                }
            }
        }
    }
    println!("ACCEPTANCE 09 PASS - series probe classifies golden exponents convergent within the ratio bound and matches the checker on 40 random non-borderline exponents");
}

#[test]
fn acceptance_10_steinberg_jacquet_rule() {
    let m = borel_exponents(&RepSpec::steinberg(2)).unwrap();
    assert_eq!(m.total(), 1);
    assert_eq!(m.entries[0].vector, vec![rat(1, 2), rat(-1, 2)]);
    println!("ACCEPTANCE 10 PASS - the rank-2 Steinberg block contributes exactly the staircase (1/2, -1/2)");
}

/// Golden families are verified end to end as well: the support-filtered
/// check passes for every preset that bundles golden data.
#[test]
fn acceptance_golden_families_all_presets() {
    for name in [
        "gl3_inner",
        "gl4_symplectic",
        "group_case(2)",
        "group_case(3)",
    ] {
        let desc = preset(name).unwrap();
        let data = desc.build().unwrap();
        let family = golden_family(&desc, &data).unwrap();
        let opts = CheckOptions {
            lambda_only: true,
            unitary: true,
        };
        let verdict = check_all(&data, &family, opts).unwrap();
        assert!(verdict.pass, "{name}");
    }
    // consistency probe: the plain engine agrees on the underlying datum
    let rd = BasedRootDatum::gl(2);
    let mut family = BTreeMap::new();
    family.insert(
        vec![],
        vec![Exponent::new("st", vec![rat(1, 2), rat(-1, 2)], true)],
    );
    assert!(casselman_check(&rd, &family).unwrap().pass);
    // and the box oracle cannot refute a passing golden exponent
    let data = build("gl3_inner");
    let subset = data.sigma_split_subsets()[0].clone();
    let chi1 = Exponent::new("chi_1", vec![rat(0, 1), rat(1, 1), rat(-1, 1)], true);
    assert!(box_counterexample(&data, &subset, &chi1, 10).is_none());
}
