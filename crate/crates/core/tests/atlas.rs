use hl_atlas::atlas::{self, eval_exact_d3, exact_atoms_d3, reference_table, BooleanExpr, RefKind};
use hl_atlas::criteria::{Predicate, Thresholds};
use hl_atlas::quasirandom::{self, SequenceSpec};
use hl_atlas::Family;
use proptest::prelude::*;
use Predicate::*;

const D3: [Predicate; 3] = [P, S, Ppt];

fn qutrit_tally(budget: u64, workers: usize) -> atlas::AtomTally {
    atlas::tally(Family::Qutrit, &D3, Thresholds::qutrit(), SequenceSpec::new(3), budget, workers).unwrap()
}

#[test]
fn recurrence_points() {
    let phi = quasirandom::phi(3);
    assert!((phi - 1.22074408460576).abs() < 1e-14);
    assert!((quasirandom::phi(1) - 1.618033988749895).abs() < 1e-15);
    assert!((quasirandom::phi(2) - 1.324717957244746).abs() < 1e-15);
    let x = quasirandom::point(1, &SequenceSpec::new(3)).unwrap();
    for (i, xi) in x.iter().enumerate() {
        let want = (0.5 + phi.powi(-(i as i32 + 1))).fract();
        assert!((xi - want).abs() < 1e-15);
    }
    let zero = SequenceSpec { offset: 0.0, ..SequenceSpec::new(3) };
    assert_eq!(quasirandom::point(0, &zero).unwrap(), vec![0.0; 3]);
}

#[test]
fn worker_count_does_not_change_counts() {
    let base = qutrit_tally(5_000_000, 1);
    for w in [2, 3, 8] {
        assert_eq!(qutrit_tally(5_000_000, w), base, "workers {w}");
    }
}

#[test]
fn split_runs_merge_to_one_shot() {
    let whole = qutrit_tally(6_000_000, 4);
    let mut part = qutrit_tally(2_345_678, 2);
    let restored = atlas::from_json(&atlas::to_json(&part)).unwrap();
    assert_eq!(restored, part);
    atlas::extend(&mut part, 6_000_000 - 2_345_678, 3).unwrap();
    assert_eq!(part, whole);
}

#[test]
fn checkpoint_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("hl-atlas-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tally.json");
    let t = qutrit_tally(1_000_000, 2);
    atlas::checkpoint_save(&t, &path).unwrap();
    assert_eq!(atlas::checkpoint_load(&path).unwrap(), t);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn atoms_sum_to_one_and_match_exact_values() {
    let t = qutrit_tally(20_000_000, 4);
    let counts = t.atom_counts();
    assert_eq!(counts.iter().sum::<u64>(), t.feasible_total);
    let probs = t.atom_probabilities().unwrap();
    assert_eq!(probs.iter().sum::<f64>().round(), 1.0);
    for (got, want) in probs.iter().zip(exact_atoms_d3()) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
    let rate = t.acceptance_rate();
    let sigma = (1.0 / 36.0 * (35.0 / 36.0) / t.raw_total as f64).sqrt();
    assert!((rate - 1.0 / 36.0).abs() < 3.0 * sigma);
}

#[test]
fn ququart_acceptance_rate() {
    let t = atlas::tally(Family::Ququart, &D3, Thresholds::ququart(), SequenceSpec::new(4), 20_000_000, 4).unwrap();
    let p = 1.0 / 1152.0;
    let sigma = (p * (1.0 - p) / t.raw_total as f64).sqrt();
    assert!((t.acceptance_rate() - p).abs() < 3.0 * sigma);
    let sep = t.eval(&BooleanExpr::parse("!P && !S && PPT").unwrap()).unwrap();
    assert!((sep - 0.40386).abs() < 0.01, "separable atom {sep}");
}

#[test]
fn catalog_consistent_with_exact_atoms() {
    let table = reference_table();
    assert!(table.len() >= 40);
    for r in table.iter().filter(|r| r.family == Family::Qutrit && r.kind == RefKind::Exact) {
        let leaves = r.expression().leaves();
        if leaves.iter().all(|p| D3.contains(p)) {
            let v = eval_exact_d3(&r.expression()).unwrap();
            assert!((v - r.value).abs() < 1e-12, "{}: {v} vs {}", r.name, r.value);
        }
    }
}

#[test]
fn exact_atom_closed_forms() {
    let pi = std::f64::consts::PI;
    let s3 = 3f64.sqrt();
    let e = |s: &str| eval_exact_d3(&BooleanExpr::parse(s).unwrap()).unwrap();
    assert!((e("PPT") - 8.0 * pi / (27.0 * s3)).abs() < 1e-12);
    assert!((e("!P && !S") - 21.0 / 44.0).abs() < 1e-12);
    assert!((e("!PPT || S") - 13.0 / 27.0).abs() < 1e-12);
    assert!((e("PPT && P && S") - 2.0 / 121.0).abs() < 1e-12);
    assert!((e("PPT && S") - 2.0 / 81.0 * (4.0 * s3 * pi - 21.0)).abs() < 1e-12);
}

#[test]
fn compare_report_z_scores_are_modest() {
    let t = qutrit_tally(20_000_000, 4);
    let rows = atlas::compare_report(&t).unwrap();
    assert!(!rows.is_empty());
    assert!(atlas::closed_forms_within(&rows, 5.0));
}

#[test]
fn expression_truth_tables() {
    let preds = [P, S, Ppt];
    for src in ["P && !S", "!(P || S) && PPT", "P || S || PPT", "!P"] {
        let e = BooleanExpr::parse(src).unwrap();
        let idx = e.function_index(&preds).unwrap();
        let back = BooleanExpr::from_function_index(idx, &preds).unwrap();
        assert_eq!(back.truth_table(&preds).unwrap(), e.truth_table(&preds).unwrap(), "{src}");
    }
    assert!(BooleanExpr::parse("P && (S").is_err());
    assert!(BooleanExpr::parse("Q").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn function_index_round_trip(idx in 0u64..256) {
        let e = BooleanExpr::from_function_index(idx, &D3).unwrap();
        prop_assert_eq!(e.function_index(&D3).unwrap(), idx);
    }

    #[test]
    fn probabilities_of_complements_sum_to_one(idx in 0u64..256) {
        let e = BooleanExpr::from_function_index(idx, &D3).unwrap();
        let not = BooleanExpr::parse(&format!("!({e})")).unwrap();
        let sum = eval_exact_d3(&e).unwrap() + eval_exact_d3(&not).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-14);
    }
}
