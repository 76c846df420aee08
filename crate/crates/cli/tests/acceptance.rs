//! End-to-end acceptance checks, one printed line per criterion.
//!
//! Runs without the libtest harness so that every line reaches stdout.
//! The process fails if any criterion fails, except for criteria listed in
//! `KNOWN_FALSE_CLAIMS`, whose failing sub-check is a published value that
//! both the closed form and the matrix oracle contradict.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use hl_atlas::atlas::{self, eval_exact_d3, AtomTally, BooleanExpr};
use hl_atlas::criteria::{self, Predicate, Thresholds};
use hl_atlas::crosscheck::oracle_sweep;
use hl_atlas::geometry::pocu_candidates;
use hl_atlas::liqiao::{bsa, BsaOptions};
use hl_atlas::parallel::default_workers;
use hl_atlas::quasirandom::SequenceSpec;
use hl_atlas::{Family, QPoint};
use serde_json::Value;

const KNOWN_FALSE_CLAIMS: &[u8] = &[7];

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
    /// For a known false claim: whether everything except that claim held.
    rest_ok: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn estimate(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hl-atlas"))
        .arg("estimate")
        .args(args)
        .args(["--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "estimate {args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn row(report: &Value, name: &str) -> f64 {
    report["rows"]
        .as_array()
        .and_then(|rows| rows.iter().find(|r| r["name"] == name))
        .and_then(|r| r["estimate"].as_f64())
        .unwrap_or(f64::NAN)
}

fn within(label: &str, est: f64, target: f64, tol: f64, fails: &mut Vec<String>) -> String {
    let err = (est - target).abs();
    if !(err <= tol) {
        fails.push(label.to_string());
    }
    format!("{label} {est:.9} vs {target:.9} (err {err:.2e}, tol {tol:e})")
}

fn c1_c2_c12a(d3: &Result<Value, String>) -> (Outcome, Outcome, Option<(u64, u64)>) {
    let t1 = "d=3 PPT probability at 1e8 raw points";
    let t2 = "eight d=3 atoms at 1e8 raw points";
    let r = match d3 {
        Ok(r) => r,
        Err(e) => {
            let o = |id, title| Outcome { id, title, pass: false, detail: e.clone(), rest_ok: false };
            return (o(1, t1), o(2, t2), None);
        }
    };
    let mut f1 = Vec::new();
    let d1 = within("PPT", row(r, "ppt_d3"), 8.0 * PI / (27.0 * 3f64.sqrt()), 1e-3, &mut f1);

    let expected = [
        0.016528926, 0.002374590, 0.062594818, 0.415720853, 0.455923700, 0.011352817, 0.014155270, 0.021349027,
    ];
    let atoms = r["atoms"].as_array().cloned().unwrap_or_default();
    let mut f2 = Vec::new();
    let mut worst = 0.0f64;
    for (k, want) in expected.iter().enumerate() {
        let got = atoms.get(k).and_then(|a| a["probability"].as_f64()).unwrap_or(f64::NAN);
        let err = (got - want).abs();
        worst = worst.max(err);
        if !(err <= 5e-4) {
            f2.push(format!("atom {} ({})", k + 1, atoms.get(k).map_or("?".into(), |a| a["set"].to_string())));
        }
    }
    let count_sum: u64 = atoms.iter().filter_map(|a| a["count"].as_u64()).sum();
    let feasible = r["feasible_total"].as_u64().unwrap_or(0);
    let raw = r["raw_total"].as_u64().unwrap_or(0);
    if atoms.len() != 8 || count_sum != feasible {
        f2.push(format!("integer counts sum to {count_sum}, feasible total {feasible}"));
    }
    let order: Vec<String> = atoms.iter().map(|a| a["set"].as_str().unwrap_or("?").to_string()).collect();
    let d2 = format!(
        "largest |err| {worst:.2e} (tol 5e-4); counts sum {count_sum} = feasible {feasible}; order {}",
        order.join(", ")
    );
    (
        Outcome { id: 1, title: t1, pass: f1.is_empty(), detail: format!("{d1}; {feasible} feasible"), rest_ok: false },
        Outcome { id: 2, title: t2, pass: f2.is_empty(), detail: failed_suffix(d2, &f2), rest_ok: false },
        Some((feasible, raw)),
    )
}

fn failed_suffix(detail: String, fails: &[String]) -> String {
    if fails.is_empty() {
        detail
    } else {
        format!("{detail}; FAILED: {}", fails.join(", "))
    }
}

fn c3() -> Outcome {
    let s3 = 3f64.sqrt();
    let exact = [
        ("!P && !S", 21.0 / 44.0),
        ("P || S", 23.0 / 44.0),
        ("!PPT || S", 13.0 / 27.0),
        ("PPT && P && S", 2.0 / 121.0),
        ("PPT && S", 2.0 / 81.0 * (4.0 * s3 * PI - 21.0)),
        ("PPT && S && !P", 4.0 * (242.0 * s3 * PI - 1311.0) / 9801.0),
    ];
    let near = [
        ("(P && PPT && S) || (!P && !PPT)", 16.0 / 325.0),
        ("!(P && S) && (P || PPT || S)", s3 * 2f64.ln() / 9f64.ln()),
    ];
    let mut fails = Vec::new();
    let mut worst_abs = 0.0f64;
    for (e, v) in exact {
        let got = eval_exact_d3(&BooleanExpr::parse(e).expect("expression parses")).unwrap_or(f64::NAN);
        let err = (got - v).abs();
        worst_abs = worst_abs.max(err);
        if !(err <= 1e-12) {
            fails.push(format!("{e}: {got} vs {v}"));
        }
    }
    let mut worst_rel = 0.0f64;
    for (e, v) in near {
        let got = eval_exact_d3(&BooleanExpr::parse(e).expect("expression parses")).unwrap_or(f64::NAN);
        let r = rel(got, v);
        worst_rel = worst_rel.max(r);
        if !(r <= 1e-6) {
            fails.push(format!("{e}: {got} vs {v}"));
        }
    }
    Outcome {
        id: 3,
        title: "derived combinations from exact atoms",
        pass: fails.is_empty(),
        detail: failed_suffix(
            format!("6 closed forms, largest |err| {worst_abs:.1e} (tol 1e-12); 2 near-identities, largest rel {worst_rel:.1e} (tol 1e-6)"),
            &fails,
        ),
        rest_ok: false,
    }
}

fn c4() -> Outcome {
    let title = "Table I suite over [PPT,MUB,Choi] at 1e8 raw points";
    let r = match estimate(&["--dim", "3", "--points", "1e8", "--predicates", "PPT,MUB,Choi"]) {
        Ok(r) => r,
        Err(e) => return Outcome { id: 4, title, pass: false, detail: e, rest_ok: false },
    };
    let mut fails = Vec::new();
    let parts: Vec<String> = [
        ("MUB", "mub", 1.0 / 6.0),
        ("Choi", "choi", 1.0 / 6.0),
        ("MUB∧Choi", "mub_and_choi", 1.0 / 9.0),
        ("PPT∧MUB", "ppt_and_mub", 0.00736862),
        ("PPT∧MUB∧Choi", "ppt_and_mub_and_choi", 0.0),
    ]
    .iter()
    .map(|&(label, name, v)| within(label, row(&r, name), v, 1e-3, &mut fails))
    .collect();
    Outcome { id: 4, title, pass: fails.is_empty(), detail: failed_suffix(parts.join("; "), &fails), rest_ok: false }
}

fn c5() -> Outcome {
    let title = "CCNR ⇔ S over 1e5 feasible points";
    match oracle_sweep(Family::Qutrit, &Thresholds::qutrit(), SequenceSpec::new(3), 100_000, u64::MAX) {
        Ok(s) => {
            let vs_s = s.ccnr_vs_s.clone().unwrap_or_default();
            let vs_tn = s.ccnr_vs_trace_norm.clone().unwrap_or_default();
            Outcome {
                id: 5,
                title,
                pass: s.points == 100_000 && vs_s.disagreements == 0 && vs_tn.disagreements == 0,
                detail: format!(
                    "{} points; closed form vs s>16/9: {} disagreements ({} in band); closed form vs trace norm: {} disagreements ({} in band)",
                    s.points, vs_s.disagreements, vs_s.in_band, vs_tn.disagreements, vs_tn.in_band
                ),
                rest_ok: false,
            }
        }
        Err(e) => Outcome { id: 5, title, pass: false, detail: e.to_string(), rest_ok: false },
    }
}

fn c6() -> Outcome {
    let title = "closed forms vs oracles over 1e4 feasible points";
    match oracle_sweep(Family::Qutrit, &Thresholds::qutrit(), SequenceSpec::new(3), 10_000, u64::MAX) {
        Ok(s) => Outcome {
            id: 6,
            title,
            pass: s.points == 10_000 && s.ppt.disagreements == 0 && s.s_max_rel <= 1e-10 && s.p_max_rel <= 1e-10,
            detail: format!(
                "{} points; PPT sign disagreements {} ({} in band); max rel err s {:.1e}, p {:.1e} (tol 1e-10)",
                s.points, s.ppt.disagreements, s.ppt.in_band, s.s_max_rel, s.p_max_rel
            ),
            rest_ok: false,
        },
        Err(e) => Outcome { id: 6, title, pass: false, detail: e.to_string(), rest_ok: false },
    }
}

fn c7() -> Outcome {
    struct Check {
        label: &'static str,
        got: f64,
        oracle: f64,
        want: f64,
        absolute: bool,
    }
    let q3 = |a, b, c| QPoint::qutrit(a, b, c);
    let q4 = |a, b, c, d| QPoint::ququart(a, b, c, d);
    let mk = |label, q: &QPoint, s: bool, want: f64| {
        let (c, o) = (criteria::sp_values(q), criteria::sp_oracle(q));
        Check {
            label,
            got: if s { c.s } else { c.p },
            oracle: if s { o.s } else { o.p },
            want,
            absolute: want == 0.0,
        }
    };
    let a = q3(1.0 / 3.0, 0.0, 1.0 / 3.0);
    let b = q3(2.0 / 7.0, 4.0 / 21.0, 0.0);
    let c = q4(3.0 / 16.0, 9.0 / 64.0, 3.0 / 64.0, 0.0);
    let d = q4(0.0, 0.25, 0.0, 0.0);
    let checks = [
        mk("s(1/3,0,1/3)=16/9", &a, true, 16.0 / 9.0),
        mk("p(1/3,0,1/3)=0", &a, false, 0.0),
        mk("s(2/7,4/21,0)=25/9", &b, true, 25.0 / 9.0),
        mk("p(2/7,4/21,0)=2^28/(3^16·7^14)", &b, false, 2f64.powi(28) / (3f64.powi(16) * 7f64.powi(14))),
        mk("s(3/16,9/64,3/64,0)=49/16", &c, true, 49.0 / 16.0),
        mk("p(3/16,9/64,3/64,0)=3^24/2^134", &c, false, 3f64.powi(24) / 2f64.powi(134)),
        mk("s(0,1/4,0,0)=9/4", &d, true, 9.0 / 4.0),
    ];
    let ok = |k: &Check| if k.absolute { k.got.abs() <= 1e-12 } else { rel(k.got, k.want) <= 1e-12 };
    let failed: Vec<&Check> = checks.iter().filter(|k| !ok(k)).collect();
    let passed = checks.len() - failed.len();
    let known = |k: &Check| k.label.starts_with("s(2/7,4/21,0)") && rel(k.got, k.oracle) <= 1e-10;
    let rest_ok = failed.iter().all(|k| known(k));

    // Where s = 25/9 is attained on the PPT edge Q3 = 0.
    let e = q3(0.25, (3.0 - 5f64.sqrt()) / 24.0, 0.0);
    let se = criteria::sp_values(&e).s;
    let mut detail = format!("{passed}/{} cited values within 1e-12 relative", checks.len());
    for k in &failed {
        detail.push_str(&format!(
            "; FAILED {}: closed form {:.12}, SVD oracle {:.12}, claimed {:.12}",
            k.label, k.got, k.oracle, k.want
        ));
    }
    if !failed.is_empty() {
        detail.push_str(&format!(
            "; s = 25/9 holds at (1/4,(3-√5)/24,0) instead (rel err {:.1e})",
            rel(se, 25.0 / 9.0)
        ));
    }
    Outcome { id: 7, title: "cited point values", pass: failed.is_empty(), detail, rest_ok }
}

fn c8(d4: &Result<Value, String>) -> (Outcome, Option<(u64, u64)>) {
    let title = "d=4 probabilities at 2e8 raw points";
    let r = match d4 {
        Ok(r) => r,
        Err(e) => return (Outcome { id: 8, title, pass: false, detail: e.clone(), rest_ok: false }, None),
    };
    let s3 = 3f64.sqrt();
    let mut fails = Vec::new();
    let parts = [
        within("PPT", row(r, "ppt_d4"), 0.5 + (2.0 - s3).ln() / (8.0 * s3), 4e-3, &mut fails),
        within("S", row(r, "s_d4"), 0.41190, 4e-3, &mut fails),
        within("S∧PPT", row(r, "s_and_ppt_d4"), 3.0 / 2750.0, 1.5e-3, &mut fails),
        within("S∨PPT", row(r, "s_or_ppt_d4"), 31.0 / 38.0, 4e-3, &mut fails),
    ];
    let feasible = r["feasible_total"].as_u64().unwrap_or(0);
    let raw = r["raw_total"].as_u64().unwrap_or(0);
    (
        Outcome {
            id: 8,
            title,
            pass: fails.is_empty(),
            detail: failed_suffix(format!("{}; {feasible} feasible", parts.join("; ")), &fails),
            rest_ok: false,
        },
        Some((feasible, raw)),
    )
}

fn c9() -> Outcome {
    let title = "best separable approximation";
    let q = QPoint::qutrit(4235.0 / 50001.0, 1.0 / 166.0, 30.0 / 113.0);
    match bsa(&q, &Thresholds::qutrit(), &BsaOptions::default()) {
        Ok(r) => Outcome {
            id: 9,
            title,
            pass: (r.b - 0.195662).abs() <= 0.01 && r.residual <= 1e-12,
            detail: format!(
                "B = {:.6} vs 0.195662 (err {:.2e}, tol 1e-2); residual {:.1e} (tol 1e-12); entangled part {:?}",
                r.b,
                (r.b - 0.195662).abs(),
                r.residual,
                r.q_ent
            ),
            rest_ok: false,
        },
        Err(e) => Outcome { id: 9, title, pass: false, detail: e.to_string(), rest_ok: false },
    }
}

fn c10() -> Outcome {
    let title = "POCU-candidate layer over 1e6 candidates";
    match pocu_candidates(1_000_000, 0, &Thresholds::qutrit(), SequenceSpec::new(3), 10_000_000_000, default_workers()) {
        Ok(r) => {
            let err = (r.probability - 0.021349027).abs();
            Outcome {
                id: 10,
                title,
                pass: r.candidates == 1_000_000 && err <= 5e-4 && r.min_s <= 0.47742,
                detail: format!(
                    "{} candidates from {} raw; probability {:.9} vs 0.021349027 (err {err:.2e}, tol 5e-4); min s {:.6} (≤ 0.47742) at {:?}",
                    r.candidates, r.cloud.raw_scanned, r.probability, r.min_s, r.argmin
                ),
                rest_ok: false,
            }
        }
        Err(e) => Outcome { id: 10, title, pass: false, detail: e.to_string(), rest_ok: false },
    }
}

fn c11() -> Outcome {
    let title = "determinism across workers {1,2,8} and checkpoint/resume";
    let mut notes = Vec::new();
    let mut pass = true;
    use Predicate::*;
    for (family, preds, budget) in [
        (Family::Qutrit, vec![P, S, Ppt, Mub, Choi, Ccnr], 30_000_000u64),
        (Family::Ququart, vec![P, S, Ppt], 30_000_000u64),
    ] {
        let th = Thresholds::for_family(family);
        let spec = SequenceSpec::new(family.n_coords());
        let runs: Vec<AtomTally> = [1, 2, 8]
            .iter()
            .map(|&w| atlas::tally(family, &preds, th, spec, budget, w).expect("tally runs"))
            .collect();
        let same = runs.windows(2).all(|w| w[0] == w[1]);

        let mut part = atlas::tally(family, &preds, th, spec, 11_111_111, 2).expect("tally runs");
        let restored = atlas::from_json(&atlas::to_json(&part)).expect("checkpoint round trip");
        let round_trip = restored == part;
        part = restored;
        atlas::extend(&mut part, budget - 11_111_111, 8).expect("extend runs");
        let resumed = part == runs[0];
        pass &= same && round_trip && resumed;
        notes.push(format!(
            "d={}: workers identical {same}, checkpoint round trip {round_trip}, resumed identical {resumed}",
            family.local_dim()
        ));
    }
    Outcome { id: 11, title, pass, detail: notes.join("; "), rest_ok: false }
}

fn c12(d3: Option<(u64, u64)>, d4: Option<(u64, u64)>) -> Outcome {
    let title = "feasible fractions 1/36 and 1/1152";
    let mut parts = Vec::new();
    let mut pass = true;
    for (label, counts, p) in [("d=3", d3, 1.0 / 36.0), ("d=4", d4, 1.0 / 1152.0)] {
        match counts {
            Some((feasible, raw)) if raw > 0 => {
                let rate = feasible as f64 / raw as f64;
                let sigma = (p * (1.0 - p) / raw as f64).sqrt();
                let z = (rate - p) / sigma;
                pass &= z.abs() <= 3.0;
                parts.push(format!("{label} {rate:.9} vs {p:.9} ({z:+.2}σ, tol 3σ)"));
            }
            _ => {
                pass = false;
                parts.push(format!("{label} estimate unavailable"));
            }
        }
    }
    Outcome { id: 12, title, pass, detail: parts.join("; "), rest_ok: false }
}

fn report(o: &Outcome, secs: f64) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {:>2} {verdict}  {} [{secs:.1}s]: {}", o.id, o.title, o.detail);
}

fn main() {
    // libtest-style flags (e.g. --nocapture, test filters) are accepted and ignored.
    let started = Instant::now();
    println!("acceptance: {} worker(s)", default_workers());
    let mut outcomes = Vec::new();

    let t = Instant::now();
    let d3 = estimate(&["--dim", "3", "--points", "1e8"]);
    let (o1, o2, d3_counts) = c1_c2_c12a(&d3);
    let secs = t.elapsed().as_secs_f64();
    report(&o1, secs);
    report(&o2, 0.0);
    outcomes.push(o1);
    outcomes.push(o2);

    let t = Instant::now();
    let d4 = estimate(&["--dim", "4", "--points", "2e8"]);
    let (o8, d4_counts) = c8(&d4);
    let d4_secs = t.elapsed().as_secs_f64();

    type Step = fn() -> Outcome;
    let steps: [Step; 4] = [c3, c4, c5, c6];
    for step in steps {
        let t = Instant::now();
        let o = step();
        report(&o, t.elapsed().as_secs_f64());
        outcomes.push(o);
    }
    let t = Instant::now();
    let o7 = c7();
    report(&o7, t.elapsed().as_secs_f64());
    outcomes.push(o7);
    report(&o8, d4_secs);
    outcomes.push(o8);
    let steps: [Step; 3] = [c9, c10, c11];
    for step in steps {
        let t = Instant::now();
        let o = step();
        report(&o, t.elapsed().as_secs_f64());
        outcomes.push(o);
    }
    let o12 = c12(d3_counts, d4_counts);
    report(&o12, 0.0);
    outcomes.push(o12);

    let passed = outcomes.iter().filter(|o| o.pass).count();
    let unexpected: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.pass && !(KNOWN_FALSE_CLAIMS.contains(&o.id) && o.rest_ok))
        .map(|o| o.id)
        .collect();
    let known: Vec<u8> = outcomes.iter().filter(|o| !o.pass && !unexpected.contains(&o.id)).map(|o| o.id).collect();
    println!(
        "acceptance: {passed}/{} criteria pass in {:.1}s; known false claims failing: {known:?}; unexpected failures: {unexpected:?}",
        outcomes.len(),
        started.elapsed().as_secs_f64()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
