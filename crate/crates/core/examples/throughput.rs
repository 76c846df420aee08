//! Raw-index throughput of the tally loop for both families.

use std::time::Instant;

use hl_atlas::atlas::tally;
use hl_atlas::quasirandom::SequenceSpec;
use hl_atlas::{Family, Predicate, Thresholds};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse::<f64>().ok()).map_or(10_000_000, |v| v as u64);
    use Predicate::*;
    for (family, preds, th) in [
        (Family::Qutrit, vec![P, S, Ppt, Mub, Choi, Ccnr], Thresholds::qutrit()),
        (Family::Qutrit, vec![Ppt, P, S], Thresholds::qutrit()),
        (Family::Ququart, vec![P, S, Ppt], Thresholds::ququart()),
    ] {
        let t0 = Instant::now();
        let t = tally(family, &preds, th, SequenceSpec::new(family.n_coords()), n, 1).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        println!("{family:?} {} preds: {n} raw in {dt:.2}s ({:.2e}/s), accepted {}", preds.len(), n as f64 / dt, t.feasible_total);
    }
}
