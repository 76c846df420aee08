//! Versioned JSON checkpoints of an [`AtomTally`].
//!
//! The integrity hash is the SHA-256 of the compact JSON serialisation of
//! every other field, in declaration order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tally::AtomTally;
use super::AtlasError;
use crate::criteria::{Predicate, Thresholds};
use crate::quasirandom::SequenceSpec;
use crate::states::Family;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpecRecord {
    offset: f64,
    start_index: u64,
    next_index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Payload {
    version: u32,
    family_dim: usize,
    spec: SpecRecord,
    thresholds: Thresholds,
    predicate_names: Vec<Predicate>,
    counts: Vec<u64>,
    raw_total: u64,
    feasible_total: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    #[serde(flatten)]
    payload: Payload,
    integrity_hash: String,
}

fn digest(payload: &Payload) -> String {
    let bytes = serde_json::to_vec(payload).expect("payload serialises");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn corrupt(msg: impl Into<String>) -> AtlasError {
    AtlasError::CorruptCheckpoint(msg.into())
}

/// Serialises `t` as checkpoint JSON.
pub fn to_json(t: &AtomTally) -> String {
    let payload = Payload {
        version: CHECKPOINT_VERSION,
        family_dim: t.family.local_dim(),
        spec: SpecRecord {
            offset: t.spec.offset,
            start_index: t.spec.start_index,
            next_index: t.next_index,
        },
        thresholds: t.thresholds,
        predicate_names: t.predicates.clone(),
        counts: t.counts.clone(),
        raw_total: t.raw_total,
        feasible_total: t.feasible_total,
    };
    let integrity_hash = digest(&payload);
    serde_json::to_string_pretty(&Checkpoint { payload, integrity_hash }).expect("checkpoint serialises")
}

/// Parses checkpoint JSON, checking version, hash and internal consistency.
pub fn from_json(text: &str) -> Result<AtomTally, AtlasError> {
    let cp: Checkpoint = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    let p = cp.payload;
    if p.version != CHECKPOINT_VERSION {
        return Err(corrupt(format!("unsupported version {}", p.version)));
    }
    if digest(&p) != cp.integrity_hash {
        return Err(corrupt("integrity hash mismatch"));
    }
    let family = Family::from_dim(p.family_dim).map_err(|e| corrupt(e.to_string()))?;
    if p.counts.len() != 1 << p.predicate_names.len() {
        return Err(corrupt("count vector length does not match predicates"));
    }
    if p.counts.iter().sum::<u64>() != p.feasible_total || p.feasible_total > p.raw_total {
        return Err(corrupt("counts inconsistent with totals"));
    }
    if p.spec.next_index < p.spec.start_index || p.spec.next_index - p.spec.start_index != p.raw_total {
        return Err(corrupt("index range inconsistent with raw total"));
    }
    let spec = SequenceSpec {
        dim: family.n_coords(),
        offset: p.spec.offset,
        start_index: p.spec.start_index,
    };
    spec.validate().map_err(|e| corrupt(e.to_string()))?;
    Ok(AtomTally {
        family,
        predicates: p.predicate_names,
        counts: p.counts,
        raw_total: p.raw_total,
        feasible_total: p.feasible_total,
        spec,
        next_index: p.spec.next_index,
        thresholds: p.thresholds,
    })
}

pub fn checkpoint_save(t: &AtomTally, path: &Path) -> Result<(), AtlasError> {
    fs::write(path, to_json(t)).map_err(|e| AtlasError::Io(format!("{}: {e}", path.display())))
}

pub fn checkpoint_load(path: &Path) -> Result<AtomTally, AtlasError> {
    let text = fs::read_to_string(path).map_err(|e| AtlasError::Io(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

/// Checks that a loaded checkpoint can be extended under the given setup.
pub fn check_resumable(
    t: &AtomTally,
    family: Family,
    predicates: &[Predicate],
    thresholds: &Thresholds,
    spec: &SequenceSpec,
) -> Result<(), AtlasError> {
    let mismatch = |field: &str| Err(AtlasError::CheckpointMismatch(field.to_string()));
    if t.family != family {
        return mismatch("family_dim");
    }
    if t.predicates != predicates {
        return mismatch("predicate_names");
    }
    if t.thresholds != *thresholds {
        return mismatch("thresholds");
    }
    if t.spec.offset != spec.offset || t.spec.start_index != spec.start_index {
        return mismatch("spec");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::tally;

    fn sample() -> AtomTally {
        tally(
            Family::Qutrit,
            &[Predicate::P, Predicate::S, Predicate::Ppt],
            Thresholds::qutrit(),
            SequenceSpec::new(3),
            50_000,
            2,
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let t = sample();
        assert_eq!(from_json(&to_json(&t)).unwrap(), t);
    }

    #[test]
    fn tampering_is_detected() {
        let t = sample();
        let text = to_json(&t).replacen("\"raw_total\": 50000", "\"raw_total\": 50001", 1);
        assert!(matches!(from_json(&text), Err(AtlasError::CorruptCheckpoint(m)) if m.contains("hash")));
        let text = to_json(&t).replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(matches!(from_json(&text), Err(AtlasError::CorruptCheckpoint(m)) if m.contains("version")));
        assert!(from_json("{").is_err());
    }

    #[test]
    fn resume_checks() {
        let t = sample();
        let preds = [Predicate::P, Predicate::S, Predicate::Ppt];
        let spec = SequenceSpec::new(3);
        assert!(check_resumable(&t, Family::Qutrit, &preds, &Thresholds::qutrit(), &spec).is_ok());
        let other = Thresholds { s: 2.0, ..Thresholds::qutrit() };
        assert!(matches!(
            check_resumable(&t, Family::Qutrit, &preds, &other, &spec),
            Err(AtlasError::CheckpointMismatch(f)) if f == "thresholds"
        ));
    }
}
