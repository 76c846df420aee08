use std::fs;
use std::io::Write;

use hl_atlas::atlas::{self, AtomTally, BooleanExpr, EstimateReport, ExprError, RefKind};
use hl_atlas::criteria::{self, Mode, Predicate};
use hl_atlas::crosscheck;
use hl_atlas::geometry::{self, Constraint, PointCloud, PointRow};
use hl_atlas::liqiao::{self, BsaOptions, Certificate};
use hl_atlas::parallel;
use hl_atlas::states::{Family, QPoint};

use crate::{
    BsaArgs, ClassifyArgs, CliError, CloudArgs, EstimateArgs, Format, ModeArg, OracleCheckArgs, OutputArgs,
    ReferenceArgs, SurfaceArgs, VerifyArgs,
};

/// Largest |z| accepted for closed-form rows of an estimate.
const Z_MAX: f64 = 5.0;

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn emit(
    out: &OutputArgs,
    default: Format,
    stdout: &mut dyn Write,
    json: impl FnOnce() -> Result<String, CliError>,
    csv: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match out.format.unwrap_or(default) {
        Format::Json => {
            buf.extend_from_slice(json()?.as_bytes());
            buf.push(b'\n');
        }
        Format::Csv => csv(&mut buf)?,
    }
    match &out.out {
        Some(path) => fs::write(path, &buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn workers(flag: Option<usize>) -> usize {
    flag.filter(|&n| n > 0).unwrap_or_else(parallel::default_workers)
}

fn require_qutrit(family: Family, what: &str) -> Result<(), CliError> {
    if family == Family::Qutrit {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} is defined for --dim 3 only")))
    }
}

pub fn default_predicates(family: Family) -> Vec<Predicate> {
    use Predicate::*;
    match family {
        Family::Qutrit => vec![P, S, Ppt, Mub, Choi, Ccnr],
        Family::Ququart => vec![P, S, Ppt],
    }
}

pub fn estimate(a: &EstimateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let family = a.family.family();
    let thresholds = a.family.thresholds()?;
    let spec = a.sequence.spec(family)?;
    let preds = a.predicates.clone().unwrap_or_else(|| default_predicates(family));
    if let Some(p) = preds.iter().find(|p| !p.defined_for(family)) {
        return Err(CliError::Usage(format!("{} is not defined for --dim {}", p.name(), a.family.dim)));
    }
    if (1..preds.len()).any(|i| preds[..i].contains(&preds[i])) {
        return Err(CliError::Usage("--predicates lists a predicate twice".into()));
    }
    let workers = workers(a.workers);
    let end = spec
        .start_index
        .checked_add(a.points)
        .ok_or_else(|| CliError::Usage("--start + --points overflows".into()))?;

    let mut t = match (&a.checkpoint, a.resume) {
        (Some(path), true) => {
            let t = atlas::checkpoint_load(path)?;
            atlas::check_resumable(&t, family, &preds, &thresholds, &spec)?;
            if t.next_index > end {
                return Err(CliError::Usage(format!(
                    "checkpoint already covers {} raw indices, beyond --points {}",
                    t.next_index - spec.start_index,
                    a.points
                )));
            }
            t
        }
        _ => AtomTally::new(family, &preds, spec, thresholds),
    };
    let slice = if a.checkpoint.is_some() { a.checkpoint_every.max(1) } else { u64::MAX };
    while t.next_index < end {
        let budget = (end - t.next_index).min(slice);
        atlas::extend(&mut t, budget, workers)?;
        if let Some(path) = &a.checkpoint {
            atlas::checkpoint_save(&t, path)?;
            writeln!(stderr, "checkpoint: {} of {} raw indices", t.next_index - spec.start_index, a.points)?;
        }
    }

    use Predicate::*;
    let atoms_over = if [P, S, Ppt].iter().all(|p| preds.contains(p)) {
        vec![P, S, Ppt]
    } else {
        preds.clone()
    };
    let report = EstimateReport::new(&t, &atoms_over)?;
    emit(
        &a.output,
        Format::Json,
        stdout,
        || Ok(serde_json::to_string_pretty(&report)?),
        |buf| Ok(atlas::write_csv(&report.rows, buf)?),
    )?;
    let worst = report
        .rows
        .iter()
        .filter(|r| r.kind != RefKind::Estimate)
        .map(|r| r.z.abs())
        .fold(0.0, f64::max);
    writeln!(
        stderr,
        "{} feasible of {} raw (rate {:.6e}), largest closed-form |z| = {worst:.3}",
        report.feasible_total, report.raw_total, report.acceptance_rate
    )?;
    if !atlas::closed_forms_within(&report.rows, Z_MAX) {
        let bad: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.kind != RefKind::Estimate && r.z.abs() >= Z_MAX)
            .map(|r| format!("{} (z = {:.2})", r.name, r.z))
            .collect();
        return Err(CliError::Inconsistent(format!(
            "estimates off their closed forms by |z| >= {Z_MAX}: {}",
            bad.join(", ")
        )));
    }
    Ok(())
}

pub fn classify(a: &ClassifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let family = a.family.family();
    let q = QPoint::parse(family, &a.q)?;
    let thresholds = a.family.thresholds()?;
    let mode = match a.mode {
        ModeArg::Closed => Mode::Closed,
        ModeArg::Oracle => Mode::Oracle,
        ModeArg::Both => Mode::Both,
    };
    let profile = criteria::profile(&q, &thresholds, mode)?;
    emit(
        &a.output,
        Format::Json,
        stdout,
        || Ok(serde_json::to_string_pretty(&profile)?),
        |buf| {
            let cloud = PointCloud {
                family,
                rows: vec![PointRow::new(0, &q, &thresholds)?],
                raw_scanned: 0,
            };
            Ok(cloud.write_csv(buf)?)
        },
    )
}

fn with_clusters(
    value: serde_json::Value,
    cloud: &PointCloud,
    radius: Option<f64>,
    stderr: &mut dyn Write,
) -> Result<serde_json::Value, CliError> {
    let Some(r) = radius else { return Ok(value) };
    let sizes = cloud.cluster_sizes(r);
    writeln!(stderr, "{} clusters at radius {r}: sizes {:?}", sizes.len(), sizes)?;
    let mut value = value;
    if let Some(map) = value.as_object_mut() {
        map.insert("clusters".into(), serde_json::json!({ "radius": r, "sizes": sizes }));
    }
    Ok(value)
}

pub fn cloud(a: &CloudArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let family = a.family.family();
    let thresholds = a.family.thresholds()?;
    let spec = a.sequence.spec(family)?;
    if a.pocu {
        require_qutrit(family, "--pocu")?;
        let keep = usize::try_from(a.keep).map_err(|_| CliError::Usage("--keep too large".into()))?;
        let report = geometry::pocu_candidates(a.count, keep, &thresholds, spec, a.max_raw, workers(a.workers))?;
        writeln!(
            stderr,
            "{} candidates, probability {:.9} over {} feasible, min s = {:.9} at index {}",
            report.candidates, report.probability, report.feasible, report.min_s, report.argmin_index
        )?;
        let value = with_clusters(serde_json::to_value(&report)?, &report.cloud, a.clusters, stderr)?;
        return emit(
            &a.output,
            Format::Csv,
            stdout,
            || Ok(serde_json::to_string_pretty(&value)?),
            |buf| Ok(report.cloud.write_csv(buf)?),
        );
    }
    let expr = BooleanExpr::parse(a.expr.as_deref().expect("clap requires --expr without --pocu"))?;
    let count = usize::try_from(a.count).map_err(|_| CliError::Usage("--count too large".into()))?;
    let cloud = geometry::region_cloud(&expr, count, family, &thresholds, spec, a.max_raw)?;
    if cloud.len() < count {
        writeln!(stderr, "only {} of {count} rows within {} raw indices", cloud.len(), cloud.raw_scanned)?;
    }
    let value = with_clusters(serde_json::to_value(&cloud)?, &cloud, a.clusters, stderr)?;
    emit(
        &a.output,
        Format::Csv,
        stdout,
        || Ok(serde_json::to_string_pretty(&value)?),
        |buf| Ok(cloud.write_csv(buf)?),
    )
}

pub fn surface(a: &SurfaceArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let family = a.family.family();
    require_qutrit(family, "surface")?;
    let thresholds = a.family.thresholds()?;
    let constraint: Constraint = a.constraint.into();
    let target = a.target.unwrap_or(match constraint {
        Constraint::S => thresholds.s,
        Constraint::P => thresholds.p,
    });
    let count = usize::try_from(a.count).map_err(|_| CliError::Usage("--count too large".into()))?;
    let report = geometry::saturation_points(constraint, target, a.locus.into(), count, &thresholds, a.max_seeds)?;
    writeln!(
        stderr,
        "{} points from {} seeds, largest residual {:.3e}",
        report.cloud.len(),
        report.seeds,
        report.max_residual
    )?;
    emit(
        &a.output,
        Format::Csv,
        stdout,
        || Ok(serde_json::to_string_pretty(&report)?),
        |buf| {
            let mut plain = Vec::new();
            report.cloud.write_csv(&mut plain)?;
            let text = String::from_utf8(plain).expect("CSV output is UTF-8");
            let mut lines = text.lines();
            if let Some(header) = lines.next() {
                writeln!(buf, "{header},residual")?;
            }
            for (line, row) in lines.zip(&report.cloud.rows) {
                let residual = match constraint {
                    Constraint::S => row.s - target,
                    Constraint::P => row.p / target - 1.0,
                };
                writeln!(buf, "{line},{residual:.16e}")?;
            }
            Ok(())
        },
    )
}

pub fn bsa(a: &BsaArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let family = a.family.family();
    require_qutrit(family, "bsa")?;
    let q = QPoint::parse(family, &a.q)?;
    let thresholds = a.family.thresholds()?;
    let opts = BsaOptions {
        restarts: a.restarts,
        ..Default::default()
    };
    let r = liqiao::bsa(&q, &thresholds, &opts)?;
    emit(
        &a.output,
        Format::Json,
        stdout,
        || Ok(serde_json::to_string_pretty(&r)?),
        |buf| {
            writeln!(buf, "B,residual,ent_Q1,ent_Q2,ent_Q3,sep_Q1,sep_Q2,sep_Q3")?;
            let cells: Vec<String> = [r.b, r.residual]
                .iter()
                .chain(&r.q_ent)
                .chain(&r.q_sep)
                .map(|x| format!("{x:.16e}"))
                .collect();
            writeln!(buf, "{}", cells.join(","))?;
            Ok(())
        },
    )
}

pub fn verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let q = QPoint::parse(Family::Qutrit, &a.q)?;
    let cert = if a.diagonal {
        liqiao::diagonal_certificate(&q).ok_or_else(|| CliError::Usage("--diagonal needs Q1 = Q3".into()))?
    } else {
        let path = a.certificate.as_ref().expect("clap requires --certificate without --diagonal");
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Certificate::from_json(&text)?
    };
    if cert.q.coords().iter().zip(q.coords()).any(|(x, y)| (x - y).abs() > 1e-15) {
        return Err(CliError::Usage(format!("certificate is for {}, not {q}", cert.q)));
    }
    if let Some(path) = &a.write_certificate {
        fs::write(path, cert.to_json() + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let report = liqiao::verify_decomposition(&q, &cert)?;
    emit(
        &a.output,
        Format::Json,
        stdout,
        || Ok(serde_json::to_string_pretty(&report)?),
        |buf| {
            writeln!(buf, "reconstruction_error,min_factor_eigenvalue,negative_terms,valid")?;
            let neg: Vec<String> = report.negative_terms.iter().map(|m| m.to_string()).collect();
            writeln!(
                buf,
                "{:e},{:e},{},{}",
                report.reconstruction_error,
                report.min_factor_eigenvalue,
                neg.join(";"),
                report.valid
            )?;
            Ok(())
        },
    )?;
    if report.valid {
        Ok(())
    } else {
        Err(CliError::Inconsistent(format!(
            "certificate rejected: reconstruction error {:e}, negative terms {:?}",
            report.reconstruction_error, report.negative_terms
        )))
    }
}

pub fn reference(a: &ReferenceArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let entries: Vec<&atlas::ExactReference> = match &a.name {
        Some(name) => vec![atlas::exact_reference(name)?],
        None => atlas::reference_table()
            .iter()
            .filter(|r| a.dim.is_none_or(|d| r.family.local_dim() == d as usize))
            .collect(),
    };
    emit(
        &a.output,
        Format::Json,
        stdout,
        || Ok(serde_json::to_string_pretty(&entries)?),
        |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["name", "family_dim", "set", "expr", "kind", "value", "formula", "printed", "paper_estimate"])?;
            for r in &entries {
                let kind = serde_json::to_value(r.kind)?;
                w.write_record([
                    r.name.to_string(),
                    r.family.local_dim().to_string(),
                    r.set.to_string(),
                    r.expr.to_string(),
                    kind.as_str().unwrap_or_default().to_string(),
                    format!("{:.16e}", r.value),
                    r.formula.to_string(),
                    r.printed.unwrap_or_default().to_string(),
                    r.paper_estimate.map(|v| format!("{v:e}")).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
            Ok(())
        },
    )
}

pub fn oracle_check(a: &OracleCheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let family = a.family.family();
    let thresholds = a.family.thresholds()?;
    let spec = a.sequence.spec(family)?;
    let sweep = crosscheck::oracle_sweep(family, &thresholds, spec, a.points, a.max_raw)?;
    emit(
        &a.output,
        Format::Json,
        stdout,
        || Ok(serde_json::to_string_pretty(&sweep)?),
        |buf| {
            writeln!(buf, "metric,value")?;
            writeln!(buf, "points,{}", sweep.points)?;
            writeln!(buf, "ppt_disagreements,{}", sweep.ppt.disagreements)?;
            writeln!(buf, "ppt_in_band,{}", sweep.ppt.in_band)?;
            writeln!(buf, "s_max_rel,{:e}", sweep.s_max_rel)?;
            writeln!(buf, "p_max_rel,{:e}", sweep.p_max_rel)?;
            for (name, t) in [("ccnr_vs_s", &sweep.ccnr_vs_s), ("ccnr_vs_trace_norm", &sweep.ccnr_vs_trace_norm)] {
                if let Some(t) = t {
                    writeln!(buf, "{name}_disagreements,{}", t.disagreements)?;
                    writeln!(buf, "{name}_in_band,{}", t.in_band)?;
                }
            }
            Ok(())
        },
    )?;
    if sweep.points < a.points {
        writeln!(stderr, "only {} of {} feasible points within {} raw indices", sweep.points, a.points, sweep.raw_scanned)?;
    }
    if sweep.disagreements() > 0 || sweep.s_max_rel > a.tolerance || sweep.p_max_rel > a.tolerance {
        return Err(CliError::Inconsistent(format!(
            "{} verdict disagreements, s max rel {:e}, p max rel {:e}",
            sweep.disagreements(),
            sweep.s_max_rel,
            sweep.p_max_rel
        )));
    }
    Ok(())
}
