//! Batch verification of the identity catalog.
//!
//! Each record is checked independently — the work items are embarrassingly
//! parallel — so the driver runs them through [`crate::exec::map_collect`]
//! under either execution mode and then sorts the reports by record id for
//! deterministic output.  Deliberate single-slot corruptions of a record
//! serve as negative controls: a verifier that accepts a record must reject
//! the same record with its accessory parameter, singular location, or an
//! exponent shifted by one.

use crate::catalog::{ParamExprs, TransformationRecord};
use crate::exec::{map_collect, ExecMode};
use crate::expr::Expr;
use crate::pullback::{
    accessory_check, verify_identity, CatalogIdentity, IdentityReport, VerifyOptions,
};

/// Outcome of verifying one catalog record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordOutcome {
    /// All sampled parameter tuples matched through the requested order.
    Verified(IdentityReport),
    /// A coefficient mismatch was found; the report pinpoints it.
    Mismatch(IdentityReport),
    /// The record stores only signature data and has nothing to verify.
    SignatureOnly,
    /// The verifier could not run (sampling exhausted, field too small...).
    Failed(String),
}

impl RecordOutcome {
    /// True when the record does not witness a broken identity: verified
    /// records and signature-only records pass, mismatches and engine
    /// failures do not.
    pub fn passed(&self) -> bool {
        matches!(self, RecordOutcome::Verified(_) | RecordOutcome::SignatureOnly)
    }

    pub fn describe(&self) -> String {
        match self {
            RecordOutcome::Verified(rep) => format!(
                "PASS ({}, order {}, {} samples{})",
                rep.field,
                rep.order,
                rep.samples_run,
                if rep.resamples > 0 {
                    format!(", {} resamples", rep.resamples)
                } else {
                    String::new()
                }
            ),
            RecordOutcome::Mismatch(rep) => match &rep.first_mismatch {
                Some(m) => format!(
                    "FAIL ({}, sample {}, coefficient {})",
                    rep.field, m.sample_index, m.coefficient_index
                ),
                None => format!("FAIL ({})", rep.field),
            },
            RecordOutcome::SignatureOnly => "SKIP (signature-only)".to_string(),
            RecordOutcome::Failed(why) => format!("ERROR ({why})"),
        }
    }
}

/// Per-record outcomes, sorted by record id.
#[derive(Debug, Clone)]
pub struct BatchReport {
    pub outcomes: Vec<(String, RecordOutcome)>,
}

impl BatchReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|(_, o)| o.passed())
    }

    /// Number of records positively verified (signature-only ones excluded).
    pub fn verified_count(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|(_, o)| matches!(o, RecordOutcome::Verified(_)))
            .count()
    }

    /// One `id: outcome` line per record.
    pub fn lines(&self) -> Vec<String> {
        self.outcomes
            .iter()
            .map(|(id, o)| format!("{id}: {}", o.describe()))
            .collect()
    }
}

/// Verify every record of the catalog under the given options.
pub fn verify_all(
    records: &[TransformationRecord],
    opts: &VerifyOptions,
    mode: ExecMode,
) -> BatchReport {
    let mut outcomes = map_collect(mode, records, |rec| {
        if !rec.is_verifiable() {
            return (rec.id.clone(), RecordOutcome::SignatureOnly);
        }
        match verify_identity(&CatalogIdentity::Stored(rec.clone()), opts) {
            Ok(rep) if rep.passed => (rec.id.clone(), RecordOutcome::Verified(rep)),
            Ok(rep) => (rec.id.clone(), RecordOutcome::Mismatch(rep)),
            Err(e) => (rec.id.clone(), RecordOutcome::Failed(e.to_string())),
        }
    });
    outcomes.sort_by(|a, b| a.0.cmp(&b.0));
    BatchReport { outcomes }
}

/// Check the accessory-parameter oracle against every record with a Heun
/// target: the stored accessory parameter must equal
/// `c*t*(mu + gamma_1*lambda)` computed from first-order jets.  Records
/// whose target solution is evaluated at a composed argument are excluded:
/// their stored parameters refer to the composed covering, not to the raw
/// jets this oracle reads.
pub fn accessory_all(
    records: &[TransformationRecord],
    opts: &VerifyOptions,
    mode: ExecMode,
) -> Vec<(String, Result<bool, String>)> {
    let targets: Vec<TransformationRecord> = records
        .iter()
        .filter(|rec| {
            rec.is_verifiable()
                && rec.target_arg.is_none()
                && rec.target.as_ref().map(|t| t.is_heun()).unwrap_or(false)
        })
        .cloned()
        .collect();
    let mut out = map_collect(mode, &targets, |rec| {
        (
            rec.id.clone(),
            accessory_check(rec, opts).map_err(|e| e.to_string()),
        )
    });
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// A deliberate single-slot corruption used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Shift the target's accessory parameter by one.
    AccessoryShift,
    /// Shift the target's movable singular location by one.
    SingularityShift,
    /// Shift the target's first exponent parameter by one.
    ExponentShift,
}

impl Mutation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mutation::AccessoryShift => "accessory+1",
            Mutation::SingularityShift => "singularity+1",
            Mutation::ExponentShift => "exponent+1",
        }
    }
}

/// Apply the mutation to a copy of the record, or `None` when the record
/// has no slot of that kind (accessory and singular location exist only on
/// Heun targets).
pub fn mutated_record(
    rec: &TransformationRecord,
    which: Mutation,
) -> Option<TransformationRecord> {
    if !rec.is_verifiable() {
        return None;
    }
    let mut out = rec.clone();
    let one = Expr::num_i64(1);
    let target = out.target.as_mut()?;
    match (which, target) {
        (Mutation::AccessoryShift, ParamExprs::Heun { q, .. }) => {
            *q = q.clone().add(one);
        }
        (Mutation::SingularityShift, ParamExprs::Heun { t, .. }) => {
            *t = t.clone().add(one);
        }
        (Mutation::ExponentShift, ParamExprs::Heun { a, .. }) => {
            *a = a.clone().add(one);
        }
        (Mutation::ExponentShift, ParamExprs::Gauss { a, .. }) => {
            *a = a.clone().add(one);
        }
        _ => return None,
    }
    out.id = format!("{}-mutated-{}", rec.id, which.as_str());
    Some(out)
}

/// Verify a mutated copy of the record; `Some(true)` means the corruption
/// was rejected — either a coefficient mismatch was found or the corrupted
/// family could not even be sampled (for example a singular location pushed
/// onto 0 or 1 degenerates every Heun tuple).  The unmutated record passing
/// is the companion positive control.
pub fn mutation_detected(
    rec: &TransformationRecord,
    which: Mutation,
    opts: &VerifyOptions,
) -> Option<bool> {
    let mutated = mutated_record(rec, which)?;
    match verify_identity(&CatalogIdentity::Stored(mutated), opts) {
        Ok(rep) => Some(!rep.passed),
        Err(_) => Some(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;
    use crate::pullback::FieldChoice;

    fn quick_opts() -> VerifyOptions {
        VerifyOptions {
            order: 8,
            samples: 2,
            seed: 7,
            height: 20,
            field: FieldChoice::Auto,
        }
    }

    #[test]
    fn batch_passes_and_is_sorted() {
        let records = builtin_catalog();
        let report = verify_all(&records, &quick_opts(), ExecMode::Sequential);
        assert!(report.all_passed(), "lines:\n{}", report.lines().join("\n"));
        assert!(report.verified_count() >= 24);
        let ids: Vec<&String> = report.outcomes.iter().map(|(id, _)| id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn both_execution_modes_agree() {
        let records: Vec<_> = builtin_catalog().into_iter().take(6).collect();
        let seq = verify_all(&records, &quick_opts(), ExecMode::Sequential);
        let par = verify_all(&records, &quick_opts(), ExecMode::Parallel);
        assert_eq!(seq.lines(), par.lines());
    }

    #[test]
    fn accessory_oracle_covers_every_heun_target() {
        let records = builtin_catalog();
        let checks = accessory_all(&records, &quick_opts(), ExecMode::Sequential);
        assert!(!checks.is_empty());
        for (id, result) in checks {
            assert_eq!(result, Ok(true), "accessory mismatch on {id}");
        }
    }

    #[test]
    fn mutations_are_detected() {
        let records = builtin_catalog();
        let rec = records
            .iter()
            .find(|r| r.is_verifiable() && r.target.as_ref().unwrap().is_heun())
            .expect("catalog has a Heun-target record");
        let original = verify_identity(&CatalogIdentity::Stored(rec.clone()), &quick_opts())
            .expect("original record verifies");
        assert!(original.passed, "positive control failed on {}", rec.id);
        for which in [
            Mutation::AccessoryShift,
            Mutation::SingularityShift,
            Mutation::ExponentShift,
        ] {
            assert_eq!(
                mutation_detected(rec, which, &quick_opts()),
                Some(true),
                "mutation {} slipped through on {}",
                which.as_str(),
                rec.id
            );
        }
    }

    #[test]
    fn gauss_target_mutation_support() {
        let records = builtin_catalog();
        let rec = records
            .iter()
            .find(|r| {
                r.is_verifiable() && !r.target.as_ref().unwrap().is_heun()
            })
            .expect("catalog has a hypergeometric-target record");
        assert!(mutated_record(rec, Mutation::AccessoryShift).is_none());
        assert_eq!(
            mutation_detected(rec, Mutation::ExponentShift, &quick_opts()),
            Some(true)
        );
    }
}
