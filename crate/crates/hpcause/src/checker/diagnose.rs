//! Diagnosis of AC3 failures.
//!
//! When a candidate cause is not minimal, some variable `X_n` is
//! padding: the others manage without flipping it. The interesting
//! question is what role `X_n` plays in the worlds that defeat φ, and
//! it has three answers, named NMC1 through NMC3:
//!
//! * **NMC1**: the remaining variables defeat φ only if `X_n` is held
//!   at its claimed value by the witness set. `X_n` matters, but as a
//!   frozen bystander, not as something to flip.
//! * **NMC2**: the remaining variables defeat φ with `X_n` frozen and
//!   also with `X_n` left to its own equation. `X_n` is irrelevant.
//! * **NMC3**: the defeat works only when `X_n` is left alone; its
//!   equation must be free to react to the other flips.
//!
//! The probes below decide, for each cause variable, whether a witness
//! set containing it (at its claimed value) and one excluding it
//! exist. Both are exhaustive searches guarded by the brute-force
//! budget, so diagnosis is meant for causes of modest size.

use std::fmt;

use crate::formula::VarId;

use super::brute::{defeats_phi, freeze, Combinations};
use super::{brute, sat, CausalQuery, CheckError, CheckOptions, Effort, Prepared, Strategy};

/// How a padding variable relates to the witness sets that expose it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NmcCondition {
    /// Witness sets exist only with the variable frozen in them.
    Nmc1,
    /// Witness sets exist with and without the variable.
    Nmc2,
    /// Witness sets exist only without the variable.
    Nmc3,
}

impl NmcCondition {
    pub fn describe(self) -> &'static str {
        match self {
            NmcCondition::Nmc1 => "defeats the effect only when frozen in the witness set",
            NmcCondition::Nmc2 => "defeats the effect whether frozen or left to its equation",
            NmcCondition::Nmc3 => "defeats the effect only when left to its equation",
        }
    }
}

impl fmt::Display for NmcCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            NmcCondition::Nmc1 => "NMC1",
            NmcCondition::Nmc2 => "NMC2",
            NmcCondition::Nmc3 => "NMC3",
        };
        f.write_str(label)
    }
}

/// One padding variable together with the evidence against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonMinimalOffender {
    pub variable: VarId,
    /// The value claimed for it in the original cause.
    pub claimed: bool,
    pub condition: NmcCondition,
    /// The strict subset (the cause minus this variable) that already
    /// satisfies AC1 and AC2.
    pub witness_subset: Vec<(VarId, bool)>,
}

/// Offenders found in a non-minimal cause, in cause order.
///
/// May be empty: minimality can also fail through subsets that leave
/// out several variables at once, which these single-variable probes
/// do not cover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NonMinimalityReport {
    pub offenders: Vec<NonMinimalOffender>,
}

impl fmt::Display for NonMinimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offenders.is_empty() {
            return write!(f, "not minimal, but no single variable is padding on its own");
        }
        for (i, o) in self.offenders.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let subset: Vec<String> = o
                .witness_subset
                .iter()
                .map(|(v, x)| format!("{v}={}", *x as u8))
                .collect();
            write!(
                f,
                "{}={} is padding ({}): {{{}}} already satisfies AC1 and AC2; it {}",
                o.variable,
                o.claimed as u8,
                o.condition,
                subset.join(", "),
                o.condition.describe()
            )?;
        }
        Ok(())
    }
}

/// Searches for a witness set for `remaining` (flipped) that defeats
/// φ, drawing extra frozen variables from outside the original cause.
/// `pinned` additionally freezes the removed variable at a fixed
/// value in every candidate set; `None` keeps it out entirely.
fn exists_witness(
    prep: &Prepared,
    remaining: &[(VarId, bool)],
    pinned: Option<(VarId, bool)>,
    effort: &mut Effort,
) -> Result<bool, CheckError> {
    let mut candidates: Vec<VarId> = prep
        .query
        .model()
        .endogenous()
        .filter(|v| prep.query.cause_value(v).is_none())
        .cloned()
        .collect();
    candidates.sort();

    for k in 0..=candidates.len() {
        let mut subsets = Combinations::new(candidates.len(), k);
        while let Some(indices) = subsets.next() {
            effort.tick()?;
            let mut witness = freeze(&candidates, indices, &prep.evaluation);
            if let Some(pin) = &pinned {
                witness.push(pin.clone());
            }
            if defeats_phi(prep, remaining, &witness)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub(crate) fn diagnose(prep: &Prepared, effort: &mut Effort) -> Result<NonMinimalityReport, CheckError> {
    let cause = prep.query.cause();
    let mut offenders = Vec::new();
    if !prep.occurred {
        return Ok(NonMinimalityReport { offenders });
    }
    for (n, (variable, claimed)) in cause.iter().enumerate() {
        let remaining: Vec<(VarId, bool)> = cause
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != n)
            .map(|(_, pair)| pair.clone())
            .collect();
        // AC1 for the subset: its claimed values must be the actual ones.
        if remaining
            .iter()
            .any(|(x, v)| prep.evaluation.get(x) != Some(*v))
        {
            continue;
        }
        let frozen = exists_witness(
            prep,
            &remaining,
            Some((variable.clone(), *claimed)),
            effort,
        )?;
        let free = exists_witness(prep, &remaining, None, effort)?;
        let condition = match (frozen, free) {
            (true, false) => NmcCondition::Nmc1,
            (true, true) => NmcCondition::Nmc2,
            (false, true) => NmcCondition::Nmc3,
            (false, false) => continue,
        };
        offenders.push(NonMinimalOffender {
            variable: variable.clone(),
            claimed: *claimed,
            condition,
            witness_subset: remaining,
        });
    }
    Ok(NonMinimalityReport { offenders })
}

/// Classifies every padding variable of a non-minimal cause.
///
/// Fails with [`CheckError::Ac3Holds`] when the cause is in fact
/// minimal (decided with the query's own strategy). Singleton causes
/// are always minimal.
pub fn diagnose_non_minimal(
    query: &CausalQuery,
    opts: &CheckOptions,
) -> Result<NonMinimalityReport, CheckError> {
    let prep = Prepared::new(query)?;
    let mut effort = Effort::new(opts);
    let ac3 = match query.strategy() {
        Strategy::BruteForce => brute::ac3_search(&prep, &mut effort)?,
        _ => sat::ac3_enumerate(&prep, &mut effort)?,
    };
    if ac3 {
        return Err(CheckError::Ac3Holds);
    }
    diagnose(&prep, &mut effort)
}
