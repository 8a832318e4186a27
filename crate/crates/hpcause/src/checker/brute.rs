//! Brute-force decision procedures: enumerate candidate witness sets
//! (AC2) and cause subsets (AC3) directly against the model.
//!
//! Enumeration order is deterministic: smallest sets first, ties broken
//! by variable name. The first witness found is therefore a
//! minimum-cardinality one. Every candidate tried costs one unit of
//! budget, so worst-case runs on large models fail fast with
//! [`CheckError::BudgetExceeded`](super::CheckError::BudgetExceeded)
//! instead of hanging.

use crate::formula::VarId;
use crate::model::Evaluation;

use super::{CausalQuery, CheckError, CheckOptions, Effort, Prepared};

/// Streams the `k`-element subsets of `0..n` in lexicographic order.
///
/// Not an [`Iterator`]: `next` lends a view into internal state, which
/// is all a `while let` loop needs.
pub(crate) struct Combinations {
    n: usize,
    k: usize,
    indices: Vec<usize>,
    state: State,
}

enum State {
    Fresh,
    Running,
    Done,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            k,
            indices: (0..k).collect(),
            state: if k <= n { State::Fresh } else { State::Done },
        }
    }

    pub(crate) fn next(&mut self) -> Option<&[usize]> {
        match self.state {
            State::Fresh => {
                self.state = State::Running;
                Some(&self.indices)
            }
            State::Running => {
                // Rightmost index that can still move right.
                let i = (0..self.k).rev().find(|&i| self.indices[i] < self.n - self.k + i)?;
                self.indices[i] += 1;
                for j in i + 1..self.k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                Some(&self.indices)
            }
            State::Done => None,
        }
    }
}

/// Whether `X = x` and φ actually hold under the query's context.
pub fn check_ac1(query: &CausalQuery) -> Result<bool, CheckError> {
    Ok(Prepared::new(query)?.ac1())
}

/// Searches for a witness set by trying every candidate, smallest
/// first. Returns the witness with its frozen values, or `None` when
/// AC2 fails.
pub fn check_ac2_brute(
    query: &CausalQuery,
    opts: &CheckOptions,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    ac2_search(&Prepared::new(query)?, &mut Effort::new(opts))
}

/// Checks that no nonempty strict subset of the cause, with its claimed
/// values, already satisfies AC1 and AC2.
pub fn check_ac3_brute(query: &CausalQuery, opts: &CheckOptions) -> Result<bool, CheckError> {
    ac3_search(&Prepared::new(query)?, &mut Effort::new(opts))
}

/// Does flipping `cause` while freezing `witness` at the given values
/// make φ fail?
pub(super) fn defeats_phi(
    prep: &Prepared,
    cause: &[(VarId, bool)],
    witness: &[(VarId, bool)],
) -> Result<bool, CheckError> {
    let flipped = cause.iter().map(|(x, v)| (x.clone(), !v));
    let frozen = witness.iter().cloned();
    let intervened = prep.query.model().intervene(flipped.chain(frozen))?;
    let outcome = intervened.evaluate(prep.query.context())?;
    Ok(!prep.query.phi().evaluate(outcome.as_assignment())?)
}

pub(super) fn freeze(
    candidates: &[VarId],
    indices: &[usize],
    eval: &Evaluation,
) -> Vec<(VarId, bool)> {
    indices
        .iter()
        .map(|&i| {
            let v = candidates[i].clone();
            let value = eval.get(&v).expect("candidates come from the model");
            (v, value)
        })
        .collect()
}

pub(crate) fn ac2_search(
    prep: &Prepared,
    effort: &mut Effort,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    ac2_for_cause(prep, prep.query.cause(), effort)
}

/// The AC2 search for an arbitrary cause vector (AC3 reuses it on
/// subsets). Witness candidates are the endogenous variables outside
/// the cause, frozen at their values under the actual context.
fn ac2_for_cause(
    prep: &Prepared,
    cause: &[(VarId, bool)],
    effort: &mut Effort,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    let mut candidates: Vec<VarId> = prep
        .query
        .model()
        .endogenous()
        .filter(|v| !cause.iter().any(|(x, _)| x == *v))
        .cloned()
        .collect();
    candidates.sort();

    for k in 0..=candidates.len() {
        let mut subsets = Combinations::new(candidates.len(), k);
        while let Some(indices) = subsets.next() {
            effort.tick()?;
            let witness = freeze(&candidates, indices, &prep.evaluation);
            if defeats_phi(prep, cause, &witness)? {
                return Ok(Some(witness));
            }
        }
    }
    Ok(None)
}

pub(crate) fn ac3_search(prep: &Prepared, effort: &mut Effort) -> Result<bool, CheckError> {
    let cause = prep.query.cause();
    if cause.len() == 1 {
        return Ok(true);
    }
    // AC1 for a subset: its variables hold their claimed values and φ
    // occurred. The φ half is shared by every subset.
    if !prep.occurred {
        return Ok(true);
    }
    for k in 1..cause.len() {
        let mut subsets = Combinations::new(cause.len(), k);
        while let Some(indices) = subsets.next() {
            effort.tick()?;
            let sub: Vec<(VarId, bool)> = indices.iter().map(|&i| cause[i].clone()).collect();
            let sub_ac1 = sub
                .iter()
                .all(|(x, claimed)| prep.evaluation.get(x) == Some(*claimed));
            if sub_ac1 && ac2_for_cause(prep, &sub, effort)?.is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::tests::bottle_shatters;
    use crate::checker::Strategy;
    use crate::model::tests::{both_throw, rock_throwing, v};

    fn suzy() -> CausalQuery<'static> {
        static MODEL: std::sync::OnceLock<crate::model::CausalModel> = std::sync::OnceLock::new();
        let model = MODEL.get_or_init(rock_throwing);
        CausalQuery::new(
            model,
            both_throw(),
            vec![(v("ST"), true)],
            bottle_shatters(),
            Strategy::BruteForce,
        )
        .unwrap()
    }

    #[test]
    fn combinations_stream_in_lexicographic_order() {
        let mut all = Vec::new();
        let mut c = Combinations::new(4, 2);
        while let Some(ix) = c.next() {
            all.push(ix.to_vec());
        }
        assert_eq!(
            all,
            [vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn combinations_edges() {
        let mut empty = Combinations::new(3, 0);
        assert_eq!(empty.next(), Some(&[][..]));
        assert_eq!(empty.next(), None);

        let mut full = Combinations::new(3, 3);
        assert_eq!(full.next(), Some(&[0, 1, 2][..]));
        assert_eq!(full.next(), None);

        let mut overshoot = Combinations::new(2, 3);
        assert_eq!(overshoot.next(), None);

        let mut ten = Combinations::new(5, 2);
        let mut count = 0;
        while ten.next().is_some() {
            count += 1;
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn ac1_checks_claimed_values_and_phi() {
        assert!(check_ac1(&suzy()).unwrap());

        let model = rock_throwing();
        let wrong_claim = CausalQuery::new(
            &model,
            both_throw(),
            vec![(v("ST"), false)],
            bottle_shatters(),
            Strategy::BruteForce,
        )
        .unwrap();
        assert!(!check_ac1(&wrong_claim).unwrap());

        let phi_false = CausalQuery::new(
            &model,
            both_throw(),
            vec![(v("ST"), true)],
            crate::formula::literal_of(v("BH"), true),
            Strategy::BruteForce,
        )
        .unwrap();
        assert!(!check_ac1(&phi_false).unwrap());
    }

    #[test]
    fn ac2_finds_the_smallest_witness_for_suzy() {
        let w = check_ac2_brute(&suzy(), &CheckOptions::default()).unwrap();
        assert_eq!(w, Some(vec![(v("BH"), false)]));
    }

    #[test]
    fn ac2_rejects_billy() {
        let model = rock_throwing();
        let q = CausalQuery::new(
            &model,
            both_throw(),
            vec![(v("BT"), true)],
            bottle_shatters(),
            Strategy::BruteForce,
        )
        .unwrap();
        assert_eq!(check_ac2_brute(&q, &CheckOptions::default()).unwrap(), None);
    }

    #[test]
    fn ac3_rejects_the_padded_pair() {
        let model = rock_throwing();
        let q = CausalQuery::new(
            &model,
            both_throw(),
            vec![(v("ST"), true), (v("BT"), true)],
            bottle_shatters(),
            Strategy::BruteForce,
        )
        .unwrap();
        assert!(!check_ac3_brute(&q, &CheckOptions::default()).unwrap());
    }

    #[test]
    fn ac3_is_vacuous_for_singletons() {
        assert!(check_ac3_brute(&suzy(), &CheckOptions::default()).unwrap());
    }

    /// Suzy's witness turns up on the second trial, so a budget of one
    /// is exhausted just before it.
    #[test]
    fn budget_cuts_off_the_search() {
        let opts = CheckOptions { brute_budget: Some(1), ..CheckOptions::default() };
        let err = check_ac2_brute(&suzy(), &opts);
        assert!(matches!(err, Err(CheckError::BudgetExceeded(1))));

        let opts = CheckOptions { brute_budget: Some(2), ..CheckOptions::default() };
        let w = check_ac2_brute(&suzy(), &opts).unwrap();
        assert_eq!(w, Some(vec![(v("BH"), false)]));
    }
}
