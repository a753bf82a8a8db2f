//! Averaging of representations over instances that share an event.

use std::collections::BTreeMap;

use crate::autodiff::{Tape, Var};
use crate::error::Result;

/// Groups positions by event label. Groups are ordered by label; positions
/// within a group keep their input order.
pub fn group_by_event<S: AsRef<str>>(events: &[S]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        groups.entry(e.as_ref()).or_default().push(i);
    }
    groups
}

/// Replaces each representation by the mean over all representations with the
/// same event label.
pub fn event_mean_pool<R: AsRef<[f64]>, S: AsRef<str>>(reps: &[R], events: &[S]) -> Vec<Vec<f64>> {
    assert_eq!(reps.len(), events.len(), "one event label per representation");
    let mut out = vec![Vec::new(); reps.len()];
    for members in group_by_event(events).values() {
        let dim = reps[members[0]].as_ref().len();
        let mut mean = vec![0.0; dim];
        for &i in members {
            for (m, v) in mean.iter_mut().zip(reps[i].as_ref()) {
                *m += v;
            }
        }
        let n = members.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        for &i in members {
            out[i] = mean.clone();
        }
    }
    out
}

/// Tape version of [`event_mean_pool`]: every member of an event receives the
/// same pooled node.
pub fn pool_by_event<S: AsRef<str>>(tape: &mut Tape, reps: &[Var], events: &[S]) -> Result<Vec<Var>> {
    assert_eq!(reps.len(), events.len(), "one event label per representation");
    let mut out = vec![None; reps.len()];
    for members in group_by_event(events).values() {
        let pooled = if members.len() == 1 {
            reps[members[0]]
        } else {
            let parts: Vec<Var> = members.iter().map(|&i| reps[i]).collect();
            let stacked = tape.concat_rows(&parts)?;
            tape.col_mean(stacked)?
        };
        for &i in members {
            out[i] = Some(pooled);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every index grouped")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_event_hand_mean() {
        let out = event_mean_pool(&[vec![1.0, 3.0], vec![3.0, 5.0]], &["e", "e"]);
        assert_eq!(out, vec![vec![2.0, 4.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn singletons_are_identity() {
        let reps = vec![vec![1.0, -1.0], vec![0.5, 2.0], vec![7.0, 0.0]];
        assert_eq!(event_mean_pool(&reps, &["a", "b", "c"]), reps);
    }

    #[test]
    fn random_groups_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let events: Vec<String> = (0..23).map(|_| format!("e{}", rng.random_range(0..3))).collect();
        let reps: Vec<Vec<f64>> = (0..23)
            .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let out = event_mean_pool(&reps, &events);
        for (i, e) in events.iter().enumerate() {
            let members: Vec<&Vec<f64>> = reps.iter().zip(&events).filter(|(_, f)| *f == e).map(|(r, _)| r).collect();
            for c in 0..5 {
                let expect = members.iter().map(|r| r[c]).sum::<f64>() / members.len() as f64;
                assert!((out[i][c] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tape_pool_matches_plain_and_shares_nodes() {
        let reps = vec![vec![1.0, 3.0], vec![0.0, 1.0], vec![3.0, 5.0]];
        let events = ["x", "y", "x"];
        let mut tape = Tape::new();
        let vars: Vec<Var> = reps.iter().map(|r| tape.leaf(Matrix::row_vector(r.clone()))).collect();
        let pooled = pool_by_event(&mut tape, &vars, &events).unwrap();
        assert_eq!(pooled[0], pooled[2]);
        let plain = event_mean_pool(&reps, &events);
        for (p, e) in pooled.iter().zip(&plain) {
            assert_eq!(tape.value(*p).data(), e.as_slice());
        }
    }
}
