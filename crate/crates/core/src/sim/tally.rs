use crate::estimators::{MultiplicityVector, SchnabelTallies};

use super::ReadHistory;

/// Everything the estimators need from a history of `R` sessions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub kbar: MultiplicityVector,
    pub schnabel: SchnabelTallies,
    pub observed_distinct: u64,
}

/// Incremental tally: feed sessions one at a time and snapshot at any point.
#[derive(Debug, Clone)]
pub struct Tallier {
    read_counts: Vec<u32>,
    schnabel: SchnabelTallies,
    distinct: u64,
}

impl Tallier {
    pub fn new(n_tags: usize) -> Self {
        Self { read_counts: vec![0; n_tags], schnabel: SchnabelTallies::default(), distinct: 0 }
    }

    pub fn sessions(&self) -> usize {
        self.schnabel.sessions()
    }

    pub fn observed_distinct(&self) -> u64 {
        self.distinct
    }

    pub fn add_session(&mut self, reads: &[bool]) {
        assert_eq!(reads.len(), self.read_counts.len(), "session width must equal N");
        let (mut read, mut reread) = (0u64, 0u64);
        for (count, &hit) in self.read_counts.iter_mut().zip(reads) {
            if hit {
                read += 1;
                if *count > 0 {
                    reread += 1;
                } else {
                    self.distinct += 1;
                }
                *count += 1;
            }
        }
        self.schnabel.push(read, reread);
    }

    /// Panics before the first session.
    pub fn snapshot(&self) -> Tally {
        let r = self.sessions();
        assert!(r > 0, "no sessions tallied yet");
        let mut counts = vec![0u64; r];
        for &c in self.read_counts.iter().filter(|&&c| c > 0) {
            counts[r - c as usize] += 1;
        }
        Tally {
            kbar: MultiplicityVector::new(counts).expect("R >= 1"),
            schnabel: self.schnabel.clone(),
            observed_distinct: self.distinct,
        }
    }
}

/// Reduce a history to its multiplicity vector, Schnabel tallies and the
/// number of distinct tags read.
pub fn tally(history: &ReadHistory) -> Tally {
    let mut t = Tallier::new(history.n_tags());
    for row in history.rows() {
        t.add_session(row);
    }
    t.snapshot()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_independent, PopulationParams};
    use proptest::prelude::*;

    fn two_session_history() -> ReadHistory {
        // 80 read twice, 25 only in session 1, 15 only in session 2, 10 never.
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        for (a, b, n) in [(true, true, 80), (true, false, 25), (false, true, 15), (false, false, 10)] {
            s1.extend(std::iter::repeat_n(a, n));
            s2.extend(std::iter::repeat_n(b, n));
        }
        ReadHistory::new(vec![s1, s2]).unwrap()
    }

    #[test]
    fn hand_built_two_session_counts() {
        let t = tally(&two_session_history());
        assert_eq!(t.kbar.counts(), &[80, 40]);
        assert_eq!(t.schnabel.read(), &[105, 95]);
        assert_eq!(t.schnabel.reread(), &[0, 80]);
        assert_eq!(t.schnabel.previously_read(), &[0, 105]);
        assert_eq!(t.observed_distinct, 120);
    }

    #[test]
    fn all_read_and_none_read() {
        let all = ReadHistory::new(vec![vec![true; 500]; 3]).unwrap();
        assert_eq!(tally(&all).kbar.counts(), &[500, 0, 0]);
        let none = ReadHistory::new(vec![vec![false; 50]; 4]).unwrap();
        let t = tally(&none);
        assert_eq!(t.kbar.counts(), &[0, 0, 0, 0]);
        assert_eq!(t.observed_distinct, 0);
    }

    proptest! {
        #[test]
        fn conservation_and_recurrence(n in 1usize..200, p in 0.0f64..=1.0, r in 1usize..10, seed in any::<u64>()) {
            let h = simulate_independent(PopulationParams::new(n, p).unwrap(), r, seed).unwrap();
            let t = tally(&h);
            let columns_read = (n - h.unread_tags()) as u64;
            prop_assert_eq!(t.kbar.observed(), t.observed_distinct);
            prop_assert_eq!(t.observed_distinct, columns_read);
            prop_assert!(t.schnabel.validate().is_ok());
            let big_m = t.schnabel.previously_read();
            for i in 0..r.saturating_sub(1) {
                prop_assert_eq!(big_m[i + 1] - big_m[i], t.schnabel.read()[i] - t.schnabel.reread()[i]);
            }
        }
    }
}
