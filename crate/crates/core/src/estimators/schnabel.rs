//! Schnabel multi-sample capture-recapture estimate of the population size and
//! the error probability derived from it.

use crate::error::{Error, Result};

/// Per-session capture counts.
///
/// For session `i` (0-based): `read[i]` tags were read, `reread[i]` of them had
/// been read in an earlier session, and `previously_read[i]` distinct tags had
/// been read in sessions `0..i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchnabelTallies {
    read: Vec<u64>,
    reread: Vec<u64>,
    previously_read: Vec<u64>,
}

impl SchnabelTallies {
    pub fn new(read: Vec<u64>, reread: Vec<u64>, previously_read: Vec<u64>) -> Result<Self> {
        let t = Self { read, reread, previously_read };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn push(&mut self, read: u64, reread: u64) {
        let marked = match (self.previously_read.last(), self.read.last(), self.reread.last()) {
            (Some(&m), Some(&n), Some(&r)) => m + n - r,
            _ => 0,
        };
        self.read.push(read);
        self.reread.push(reread);
        self.previously_read.push(marked);
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentTallies(msg));
        let r = self.read.len();
        if self.reread.len() != r || self.previously_read.len() != r {
            return bad("vectors must have equal length".into());
        }
        if r == 0 {
            return Ok(());
        }
        if self.reread[0] != 0 || self.previously_read[0] != 0 {
            return bad("first session cannot contain recaptures".into());
        }
        for i in 0..r {
            if self.reread[i] > self.read[i].min(self.previously_read[i]) {
                return bad(format!("session {i}: reread exceeds min(read, previously read)"));
            }
            if i + 1 < r && self.previously_read[i + 1] != self.previously_read[i] + self.read[i] - self.reread[i] {
                return bad(format!("session {}: previously-read recurrence broken", i + 1));
            }
        }
        Ok(())
    }

    pub fn sessions(&self) -> usize {
        self.read.len()
    }

    pub fn read(&self) -> &[u64] {
        &self.read
    }

    pub fn reread(&self) -> &[u64] {
        &self.reread
    }

    pub fn previously_read(&self) -> &[u64] {
        &self.previously_read
    }

    /// Same tallies restricted to the first `sessions` sessions.
    pub fn prefix(&self, sessions: usize) -> Self {
        let s = sessions.min(self.read.len());
        Self {
            read: self.read[..s].to_vec(),
            reread: self.reread[..s].to_vec(),
            previously_read: self.previously_read[..s].to_vec(),
        }
    }
}

/// `N_S = sum(n_i M_i) / sum(m_i)`. For two sessions this is the
/// Lincoln-Petersen estimate `n_1 n_2 / m_2`.
///
/// `None` when there are no recaptures.
pub fn schnabel_n(tallies: &SchnabelTallies) -> Option<f64> {
    let recaptures: u64 = tallies.reread.iter().sum();
    if recaptures == 0 {
        return None;
    }
    let weighted: f64 = tallies.read.iter().zip(&tallies.previously_read).map(|(&n, &m)| n as f64 * m as f64).sum();
    Some(weighted / recaptures as f64)
}

/// Mean per-session error rate `(1/R) sum(1 - n_i / N)`, clamped to `[0, 1]`.
pub fn schnabel_p(tallies: &SchnabelTallies, n_hat: Option<f64>) -> Option<f64> {
    let n_hat = n_hat.filter(|&n| n > 0.0)?;
    if tallies.read.is_empty() {
        return None;
    }
    let r = tallies.read.len() as f64;
    let mean = tallies.read.iter().map(|&n| 1.0 - n as f64 / n_hat).sum::<f64>() / r;
    Some(mean.clamp(0.0, 1.0))
}
