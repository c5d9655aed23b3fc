use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Dense read matrix: one row per session, one column per tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadHistory {
    rows: Vec<Vec<bool>>,
}

impl ReadHistory {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::OutOfRange { name: "sessions", message: "a history needs R >= 1".into() });
        };
        let n = first.len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::OutOfRange {
                name: "history",
                message: format!("session {} has {} tags, expected {n}", i + 1, rows[i].len()),
            });
        }
        Ok(Self { rows })
    }

    pub fn sessions(&self) -> usize {
        self.rows.len()
    }

    pub fn n_tags(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Tags that were never read.
    pub fn unread_tags(&self) -> usize {
        (0..self.n_tags()).filter(|&t| self.rows.iter().all(|row| !row[t])).count()
    }

    /// Header `tag_1,...,tag_N`, then one `0/1` row per session.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.n_tags()).map(|t| format!("tag_{t}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let io_err = |line: usize, e: std::io::Error| Error::HistoryCsv { line, message: e.to_string() };
        let (_, header) = lines.next().ok_or(Error::HistoryCsv { line: 1, message: "empty input".into() })?;
        let n_tags = header.map_err(|e| io_err(1, e))?.split(',').count();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let line = line.map_err(|e| io_err(idx + 1, e))?;
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| match cell.trim() {
                    "1" => Ok(true),
                    "0" => Ok(false),
                    other => {
                        Err(Error::HistoryCsv { line: idx + 1, message: format!("expected 0 or 1, got '{other}'") })
                    }
                })
                .collect::<Result<Vec<bool>>>()?;
            if row.len() != n_tags {
                return Err(Error::HistoryCsv {
                    line: idx + 1,
                    message: format!("{} cells, header names {n_tags} tags", row.len()),
                });
            }
            rows.push(row);
        }
        ReadHistory::new(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_ragged_or_empty() {
        assert!(ReadHistory::new(vec![]).is_err());
        assert!(ReadHistory::new(vec![vec![true, false], vec![true]]).is_err());
    }

    #[test]
    fn csv_layout() {
        let h = ReadHistory::new(vec![vec![true, false, true], vec![false, false, true]]).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tag_1,tag_2,tag_3\n1,0,1\n0,0,1\n");
        assert_eq!(h.unread_tags(), 1);
    }

    #[test]
    fn csv_rejects_bad_cells() {
        let err = ReadHistory::read_csv("tag_1,tag_2\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::HistoryCsv { line: 2, .. }));
        assert!(ReadHistory::read_csv("tag_1,tag_2\n1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in (1usize..20, 1usize..6).prop_flat_map(|(n, r)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), r)
        })) {
            let h = ReadHistory::new(rows).unwrap();
            let mut buf = Vec::new();
            h.write_csv(&mut buf).unwrap();
            prop_assert_eq!(ReadHistory::read_csv(buf.as_slice()).unwrap(), h);
        }
    }
}
