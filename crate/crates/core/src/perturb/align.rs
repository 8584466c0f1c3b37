//! Token-level edit distance and a deterministic minimal alignment.

use crate::text::{Token, TokenSequence};

/// One step of an alignment from `a` to `b`. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignStep {
    Keep { a: usize, b: usize },
    Substitute { a: usize, b: usize },
    Delete { a: usize },
    /// `b` is inserted into the gap before `a`-position `before`
    /// (`before == len(a) + 1` appends).
    Insert { before: usize, b: usize },
}

impl AlignStep {
    pub fn is_edit(&self) -> bool {
        !matches!(self, AlignStep::Keep { .. })
    }
}

fn table(a: &[Token], b: &[Token]) -> Vec<Vec<usize>> {
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j - 1] + cost).min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d
}

/// Minimal number of unit-cost token substitutions, insertions and
/// deletions turning `a` into `b`.
pub fn token_edit_distance(a: &TokenSequence, b: &TokenSequence) -> usize {
    let (a, b) = (a.tokens(), b.tokens());
    // Two-row variant of `table`.
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            cur[j] = (prev[j - 1] + cost).min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Minimal alignment with a fixed backtrace: matches first, then
/// substitute > delete > insert on ties. Steps are in left-to-right order.
pub fn align(a: &TokenSequence, b: &TokenSequence) -> Vec<AlignStep> {
    let (ta, tb) = (a.tokens(), b.tokens());
    let d = table(ta, tb);
    let (mut i, mut j) = (ta.len(), tb.len());
    let mut steps = Vec::with_capacity(i.max(j));
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && ta[i - 1] == tb[j - 1] && d[i][j] == d[i - 1][j - 1] {
            steps.push(AlignStep::Keep { a: i, b: j });
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1 {
            steps.push(AlignStep::Substitute { a: i, b: j });
            i -= 1;
            j -= 1;
        } else if i > 0 && d[i][j] == d[i - 1][j] + 1 {
            steps.push(AlignStep::Delete { a: i });
            i -= 1;
        } else {
            steps.push(AlignStep::Insert { before: i + 1, b: j });
            j -= 1;
        }
    }
    steps.reverse();
    steps
}
