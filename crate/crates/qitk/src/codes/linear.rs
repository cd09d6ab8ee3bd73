//! Binary linear block codes.
//!
//! Words are packed into `u64` with position 1 (the leftmost symbol as
//! written) in the most significant of the `n` bits, so "0110001" packs to
//! `0b0110001`. Matrix rows use the same packing.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::algorithms::{gf2_nullspace, gf2_rank};
use crate::error::{QError, Result};

/// Exhaustive scans are limited to `2^16` codewords.
pub const MAX_K: usize = 16;
/// Coset tables are limited to words of this length.
pub const MAX_TABLE_N: usize = 20;

pub fn parse_word(s: &str) -> Result<(u64, usize)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() || s.len() > 63 || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(QError::InvalidArgument(format!("`{s}` is not a binary word")));
    }
    Ok((u64::from_str_radix(&s, 2).expect("checked digits"), s.len()))
}

pub fn format_word(w: u64, n: usize) -> String {
    format!("{w:0n$b}")
}

fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearCode {
    n: usize,
    k: usize,
    g: Vec<u64>,
    h: Vec<u64>,
    #[serde(skip)]
    distance: OnceLock<usize>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.g == other.g && self.h == other.h
    }
}

impl LinearCode {
    /// Code spanned by the rows of `g`; the parity matrix is a kernel basis.
    pub fn from_generator(n: usize, g: Vec<u64>) -> Result<LinearCode> {
        check_rows(n, &g)?;
        // nullspace works with bit i as column i, which is fine for any fixed packing
        let h = gf2_nullspace(&g, n);
        Self::from_parts(n, g, h)
    }

    pub fn from_parts(n: usize, g: Vec<u64>, h: Vec<u64>) -> Result<LinearCode> {
        check_rows(n, &g)?;
        check_rows(n, &h)?;
        let k = g.len();
        if gf2_rank(&g, n) != k {
            return Err(QError::InvalidArgument("generator rows are dependent".into()));
        }
        if gf2_rank(&h, n) != n - k || h.len() != n - k {
            return Err(QError::InvalidArgument(format!("parity matrix must have {} independent rows", n - k)));
        }
        if g.iter().any(|&r| h.iter().any(|&s| parity(r & s) != 0)) {
            return Err(QError::InvalidArgument("G H^T is not zero".into()));
        }
        Ok(LinearCode {
            n,
            k,
            g,
            h,
            distance: OnceLock::new(),
        })
    }

    pub fn from_strings(g: &[&str], h: &[&str]) -> Result<LinearCode> {
        let parse = |rows: &[&str]| -> Result<(Vec<u64>, usize)> {
            let mut n = 0;
            let mut out = Vec::new();
            for r in rows {
                let (w, len) = parse_word(r)?;
                if n != 0 && len != n {
                    return Err(QError::Dimension("rows have different lengths".into()));
                }
                n = len;
                out.push(w);
            }
            Ok((out, n))
        };
        let (g, n) = parse(g)?;
        let (h, nh) = parse(h)?;
        if !h.is_empty() && nh != n {
            return Err(QError::Dimension("G and H have different lengths".into()));
        }
        Self::from_parts(n, g, h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &[u64] {
        &self.g
    }

    pub fn parity_check(&self) -> &[u64] {
        &self.h
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode::from_parts(self.n, self.h.clone(), self.g.clone()).expect("dual of a valid code")
    }

    /// `w G` for a `k`-bit message, first message bit paired with the first row.
    pub fn encode(&self, w: u64) -> Result<u64> {
        if w >> self.k != 0 {
            return Err(QError::InvalidArgument(format!("message wider than {} bits", self.k)));
        }
        Ok((0..self.k)
            .filter(|&i| (w >> (self.k - 1 - i)) & 1 == 1)
            .fold(0, |acc, i| acc ^ self.g[i]))
    }

    /// `H u`, first row giving the most significant syndrome bit.
    pub fn syndrome(&self, u: u64) -> u64 {
        let r = self.h.len();
        self.h
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &row)| acc | parity(row & u) << (r - 1 - i))
    }

    pub fn contains(&self, u: u64) -> bool {
        self.syndrome(u) == 0
    }

    pub fn codewords(&self) -> Result<Vec<u64>> {
        if self.k > MAX_K {
            return Err(QError::CapExceeded { dim: self.k, cap: MAX_K });
        }
        (0..1u64 << self.k).map(|w| self.encode(w)).collect()
    }

    /// Smallest nonzero codeword weight, by exhaustive scan.
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.distance.get() {
            return Ok(d);
        }
        let d = self
            .codewords()?
            .into_iter()
            .filter(|&w| w != 0)
            .map(|w| w.count_ones() as usize)
            .min()
            .unwrap_or(self.n);
        Ok(*self.distance.get_or_init(|| d))
    }

    pub fn is_subcode_of(&self, other: &LinearCode) -> bool {
        self.n == other.n && self.g.iter().all(|&r| other.contains(r))
    }

    /// Message for a codeword, or `None` if `c` is not in the code.
    pub fn message_of(&self, c: u64) -> Result<Option<u64>> {
        if !self.contains(c) {
            return Ok(None);
        }
        let words = self.codewords()?;
        Ok(words.iter().position(|&w| w == c).map(|m| m as u64))
    }
}

fn check_rows(n: usize, rows: &[u64]) -> Result<()> {
    if n == 0 || n > 63 {
        return Err(QError::InvalidArgument(format!("length {n} unsupported")));
    }
    if rows.iter().any(|&r| r >> n != 0) {
        return Err(QError::Dimension(format!("row wider than {n} bits")));
    }
    Ok(())
}

/// The `[7,4,3]` Hamming code. With this parity matrix the syndrome of a
/// single flip is the flipped position in binary.
pub fn hamming_734() -> LinearCode {
    LinearCode::from_strings(
        &["1010101", "0110011", "0001111", "1110000"],
        &["0001111", "0110011", "1010101"],
    )
    .expect("fixed matrices")
}

/// `[n, 1, n]` repetition code.
pub fn repetition_code(n: usize) -> Result<LinearCode> {
    if n == 0 || n > 63 {
        return Err(QError::InvalidArgument(format!("length {n} unsupported")));
    }
    LinearCode::from_generator(n, vec![(1u64 << n) - 1])
}

/// Syndrome to minimum-weight coset leader.
#[derive(Debug, Clone, Serialize)]
pub struct SyndromeTable {
    pub n: usize,
    pub leaders: HashMap<u64, u64>,
}

impl SyndromeTable {
    pub fn leader(&self, syndrome: u64) -> Option<u64> {
        self.leaders.get(&syndrome).copied()
    }
}

/// Fill the table by scanning words in order of weight, so each leader is
/// a minimum-weight member of its coset.
pub fn coset_leader_table(code: &LinearCode) -> Result<SyndromeTable> {
    let n = code.n;
    if n > MAX_TABLE_N {
        return Err(QError::CapExceeded { dim: n, cap: MAX_TABLE_N });
    }
    let target = 1usize << (n - code.k);
    let mut leaders = HashMap::with_capacity(target);
    let mut by_weight: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for u in 0..1u64 << n {
        by_weight[u.count_ones() as usize].push(u);
    }
    'outer: for bucket in by_weight {
        for u in bucket {
            leaders.entry(code.syndrome(u)).or_insert(u);
            if leaders.len() == target {
                break 'outer;
            }
        }
    }
    Ok(SyndromeTable { n, leaders })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decoded {
    pub syndrome: u64,
    pub error: u64,
    pub codeword: u64,
    pub message: u64,
}

/// Subtract the coset leader of `u`'s syndrome and read off the message.
pub fn decode(code: &LinearCode, u: u64, table: &SyndromeTable) -> Result<Decoded> {
    if table.n != code.n || u >> code.n != 0 {
        return Err(QError::Dimension("word and table do not match the code".into()));
    }
    let s = code.syndrome(u);
    let e = table
        .leader(s)
        .ok_or_else(|| QError::Sanity(format!("syndrome {s} missing from table")))?;
    let c = u ^ e;
    let m = code
        .message_of(c)?
        .ok_or_else(|| QError::Sanity("corrected word is not a codeword".into()))?;
    Ok(Decoded {
        syndrome: s,
        error: e,
        codeword: c,
        message: m,
    })
}

/// Flip the bit named by the syndrome, read as a position. Only valid for
/// Hamming codes in the single-error regime.
pub fn hamming_shortcut(code: &LinearCode, u: u64) -> u64 {
    let s = code.syndrome(u) as usize;
    if s == 0 || s > code.n {
        u
    } else {
        u ^ (1 << (code.n - s))
    }
}
