//! Deterministic Turing machines over `{0, 1, ..., A}` with `0` the blank.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

impl Move {
    fn delta(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    /// `None` is the halt state.
    pub next: Option<usize>,
    pub write: u8,
    pub mv: Move,
}

/// `(state, symbol) -> (state', symbol'; move)`, states numbered from 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuringMachine {
    pub states: usize,
    /// Non-blank symbols; the tape alphabet is `0..=symbols`.
    pub symbols: usize,
    table: Vec<Option<Instruction>>,
}

impl TuringMachine {
    pub fn new(states: usize, symbols: usize) -> Result<Self> {
        if states == 0 || symbols == 0 || symbols > 254 {
            return Err(QError::InvalidArgument("need at least one state and one symbol".into()));
        }
        Ok(TuringMachine { states, symbols, table: vec![None; states * (symbols + 1)] })
    }

    /// Build from 5-tuples; a repeated initial pair is rejected.
    pub fn from_instructions(
        states: usize,
        symbols: usize,
        rules: &[((usize, u8), Instruction)],
    ) -> Result<Self> {
        let mut tm = Self::new(states, symbols)?;
        for &((s, a), ins) in rules {
            if tm.get(s, a).is_some() {
                return Err(QError::InvalidArgument(format!("two instructions start from ({s}, {a})")));
            }
            tm.set(s, a, ins)?;
        }
        Ok(tm)
    }

    fn slot(&self, state: usize, symbol: u8) -> Result<usize> {
        if state >= self.states || symbol as usize > self.symbols {
            return Err(QError::InvalidArgument(format!("no pair ({state}, {symbol}) in this machine")));
        }
        Ok(state * (self.symbols + 1) + symbol as usize)
    }

    pub fn set(&mut self, state: usize, symbol: u8, ins: Instruction) -> Result<()> {
        if ins.next.is_some_and(|n| n >= self.states) || ins.write as usize > self.symbols {
            return Err(QError::InvalidArgument(format!("instruction {ins:?} leaves the machine")));
        }
        let k = self.slot(state, symbol)?;
        self.table[k] = Some(ins);
        Ok(())
    }

    pub fn get(&self, state: usize, symbol: u8) -> Option<Instruction> {
        self.slot(state, symbol).ok().and_then(|k| self.table[k])
    }

    pub fn instruction_count(&self) -> usize {
        self.table.iter().flatten().count()
    }
}

fn state_name(s: Option<usize>) -> String {
    s.map_or_else(|| "halt".to_string(), |s| format!("s{}", s + 1))
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "state symbol -> state symbol move")?;
        for s in 0..self.states {
            for a in 0..=self.symbols as u8 {
                if let Some(i) = self.get(s, a) {
                    writeln!(f, "{} {a} -> {} {} {:?}", state_name(Some(s)), state_name(i.next), i.write, i.mv)?;
                }
            }
        }
        Ok(())
    }
}

/// Tape that grows in both directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Tape {
    cells: Vec<u8>,
    /// Position of `cells[0]`.
    origin: i64,
}

impl Tape {
    pub(crate) fn blank() -> Self {
        Tape { cells: vec![0; 16], origin: -8 }
    }

    pub(crate) fn from_map(map: &BTreeMap<i64, u8>) -> Self {
        let mut t = Self::blank();
        for (&p, &v) in map {
            t.write(p, v);
        }
        t
    }

    fn ensure(&mut self, pos: i64) -> usize {
        if pos < self.origin {
            let grow = ((self.origin - pos) as usize).max(self.cells.len());
            let mut v = vec![0; grow];
            v.extend_from_slice(&self.cells);
            self.cells = v;
            self.origin -= grow as i64;
        } else if pos >= self.origin + self.cells.len() as i64 {
            let grow = ((pos - self.origin) as usize + 1 - self.cells.len()).max(self.cells.len());
            self.cells.resize(self.cells.len() + grow, 0);
        }
        (pos - self.origin) as usize
    }

    pub(crate) fn read(&self, pos: i64) -> u8 {
        let k = pos - self.origin;
        if k < 0 || k >= self.cells.len() as i64 {
            0
        } else {
            self.cells[k as usize]
        }
    }

    pub(crate) fn write(&mut self, pos: i64, v: u8) {
        let k = self.ensure(pos);
        self.cells[k] = v;
    }

    pub(crate) fn nonblank(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    /// Leftmost and rightmost non-blank positions.
    pub(crate) fn extent(&self) -> Option<(i64, i64)> {
        let first = self.cells.iter().position(|&c| c != 0)?;
        let last = self.cells.iter().rposition(|&c| c != 0)?;
        Some((first as i64 + self.origin, last as i64 + self.origin))
    }

    pub(crate) fn to_map(&self) -> BTreeMap<i64, u8> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (k as i64 + self.origin, c))
            .collect()
    }

    /// Same non-blank content, ignoring storage layout.
    pub(crate) fn same_content(&self, other: &Tape) -> bool {
        match (self.extent(), other.extent()) {
            (None, None) => true,
            (Some((a, b)), Some((c, d))) if (a, b) == (c, d) => (a..=b).all(|p| self.read(p) == other.read(p)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TapeRun {
    /// Non-blank cells only.
    pub tape: BTreeMap<i64, u8>,
    pub head: i64,
    /// `None` once halted.
    pub state: Option<usize>,
    pub steps: u64,
    pub halted: bool,
    /// Non-blank cells left on the tape.
    pub ones_written: usize,
}

impl TapeRun {
    /// Cells from the leftmost to the rightmost non-blank, as digits.
    pub fn tape_string(&self) -> String {
        match (self.tape.keys().next(), self.tape.keys().next_back()) {
            (Some(&a), Some(&b)) => (a..=b).map(|p| char::from(b'0' + self.tape.get(&p).copied().unwrap_or(0))).collect(),
            _ => String::new(),
        }
    }
}

/// Run from state `s1` with the head at `head`. Hitting the step cap is a
/// timeout (`halted == false`), not an error; a missing instruction is.
pub fn run(tm: &TuringMachine, tape: &BTreeMap<i64, u8>, head: i64, max_steps: u64) -> Result<TapeRun> {
    if tape.values().any(|&v| v as usize > tm.symbols) {
        return Err(QError::InvalidArgument("tape symbol outside the alphabet".into()));
    }
    let mut t = Tape::from_map(tape);
    let mut pos = head;
    let mut state = Some(0);
    let mut steps = 0;
    while let Some(s) = state {
        if steps >= max_steps {
            break;
        }
        let a = t.read(pos);
        let ins = tm
            .get(s, a)
            .ok_or_else(|| QError::InvalidArgument(format!("no instruction for ({}, {a})", state_name(Some(s)))))?;
        t.write(pos, ins.write);
        pos += ins.mv.delta();
        state = ins.next;
        steps += 1;
    }
    Ok(TapeRun {
        tape: t.to_map(),
        head: pos,
        state,
        steps,
        halted: state.is_none(),
        ones_written: t.nonblank(),
    })
}

/// Tape holding `n1` ones, a blank, then `n2` ones, starting at cell 0.
pub fn unary_pair(n1: usize, n2: usize) -> BTreeMap<i64, u8> {
    (0..n1)
        .map(|i| i as i64)
        .chain((0..n2).map(|i| (n1 + 1 + i) as i64))
        .map(|p| (p, 1))
        .collect()
}

fn ins(next: Option<usize>, write: u8, mv: Move) -> Instruction {
    Instruction { next, write, mv }
}

/// Two-state machine: skip ones to the right, turn the first blank into a
/// one, step right once more and halt.
pub fn example_machine() -> TuringMachine {
    TuringMachine::from_instructions(
        2,
        1,
        &[
            ((0, 1), ins(Some(0), 1, Move::R)),
            ((0, 0), ins(Some(1), 1, Move::R)),
            ((1, 0), ins(None, 0, Move::R)),
            ((1, 1), ins(None, 1, Move::R)),
        ],
    )
    .expect("valid table")
}

/// Unary adder: erase the leftmost one, run right over the first block and
/// fill the separating blank.
pub fn adding_machine() -> TuringMachine {
    TuringMachine::from_instructions(
        2,
        1,
        &[
            ((0, 0), ins(Some(0), 0, Move::R)),
            ((0, 1), ins(Some(1), 0, Move::R)),
            ((1, 1), ins(Some(1), 1, Move::R)),
            ((1, 0), ins(None, 1, Move::R)),
        ],
    )
    .expect("valid table")
}

/// Three-state busy beaver that leaves six ones after 13 moves.
pub fn three_state_beaver() -> TuringMachine {
    TuringMachine::from_instructions(
        3,
        1,
        &[
            ((0, 0), ins(Some(1), 1, Move::R)),
            ((0, 1), ins(Some(2), 1, Move::L)),
            ((1, 0), ins(Some(0), 1, Move::L)),
            ((1, 1), ins(Some(1), 1, Move::R)),
            ((2, 0), ins(Some(1), 1, Move::L)),
            ((2, 1), ins(None, 1, Move::R)),
        ],
    )
    .expect("valid table")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_marches_and_halts() {
        let tm = example_machine();
        let r = run(&tm, &BTreeMap::new(), 0, 100).unwrap();
        assert!(r.halted);
        assert_eq!((r.steps, r.ones_written, r.head), (2, 1, 2));
        // over a block of ones it appends one more
        let r = run(&tm, &unary_pair(3, 0), 0, 100).unwrap();
        assert_eq!(r.tape_string(), "1111");
    }

    #[test]
    fn adds_two_and_two() {
        let r = run(&adding_machine(), &unary_pair(2, 2), 0, 100).unwrap();
        assert!(r.halted);
        assert_eq!(r.tape_string(), "1111");
    }

    #[test]
    fn beaver_fixture() {
        let r = run(&three_state_beaver(), &BTreeMap::new(), 0, 1000).unwrap();
        assert!(r.halted);
        assert_eq!((r.steps, r.ones_written), (13, 6));
    }

    #[test]
    fn timeout_and_bad_tables() {
        let spin = TuringMachine::from_instructions(1, 1, &[((0, 0), ins(Some(0), 0, Move::R))]).unwrap();
        let r = run(&spin, &BTreeMap::new(), 0, 50).unwrap();
        assert!(!r.halted && r.steps == 50);
        assert!(run(&spin, &[(0, 1)].into_iter().collect(), 0, 5).is_err());
        let dup = [((0, 0), ins(None, 1, Move::R)), ((0, 0), ins(None, 0, Move::L))];
        assert!(TuringMachine::from_instructions(1, 1, &dup).is_err());
        assert!(TuringMachine::from_instructions(1, 1, &[((0, 0), ins(Some(3), 1, Move::R))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let tm = three_state_beaver();
        let s = serde_json::to_string(&tm).unwrap();
        assert_eq!(serde_json::from_str::<TuringMachine>(&s).unwrap(), tm);
        assert!(tm.to_string().contains("s3 1 -> halt 1 R"));
    }
}
