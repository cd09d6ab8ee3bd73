//! Exhaustive busy-beaver search over all `[4(S+1)]^{2S}` two-symbol machines.
//!
//! The search walks a tree of partial tables: a run proceeds until it reads
//! a pair with no instruction yet, then branches over every possible
//! instruction for that pair. A leaf stands for all machines that agree on
//! the instructions it used, so its weight is `4(S+1)` to the number of
//! unused pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use super::machine::{run, Instruction, Move, Tape, TuringMachine};
use crate::error::{QError, Result};

/// Step cap for `S <= 2`.
pub const SMALL_STEP_CAP: u64 = 1000;
/// Step cap for `S = 3`.
pub const LARGE_STEP_CAP: u64 = 100_000;

pub fn machine_count(states: usize) -> u64 {
    (4 * (states as u64 + 1)).pow(2 * states as u32)
}

#[derive(Debug, Clone, Serialize)]
pub struct BeaverResult {
    pub states: usize,
    pub step_cap: u64,
    /// Machines covered; always `[4(S+1)]^{2S}`.
    pub machines: u64,
    pub halting: u64,
    /// Hit the step cap without a proof either way.
    pub timeouts: u64,
    /// Shown never to halt by a repeated configuration or a run into blank tape.
    pub proven_looping: u64,
    pub sigma: usize,
    pub sigma_prime: u64,
    pub sigma_witness: TuringMachine,
    pub sigma_prime_witness: TuringMachine,
}

fn all_instructions(states: usize) -> Vec<Instruction> {
    let mut v = Vec::with_capacity(4 * (states + 1));
    for next in (0..states).map(Some).chain([None]) {
        for write in 0..2 {
            for mv in [Move::L, Move::R] {
                v.push(Instruction { next, write, mv });
            }
        }
    }
    v
}

#[derive(Clone)]
struct Sim {
    tape: Tape,
    pos: i64,
    state: usize,
    steps: u64,
    /// Every cell outside `[lo, hi]` is blank.
    lo: i64,
    hi: i64,
    snap: (usize, i64, Tape),
    next_snap: u64,
}

enum Stop {
    Halted,
    Timeout,
    Looping,
    Undefined,
}

struct Search {
    states: usize,
    cap: u64,
    choices: Vec<Instruction>,
    acc: Acc,
}

struct Acc {
    machines: u64,
    halting: u64,
    timeouts: u64,
    looping: u64,
    sigma: Option<(usize, Vec<Option<Instruction>>)>,
    sigma_prime: Option<(u64, Vec<Option<Instruction>>)>,
}

impl Search {
    fn table_get(&self, table: &[Option<Instruction>], s: usize, a: u8) -> Option<Instruction> {
        table[2 * s + a as usize]
    }

    /// From a cell known to be blank with blanks beyond it in direction `dir`,
    /// follow blank-reading instructions; a repeated state moving only in
    /// `dir` never halts.
    fn runs_away(&self, table: &[Option<Instruction>], mut s: usize, dir: Move) -> bool {
        let mut seen = 0u64;
        loop {
            if seen >> s & 1 == 1 {
                return true;
            }
            seen |= 1 << s;
            match self.table_get(table, s, 0) {
                Some(Instruction { next: Some(n), mv, .. }) if mv == dir => s = n,
                _ => return false,
            }
        }
    }

    fn advance(&self, sim: &mut Sim, table: &[Option<Instruction>]) -> Stop {
        loop {
            if sim.steps >= self.cap {
                return Stop::Timeout;
            }
            if sim.pos > sim.hi && self.runs_away(table, sim.state, Move::R)
                || sim.pos < sim.lo && self.runs_away(table, sim.state, Move::L)
            {
                return Stop::Looping;
            }
            let a = sim.tape.read(sim.pos);
            let Some(ins) = self.table_get(table, sim.state, a) else {
                return Stop::Undefined;
            };
            sim.tape.write(sim.pos, ins.write);
            if ins.write != 0 {
                sim.lo = sim.lo.min(sim.pos);
                sim.hi = sim.hi.max(sim.pos);
            }
            sim.pos += if ins.mv == Move::R { 1 } else { -1 };
            sim.steps += 1;
            let Some(n) = ins.next else {
                return Stop::Halted;
            };
            sim.state = n;
            if sim.state == sim.snap.0 && sim.pos == sim.snap.1 && sim.tape.same_content(&sim.snap.2) {
                return Stop::Looping;
            }
            if sim.steps == sim.next_snap {
                sim.snap = (sim.state, sim.pos, sim.tape.clone());
                sim.next_snap *= 2;
            }
        }
    }

    fn leaf_weight(&self, table: &[Option<Instruction>]) -> u64 {
        let free = table.iter().filter(|t| t.is_none()).count() as u32;
        (self.choices.len() as u64).pow(free)
    }

    fn explore(&mut self, mut sim: Sim, table: &mut Vec<Option<Instruction>>) {
        match self.advance(&mut sim, table) {
            Stop::Undefined => {
                let k = 2 * sim.state + sim.tape.read(sim.pos) as usize;
                for i in 0..self.choices.len() {
                    table[k] = Some(self.choices[i]);
                    self.explore(sim.clone(), table);
                }
                table[k] = None;
            }
            stop => {
                let w = self.leaf_weight(table);
                self.acc.machines += w;
                match stop {
                    Stop::Halted => {
                        self.acc.halting += w;
                        let ones = sim.tape.nonblank();
                        if self.acc.sigma.as_ref().is_none_or(|(best, _)| ones > *best) {
                            self.acc.sigma = Some((ones, table.clone()));
                        }
                        if self.acc.sigma_prime.as_ref().is_none_or(|(best, _)| sim.steps > *best) {
                            self.acc.sigma_prime = Some((sim.steps, table.clone()));
                        }
                    }
                    Stop::Timeout => self.acc.timeouts += w,
                    _ => self.acc.looping += w,
                }
            }
        }
    }
}

fn complete(states: usize, table: &[Option<Instruction>]) -> TuringMachine {
    let mut tm = TuringMachine::new(states, 1).expect("at least one state");
    let filler = Instruction { next: None, write: 1, mv: Move::R };
    for s in 0..states {
        for a in 0..2u8 {
            tm.set(s, a, table[2 * s + a as usize].unwrap_or(filler)).expect("in range");
        }
    }
    tm
}

/// `Sigma(S)` and `Sigma'(S)` by exhaustive search. `S = 3` needs
/// `allow_long`; larger `S` is refused. `step_cap` defaults to 1000 for
/// `S <= 2` and `10^5` for `S = 3`.
pub fn busy_beaver_search(states: usize, step_cap: Option<u64>, allow_long: bool) -> Result<BeaverResult> {
    match states {
        0 => return Err(QError::InvalidArgument("need at least one state".into())),
        1 | 2 => {}
        3 if allow_long => {}
        3 => return Err(QError::Unsupported("S = 3 is a long run; pass the long-run flag".into())),
        _ => return Err(QError::Unsupported(format!("S = {states} is out of reach"))),
    }
    let cap = step_cap.unwrap_or(if states <= 2 { SMALL_STEP_CAP } else { LARGE_STEP_CAP });
    let mut search = Search {
        states,
        cap,
        choices: all_instructions(states),
        acc: Acc { machines: 0, halting: 0, timeouts: 0, looping: 0, sigma: None, sigma_prime: None },
    };
    let start = Sim {
        tape: Tape::blank(),
        pos: 0,
        state: 0,
        steps: 0,
        lo: 1,
        hi: -1,
        snap: (0, 0, Tape::blank()),
        next_snap: 1,
    };
    let mut table = vec![None; 2 * states];
    search.explore(start, &mut table);
    let acc = search.acc;
    if acc.machines != machine_count(states) {
        return Err(QError::Sanity(format!(
            "covered {} machines, expected {}",
            acc.machines,
            machine_count(states)
        )));
    }
    let (sigma, t1) = acc.sigma.expect("some machine halts");
    let (sigma_prime, t2) = acc.sigma_prime.expect("some machine halts");
    Ok(BeaverResult {
        states,
        step_cap: cap,
        machines: acc.machines,
        halting: acc.halting,
        timeouts: acc.timeouts,
        proven_looping: acc.looping,
        sigma,
        sigma_prime,
        sigma_witness: complete(search.states, &t1),
        sigma_prime_witness: complete(search.states, &t2),
    })
}

/// Machine number `index` in the flat enumeration: one base-`4(S+1)` digit
/// per `(state, symbol)` pair.
pub fn machine_from_index(states: usize, mut index: u64) -> Result<TuringMachine> {
    if index >= machine_count(states) {
        return Err(QError::InvalidArgument(format!("index {index} beyond the enumeration")));
    }
    let choices = all_instructions(states);
    let base = choices.len() as u64;
    let mut tm = TuringMachine::new(states, 1)?;
    for s in 0..states {
        for a in 0..2u8 {
            tm.set(s, a, choices[(index % base) as usize])?;
            index /= base;
        }
    }
    Ok(tm)
}

/// `(Sigma, Sigma')` by running every machine in the flat enumeration.
pub fn brute_force_beaver(states: usize, step_cap: u64) -> Result<(usize, u64)> {
    let mut best = (0, 0);
    for i in 0..machine_count(states) {
        let r = run(&machine_from_index(states, i)?, &BTreeMap::new(), 0, step_cap)?;
        if r.halted {
            best = (best.0.max(r.ones_written), best.1.max(r.steps));
        }
    }
    Ok(best)
}


#[cfg(test)]
mod long_run {
    use super::*;

    #[test]
    #[ignore = "long run"]
    fn three_states() {
        let r = busy_beaver_search(3, None, true).unwrap();
        eprintln!("{} halting, {} timeouts, {} looping", r.halting, r.timeouts, r.proven_looping);
        assert_eq!((r.sigma, r.sigma_prime), (6, 21));
    }
}
