use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gate_for, Gate};
use crate::error::{QError, Result};
use crate::state::{apply_kernel, Mat, StateVector};

/// Largest register `run` accepts by default.
pub const RUN_CAP: usize = 1 << 14;
/// Largest register whose dense unitary `circuit_unitary` will build.
pub const UNITARY_CAP: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub gate: Gate,
    pub targets: Vec<usize>,
}

/// Ordered gate list over `num_sites` sites of a common local dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_sites: usize,
    local_dim: usize,
    steps: Vec<Step>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    gate: String,
    #[serde(default)]
    params: Vec<f64>,
    targets: Vec<usize>,
}

fn two() -> usize {
    2
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    sites: usize,
    #[serde(default = "two")]
    local_dim: usize,
    steps: Vec<StepJson>,
}

impl Circuit {
    pub fn new(num_sites: usize) -> Circuit {
        Circuit::with_dim(num_sites, 2)
    }

    pub fn with_dim(num_sites: usize, local_dim: usize) -> Circuit {
        Circuit {
            num_sites,
            local_dim,
            steps: Vec::new(),
        }
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if gate.local_dim() != self.local_dim {
            return Err(QError::Dimension(format!(
                "gate {} has local dimension {}, circuit has {}",
                gate.name(),
                gate.local_dim(),
                self.local_dim
            )));
        }
        if gate.arity() != targets.len() {
            return Err(QError::Targets(format!(
                "gate {} needs {} targets, got {}",
                gate.name(),
                gate.arity(),
                targets.len()
            )));
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_sites {
                return Err(QError::Targets(format!("site {t} out of range")));
            }
            if targets[..i].contains(&t) {
                return Err(QError::Targets(format!("repeated target {t}")));
            }
        }
        self.steps.push(Step {
            gate,
            targets: targets.to_vec(),
        });
        Ok(())
    }

    /// Append a named gate.
    pub fn add(&mut self, name: &str, params: &[f64], targets: &[usize]) -> Result<()> {
        let g = gate_for(name, params, self.local_dim)?;
        self.push(g, targets)
    }

    /// Append every step of `other`, relabelling its site `i` as `map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.num_sites {
            return Err(QError::Targets("site map has the wrong length".into()));
        }
        for s in &other.steps {
            let t: Vec<usize> = s.targets.iter().map(|&i| map[i]).collect();
            self.push(s.gate.clone(), &t)?;
        }
        Ok(())
    }

    /// Number of steps per gate name.
    pub fn gate_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for s in &self.steps {
            *m.entry(s.gate.name().to_string()).or_insert(0) += 1;
        }
        m
    }

    pub fn count(&self, name: &str) -> usize {
        self.steps.iter().filter(|s| s.gate.name() == name).count()
    }

    pub fn dim(&self) -> usize {
        self.local_dim.saturating_pow(self.num_sites as u32)
    }

    pub fn unitary(&self) -> Result<Mat> {
        self.unitary_with_cap(UNITARY_CAP)
    }

    pub fn unitary_with_cap(&self, cap: usize) -> Result<Mat> {
        let dim = self.dim();
        if dim > cap {
            return Err(QError::CapExceeded { dim, cap });
        }
        let mut m = Mat::identity(dim, dim);
        // column-major storage: each column is one basis input
        m.as_mut_slice().par_chunks_mut(dim).for_each(|col| {
            for s in &self.steps {
                apply_kernel(col, self.local_dim, self.num_sites, s.gate.matrix(), &s.targets);
            }
        });
        Ok(m)
    }

    pub fn run(&self, state: &StateVector) -> Result<StateVector> {
        self.run_with_cap(state, RUN_CAP)
    }

    pub fn run_with_cap(&self, state: &StateVector, cap: usize) -> Result<StateVector> {
        if state.local_dim() != self.local_dim || state.num_sites() != self.num_sites {
            return Err(QError::Dimension(format!(
                "circuit on {} sites (d={}) given a state on {} sites (d={})",
                self.num_sites,
                self.local_dim,
                state.num_sites(),
                state.local_dim()
            )));
        }
        if state.dim() > cap {
            return Err(QError::CapExceeded {
                dim: state.dim(),
                cap,
            });
        }
        let mut out = state.clone();
        for s in &self.steps {
            out.apply_in_place(s.gate.matrix(), &s.targets)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            let rebuilt = gate_for(s.gate.name(), s.gate.params(), self.local_dim)
                .map_err(|_| QError::Unsupported(format!("gate {} is not serialisable", s.gate.name())))?;
            if rebuilt.matrix() != s.gate.matrix() {
                return Err(QError::Unsupported(format!(
                    "gate {} does not match its named form",
                    s.gate.name()
                )));
            }
            steps.push(StepJson {
                gate: s.gate.name().to_string(),
                params: s.gate.params().to_vec(),
                targets: s.targets.clone(),
            });
        }
        let j = CircuitJson {
            sites: self.num_sites,
            local_dim: self.local_dim,
            steps,
        };
        Ok(serde_json::to_value(j).expect("circuit serialises"))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Circuit> {
        let j: CircuitJson = serde_json::from_value(v.clone())
            .map_err(|e| QError::InvalidArgument(format!("circuit JSON: {e}")))?;
        let mut c = Circuit::with_dim(j.sites, j.local_dim);
        for s in j.steps {
            c.add(&s.gate, &s.params, &s.targets)?;
        }
        Ok(c)
    }
}

pub fn circuit_unitary(c: &Circuit) -> Result<Mat> {
    c.unitary()
}

pub fn run(c: &Circuit, s: &StateVector) -> Result<StateVector> {
    c.run(s)
}

/// CNOTs from the top site onto every other site: `a|0>+b|1>` on the top
/// site with the rest in `|0...0>` becomes `a|0...0> + b|1...1>`.
pub fn fanout_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for t in (0..n - 1).rev() {
        c.add("CNOT", &[], &[n - 1, t]).expect("valid CNOT");
    }
    c
}

/// Hadamard on the top site followed by the fan-out; maps `|0...0>` to GHZ.
pub fn ghz_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    c.add("H", &[], &[n - 1]).expect("valid H");
    c.append_mapped(&fanout_circuit(n), &(0..n).collect::<Vec<_>>())
        .expect("same register");
    c
}
