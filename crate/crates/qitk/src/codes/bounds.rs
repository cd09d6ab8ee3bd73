//! Asymptotic rate bounds `alpha_q(delta)` for classical codes, and the
//! quantum Hamming and Gilbert-Varshamov bounds.

use serde::Serialize;

use super::info::{h2, hq};
use crate::error::{QError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValues {
    pub delta: f64,
    pub plotkin: f64,
    pub hamming: f64,
    #[serde(rename = "elias")]
    pub bassalygo_elias: f64,
    #[serde(rename = "gv")]
    pub gilbert_varshamov: f64,
    /// Only for square `q`, and only where the line is defined.
    pub tvz: Option<f64>,
}

impl BoundValues {
    pub fn lower(&self) -> f64 {
        self.tvz.map_or(self.gilbert_varshamov, |t| t.max(self.gilbert_varshamov))
    }

    pub fn upper(&self) -> f64 {
        self.plotkin.min(self.hamming).min(self.bassalygo_elias)
    }
}

fn square_root(q: u32) -> Option<u32> {
    let r = (q as f64).sqrt().round() as u32;
    (r * r == q).then_some(r)
}

/// Every bound at `delta`, clipped to `[0, 1]`.
pub fn bound_curves(delta: f64, q: u32) -> Result<BoundValues> {
    if q < 2 {
        return Err(QError::InvalidArgument("alphabet size must be at least 2".into()));
    }
    let theta = 1.0 - 1.0 / q as f64;
    if !(0.0..=theta + 1e-12).contains(&delta) {
        return Err(QError::InvalidArgument(format!("delta {delta} outside [0, {theta}]")));
    }
    let delta = delta.min(theta);
    let clip = |x: f64| x.clamp(0.0, 1.0);
    let tvz = square_root(q).filter(|&r| r > 2).and_then(|r| {
        let top = 1.0 - 1.0 / (r as f64 - 1.0);
        (delta <= top).then(|| clip(top - delta))
    });
    Ok(BoundValues {
        delta,
        plotkin: clip(1.0 - delta / theta),
        hamming: clip(1.0 - hq(delta / 2.0, q)?),
        bassalygo_elias: clip(1.0 - hq(theta - (theta * (theta - delta)).sqrt(), q)?),
        gilbert_varshamov: clip(1.0 - hq(delta, q)?),
        tvz,
    })
}

/// `points` evenly spaced values of delta across `[0, 1 - 1/q]`.
pub fn bound_table(q: u32, points: usize) -> Result<Vec<BoundValues>> {
    let theta = 1.0 - 1.0 / q as f64;
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|i| bound_curves(theta * i as f64 / steps as f64, q))
        .collect()
}

/// CSV with header `delta,plotkin,hamming,elias,gv,tvz`; `tvz` is empty where undefined.
pub fn bounds_csv(rows: &[BoundValues]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| QError::InvalidState(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| QError::InvalidState(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumBounds {
    pub hamming_q: f64,
    /// Undefined once `2t/n` passes 1.
    pub gv_q: Option<f64>,
}

/// Rate bounds for `[[n, k]]` codes correcting `t` errors, `x = t/n`:
/// `1 - H2(x) - x log2 3` above and `1 - H2(2x) - 2x log2 3` below.
pub fn quantum_bounds(t: usize, n: usize) -> Result<QuantumBounds> {
    if n == 0 {
        return Err(QError::InvalidArgument("n must be positive".into()));
    }
    let x = t as f64 / n as f64;
    if x >= 0.75 {
        return Err(QError::InvalidArgument(format!("t/n = {x} must be below 3/4")));
    }
    let l3 = 3f64.log2();
    let gv_q = if 2.0 * x <= 1.0 {
        Some(1.0 - h2(2.0 * x)? - 2.0 * x * l3)
    } else {
        None
    };
    Ok(QuantumBounds {
        hamming_q: 1.0 - h2(x)? - x * l3,
        gv_q,
    })
}
