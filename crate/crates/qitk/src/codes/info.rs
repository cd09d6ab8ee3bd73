//! Classical entropies, mutual information and the typicality counter.

use serde::Serialize;

use crate::error::{QError, Result};

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| !(x >= -1e-12)) {
        return Err(QError::InvalidArgument("probabilities must be non-negative".into()));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(QError::InvalidArgument(format!("distribution sums to {s}")));
    }
    Ok(())
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `H = -sum p log2 p` in bits.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(-p.iter().map(|&x| xlog2x(x)).sum::<f64>())
}

fn check_unit(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QError::InvalidArgument(format!("{p} is not a probability")));
    }
    Ok(())
}

/// Binary entropy.
pub fn h2(p: f64) -> Result<f64> {
    check_unit(p)?;
    Ok(-xlog2x(p) - xlog2x(1.0 - p))
}

/// `q`-ary entropy `x log_q(q-1) - x log_q x - (1-x) log_q(1-x)` on `[0, 1 - 1/q]`.
pub fn hq(x: f64, q: u32) -> Result<f64> {
    if q < 2 {
        return Err(QError::InvalidArgument("alphabet size must be at least 2".into()));
    }
    let theta = 1.0 - 1.0 / q as f64;
    if !(-1e-12..=theta + 1e-12).contains(&x) {
        return Err(QError::InvalidArgument(format!("{x} outside [0, {theta}]")));
    }
    let x = x.clamp(0.0, theta);
    let lq = (q as f64).log2();
    Ok((x * ((q - 1) as f64).log2() - xlog2x(x) - xlog2x(1.0 - x)) / lq)
}

/// `I(X:Y) = H(X) + H(Y) - H(X,Y)` for a joint table `joint[x][y]`.
pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    if cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(QError::Dimension("joint table must be rectangular".into()));
    }
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    let hxy = shannon_entropy(&flat)?;
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..cols).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    Ok((shannon_entropy(&px)? + shannon_entropy(&py)? - hxy).max(0.0))
}

/// Binary symmetric channel capacity `1 - H2(p)`.
pub fn bsc_capacity(p: f64) -> Result<f64> {
    Ok(1.0 - h2(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalCount {
    pub n: usize,
    pub count: u64,
    /// Probability of the typical set when each bit is 0 with probability `p`.
    pub mass: f64,
    /// `log2(count) / n`
    pub rate: f64,
}

pub const TYPICAL_CAP: usize = 24;

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Length-`n` binary strings whose fraction of zeros lies within `tol` of `p`.
pub fn typical_count(p: f64, n: usize, tol: f64) -> Result<TypicalCount> {
    check_unit(p)?;
    if n == 0 || n > TYPICAL_CAP {
        return Err(QError::CapExceeded { dim: n, cap: TYPICAL_CAP });
    }
    let mut count = 0u64;
    let mut mass = 0.0;
    for zeros in 0..=n {
        if (zeros as f64 / n as f64 - p).abs() <= tol + 1e-12 {
            let c = binomial(n, zeros);
            count += c;
            mass += c as f64 * p.powi(zeros as i32) * (1.0 - p).powi((n - zeros) as i32);
        }
    }
    Ok(TypicalCount {
        n,
        count,
        mass,
        rate: if count == 0 { 0.0 } else { (count as f64).log2() / n as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!(shannon_entropy(&[0.5, 0.4]).is_err());
        assert!(bsc_capacity(0.5).unwrap().abs() < 1e-15);
        assert_eq!(bsc_capacity(0.0).unwrap(), 1.0);
        assert!((hq(0.3, 2).unwrap() - h2(0.3).unwrap()).abs() < 1e-15);
        assert!((hq(2.0 / 3.0, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_cases() {
        let indep = vec![vec![0.08, 0.12], vec![0.32, 0.48]];
        assert!(mutual_information(&indep).unwrap().abs() < 1e-12);
        let copy = vec![vec![0.5, 0.0], vec![0.0, 0.5]];
        assert!((mutual_information(&copy).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn typical_set_by_enumeration() {
        let (p, n, tol) = (0.11, 12, 0.1);
        let t = typical_count(p, n, tol).unwrap();
        let mut count = 0;
        let mut mass = 0.0;
        for x in 0u32..1 << n {
            let zeros = n as u32 - x.count_ones();
            if (zeros as f64 / n as f64 - p).abs() <= tol + 1e-12 {
                count += 1;
                mass += p.powi(zeros as i32) * (1.0 - p).powi(x.count_ones() as i32);
            }
        }
        assert_eq!(t.count, count);
        assert!((t.mass - mass).abs() < 1e-12);
        assert_eq!(typical_count(0.5, 10, 1.0).unwrap().count, 1 << 10);
    }

    #[test]
    fn typical_rate_trend() {
        let h = h2(0.11).unwrap();
        let t = typical_count(0.11, 20, 0.05).unwrap();
        assert!((t.rate - h).abs() < 0.1, "{}", t.rate);
        // a window of 0.1 around p still holds strings of higher entropy
        let wide = typical_count(0.11, 20, 0.1).unwrap();
        assert!((wide.rate - 0.63).abs() < 0.01);
        let m: Vec<f64> = [12, 16, 20].iter().map(|&n| typical_count(0.11, n, 0.1).unwrap().mass).collect();
        assert!(m[0] < m[1] && m[1] < m[2]);
    }
}
