use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::brain::NetworkId;
use crate::error::{Error, Result};

/// Default similarity a head must reach to count as matched.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.8;
/// Relaxed threshold for models with no matches at the default.
pub const RELAXED_MATCH_THRESHOLD: f64 = 0.6;

/// Network with the highest similarity, if that similarity reaches
/// `threshold`. Ties go to the earlier network.
pub fn match_head(s: &[f64; 7], threshold: f64) -> Option<NetworkId> {
    let mut best = 0;
    for i in 1..7 {
        if s[i] > s[best] {
            best = i;
        }
    }
    (s[best] >= threshold).then_some(NetworkId::ALL[best])
}

/// Pearson correlation with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Two-sided p-value of a Pearson `r` over `n` pairs, from the t distribution
/// with `n − 2` degrees of freedom.
pub fn pearson_p_value(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid("p-value needs at least 3 pairs"));
    }
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

pub fn correlate(xs: &[f64], ys: &[f64]) -> Result<Correlation> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "correlation inputs differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::invalid("correlation needs at least 3 pairs"));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation of a constant series".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(Correlation {
        r,
        p: pearson_p_value(r, n)?,
        n,
    })
}
