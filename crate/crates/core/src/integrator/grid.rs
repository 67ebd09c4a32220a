use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing time nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidParameter("time grid is empty".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("time grid has non-finite nodes".into()));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "time grid not strictly increasing at node {}",
                k + 1
            )));
        }
        Ok(Self { times })
    }

    /// Nodes `t0, t0 + h, ...`, with the last step shortened to land on `t1`.
    pub fn uniform(t0: f64, t1: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(t1 > t0) {
            return Err(Error::InvalidParameter(format!(
                "uniform grid needs h > 0 and t1 > t0 (h = {h}, [{t0}, {t1}])"
            )));
        }
        let steps = ((t1 - t0) / h - 1e-9).ceil().max(1.0) as usize;
        let mut times: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * h).collect();
        times.push(t1);
        Self::new(times)
    }

    /// Geometric refinement near zero: `h(t) = clamp(rel·t, h_min, h_max)`.
    ///
    /// Where `rel·t` lies between the clamps, the nodes are uniform in
    /// `log t`.
    pub fn graded(t1: f64, h_min: f64, rel: f64, h_max: f64) -> Result<Self> {
        if !(h_min > 0.0 && rel >= 0.0 && h_max >= h_min && t1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "graded grid needs 0 < h_min <= h_max, rel >= 0, t1 > 0 (got {h_min}, {rel}, {h_max}, {t1})"
            )));
        }
        let mut times = vec![0.0];
        let mut t = 0.0_f64;
        while t < t1 {
            let h = (rel * t).clamp(h_min, h_max);
            t = if t + h > t1 - 1e-3 * h { t1 } else { t + h };
            times.push(t);
        }
        Self::new(times)
    }

    /// Same nodes with every step halved.
    pub fn refined(&self) -> Self {
        let mut times = Vec::with_capacity(2 * self.times.len());
        for w in self.times.windows(2) {
            times.push(w[0]);
            times.push(0.5 * (w[0] + w[1]));
        }
        times.push(*self.times.last().expect("grid is nonempty"));
        Self { times }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn max_step(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_lands_on_endpoint() {
        let g = TimeGrid::uniform(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.times(), &[0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        let g = TimeGrid::uniform(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.end(), 1.0);
    }

    #[test]
    fn graded_is_log_uniform_in_the_middle() {
        let g = TimeGrid::graded(100.0, 1e-3, 0.01, 0.5).unwrap();
        let t = g.times();
        assert_eq!(t[1], 1e-3);
        let k = t.iter().position(|&s| s > 1.0).unwrap();
        assert!(((t[k + 1] - t[k]) / t[k] - 0.01).abs() < 1e-12);
        assert!(g.max_step() <= 0.5 + 1e-12);
        assert_eq!(g.end(), 100.0);
    }

    #[test]
    fn refinement_halves_steps() {
        let g = TimeGrid::uniform(0.0, 1.0, 0.5).unwrap().refined();
        assert_eq!(g.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(TimeGrid::new(vec![0.0, 0.0]).is_err());
    }
}
