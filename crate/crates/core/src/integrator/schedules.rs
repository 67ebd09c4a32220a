//! Scalar parameter paths `t ↦ β(t), ε(t), α(t)` and vector paths `t ↦ f(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleRole {
    Beta,
    Epsilon,
    Alpha,
    Forcing,
}

/// A scalar schedule family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Schedule {
    /// `c (1 + t)^p`
    Power { c: f64, p: f64 },
    /// `c e^{r t}`
    Exponential { c: f64, r: f64 },
    /// `c ln(2 + t)^p`
    Logarithmic { c: f64, p: f64 },
    /// `c`
    Constant { c: f64 },
    /// `c (1 + amp·sin(ω t)) (1 + t)^p`
    OscillatingPower { c: f64, amp: f64, omega: f64, p: f64 },
    /// Piecewise-linear interpolation of `(times, values)`.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl Schedule {
    pub fn power(c: f64, p: f64) -> Self {
        Schedule::Power { c, p }
    }

    pub fn constant(c: f64) -> Self {
        Schedule::Constant { c }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Schedule::Power { c, p } => c * (1.0 + t).powf(*p),
            Schedule::Exponential { c, r } => c * (r * t).exp(),
            Schedule::Logarithmic { c, p } => c * (2.0 + t).ln().powf(*p),
            Schedule::Constant { c } => *c,
            Schedule::OscillatingPower { c, amp, omega, p } => {
                c * (1.0 + amp * (omega * t).sin()) * (1.0 + t).powf(*p)
            }
            Schedule::Tabulated { times, values } => interpolate(times, values, t),
        }
    }

    /// `∫_0^t` in closed form, when the family has one.
    pub fn antiderivative(&self, t: f64) -> Option<f64> {
        match self {
            Schedule::Power { c, p } => Some(if (*p + 1.0).abs() < 1e-15 {
                c * (1.0 + t).ln()
            } else {
                c * ((1.0 + t).powf(p + 1.0) - 1.0) / (p + 1.0)
            }),
            Schedule::Exponential { c, r } => Some(if *r == 0.0 {
                c * t
            } else {
                c * ((r * t).exp() - 1.0) / r
            }),
            Schedule::Constant { c } => Some(c * t),
            _ => None,
        }
    }

    /// `∫_{t0}^{t1}`, exact when available, else composite Simpson on a fine
    /// log-graded partition.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        if let (Some(a), Some(b)) = (self.antiderivative(t0), self.antiderivative(t1)) {
            return b - a;
        }
        let pieces = 64 + (((1.0 + t1) / (1.0 + t0)).ln() * 512.0) as usize + ((t1 - t0) * 8.0) as usize;
        let pieces = pieces.min(2_000_000) & !1;
        let h = (t1 - t0) / pieces as f64;
        let mut sum = self.value(t0) + self.value(t1);
        for k in 1..pieces {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * self.value(t0 + k as f64 * h);
        }
        sum * h / 3.0
    }

    pub fn describe(&self) -> String {
        match self {
            Schedule::Power { c, p } => format!("{c}(1+t)^{p}"),
            Schedule::Exponential { c, r } => format!("{c}e^({r}t)"),
            Schedule::Logarithmic { c, p } => format!("{c}ln(2+t)^{p}"),
            Schedule::Constant { c } => format!("{c}"),
            Schedule::OscillatingPower { c, amp, omega, p } => {
                format!("{c}(1+{amp}sin({omega}t))(1+t)^{p}")
            }
            Schedule::Tabulated { times, .. } => format!("tabulated({} nodes)", times.len()),
        }
    }

    /// Checks positivity on the given nodes (and, for tabulated data, that
    /// the table covers `[0, horizon]`).
    pub fn check_positive(&self, name: &str, nodes: &[f64]) -> Result<()> {
        if let Schedule::Tabulated { times, values } = self {
            if times.len() != values.len() || times.is_empty() {
                return Err(Error::Config(format!("schedule `{name}`: malformed table")));
            }
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(format!("schedule `{name}`: table times must increase")));
            }
            let (lo, hi) = (times[0], times[times.len() - 1]);
            if let (Some(&first), Some(&last)) = (nodes.first(), nodes.last()) {
                if first < lo - 1e-12 || last > hi + 1e-12 {
                    return Err(Error::Config(format!(
                        "schedule `{name}`: table covers [{lo}, {hi}], horizon needs [{first}, {last}]"
                    )));
                }
            }
        }
        for &t in nodes {
            let v = self.value(t);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveSchedule {
                    name: name.to_string(),
                    t,
                });
            }
        }
        Ok(())
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    if times.is_empty() {
        return f64::NAN;
    }
    if t <= times[0] {
        return values[0];
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return values[last];
    }
    let k = times.partition_point(|&s| s <= t) - 1;
    let w = (t - times[k]) / (times[k + 1] - times[k]);
    values[k] * (1.0 - w) + values[k + 1] * w
}

/// `f(t) = base + s(t) · direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorPath {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub decay: Schedule,
}

impl VectorPath {
    pub fn new(base: Vector, direction: Vector, decay: Schedule) -> Self {
        Self {
            base: base.iter().copied().collect(),
            direction: direction.iter().copied().collect(),
            decay,
        }
    }

    pub fn constant(base: Vector) -> Self {
        let n = base.len();
        Self::new(base, Vector::zeros(n), Schedule::constant(0.0))
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn value(&self, t: f64) -> Vector {
        let s = self.decay.value(t);
        Vector::from_iterator(
            self.base.len(),
            self.base.iter().zip(&self.direction).map(|(b, d)| b + s * d),
        )
    }

    /// `f_∞ = base`; the decay schedule is expected to vanish at infinity.
    pub fn limit(&self) -> Vector {
        Vector::from_column_slice(&self.base)
    }

    pub fn direction(&self) -> Vector {
        Vector::from_column_slice(&self.direction)
    }
}
