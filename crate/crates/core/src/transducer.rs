//! Strictly monotone maps from bits or distances to abstract cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransducerKind {
    Identity,
    /// `slope * x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `scale * x^exponent`, defined for `x >= 0`.
    Power { exponent: f64, scale: f64 },
    /// `scale * exp(rate * x)`
    Exponential { rate: f64, scale: f64 },
    /// Piecewise linear through `knots`, extended linearly past both ends.
    Tabulated { knots: Vec<(f64, f64)> },
    /// Sum of `coefficients[k] * x^k`.
    Polynomial { coefficients: Vec<f64> },
}

/// A cost transducer with a declared monotone direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTransducer {
    pub kind: TransducerKind,
    pub direction: Direction,
}

impl CostTransducer {
    pub fn identity() -> Self {
        CostTransducer { kind: TransducerKind::Identity, direction: Direction::Increasing }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        CostTransducer {
            kind: TransducerKind::Affine { slope, intercept },
            direction: if slope < 0.0 { Direction::Decreasing } else { Direction::Increasing },
        }
    }

    pub fn power(exponent: f64, scale: f64) -> Self {
        CostTransducer {
            kind: TransducerKind::Power { exponent, scale },
            direction: if scale < 0.0 { Direction::Decreasing } else { Direction::Increasing },
        }
    }

    /// `x^2`
    pub fn square() -> Self {
        Self::power(2.0, 1.0)
    }

    pub fn exponential(rate: f64, scale: f64) -> Self {
        CostTransducer {
            kind: TransducerKind::Exponential { rate, scale },
            direction: if rate * scale < 0.0 { Direction::Decreasing } else { Direction::Increasing },
        }
    }

    /// `base^x`
    pub fn exp_base(base: f64) -> Self {
        Self::exponential(base.ln(), 1.0)
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Self {
        let direction = match (knots.first(), knots.last()) {
            (Some(a), Some(b)) if b.1 < a.1 => Direction::Decreasing,
            _ => Direction::Increasing,
        };
        CostTransducer { kind: TransducerKind::Tabulated { knots }, direction }
    }

    pub fn polynomial(coefficients: Vec<f64>, direction: Direction) -> Self {
        CostTransducer { kind: TransducerKind::Polynomial { coefficients }, direction }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match &self.kind {
            TransducerKind::Identity => x,
            TransducerKind::Affine { slope, intercept } => slope * x + intercept,
            TransducerKind::Power { exponent, scale } => scale * x.max(0.0).powf(*exponent),
            TransducerKind::Exponential { rate, scale } => scale * (rate * x).exp(),
            TransducerKind::Tabulated { knots } => interpolate(knots, x),
            TransducerKind::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
        }
    }

    /// Check strict monotonicity in the declared direction over `[0, domain_max]`.
    ///
    /// Parametric kinds are checked analytically; tabulated kinds on their
    /// knots; polynomials on a dense grid.
    pub fn validate(&self, domain_max: f64) -> Result<()> {
        let bad = |why: String| Err(Error::NonMonotoneTransducer(why));
        let sign = match self.direction {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        };
        match &self.kind {
            TransducerKind::Identity => {
                if self.direction != Direction::Increasing {
                    return bad("identity is increasing".into());
                }
            }
            TransducerKind::Affine { slope, .. } => {
                if !(sign * slope > 0.0) {
                    return bad(format!("affine slope {slope} does not match {:?}", self.direction));
                }
            }
            TransducerKind::Power { exponent, scale } => {
                if !(*exponent > 0.0) || !(sign * scale > 0.0) {
                    return bad(format!("power x^{exponent} scaled by {scale}"));
                }
            }
            TransducerKind::Exponential { rate, scale } => {
                if !(sign * rate * scale > 0.0) {
                    return bad(format!("exponential rate {rate} scale {scale}"));
                }
            }
            TransducerKind::Tabulated { knots } => {
                if knots.len() < 2 {
                    return bad("tabulated transducer needs at least two knots".into());
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) || !(sign * (w[1].1 - w[0].1) > 0.0) {
                        return bad(format!("knots {:?} -> {:?} are not strictly monotone", w[0], w[1]));
                    }
                }
            }
            TransducerKind::Polynomial { .. } => {
                const STEPS: usize = 4096;
                let hi = domain_max.max(1.0);
                let mut prev = self.apply(0.0);
                for k in 1..=STEPS {
                    let x = hi * k as f64 / STEPS as f64;
                    let y = self.apply(x);
                    if !(sign * (y - prev) > 0.0) {
                        return bad(format!("polynomial not strictly monotone near x = {x}"));
                    }
                    prev = y;
                }
            }
        }
        Ok(())
    }

    pub fn require(&self, direction: Direction, domain_max: f64) -> Result<()> {
        if self.direction != direction {
            return Err(Error::NonMonotoneTransducer(format!(
                "expected a {direction:?} transducer, got {:?}",
                self.direction
            )));
        }
        self.validate(domain_max)
    }

    /// Parse the short CLI forms `identity`, `square`, `cube`, `exp:<base>`,
    /// `pow:<exponent>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let t = match spec {
            "identity" => Self::identity(),
            "square" => Self::square(),
            "cube" => Self::power(3.0, 1.0),
            _ => {
                let (head, arg) = spec
                    .split_once(':')
                    .ok_or_else(|| Error::Usage(format!("unknown transducer {spec:?}")))?;
                let v: f64 = arg
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad transducer parameter {arg:?}")))?;
                match head {
                    "exp" => Self::exp_base(v),
                    "pow" => Self::power(v, 1.0),
                    _ => return Err(Error::Usage(format!("unknown transducer {spec:?}"))),
                }
            }
        };
        t.validate(1.0)?;
        Ok(t)
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    match knots.len() {
        0 => x,
        1 => knots[0].1,
        n => {
            let i = match knots.iter().position(|k| k.0 >= x) {
                Some(0) => 0,
                Some(i) => i - 1,
                None => n - 2,
            };
            let (x0, y0) = knots[i];
            let (x1, y1) = knots[i + 1];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}
