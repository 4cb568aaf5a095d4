//! Least-squares fits of decay series to `eta^t` and
//! `alpha1 eta1^t + alpha2 eta2^t`.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};

/// Values sampled at times `steps` (in units of the drive period), with
/// optional standard errors that switch on inverse-variance weighting.
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySeries {
    pub steps: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

impl DecaySeries {
    /// Values at steps `0, 1, 2, ...`.
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            steps: (0..values.len()).map(|n| n as f64).collect(),
            values,
            stderr: None,
        }
    }

    pub fn with_steps(steps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if steps.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: steps.len(),
                right: values.len(),
            });
        }
        Ok(Self {
            steps,
            values,
            stderr: None,
        })
    }

    pub fn with_stderr(mut self, stderr: Vec<f64>) -> Result<Self> {
        if stderr.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                left: stderr.len(),
                right: self.values.len(),
            });
        }
        self.stderr = Some(stderr);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, min_points: usize) -> Result<()> {
        if self.len() < min_points {
            return Err(Error::Fit(format!(
                "need at least {min_points} points, got {}",
                self.len()
            )));
        }
        if self.steps.iter().chain(&self.values).any(|x| !x.is_finite()) {
            return Err(Error::Fit("non-finite step or value".into()));
        }
        if self.steps.iter().any(|&t| t < 0.0) {
            return Err(Error::Fit("negative step".into()));
        }
        Ok(())
    }

    /// Square roots of the least-squares weights.
    fn root_weights(&self) -> Result<Vec<f64>> {
        match &self.stderr {
            None => Ok(vec![1.0; self.len()]),
            Some(s) => s
                .iter()
                .map(|&e| {
                    if e > 0.0 && e.is_finite() {
                        Ok(1.0 / e)
                    } else {
                        Err(Error::Fit(format!("standard error {e} is not positive")))
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingleExpFit {
    pub eta: f64,
    /// Weighted residual norm.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubleExpFit {
    pub alpha1: f64,
    pub eta1: f64,
    pub alpha2: f64,
    pub eta2: f64,
    pub residual: f64,
}

impl DoubleExpFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.alpha1 * self.eta1.powf(t) + self.alpha2 * self.eta2.powf(t)
    }
}

/// `t eta^(t-1)`, taken as zero at `t = 0`.
fn dpow(eta: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * eta.powf(t - 1.0)
    }
}

struct Single<'a> {
    s: &'a DecaySeries,
    w: Vec<f64>,
}

impl Single<'_> {
    fn cost(&self, eta: f64) -> f64 {
        let terms = self.s.steps.iter().zip(&self.s.values).zip(&self.w);
        terms.map(|((&t, &v), &w)| (w * (eta.powf(t) - v)).powi(2)).sum()
    }

    fn slope(&self, eta: f64) -> f64 {
        let terms = self.s.steps.iter().zip(&self.s.values).zip(&self.w);
        2.0 * terms
            .map(|((&t, &v), &w)| w * w * (eta.powf(t) - v) * dpow(eta, t))
            .sum::<f64>()
    }

    /// Root of the slope in `[lo, hi]`, given a sign change from `-` to `+`.
    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Least-squares `eta` in `(0, 1]` for `values_n ~ eta^(steps_n)`.
///
/// A grid scan of the cost slope locates every interior minimum, each is
/// refined by bisection on the slope to machine precision, and the
/// boundary `eta = 1` is a candidate whenever the cost still decreases
/// there.
pub fn fit_single_exp(series: &DecaySeries) -> Result<SingleExpFit> {
    const GRID: usize = 1000;
    const ETA_MIN: f64 = 1e-12;
    series.check(3)?;
    if series.values.iter().any(|&v| v <= 0.0) {
        return Err(Error::Fit("single-exponential fit needs positive values".into()));
    }
    let f = Single {
        s: series,
        w: series.root_weights()?,
    };
    let grid: Vec<f64> = std::iter::once(ETA_MIN)
        .chain((1..=GRID).map(|k| k as f64 / GRID as f64))
        .collect();
    let slopes: Vec<f64> = grid.iter().map(|&e| f.slope(e)).collect();
    let mut candidates = Vec::new();
    if slopes[0] >= 0.0 {
        candidates.push(ETA_MIN);
    }
    for k in 0..GRID {
        if slopes[k] < 0.0 && slopes[k + 1] >= 0.0 {
            candidates.push(f.bisect(grid[k], grid[k + 1]));
        }
    }
    if slopes[GRID] <= 0.0 {
        candidates.push(1.0);
    }
    let eta = candidates
        .into_iter()
        .min_by(|a, b| f.cost(*a).total_cmp(&f.cost(*b)))
        .ok_or_else(|| Error::Fit("no minimum located".into()))?;
    Ok(SingleExpFit {
        eta,
        residual: f.cost(eta).sqrt(),
    })
}

struct Double<'a> {
    s: &'a DecaySeries,
    w: Vec<f64>,
}

type Params = Vector4<f64>;

const ETA_FLOOR: f64 = 1e-9;

fn project(p: Params) -> Params {
    Params::new(
        p[0].max(0.0),
        p[1].clamp(ETA_FLOOR, 1.0),
        p[2].max(0.0),
        p[3].clamp(ETA_FLOOR, 1.0),
    )
}

impl Double<'_> {
    fn residuals(&self, p: &Params) -> Vec<f64> {
        let terms = self.s.steps.iter().zip(&self.s.values).zip(&self.w);
        terms
            .map(|((&t, &v), &w)| w * (p[0] * p[1].powf(t) + p[2] * p[3].powf(t) - v))
            .collect()
    }

    fn cost(&self, p: &Params) -> f64 {
        self.residuals(p).iter().map(|r| r * r).sum()
    }

    /// Projected Levenberg-Marquardt from `start`; returns the end point
    /// and its cost.
    fn descend(&self, start: Params) -> (Params, f64) {
        let mut p = project(start);
        let mut cost = self.cost(&p);
        let mut lambda = 1e-3;
        for _ in 0..2000 {
            let r = self.residuals(&p);
            let mut jtj = Matrix4::<f64>::zeros();
            let mut jtr = Params::zeros();
            for ((&t, &w), &ri) in self.s.steps.iter().zip(&self.w).zip(&r) {
                let row = Params::new(
                    w * p[1].powf(t),
                    w * p[0] * dpow(p[1], t),
                    w * p[3].powf(t),
                    w * p[2] * dpow(p[3], t),
                );
                jtj += row * row.transpose();
                jtr += row * ri;
            }
            let mut improved = false;
            while lambda < 1e16 {
                let mut a = jtj;
                for i in 0..4 {
                    a[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-jtr)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial = project(p + step);
                let trial_cost = self.cost(&trial);
                if trial_cost < cost {
                    let gain = cost - trial_cost;
                    p = trial;
                    let converged = gain <= 1e-15 * cost + 1e-30;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = !converged;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (p, cost)
    }

    /// Nonnegative amplitudes for fixed rates by weighted linear least squares.
    fn amplitudes(&self, e1: f64, e2: f64) -> (f64, f64) {
        let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&t, &v), &w) in self.s.steps.iter().zip(&self.s.values).zip(&self.w) {
            let (x, y) = (w * e1.powf(t), w * e2.powf(t));
            s11 += x * x;
            s12 += x * y;
            s22 += y * y;
            b1 += x * w * v;
            b2 += y * w * v;
        }
        let det = s11 * s22 - s12 * s12;
        let (a1, a2) = if det.abs() > 1e-300 {
            ((b1 * s22 - b2 * s12) / det, (b2 * s11 - b1 * s12) / det)
        } else {
            (b1 / s11, 0.0)
        };
        match (a1 >= 0.0, a2 >= 0.0) {
            (true, true) => (a1, a2),
            (true, false) => ((b1 / s11).max(0.0), 0.0),
            _ => (0.0, (b2 / s22).max(0.0)),
        }
    }

    /// Straight-line fits of `ln value` over the late half (slow term) and
    /// of the early-half excess over it (fast term).
    fn log_linear_seed(&self) -> Option<Params> {
        let line = |pts: &[(f64, f64)]| -> Option<(f64, f64)> {
            if pts.len() < 2 {
                return None;
            }
            let n = pts.len() as f64;
            let (mt, my) = (
                pts.iter().map(|p| p.0).sum::<f64>() / n,
                pts.iter().map(|p| p.1).sum::<f64>() / n,
            );
            let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
            if sxx == 0.0 {
                return None;
            }
            let slope = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<f64>() / sxx;
            Some(((my - slope * mt).exp(), slope.exp().min(1.0)))
        };
        let pts: Vec<(f64, f64)> = self
            .s
            .steps
            .iter()
            .copied()
            .zip(self.s.values.iter().copied())
            .collect();
        let half = pts.len() / 2;
        let late: Vec<(f64, f64)> = pts[half..]
            .iter()
            .filter(|p| p.1 > 0.0)
            .map(|p| (p.0, p.1.ln()))
            .collect();
        let (a1, e1) = line(&late)?;
        let early: Vec<(f64, f64)> = pts[..half]
            .iter()
            .map(|p| (p.0, p.1 - a1 * e1.powf(p.0)))
            .filter(|p| p.1 > 0.0)
            .map(|p| (p.0, p.1.ln()))
            .collect();
        let (a2, e2) = line(&early).unwrap_or((0.0, 0.5 * e1));
        Some(Params::new(a1, e1, a2, e2))
    }
}

/// Least squares for `alpha1 eta1^t + alpha2 eta2^t` with `alpha_i >= 0`,
/// `0 < eta_i <= 1`, multi-started from every pair of rates in
/// `{0.5, 0.7, 0.9, 0.99}`, a log-linear seed and the single-exponential
/// fit (which makes the result never worse than that fit). Terms with
/// rates closer than `1e-6` are merged; the result has `alpha1 >= alpha2`.
pub fn fit_double_exp(series: &DecaySeries) -> Result<DoubleExpFit> {
    const RATES: [f64; 4] = [0.5, 0.7, 0.9, 0.99];
    const MERGE: f64 = 1e-6;
    series.check(6)?;
    let f = Double {
        s: series,
        w: series.root_weights()?,
    };
    let mut starts = Vec::new();
    for (i, &e1) in RATES.iter().enumerate() {
        for &e2 in &RATES[..i] {
            let (a1, a2) = f.amplitudes(e1, e2);
            starts.push(Params::new(a1, e1, a2, e2));
        }
    }
    starts.extend(f.log_linear_seed());
    if let Ok(single) = fit_single_exp(series) {
        starts.push(Params::new(1.0, single.eta, 0.0, 0.5 * single.eta));
    }
    let normalise = |p: Params| -> Params {
        let (mut a1, mut e1, mut a2, mut e2) = (p[0], p[1], p[2], p[3]);
        if (e1 - e2).abs() < MERGE || a2 == 0.0 || a1 == 0.0 {
            if a1 == 0.0 {
                (a1, e1) = (a2, e2);
            } else if a2 != 0.0 {
                a1 += a2;
            }
            a2 = 0.0;
            e2 = e1;
        }
        if a2 > a1 {
            (a1, e1, a2, e2) = (a2, e2, a1, e1);
        }
        Params::new(a1, e1, a2, e2)
    };
    let mut best: Option<(Params, f64)> = None;
    for start in starts {
        let (p, _) = f.descend(start);
        let p = normalise(p);
        let cost = f.cost(&p);
        best = match best {
            None => Some((p, cost)),
            Some((bp, bc)) => {
                let tie = (cost - bc).abs() <= 1e-12 * (1.0 + bc);
                if (tie && p[2] < bp[2]) || (!tie && cost < bc) {
                    Some((p, cost))
                } else {
                    Some((bp, bc))
                }
            }
        };
    }
    let (p, cost) = best.expect("at least the grid starts exist");
    Ok(DoubleExpFit {
        alpha1: p[0],
        eta1: p[1],
        alpha2: p[2],
        eta2: p[3],
        residual: cost.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_undamped() {
        let fit = fit_single_exp(&DecaySeries::new(vec![1.0; 10])).unwrap();
        assert_eq!(fit.eta, 1.0);
        let d = fit_double_exp(&DecaySeries::new(vec![1.0; 10])).unwrap();
        assert!((d.alpha1 - 1.0).abs() < 1e-9 && (d.eta1 - 1.0).abs() < 1e-9 && d.alpha2 < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_single_exp(&DecaySeries::new(vec![1.0, 0.9])).is_err());
        assert!(fit_single_exp(&DecaySeries::new(vec![1.0, 0.5, -0.1])).is_err());
        assert!(fit_double_exp(&DecaySeries::new(vec![1.0; 5])).is_err());
        let s = DecaySeries::new(vec![1.0; 4])
            .with_stderr(vec![0.1, 0.0, 0.1, 0.1])
            .unwrap();
        assert!(fit_single_exp(&s).is_err());
    }
}
