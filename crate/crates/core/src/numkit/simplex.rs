//! Nelder-Mead downhill simplex minimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions {
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_evaluations: usize,
    /// Number of fresh-simplex restarts from the best point found.
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-9,
            x_tol: 1e-9,
            max_evaluations: 40_000,
            restarts: 1,
        }
    }
}

impl SimplexOptions {
    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.f_tol > 0.0 && self.x_tol > 0.0) {
            return Err(Error::InvalidArgument("simplex tolerances must be positive".into()));
        }
        if self.max_evaluations < dim + 1 {
            return Err(Error::InvalidArgument(format!(
                "max_evaluations {} < dimension + 1 = {}",
                self.max_evaluations,
                dim + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// Whether the last run stopped on tolerance rather than on budget.
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `objective` from `x0`. After the first run converges the search
/// is restarted `opts.restarts` times from the incumbent with a fresh
/// simplex; the best point over all runs is returned, so `f <= objective(x0)`.
pub fn nelder_mead<F>(mut objective: F, x0: &[f64], opts: &SimplexOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    opts.validate(x0.len())?;
    let mut best = run(&mut objective, x0, opts)?;
    for _ in 0..opts.restarts {
        let again = run(&mut objective, &best.x, opts)?;
        let evaluations = best.evaluations + again.evaluations;
        if again.f <= best.f {
            best = again;
        } else {
            best.converged = again.converged;
        }
        best.evaluations = evaluations;
    }
    Ok(best)
}

fn run<F>(objective: &mut F, x0: &[f64], opts: &SimplexOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let f = objective(x);
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::ObjectiveDiverged)
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals)?;
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += (0.05 * x0[i].abs()).max(0.00025);
        let f = eval(&x, &mut evals)?;
        simplex.push((x, f));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));

        let f_best = simplex[0].1;
        let f_spread = simplex.iter().map(|v| (v.1 - f_best).abs()).fold(0.0, f64::max);
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.0.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol && x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evaluations {
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(&v.0) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = eval(&xr, &mut evals)?;
        if fr < simplex[0].1 {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&xe, &mut evals)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let shrink_needed = if fr < worst.1 {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&xc, &mut evals)?;
            if fc <= fr {
                simplex[n] = (xc, fc);
                false
            } else {
                true
            }
        } else {
            let xcc = along(-CONTRACT);
            let fcc = eval(&xcc, &mut evals)?;
            if fcc < worst.1 {
                simplex[n] = (xcc, fcc);
                false
            } else {
                true
            }
        };
        if shrink_needed {
            let anchor = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = anchor
                    .iter()
                    .zip(&v.0)
                    .map(|(a, xi)| a + SHRINK * (xi - a))
                    .collect();
                let f = eval(&x, &mut evals)?;
                *v = (x, f);
            }
        }
    }

    let (x, f) = simplex.swap_remove(0);
    Ok(SimplexResult {
        x,
        f,
        evaluations: evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_parabola() {
        let r = nelder_mead(|x| (x[0] - 2.0).powi(2), &[0.0], &SimplexOptions::default()).unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-4);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], &SimplexOptions::default()).unwrap();
        assert!(r.f < 1e-6);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_objective_returns_start() {
        let x0 = [0.3, -1.0, 4.0];
        let r = nelder_mead(|_| 7.0, &x0, &SimplexOptions::default()).unwrap();
        assert_eq!(r.x, x0.to_vec());
        assert_eq!(r.f, 7.0);
        assert!(r.converged);
    }

    #[test]
    fn divergence_is_reported() {
        let r = nelder_mead(
            |x| if x[0] > 0.0 { f64::NAN } else { x[0] * x[0] },
            &[0.0],
            &SimplexOptions::default(),
        );
        assert_eq!(r.unwrap_err(), Error::ObjectiveDiverged);
    }

    #[test]
    fn rejects_tiny_budget() {
        let opts = SimplexOptions {
            max_evaluations: 2,
            ..SimplexOptions::default()
        };
        assert!(nelder_mead(|x| x[0] + x[1], &[0.0, 0.0], &opts).is_err());
    }
}
