//! Derivative-free simplex minimization.
//!
//! Adaptive coefficients (Gao & Han) keep the method usable in the 20-odd
//! dimensions of the sphere problems; after convergence the search is
//! restarted from a fresh simplex around the best point until a restart no
//! longer improves it.

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub initial_step: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub xtol: f64,
    /// Total objective evaluations, restarts included.
    pub max_evals: usize,
    pub max_restarts: usize,
}

impl Options {
    /// Diameter `1e-8`, budget `400 · dim`.
    pub fn for_dim(dim: usize) -> Self {
        Options {
            initial_step: 0.1,
            xtol: 1e-8,
            max_evals: 400 * dim.max(1),
            max_restarts: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn minimize(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: Options) -> Minimum {
    let n = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evals);
        return Minimum {
            x: vec![],
            value,
            evaluations: evals,
            converged: true,
        };
    }

    let nf = n as f64;
    let (rho, chi) = (1.0, 1.0 + 2.0 / nf);
    let psi = 0.75 - 0.5 / nf;
    let sigma = 1.0 - 1.0 / nf;

    let mut best_x = x0.to_vec();
    let mut best_v = eval(x0, &mut evals);
    let mut step = opts.initial_step;
    let mut converged = false;

    for restart in 0..=opts.max_restarts {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_v));
        for i in 0..n {
            let mut x = best_x.clone();
            x[i] += step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        converged = false;
        while evals < opts.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if diameter < opts.xtol {
                converged = true;
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(rho);
            let vr = eval(&xr, &mut evals);
            if vr < simplex[0].1 {
                let xe = along(rho * chi);
                let ve = eval(&xe, &mut evals);
                simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
            } else if vr < simplex[n - 1].1 {
                simplex[n] = (xr, vr);
            } else {
                let (xc, vc) = if vr < simplex[n].1 {
                    let xc = along(rho * psi);
                    let vc = eval(&xc, &mut evals);
                    (xc, vc)
                } else {
                    let xc = along(-psi);
                    let vc = eval(&xc, &mut evals);
                    (xc, vc)
                };
                if vc < vr.min(simplex[n].1) {
                    simplex[n] = (xc, vc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for (x, v) in simplex[1..].iter_mut() {
                        for (xi, bi) in x.iter_mut().zip(&x0) {
                            *xi = bi + sigma * (*xi - bi);
                        }
                        *v = eval(x, &mut evals);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best_v - 1e-14 * best_v.abs().max(1.0);
        if simplex[0].1 <= best_v {
            best_x = simplex[0].0.clone();
            best_v = simplex[0].1;
        }
        if evals >= opts.max_evals || (restart > 0 && !improved) {
            break;
        }
        step = (step * 0.1).max(100.0 * opts.xtol);
    }
    Minimum {
        x: best_x,
        value: best_v,
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = minimize(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + (x[2] - 0.5).powi(2),
            &[0.0, 0.0, 0.0],
            Options::for_dim(3),
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-7 && (m.x[1] + 2.0).abs() < 1e-7 && (m.x[2] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn rosenbrock() {
        let opts = Options {
            max_evals: 20_000,
            ..Options::for_dim(2)
        };
        let m = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            opts,
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn budget_respected_and_infinite_values_avoided() {
        let opts = Options {
            max_evals: 50,
            ..Options::for_dim(4)
        };
        let m = minimize(
            |x| {
                if x[0] > 0.5 {
                    f64::INFINITY
                } else {
                    x.iter().map(|v| v * v).sum()
                }
            },
            &[0.4, 1.0, 1.0, 1.0],
            opts,
        );
        assert!(m.evaluations <= 50 + 5);
        assert!(m.value.is_finite());
    }
}
