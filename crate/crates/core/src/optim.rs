//! Derivative-free Nelder-Mead simplex minimizer for small problems.

#[derive(Debug, Clone)]
pub struct NelderMead {
    /// Stop when every vertex lies within this distance of the best one.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// Initial simplex edge along each coordinate.
    pub initial_step: Vec<f64>,
    /// Fresh simplexes built around the incumbent after convergence,
    /// guarding against premature collapse.
    pub restarts: usize,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, start: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut best = start.to_vec();
        let mut best_value = eval(&best, &mut evals);
        let mut converged = false;
        let mut step: Vec<f64> = self.initial_step.clone();

        for round in 0..=self.restarts {
            let (x, v, ok) = self.run(&mut eval, &best, best_value, &step, &mut evals);
            if v <= best_value {
                best = x;
                best_value = v;
            }
            converged = ok;
            if !ok || evals >= self.max_evaluations {
                break;
            }
            if round < self.restarts {
                step = step.iter().map(|s| s * 0.1).collect();
            }
        }

        Minimum { x: best, value: best_value, evaluations: evals, converged }
    }

    fn run<E>(&self, eval: &mut E, start: &[f64], start_value: f64, step: &[f64], evals: &mut usize) -> (Vec<f64>, f64, bool)
    where
        E: FnMut(&[f64], &mut usize) -> f64,
    {
        let dim = start.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((start.to_vec(), start_value));
        for i in 0..dim {
            let mut v = start.to_vec();
            v[i] += step[i];
            let fv = eval(&v, evals);
            simplex.push((v, fv));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if diameter(&simplex) < self.tolerance {
                let (x, v) = simplex.swap_remove(0);
                return (x, v, true);
            }
            if *evals >= self.max_evaluations {
                let (x, v) = simplex.swap_remove(0);
                return (x, v, false);
            }

            let centroid: Vec<f64> = (0..dim).map(|j| simplex[..dim].iter().map(|(v, _)| v[j]).sum::<f64>() / dim as f64).collect();
            let worst = simplex[dim].1;
            let second_worst = simplex[dim - 1].1;
            let best = simplex[0].1;

            let along = |t: f64, from: &[f64]| -> Vec<f64> { centroid.iter().zip(from).map(|(c, w)| c + t * (c - w)).collect() };

            let reflected = along(REFLECT, &simplex[dim].0);
            let fr = eval(&reflected, evals);

            if fr < best {
                let expanded = along(EXPAND, &simplex[dim].0);
                let fe = eval(&expanded, evals);
                simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < second_worst {
                simplex[dim] = (reflected, fr);
                continue;
            }

            let (contracted, fc) = if fr < worst {
                let c = along(CONTRACT, &simplex[dim].0);
                let fc = eval(&c, evals);
                (c, fc)
            } else {
                let c = along(-CONTRACT, &simplex[dim].0);
                let fc = eval(&c, evals);
                (c, fc)
            };
            if fc < worst.min(fr) {
                simplex[dim] = (contracted, fc);
                continue;
            }

            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let shrunk: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + SHRINK * (v - a)).collect();
                let fs = eval(&shrunk, evals);
                *vertex = (shrunk, fs);
            }
        }
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..].iter().map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()).fold(0.0, f64::max)
}
