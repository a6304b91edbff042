/// Nelder–Mead simplex search for a maximum of `f`, started from `start`
/// with an initial per-coordinate step of `step`.
///
/// Fully deterministic: ties in the simplex ordering are broken by vertex
/// index. Returns the best vertex and its value once the value spread and
/// simplex extent both fall below tight tolerances or the evaluation budget
/// runs out.
pub fn nelder_mead_max(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;
    const VALUE_TOL: f64 = 1e-12;
    const EXTENT_TOL: f64 = 1e-9;

    let dim = start.len();
    assert!(dim >= 1, "need at least one coordinate");

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evals)).collect();

    loop {
        // Order descending by value (best first), index-stable.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| {
            values[j]
                .partial_cmp(&values[i])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        });
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = values[best] - values[worst];
        let extent = simplex
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        if (spread.abs() <= VALUE_TOL * (1.0 + values[best].abs()) && extent <= EXTENT_TOL)
            || evals >= max_evals
        {
            return (simplex[best].clone(), values[best]);
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for (idx, p) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = towards(REFLECT);
        let fr = eval(&reflected, &mut evals);

        if fr > values[best] {
            let expanded = towards(EXPAND);
            let fe = eval(&expanded, &mut evals);
            if fe > fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr > values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }

        let contracted = towards(-CONTRACT);
        let fc = eval(&contracted, &mut evals);
        if fc > values[worst] {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }

        // Shrink toward the best vertex.
        let anchor = simplex[best].clone();
        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + SHRINK * (*x - a);
            }
            values[idx] = eval(&simplex[idx].clone(), &mut evals);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximizes_negative_quadratic_2d() {
        let f = |x: &[f64]| -(x[0] - 0.4).powi(2) - 2.0 * (x[1] + 1.3).powi(2);
        let (x, fx) = nelder_mead_max(f, &[0.0, 0.0], 0.5, 4000);
        assert!((x[0] - 0.4).abs() < 1e-6);
        assert!((x[1] + 1.3).abs() < 1e-6);
        assert!(fx > -1e-10);
    }

    #[test]
    fn maximizes_1d_cosine() {
        let (x, _) = nelder_mead_max(|x: &[f64]| x[0].cos(), &[0.8], 0.3, 2000);
        assert!(x[0].abs() < 1e-6);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = |x: &[f64]| -(x[0].powi(2) + (x[1] - 2.0).powi(2)) + (3.0 * x[0]).cos();
        let a = nelder_mead_max(f, &[1.0, 1.0], 0.7, 3000);
        let b = nelder_mead_max(f, &[1.0, 1.0], 0.7, 3000);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
