//! Kernel SVM trained by SMO with second-order working set selection, and
//! Platt's sigmoid for probability output.

use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

/// `(x·y + 1)^degree`
pub fn poly_kernel(x: &[f64], y: &[f64], degree: u32) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (dot + 1.0).powi(degree as i32)
}

/// Gram matrix of `xs` under the polynomial kernel.
pub fn kernel_matrix(xs: &[Vec<f64>], degree: u32) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = poly_kernel(&xs[i], &xs[j], degree);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoParams {
    /// Box constraint per example.
    pub c: f64,
    pub degree: u32,
    /// Stop when the maximal KKT violation drops below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

/// Decision function `Σ coef_i K(x_i, x) - rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMachine {
    pub degree: u32,
    /// `alpha_i * y_i` for each support vector.
    pub coef: Vec<f64>,
    pub support: Vec<Vec<f64>>,
    pub rho: f64,
}

impl KernelMachine {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.coef
            .iter()
            .zip(&self.support)
            .map(|(c, s)| c * poly_kernel(s, x, self.degree))
            .sum::<f64>()
            - self.rho
    }
}

/// Solve the C-SVM dual. `ys` holds +1/-1.
pub fn train_smo(xs: &[Vec<f64>], ys: &[f64], p: &SmoParams) -> Result<KernelMachine> {
    train_smo_bounded(xs, ys, &vec![p.c; xs.len()], p)
}

/// As [`train_smo`] with a box constraint per example; `p.c` is ignored.
pub fn train_smo_bounded(xs: &[Vec<f64>], ys: &[f64], bounds: &[f64], p: &SmoParams) -> Result<KernelMachine> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: ys.len(),
        });
    }
    if n != bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bounds.len(),
        });
    }
    if !ys.iter().any(|&y| y > 0.0) || !ys.iter().any(|&y| y < 0.0) {
        return Err(Error::DegenerateTrainingSet);
    }
    let k = kernel_matrix(xs, p.degree);
    let c = bounds;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let is_up = |a: f64, y: f64, c: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let is_low = |a: f64, y: f64, c: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    for _ in 0..p.max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if is_up(alpha[t], ys[t], c[t]) && -ys[t] * grad[t] > gmax {
                gmax = -ys[t] * grad[t];
                i = t;
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !is_low(alpha[t], ys[t], c[t]) {
                continue;
            }
            let v = -ys[t] * grad[t];
            gmin = gmin.min(v);
            if i != usize::MAX && v < gmax {
                let b = gmax - v;
                let a = (k[i][i] + k[t][t] - 2.0 * k[i][t]).max(TAU);
                let obj = -b * b / a;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < p.tolerance {
            break;
        }

        let (yi, yj) = (ys[i], ys[j]);
        let (ci, cj) = (c[i], c[j]);
        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        let quad = (k[i][i] + k[j][j] - 2.0 * k[i][j]).max(TAU);
        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai_old, alpha[j] - aj_old);
        for t in 0..n {
            grad[t] += ys[t] * (yi * k[i][t] * di + yj * k[j][t] * dj);
        }
    }

    // rho from free vectors, else the middle of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = ys[t] * grad[t];
        let at_upper = alpha[t] >= c[t];
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if ys[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if ys[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let mut coef = Vec::new();
    let mut support = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            coef.push(alpha[t] * ys[t]);
            support.push(xs[t].clone());
        }
    }
    Ok(KernelMachine {
        degree: p.degree,
        coef,
        support,
        rho,
    })
}

/// Fit `P(y=1|f) = 1 / (1 + exp(a f + b))` by Newton's method with
/// backtracking, on targets smoothed by the class counts.
pub fn platt_fit(decisions: &[f64], labels: &[bool]) -> (f64, f64) {
    let prior1 = labels.iter().filter(|&&l| l).count() as f64;
    let prior0 = labels.len() as f64 - prior1;
    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let t: Vec<f64> = labels.iter().map(|&l| if l { hi } else { lo }).collect();

    let (min_step, sigma) = (1e-10, 1e-12);
    let mut a = 0.0;
    let mut b = ((prior0 + 1.0) / (prior1 + 1.0)).ln();
    let objective = |a: f64, b: f64| -> f64 {
        decisions
            .iter()
            .zip(&t)
            .map(|(&f, &ti)| {
                let z = f * a + b;
                if z >= 0.0 {
                    ti * z + (1.0 + (-z).exp()).ln()
                } else {
                    (ti - 1.0) * z + (1.0 + z.exp()).ln()
                }
            })
            .sum()
    };
    let mut fval = objective(a, b);
    for _ in 0..100 {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (sigma, sigma, 0.0, 0.0, 0.0);
        for (&f, &ti) in decisions.iter().zip(&t) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = ti - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < 1e-5 && g2.abs() < 1e-5 {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        while step >= min_step {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < min_step {
            break;
        }
    }
    (a, b)
}

pub fn platt_predict(decision: f64, a: f64, b: f64) -> f64 {
    let z = decision * a + b;
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64) -> SmoParams {
        SmoParams {
            c,
            degree: 2,
            tolerance: 1e-8,
            max_iter: 100_000,
        }
    }

    #[test]
    fn kernel_value() {
        assert_eq!(poly_kernel(&[1.0, 2.0], &[3.0, -1.0], 2), 4.0);
    }

    #[test]
    fn separable_points_classified() {
        let xs = vec![vec![1.0, 1.0], vec![2.0, 1.5], vec![-1.0, -1.0], vec![-2.0, -0.5]];
        let ys = [1.0, 1.0, -1.0, -1.0];
        let m = train_smo(&xs, &ys, &params(10.0)).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            assert!(m.decision(x) * y > 0.0);
        }
    }

    #[test]
    fn dual_constraint_holds() {
        let xs: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos()])
            .collect();
        let ys: Vec<f64> = (0..12).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let m = train_smo(&xs, &ys, &params(0.5)).unwrap();
        let s: f64 = m.coef.iter().sum();
        assert!(s.abs() < 1e-9);
        assert!(m.coef.iter().all(|c| c.abs() <= 0.5 + 1e-12));
    }

    #[test]
    fn single_class_is_degenerate() {
        let xs = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train_smo(&xs, &[1.0, 1.0], &params(1.0)),
            Err(Error::DegenerateTrainingSet)
        ));
    }

    #[test]
    fn platt_orders_by_decision() {
        let f = [-2.0, -1.5, -1.0, -0.2, 0.3, 1.0, 1.4, 2.0];
        let l = [false, false, false, true, false, true, true, true];
        let (a, b) = platt_fit(&f, &l);
        assert!(a < 0.0);
        assert!(platt_predict(2.0, a, b) > 0.5);
        assert!(platt_predict(-2.0, a, b) < 0.5);
        let (a2, b2) = platt_fit(&f.map(|x| -x), &l.map(|x| !x));
        assert!((a - a2).abs() < 1e-6 && (b + b2).abs() < 1e-6);
    }

    #[test]
    fn platt_extremes_stay_in_range() {
        for z in [-1e6, -50.0, 0.0, 50.0, 1e6] {
            let p = platt_predict(z, -3.0, 0.1);
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn per_example_bounds_respected() {
        let xs = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![1.0, 1.0], vec![0.9, 1.0]];
        let ys = [1.0, -1.0, 1.0, -1.0];
        let bounds = [0.05, 1.0, 1.0, 0.2];
        let m = train_smo_bounded(&xs, &ys, &bounds, &params(1.0)).unwrap();
        let mut alphas = vec![0.0; xs.len()];
        for (c, s) in m.coef.iter().zip(&m.support) {
            let i = xs.iter().position(|x| x == s).unwrap();
            alphas[i] = c * ys[i];
        }
        for (a, b) in alphas.iter().zip(bounds) {
            assert!(*a >= 0.0 && *a <= b + 1e-12, "{a} outside [0, {b}]");
        }
        let balance: f64 = alphas.iter().zip(ys).map(|(a, y)| a * y).sum();
        assert!(balance.abs() < 1e-9);
    }

    #[test]
    fn uniform_bounds_match_scalar() {
        let xs = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.2, 0.9], vec![0.8, 0.1]];
        let ys = [1.0, -1.0, 1.0, -1.0];
        let a = train_smo(&xs, &ys, &params(0.5)).unwrap();
        let b = train_smo_bounded(&xs, &ys, &[0.5; 4], &params(99.0)).unwrap();
        assert_eq!(a, b);
    }
}
