//! Box-constrained minimizers: Nelder-Mead simplex search and a projected
//! BFGS refinement for smooth objectives with analytic gradients.

use crate::error::{Error, Result};

/// Closed box `lower[i] <= x[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::invalid("bounds of different lengths"));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::invalid(format!(
                "empty box on coordinate {i}: [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }

    /// Coordinates within `rtol` of a bound, relative to the box width.
    pub fn active(&self, x: &[f64], rtol: f64) -> Vec<usize> {
        (0..x.len())
            .filter(|&i| {
                let w = self.upper[i] - self.lower[i];
                x[i] - self.lower[i] <= rtol * w || self.upper[i] - x[i] <= rtol * w
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Nelder-Mead with points projected onto the box. Converges when the
/// spread of simplex values falls below `tol` and the simplex has shrunk
/// below `sqrt(tol)` times the box width in every coordinate.
pub fn nelder_mead<F>(f: F, x0: &[f64], bounds: &Bounds, max_iters: usize, tol: f64) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    let d = x0.len();
    if d != bounds.dim() || d == 0 {
        return Err(Error::invalid("starting point does not match the box"));
    }
    let mut start = x0.to_vec();
    bounds.project(&mut start);
    let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
    for i in 0..d {
        let mut v = start.clone();
        let step = 0.05 * (bounds.upper[i] - bounds.lower[i]);
        v[i] = if v[i] + step <= bounds.upper[i] { v[i] + step } else { v[i] - step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(&f, x)).collect();
    let mut evaluations = d + 1;
    let xtol = tol.sqrt();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; d];
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        let mut p: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect();
        bounds.project(&mut p);
        p
    };
    while iterations < max_iters {
        iterations += 1;
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        let size_ok = (0..d).all(|k| {
            let w = bounds.upper[k] - bounds.lower[k];
            simplex.iter().all(|x| (x[k] - simplex[0][k]).abs() <= xtol * w)
        });
        if spread.is_finite() && spread <= tol && size_ok {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for x in &simplex[..d] {
            for k in 0..d {
                centroid[k] += x[k] / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let reflected = point(&centroid, &worst, -1.0);
        let fr = eval(&f, &reflected);
        evaluations += 1;
        if fr < values[0] {
            let expanded = point(&centroid, &worst, -2.0);
            let fe = eval(&f, &expanded);
            evaluations += 1;
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
        } else if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
        } else {
            let (target, ft) = if fr < values[d] { (reflected.clone(), fr) } else { (worst.clone(), values[d]) };
            let contracted = point(&centroid, &target, 0.5);
            let fc = eval(&f, &contracted);
            evaluations += 1;
            if fc < ft {
                simplex[d] = contracted;
                values[d] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=d {
                    simplex[i] = point(&best, &simplex[i], 0.5);
                    values[i] = eval(&f, &simplex[i]);
                    evaluations += 1;
                }
            }
        }
    }
    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Ok(Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
    })
}

/// Projected BFGS with an Armijo backtracking line search along the
/// projected path. Coordinates pinned at a bound with the gradient pointing
/// outward are frozen for the step. Stops when the projected gradient has
/// sup-norm below `gtol` or the value stalls.
pub fn projected_bfgs<F>(fg: F, x0: &[f64], bounds: &Bounds, max_iters: usize, gtol: f64) -> Result<Minimum>
where
    F: Fn(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let d = x0.len();
    let mut x = x0.to_vec();
    bounds.project(&mut x);
    let (mut fx, mut g) = fg(&x).ok_or_else(|| Error::Numeric("objective not finite at the refinement start".into()))?;
    if !fx.is_finite() {
        return Err(Error::Numeric("objective not finite at the refinement start".into()));
    }
    let mut h = nalgebra::DMatrix::<f64>::identity(d, d);
    let mut evaluations = 1;
    let mut stall = 0;
    for it in 0..max_iters {
        let free: Vec<bool> = (0..d)
            .map(|i| !((x[i] <= bounds.lower[i] && g[i] > 0.0) || (x[i] >= bounds.upper[i] && g[i] < 0.0)))
            .collect();
        let pg = (0..d).map(|i| if free[i] { g[i].abs() } else { 0.0 }).fold(0.0, f64::max);
        if pg <= gtol {
            return Ok(Minimum { x, value: fx, iterations: it, evaluations, converged: true });
        }
        let gf = nalgebra::DVector::from_iterator(d, (0..d).map(|i| if free[i] { g[i] } else { 0.0 }));
        let mut dir = -(&h * &gf);
        for i in 0..d {
            if !free[i] {
                dir[i] = 0.0;
            }
        }
        if dir.dot(&gf) >= 0.0 {
            h = nalgebra::DMatrix::identity(d, d);
            dir = -gf.clone();
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let mut xn: Vec<f64> = (0..d).map(|i| x[i] + t * dir[i]).collect();
            bounds.project(&mut xn);
            let decrease: f64 = (0..d).map(|i| g[i] * (xn[i] - x[i])).sum();
            if let Some((fn_, gn)) = fg(&xn) {
                evaluations += 1;
                if fn_.is_finite() && fn_ <= fx + 1e-4 * decrease {
                    accepted = Some((xn, fn_, gn));
                    break;
                }
            } else {
                evaluations += 1;
            }
            t *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            // no descent possible at working precision
            return Ok(Minimum { x, value: fx, iterations: it, evaluations, converged: pg <= gtol.sqrt() });
        };
        let s = nalgebra::DVector::from_iterator(d, (0..d).map(|i| xn[i] - x[i]));
        let y = nalgebra::DVector::from_iterator(d, (0..d).map(|i| gn[i] - g[i]));
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let i = nalgebra::DMatrix::<f64>::identity(d, d);
            let a = &i - rho * &s * y.transpose();
            h = &a * &h * a.transpose() + rho * &s * s.transpose();
        }
        if (fx - fn_).abs() <= 1e-15 * fx.abs().max(1.0) {
            stall += 1;
        } else {
            stall = 0;
        }
        x = xn;
        fx = fn_;
        g = gn;
        if stall >= 3 {
            return Ok(Minimum { x, value: fx, iterations: it + 1, evaluations, converged: true });
        }
    }
    Ok(Minimum { x, value: fx, iterations: max_iters, evaluations, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosen(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    fn rosen_grad(x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let g0 = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]);
        let g1 = 200.0 * (x[1] - x[0] * x[0]);
        Some((rosen(x), vec![g0, g1]))
    }

    #[test]
    fn nelder_mead_quadratic() {
        let b = Bounds::new(vec![-5.0; 3], vec![5.0; 3]).unwrap();
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 0.1 * (x[2] - 2.0).powi(2);
        let m = nelder_mead(f, &[0.0, 0.0, 0.0], &b, 5000, 1e-14).unwrap();
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] + 0.5).abs() < 1e-5 && (m.x[2] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_respects_box() {
        let b = Bounds::new(vec![2.0, -1.0], vec![3.0, 1.0]).unwrap();
        let m = nelder_mead(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[2.5, 0.5], &b, 5000, 1e-14).unwrap();
        assert!(b.contains(&m.x));
        assert!((m.x[0] - 2.0).abs() < 1e-6 && m.x[1].abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_handles_infinite_region() {
        let b = Bounds::new(vec![-2.0], vec![2.0]).unwrap();
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.3).powi(2) };
        let m = nelder_mead(f, &[1.0], &b, 1000, 1e-14).unwrap();
        assert!((m.x[0] - 0.3).abs() < 1e-5);
    }

    #[test]
    fn bfgs_rosenbrock() {
        let b = Bounds::new(vec![-3.0; 2], vec![3.0; 2]).unwrap();
        let m = projected_bfgs(rosen_grad, &[-1.2, 1.0], &b, 1000, 1e-9).unwrap();
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn bfgs_active_bound() {
        let b = Bounds::new(vec![-3.0, 1.5], vec![3.0, 3.0]).unwrap();
        let fg = |x: &[f64]| Some(((x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2), vec![2.0 * (x[0] - 1.0), 2.0 * (x[1] - 1.0)]));
        let m = projected_bfgs(fg, &[0.0, 2.5], &b, 100, 1e-10).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-8 && m.x[1] == 1.5);
    }

    #[test]
    fn empty_box_rejected() {
        assert!(Bounds::new(vec![1.0], vec![1.0]).is_err());
    }
}
