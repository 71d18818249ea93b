//! Straight-line reference computations shared by the integration tests.
//! Nothing here calls into the library's filters or test statistics.

#![allow(dead_code)]

pub type Mat = Vec<Vec<f64>>;

pub fn inv(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let pivot_row = m[c].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn tr(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| (0..a.len()).map(|i| a[i][j]).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat, s: f64) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + s * v).collect()).collect()
}

pub fn outer_mean(x: &[Vec<f64>], y: &[Vec<f64>], from: usize) -> Mat {
    let m = (x.len() - from) as f64;
    (0..x[0].len())
        .map(|i| (0..y[0].len()).map(|j| (from..x.len()).map(|t| x[t][i] * y[t][j]).sum::<f64>() / m).collect())
        .collect()
}

fn col_mean(x: &[Vec<f64>], from: usize) -> Mat {
    let m = (x.len() - from) as f64;
    (0..x[0].len()).map(|i| vec![(from..x.len()).map(|t| x[t][i]).sum::<f64>() / m]).collect()
}

/// mean(r r') for the residuals r of the regressors after projecting out the
/// gradient columns (modified Gram-Schmidt, applied twice).
fn residual_moment(x: &[Vec<f64>], g: &[Vec<f64>], from: usize) -> Mat {
    let col = |m: &[Vec<f64>], k: usize| -> Vec<f64> { m[from..].iter().map(|r| r[k]).collect() };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..g[0].len() {
        let mut v = col(g, k);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        basis.push(v.into_iter().map(|a| a / norm).collect());
    }
    let res: Vec<Vec<f64>> = (0..x[0].len())
        .map(|k| {
            let mut v = col(x, k);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            v
        })
        .collect();
    let m = (x.len() - from) as f64;
    (0..res.len()).map(|i| (0..res.len()).map(|j| dot(&res[i], &res[j]) / m).collect()).collect()
}

/// LM statistic from eta^2, regressors `x` and gradients `g`, summing over
/// t >= r0. `centered` selects the mean-corrected information estimate.
pub fn lm(eta2: &[f64], x: &[Vec<f64>], g: &[Vec<f64>], r0: usize, centered: bool) -> f64 {
    let m = (eta2.len() - r0) as f64;
    let s: Vec<f64> = (0..x[0].len())
        .map(|i| (r0..eta2.len()).map(|t| (1.0 - eta2[t]) * x[t][i]).sum::<f64>() / m.sqrt())
        .collect();
    let k = (r0..eta2.len()).map(|t| (1.0 - eta2[t]).powi(2)).sum::<f64>() / m;
    let xx = outer_mean(x, x, r0);
    let j = outer_mean(g, g, r0);
    let om = outer_mean(x, g, r0);
    let ji = inv(&j);
    let info = if centered {
        let (xb, gb) = (col_mean(x, r0), col_mean(g, r0));
        let j11 = add(&xx, &mul(&xb, &tr(&xb)), -1.0);
        let j12 = mul(&add(&om, &mul(&xb, &tr(&gb)), -1.0), &ji);
        let a = mul(&mul(&om, &ji), &tr(&om));
        let b = mul(&j12, &tr(&om));
        add(&add(&add(&j11, &a, 1.0), &b, -1.0), &tr(&b), -1.0)
    } else {
        residual_moment(x, g, r0)
    };
    let ii = inv(&info);
    let q: f64 = (0..s.len()).map(|a| (0..s.len()).map(|b| s[a] * ii[a][b] * s[b]).sum::<f64>()).sum();
    q / k
}

/// Portmanteau statistic on lags 1..=m with r0 = 1.
pub fn portmanteau(eta2: &[f64], g: &[Vec<f64>], m: usize) -> f64 {
    let n = eta2.len();
    let d = g[0].len();
    let cnt = (n - 1) as f64;
    let r: Mat = (1..=m).map(|h| vec![(1 + h..n).map(|t| (eta2[t] - 1.0) * (eta2[t - h] - 1.0)).sum::<f64>() / cnt]).collect();
    let km: Mat = (1..=m)
        .map(|h| (0..d).map(|k| (1 + h..n).map(|t| (eta2[t - h] - 1.0) * g[t][k]).sum::<f64>() / cnt).collect())
        .collect();
    let k = (1..n).map(|t| (eta2[t] - 1.0).powi(2)).sum::<f64>() / cnt;
    let j = outer_mean(g, g, 1);
    let eye: Mat = (0..m).map(|i| (0..m).map(|j| if i == j { k * k } else { 0.0 }).collect()).collect();
    let dm = add(&eye, &mul(&mul(&km, &inv(&j)), &tr(&km)), -k);
    mul(&mul(&tr(&r), &inv(&dm)), &r)[0][0] * cnt
}

/// AS-Log-GARCH(1,1) filter started from log sigma^2 = log mean eps^2 and a
/// positive presample return of that magnitude. Returns (eta^2, eta, gradient
/// rows in the order omega, omega_minus, alpha_plus, alpha_minus, beta).
pub fn aslog11(th: [f64; 5], e: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let [w, wm, ap, am, b] = th;
    let ms = e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64;
    let (mut hp, mut le2p, mut negp) = (ms.ln(), ms.ln(), false);
    let mut gp = vec![0.0; 5];
    let (mut eta2, mut eta, mut gs) = (vec![], vec![], vec![]);
    for &et in e {
        let neg = if negp { 1.0 } else { 0.0 };
        let pos = 1.0 - neg;
        let h = w + wm * neg + (ap * pos + am * neg) * le2p + b * hp;
        let x = [1.0, neg, pos * le2p, neg * le2p, hp];
        let g: Vec<f64> = (0..5).map(|k| x[k] + b * gp[k]).collect();
        eta.push(et * (-h / 2.0).exp());
        eta2.push(et * et * (-h).exp());
        gs.push(g.clone());
        gp = g;
        hp = h;
        le2p = (et * et).ln();
        negp = et < 0.0;
    }
    (eta2, eta, gs)
}

/// Regressors of the augmented Log-GARCH(1,1) LM test with ell = 1:
/// nu_t = (eta+_{t-1}, eta-_{t-1}) + beta nu_{t-1}.
pub fn augmented_regressors(eta: &[f64], beta: f64) -> Vec<Vec<f64>> {
    let mut nu = vec![vec![0.0, 0.0]];
    for t in 1..eta.len() {
        let prev = nu[t - 1].clone();
        nu.push(vec![eta[t - 1].max(0.0) + beta * prev[0], (-eta[t - 1]).max(0.0) + beta * prev[1]]);
    }
    nu
}

/// EGARCH(1,1) filter with the same start as [`aslog11`] and a presample
/// return of sqrt(mean eps^2). Returns (eta^2, zeta-gradient rows,
/// alpha-block rows in the order omega_minus, alpha_plus, alpha_minus).
pub fn egarch11(z: [f64; 4], e: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let [w, gam, del, b] = z;
    let ms = e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64;
    let (mut hp, mut ep) = (ms.ln(), ms.sqrt());
    let (mut gp, mut dp) = (vec![0.0; 4], vec![0.0; 3]);
    let (mut eta2, mut gs, mut ds) = (vec![], vec![], vec![]);
    for &et in e {
        let tl = ep * (-hp / 2.0).exp();
        let u = b - 0.5 * (gam * tl + del * tl.abs());
        let h = w + gam * tl + del * tl.abs() + b * hp;
        let x = [1.0, tl, tl.abs(), hp];
        let g: Vec<f64> = (0..4).map(|k| x[k] + u * gp[k]).collect();
        let le2 = (ep * ep).ln();
        let xd = if ep < 0.0 { [1.0, 0.0, le2] } else { [0.0, le2, 0.0] };
        let d: Vec<f64> = (0..3).map(|k| xd[k] + u * dp[k]).collect();
        eta2.push(et * et * (-h).exp());
        gs.push(g.clone());
        ds.push(d.clone());
        gp = g;
        dp = d;
        hp = h;
        ep = et;
    }
    (eta2, gs, ds)
}
