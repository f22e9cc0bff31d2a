//! Scalar root bracketing/refinement and a small damped Newton solver.
//!
//! The scalar pipeline is: scan a panel grid for sign changes, bisect each
//! bracket down to a narrow interval, then polish with Newton when a
//! derivative is available. Bisection never leaves the bracket, so the
//! Newton polish is a refinement, not a correctness requirement.

/// A sign-change bracket [lo, hi] with f(lo)*f(hi) <= 0.
#[derive(Clone, Copy, Debug)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Scans n_panels uniform panels of [lo, hi] and returns one bracket per
/// sign change. A grid point where f vanishes exactly yields a degenerate
/// point bracket instead of flagging both neighboring panels. Panels where
/// f is not finite at an endpoint are skipped.
pub fn scan_sign_changes(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    n_panels: usize,
) -> Vec<Bracket> {
    assert!(n_panels >= 1 && hi > lo);
    let step = (hi - lo) / n_panels as f64;
    let mut out = Vec::new();
    // last grid point with a finite, nonzero value
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n_panels {
        let x = if i == n_panels { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if !fx.is_finite() {
            prev = None;
            continue;
        }
        if fx == 0.0 {
            out.push(Bracket { lo: x, hi: x });
            prev = None;
            continue;
        }
        if let Some((x_prev, f_prev)) = prev {
            if f_prev * fx < 0.0 {
                out.push(Bracket { lo: x_prev, hi: x });
            }
        }
        prev = Some((x, fx));
    }
    out
}

/// Bisects a bracket until its width falls below x_tol or max_iter halvings.
pub fn bisect(mut f: impl FnMut(f64) -> f64, bracket: Bracket, x_tol: f64, max_iter: usize) -> f64 {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..max_iter {
        if hi - lo <= x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 || !f_mid.is_finite() {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton refinement constrained to [lo, hi]; falls back to the start point
/// if the iteration leaves the interval or the derivative degenerates.
pub fn newton_polish(
    mut f: impl FnMut(f64) -> (f64, f64),
    x0: f64,
    lo: f64,
    hi: f64,
    f_tol: f64,
    max_iter: usize,
) -> f64 {
    let mut x = x0;
    let mut best = x0;
    let mut best_res = f(x0).0.abs();
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx.abs() < best_res {
            best = x;
            best_res = fx.abs();
        }
        if fx.abs() <= f_tol || dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        if !(lo..=hi).contains(&next) || !next.is_finite() {
            break;
        }
        x = next;
    }
    best
}

/// Solves f = 0 on [lo, hi] by bisection to x_tol then Newton on the same
/// function using a central finite-difference derivative.
pub fn refine_root(mut f: impl FnMut(f64) -> f64, bracket: Bracket, x_tol: f64) -> f64 {
    let x = bisect(&mut f, bracket, x_tol, 200);
    let h = 1e-7 * (1.0 + x.abs());
    newton_polish(
        |t| {
            let ft = f(t);
            let d = (f(t + h) - f(t - h)) / (2.0 * h);
            (ft, d)
        },
        x,
        bracket.lo,
        bracket.hi,
        0.0,
        8,
    )
}

/// Damped Newton for a small square system with finite-difference Jacobian.
///
/// Steps are halved (up to 30 times) until the residual max-norm decreases
/// and the iterate stays strictly inside the positive orthant when
/// `positive` is set. Returns the final iterate together with its residual
/// max-norm; the caller decides whether that constitutes convergence.
pub fn damped_newton<const N: usize>(
    mut system: impl FnMut(&[f64; N]) -> [f64; N],
    start: [f64; N],
    positive: bool,
    max_iter: usize,
) -> ([f64; N], f64) {
    let norm = |v: &[f64; N]| v.iter().fold(0.0_f64, |a, t| a.max(t.abs()));
    let mut z = start;
    let mut res = system(&z);
    let mut res_norm = norm(&res);
    for _ in 0..max_iter {
        if !res_norm.is_finite() {
            break;
        }
        // finite-difference Jacobian, column by column
        let mut jac = [[0.0_f64; N]; N];
        for j in 0..N {
            let h = 1e-7 * (1.0 + z[j].abs());
            let mut zp = z;
            let mut zm = z;
            zp[j] += h;
            zm[j] -= h;
            let fp = system(&zp);
            let fm = system(&zm);
            for i in 0..N {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let mut rhs = res;
        for r in rhs.iter_mut() {
            *r = -*r;
        }
        let Some(step) = solve_linear(jac, rhs) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = z;
            for i in 0..N {
                trial[i] += lambda * step[i];
            }
            let admissible = !positive || trial.iter().all(|&v| v > 0.0);
            if admissible {
                let trial_res = system(&trial);
                let trial_norm = norm(&trial_res);
                if trial_norm.is_finite() && trial_norm < res_norm {
                    z = trial;
                    res = trial_res;
                    res_norm = trial_norm;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        if res_norm == 0.0 {
            break;
        }
    }
    (z, res_norm)
}

/// Gaussian elimination with partial pivoting; None on (near-)singularity.
fn solve_linear<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let mut pivot = col;
        for row in col + 1..N {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0_f64; N];
    for col in (0..N).rev() {
        let mut sum = b[col];
        for k in col + 1..N {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x)
}
