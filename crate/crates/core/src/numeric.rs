//! Small numerical kernels shared across modules.

/// Sign with the convention `sign(0) = 1`.
#[inline]
pub fn sign(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `|t|^p` with `0^p = 0` for every `p > 0`.
#[inline]
pub fn abs_pow(t: f64, p: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        0.0
    } else if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairwise (cascade) summation. The association order depends only on the
/// length of the input, so results are reproducible bit for bit.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Golden-section minimization of a unimodal (quasi-convex) function on
/// `[lo, hi]`. Stops once the bracket is narrower than `tol`.
/// Returns `(argmin, min, final bracket width)`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 400 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let (x, fx) = [(c, fc), (d, fd), (mid, fm)]
        .into_iter()
        .fold((mid, fm), |best, cand| if cand.1 < best.1 { cand } else { best });
    (x, fx, b - a)
}

/// Surface measure of the unit sphere `S^{N-1}`: `N pi^{N/2} / Gamma(N/2 + 1)`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    n * std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0 + 1.0)
}

/// `∫_{S^{N-1}} Σ_i |ω_i|^p dω`, the angular factor of the ℓ^p gradient
/// modular of a radial function.
pub fn lp_angular_factor(dim: usize, p: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let n = dim as f64;
    if dim == 1 {
        return 2.0;
    }
    // ∫ |ω_1|^p dω = 2 π^{(N-1)/2} Γ((p+1)/2) / Γ((N+p)/2)
    let single =
        2.0 * (0.5 * (n - 1.0) * std::f64::consts::PI.ln() + ln_gamma(0.5 * (p + 1.0)) - ln_gamma(0.5 * (n + p))).exp();
    n * single
}
