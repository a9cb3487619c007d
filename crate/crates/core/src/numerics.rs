//! Shared numerical machinery: adaptive Gauss-Kronrod quadrature, linear
//! least squares, and bracketed bisection.

use crate::error::{EngineError, Result};

// 15-point Kronrod abscissae on [-1, 1] (positive half; the rule is symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

// Kronrod weights matching XGK.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Embedded 7-point Gauss weights (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: returns (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half.abs())
}

/// Quadrature result with an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Panels are bisected until the local K15-G7 discrepancy meets the tolerance
/// budget `max(abs_tol, rel_tol * |integral|)` or `max_depth` is reached.
/// Fails when the accumulated error estimate still exceeds the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0 });
    }

    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
        value: &mut f64,
        err: &mut f64,
    ) {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth == 0 || (b - a).abs() < f64::EPSILON * (a.abs() + b.abs()) {
            *value += v;
            *err += e;
            return;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth - 1, value, err);
        recurse(f, mid, b, 0.5 * tol, depth - 1, value, err);
    }

    // First pass to scale the relative tolerance.
    let (rough, _) = gk15(f, a, b);
    let tol = abs_tol.max(rel_tol * rough.abs());

    let mut value = 0.0;
    let mut err = 0.0;
    recurse(f, a, b, tol, max_depth, &mut value, &mut err);

    let budget = abs_tol.max(rel_tol * value.abs());
    if err > budget.max(f64::EPSILON * value.abs() * 64.0) {
        return Err(EngineError::QuadratureNotConverged {
            residual: err,
            tolerance: budget,
        });
    }
    Ok(Quadrature { value, abs_error: err })
}

/// Adaptive integration over a segmented domain; breakpoints let callers seed
/// known peaks so narrow features are never skipped over.
pub fn integrate_segmented<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<Quadrature> {
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    if pts.len() < 2 {
        return Err(EngineError::invalid("breakpoints", "need at least two distinct points"));
    }

    let mut value = 0.0;
    let mut abs_error = 0.0;
    for w in pts.windows(2) {
        let q = integrate(f, w[0], w[1], rel_tol, abs_tol / (pts.len() - 1) as f64, max_depth)?;
        value += q.value;
        abs_error += q.abs_error;
    }
    Ok(Quadrature { value, abs_error })
}

/// Ordinary least squares line fit. Returns (slope, intercept, rms residual).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(EngineError::FitFailure(format!(
            "need two equally sized samples of length >= 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(EngineError::FitFailure("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok((slope, intercept, (ss / n).sqrt()))
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64, max_iter: u32) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(EngineError::invalid(
            "bracket",
            format!("no sign change on [{lo}, {hi}]"),
        ));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() <= tol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evenly spaced samples on [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Log-spaced samples on [lo, hi] inclusive; requires lo, hi > 0.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}
