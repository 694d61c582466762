//! Small generic numeric helpers shared by the feature extractors.

use crate::Scalar;

pub fn mean<T: Scalar>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    x.iter().copied().sum::<T>() / T::of_usize(x.len())
}

/// Population variance (divides by `n`).
pub fn variance<T: Scalar>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    let m = mean(x);
    x.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::of_usize(x.len())
}

/// Population standard deviation.
pub fn std_dev<T: Scalar>(x: &[T]) -> T {
    variance(x).sqrt()
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
///
/// Returns `None` when fewer than two points are given or all `x` coincide.
pub fn linear_fit<T: Scalar>(x: &[T], y: &[T]) -> Option<(T, T)> {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (yi - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Sum of squared residuals of the least-squares line through
/// `(0, y0), (1, y1), ...`. Uses the closed-form sums for an integer
/// abscissa, so it runs in one pass.
pub fn linear_detrend_sse<T: Scalar>(y: &[T]) -> T {
    let n = y.len();
    if n < 3 {
        return T::zero();
    }
    let nf = T::of_usize(n);
    let two = T::lit(2.0);
    // sum over i of i, and of (i - mean_i)^2
    let mx = (nf - T::one()) / two;
    let sxx = nf * (nf * nf - T::one()) / T::lit(12.0);
    let my = mean(y);
    let (mut sxy, mut syy) = (T::zero(), T::zero());
    for (i, &v) in y.iter().enumerate() {
        let dy = v - my;
        sxy = sxy + (T::of_usize(i) - mx) * dy;
        syy = syy + dy * dy;
    }
    let sse = syy - sxy * sxy / sxx;
    sse.max(T::zero())
}

/// Singular values of the matrix whose columns are `cols` (all of equal
/// length), by one-sided Jacobi (Hestenes) orthogonalization. Returns one
/// value per column, unsorted; a wide matrix is handled through its
/// transpose and the surplus values are zero.
pub fn singular_values<T: Scalar>(cols: Vec<Vec<T>>) -> Vec<T> {
    let m = cols.len();
    let rows = cols.first().map_or(0, Vec::len);
    if rows < m {
        let transposed: Vec<Vec<T>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        let mut sv = jacobi(transposed);
        sv.resize(m, T::zero());
        return sv;
    }
    jacobi(cols)
}

fn jacobi<T: Scalar>(mut cols: Vec<Vec<T>>) -> Vec<T> {
    let m = cols.len();
    let eps = T::epsilon();
    let frob: T = cols.iter().flatten().map(|&v| v * v).sum();
    // columns with squared norm below this are numerically zero
    let negligible = frob * eps * eps;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for (&a, &b) in cols[p].iter().zip(&cols[q]) {
                    alpha = alpha + a * a;
                    beta = beta + b * b;
                    gamma = gamma + a * b;
                }
                if alpha <= negligible || beta <= negligible || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (a, b) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter()
        .map(|c| c.iter().map(|&v| v * v).sum::<T>().sqrt())
        .collect()
}
