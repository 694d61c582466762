//! Independent reference implementations used as test oracles. They favor
//! the most literal form of each definition over speed.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian series; every third seed is quantized to produce ties.
pub fn random_series(seed: u64, len: usize) -> Vec<f64> {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..len).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    if seed % 3 == 0 {
        x.iter().map(|v| (v * 2.0).round() / 2.0).collect()
    } else {
        x
    }
}

pub fn white_noise(seed: u64, len: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len).map(|_| r.sample(StandardNormal)).collect()
}

pub fn brownian(seed: u64, len: usize) -> Vec<f64> {
    let mut acc = 0.0;
    white_noise(seed, len)
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

pub fn population_std(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn chebyshev(x: &[f64], i: usize, j: usize, len: usize) -> f64 {
    (0..len).map(|k| (x[i + k] - x[j + k]).abs()).fold(0.0, f64::max)
}

/// Approximate entropy by explicit template counting, self-matches included.
pub fn apen_oracle(x: &[f64], m: usize, r: f64) -> f64 {
    let phi = |len: usize| {
        let count = x.len() - len + 1;
        let mut total = 0.0;
        for i in 0..count {
            let c = (0..count).filter(|&j| chebyshev(x, i, j, len) <= r).count();
            total += (c as f64 / count as f64).ln();
        }
        total / count as f64
    };
    phi(m) - phi(m + 1)
}

/// Sample entropy over the first `n - m` templates, ordered pairs `i != j`.
pub fn sampen_oracle(x: &[f64], m: usize, r: f64) -> Option<f64> {
    let count = x.len() - m;
    let (mut a, mut b) = (0usize, 0usize);
    for i in 0..count {
        for j in 0..count {
            if i == j {
                continue;
            }
            if chebyshev(x, i, j, m) <= r {
                b += 1;
            }
            if chebyshev(x, i, j, m + 1) <= r {
                a += 1;
            }
        }
    }
    (a > 0 && b > 0).then(|| -(a as f64 / b as f64).ln())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Permutation entropy by matching each window's stable argsort against the
/// full list of permutations.
pub fn pe_oracle(x: &[f64], order: usize, delay: usize) -> f64 {
    let perms = permutations(order);
    let mut counts = vec![0usize; perms.len()];
    let windows = x.len() - (order - 1) * delay;
    for s in 0..windows {
        let w: Vec<f64> = (0..order).map(|k| x[s + k * delay]).collect();
        let mut idx: Vec<usize> = (0..order).collect();
        idx.sort_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap().then(a.cmp(&b)));
        let p = perms.iter().position(|p| *p == idx).unwrap();
        counts[p] += 1;
    }
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / windows as f64;
            -p * p.ln()
        })
        .sum();
    h / (perms.len() as f64).ln()
}

pub fn petrosian_oracle(x: &[f64]) -> f64 {
    let diff: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let sign = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    let changes = diff
        .windows(2)
        .filter(|w| sign(w[0]) * sign(w[1]) == -1)
        .count();
    let n = x.len() as f64;
    n.log10() / (n.log10() + (n / (n + 0.4 * changes as f64)).log10())
}

/// Majority vote over the `k` nearest rows after a full sort by
/// `(distance, index)`; ties by smallest mean distance, then lowest class.
pub fn knn_oracle(train: &[Vec<f64>], labels: &[usize], n_classes: usize, k: usize, q: &[f64]) -> usize {
    let mut d: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, row)| (row.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; n_classes];
    let mut dist = vec![0.0; n_classes];
    for &(sq, i) in &d[..k] {
        votes[labels[i]] += 1;
        dist[labels[i]] += sq.sqrt();
    }
    let top = *votes.iter().max().unwrap();
    (0..n_classes)
        .filter(|&c| votes[c] == top)
        .min_by(|&a, &b| {
            let ma = dist[a] / top as f64;
            let mb = dist[b] / top as f64;
            ma.partial_cmp(&mb).unwrap().then(a.cmp(&b))
        })
        .unwrap()
}

/// Two-pass covariance over the product of standard deviations.
pub fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Lanczos approximation (g = 7, 9 terms).
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn t_pdf(t: f64, dof: f64) -> f64 {
    let ln_c = ln_gamma((dof + 1.0) / 2.0) - ln_gamma(dof / 2.0) - 0.5 * (dof * std::f64::consts::PI).ln();
    (ln_c - (dof + 1.0) / 2.0 * (1.0 + t * t / dof).ln()).exp()
}

/// Two-tailed p-value `1 - 2 * integral_0^|t| pdf` by composite Simpson.
pub fn t_pvalue_oracle(t: f64, dof: f64) -> f64 {
    let steps = 20_000;
    let h = t.abs() / steps as f64;
    let mut s = t_pdf(0.0, dof) + t_pdf(t.abs(), dof);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * t_pdf(i as f64 * h, dof);
    }
    (1.0 - 2.0 * s * h / 3.0).max(0.0)
}

/// Index of the first maximum of the min-max normalized difference curve,
/// or `None` when it never exceeds zero.
pub fn kneedle_oracle(x: &[f64], y: &[f64]) -> Option<usize> {
    let norm = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        v.iter().map(|a| (a - lo) / (hi - lo)).collect::<Vec<_>>()
    };
    let (xn, yn) = (norm(x), norm(y));
    let mut best: Option<(usize, f64)> = None;
    for i in 0..x.len() {
        let d = yn[i] - xn[i];
        if d > 1e-12 && best.is_none_or(|(_, b)| d > b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Steady-state gain at `freq` from a least-squares sine fit over the
/// second half of a long response.
pub fn measured_gain(filter: impl Fn(&[f64]) -> Vec<f64>, freq: f64, fs: f64, seconds: f64) -> f64 {
    let n = (seconds * fs) as usize;
    let w = 2.0 * std::f64::consts::PI * freq / fs;
    let x: Vec<f64> = (0..n).map(|i| (w * i as f64).sin()).collect();
    let y = filter(&x);
    let tail = n / 2;
    let (mut a, mut b) = (0.0, 0.0);
    for i in tail..n {
        a += y[i] * (w * i as f64).sin();
        b += y[i] * (w * i as f64).cos();
    }
    let m = (n - tail) as f64;
    2.0 * (a * a + b * b).sqrt() / m
}

/// First-order prewarped bilinear high-pass then low-pass magnitude.
pub fn cascade_magnitude(freq: f64, fs: f64, low: f64, high: f64) -> f64 {
    let half = (std::f64::consts::PI * freq / fs).tan();
    let k_low = (std::f64::consts::PI * low / fs).tan();
    let k_high = (std::f64::consts::PI * high / fs).tan();
    let hp = 1.0 / (1.0 + (k_low / half).powi(2)).sqrt();
    let lp = 1.0 / (1.0 + (half / k_high).powi(2)).sqrt();
    hp * lp
}
