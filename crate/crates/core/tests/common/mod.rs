//! Brute-force oracles written directly from the formulas. They share no code
//! with the library beyond the input types.
#![allow(dead_code)]

use std::collections::BTreeMap;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn clusters(labels: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        m.entry(l).or_default().push(i);
    }
    m
}

fn centroid(points: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let d = points[0].len();
    let mut c = vec![0.0; d];
    for &i in idx {
        for f in 0..d {
            c[f] += points[i][f];
        }
    }
    c.iter().map(|v| v / idx.len() as f64).collect()
}

pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let groups = clusters(labels);
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let own = &groups[&labels[i]];
        if own.len() == 1 {
            continue;
        }
        let a = own.iter().filter(|&&j| j != i).map(|&j| dist(&points[i], &points[j])).sum::<f64>()
            / (own.len() - 1) as f64;
        let mut b = f64::INFINITY;
        for (l, members) in &groups {
            if *l == labels[i] {
                continue;
            }
            let m = members.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>() / members.len() as f64;
            b = b.min(m);
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

pub fn calinski_harabasz(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let groups = clusters(labels);
    let all: Vec<usize> = (0..points.len()).collect();
    let mu = centroid(points, &all);
    let (mut b, mut w) = (0.0, 0.0);
    for members in groups.values() {
        let c = centroid(points, members);
        b += members.len() as f64 * dist(&c, &mu).powi(2);
        for &i in members {
            w += dist(&points[i], &c).powi(2);
        }
    }
    let k = groups.len() as f64;
    let n = points.len() as f64;
    (b / w) * (n - k) / (k - 1.0)
}

pub fn davies_bouldin(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let groups: Vec<Vec<usize>> = clusters(labels).into_values().collect();
    let cents: Vec<Vec<f64>> = groups.iter().map(|g| centroid(points, g)).collect();
    let spread: Vec<f64> = groups
        .iter()
        .zip(&cents)
        .map(|(g, c)| g.iter().map(|&i| dist(&points[i], c)).sum::<f64>() / g.len() as f64)
        .collect();
    let k = groups.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..k {
            if i != j {
                worst = worst.max((spread[i] + spread[j]) / dist(&cents[i], &cents[j]));
            }
        }
        total += worst;
    }
    total / k as f64
}

fn entropy(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    clusters(labels)
        .values()
        .map(|m| {
            let p = m.len() as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// H(A | B).
fn conditional_entropy(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut marg_b: BTreeMap<usize, f64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *marg_b.entry(y).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|(&(_, y), &c)| -(c / n) * (c / marg_b[&y]).ln())
        .sum()
}

pub fn homogeneity(truth: &[usize], pred: &[usize]) -> f64 {
    let h = entropy(truth);
    if h == 0.0 {
        1.0
    } else {
        1.0 - conditional_entropy(truth, pred) / h
    }
}

pub fn completeness(truth: &[usize], pred: &[usize]) -> f64 {
    homogeneity(pred, truth)
}

pub fn v_measure(truth: &[usize], pred: &[usize]) -> f64 {
    let (h, c) = (homogeneity(truth, pred), completeness(truth, pred));
    if h + c == 0.0 {
        0.0
    } else {
        2.0 * h * c / (h + c)
    }
}

/// Labels numbered by first appearance.
pub fn canonical(raw: &[usize]) -> Vec<usize> {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    raw.iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Greedy merging by exhaustive rescans: clusters ordered by their smallest
/// member; the first pair (i < j) with mean cross similarity above `t` is
/// merged and the scan restarts.
pub fn merge_oracle(s: &[Vec<f64>], t: f64) -> Vec<usize> {
    let n = s.len();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    'scan: loop {
        groups.sort_by_key(|g| *g.iter().min().unwrap());
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let mut sum = 0.0;
                for &a in &groups[i] {
                    for &b in &groups[j] {
                        sum += s[a][b];
                    }
                }
                if sum / (groups[i].len() * groups[j].len()) as f64 > t {
                    let moved = groups.remove(j);
                    groups[i].extend(moved);
                    continue 'scan;
                }
            }
        }
        break;
    }
    let mut labels = vec![0; n];
    for (g, members) in groups.iter().enumerate() {
        for &m in members {
            labels[m] = g;
        }
    }
    canonical(&labels)
}

/// Median plus population standard deviation of the entries above it, or
/// the maximum when none are above.
pub fn auto_threshold_oracle(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len();
    let median = if m % 2 == 1 { v[m / 2] } else { (v[m / 2 - 1] + v[m / 2]) / 2.0 };
    let above: Vec<f64> = values.iter().copied().filter(|&x| x > median).collect();
    if above.is_empty() {
        return *v.last().unwrap();
    }
    let mean = above.iter().sum::<f64>() / above.len() as f64;
    let var = above.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / above.len() as f64;
    median + var.sqrt()
}

/// Indices not dominated by any other row (higher is better).
pub fn pareto_oracle(rows: &[Vec<f64>]) -> Vec<usize> {
    (0..rows.len())
        .filter(|&a| {
            !(0..rows.len()).any(|b| {
                b != a
                    && rows[b].iter().zip(&rows[a]).all(|(x, y)| x >= y)
                    && rows[b].iter().zip(&rows[a]).any(|(x, y)| x > y)
            })
        })
        .collect()
}
