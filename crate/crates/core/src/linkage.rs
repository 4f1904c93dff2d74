//! Complete-linkage agglomeration over a dense distance matrix.
//!
//! Clusters are identified by their smallest member index. At every step the
//! pair with the smallest complete-linkage distance is merged; ties go to the
//! lexicographically smallest `(i, j)` pair. A per-row minimum cache keeps the
//! common case near O(n^2): complete-linkage distances only grow on merge, so
//! a row's cached minimum stays valid unless it pointed at a merged cluster.

use crate::types::{canonicalize_labels, ClusterLabels};

#[derive(Clone, Copy)]
struct RowMin {
    dist: f64,
    col: usize,
}

/// Runs complete linkage on the `n x n` distance matrix `dist` until `k`
/// clusters remain (`k` is clamped to `1..=n`). Returns canonical labels.
pub fn complete_linkage(dist: &[f64], n: usize, k: usize) -> ClusterLabels {
    assert_eq!(dist.len(), n * n, "distance matrix must be n x n");
    if n == 0 {
        return canonicalize_labels::<usize>(&[]);
    }
    let k = k.clamp(1, n);
    let mut d = dist.to_vec();
    let mut active = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();

    let row_min = |d: &[f64], active: &[bool], i: usize| -> Option<RowMin> {
        let mut best: Option<RowMin> = None;
        for j in i + 1..n {
            if !active[j] {
                continue;
            }
            let v = d[i * n + j];
            if best.is_none_or(|b| v < b.dist) {
                best = Some(RowMin { dist: v, col: j });
            }
        }
        best
    };

    let mut mins: Vec<Option<RowMin>> = (0..n).map(|i| row_min(&d, &active, i)).collect();

    for _ in 0..n - k {
        let mut pick: Option<(usize, RowMin)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if let Some(m) = mins[i] {
                if pick.is_none_or(|(_, p)| m.dist < p.dist) {
                    pick = Some((i, m));
                }
            }
        }
        let Some((a, RowMin { col: b, .. })) = pick else {
            break;
        };

        // merge b into a (a < b)
        for m in 0..n {
            if !active[m] || m == a || m == b {
                continue;
            }
            let v = d[a * n + m].max(d[b * n + m]);
            d[a * n + m] = v;
            d[m * n + a] = v;
        }
        active[b] = false;
        let moved = std::mem::take(&mut members[b]);
        for &p in &moved {
            owner[p] = a;
        }
        members[a].extend(moved);

        mins[b] = None;
        mins[a] = row_min(&d, &active, a);
        for m in 0..n {
            if !active[m] || m == a {
                continue;
            }
            if let Some(rm) = mins[m] {
                if rm.col == a || rm.col == b {
                    mins[m] = row_min(&d, &active, m);
                }
            }
        }
    }
    canonicalize_labels(&owner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid_1d(points: &[f64]) -> Vec<f64> {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = (points[i] - points[j]).abs();
            }
        }
        d
    }

    #[test]
    fn separates_two_groups() {
        let d = euclid_1d(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(complete_linkage(&d, 4, 2).assignments(), &[0, 0, 1, 1]);
        assert_eq!(complete_linkage(&d, 4, 4).assignments(), &[0, 1, 2, 3]);
        assert_eq!(complete_linkage(&d, 4, 1).assignments(), &[0, 0, 0, 0]);
    }

    #[test]
    fn complete_linkage_uses_maximum_distance() {
        // chain 0 - 1 - 2 with gaps 1.0 and 1.1; 3 sits at 2.6 from 2.
        // after {0,1}, complete distance to 2 is 2.1 while 2-3 is 1.5.
        let d = euclid_1d(&[0.0, 1.0, 2.1, 3.6]);
        assert_eq!(complete_linkage(&d, 4, 2).assignments(), &[0, 0, 1, 1]);
    }

    #[test]
    fn ties_merge_smallest_pair_first() {
        let n = 4;
        let mut d = vec![1.0; n * n];
        for i in 0..n {
            d[i * n + i] = 0.0;
        }
        assert_eq!(complete_linkage(&d, n, 3).assignments(), &[0, 0, 1, 2]);
        assert_eq!(complete_linkage(&d, n, 2).assignments(), &[0, 0, 0, 1]);
    }
}
