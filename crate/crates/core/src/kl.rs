//! k-nearest-neighbor Kullback–Leibler divergence estimation for
//! one-dimensional samples.
//!
//! Given samples `p_1..p_n ~ P` and `q_1..q_m ~ Q`, the estimator is
//!
//! ```text
//! D = (1/n) * sum_i log(nu_k(i) / rho_k(i)) + log(m / (n - 1))
//! ```
//!
//! where `rho_k(i)` is the distance from `p_i` to its k-th nearest neighbor
//! within `p` (excluding itself) and `nu_k(i)` the distance to its k-th
//! nearest neighbor in `q`. The estimate is in nats, may be negative, and is
//! not truncated at zero.
//!
//! When `q` contains a point exactly equal to `p_i`, one such occurrence is
//! excluded from the neighbor scan, mirroring the self-exclusion inside `p`;
//! this keeps the estimate near zero when both arguments are literally the
//! same sample. Any remaining zero distances (duplicated values) are
//! replaced by `1e-9` times the smallest positive distance seen in the scan.
//!
//! Distances are found by a sorted two-pointer scan in
//! `O((n + m) log(n + m) + (n + m) k)`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KlError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("need more than k={k} samples, got {got}")]
    TooFewSamples { k: usize, got: usize },
    #[error("samples must be finite")]
    NonFinite,
}

type Result<T> = std::result::Result<T, KlError>;

/// A divergence estimate together with the sizes that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlEstimate {
    /// Estimated divergence in nats.
    pub value: f64,
    pub k: usize,
    pub n: usize,
    pub m: usize,
}

fn sorted_copy(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(KlError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok(sorted)
}

/// Distance from each point to its k-th nearest neighbor among the *other*
/// points of the same sample. Results are aligned to the sample sorted
/// ascending.
pub fn knn_distances_within(values: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(KlError::ZeroK);
    }
    if values.len() <= k {
        return Err(KlError::TooFewSamples {
            k,
            got: values.len(),
        });
    }
    let sorted = sorted_copy(values)?;
    let n = sorted.len();
    let mut result = Vec::with_capacity(n);
    for i in 0..n {
        let value = sorted[i];
        let mut left = i.checked_sub(1);
        let mut right = i + 1;
        let mut taken = 0;
        let mut kth = 0.0;
        while taken < k {
            let left_dist = left.map(|l| value - sorted[l]);
            let right_dist = (right < n).then(|| sorted[right] - value);
            kth = match (left_dist, right_dist) {
                (Some(ld), Some(rd)) if ld <= rd => {
                    left = left.and_then(|l| l.checked_sub(1));
                    ld
                }
                (_, Some(rd)) => {
                    right += 1;
                    rd
                }
                (Some(ld), None) => {
                    left = left.and_then(|l| l.checked_sub(1));
                    ld
                }
                (None, None) => unreachable!("k < n guarantees a neighbor"),
            };
            taken += 1;
        }
        result.push(kth);
    }
    Ok(result)
}

/// Distance from each point of `from` to its k-th nearest neighbor in
/// `into`. With `exclude_equal`, one occurrence of a point of `into`
/// exactly equal to the query is skipped. Results are aligned to `from`
/// sorted ascending.
pub fn knn_distances_cross(
    from: &[f64],
    into: &[f64],
    k: usize,
    exclude_equal: bool,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(KlError::ZeroK);
    }
    if into.len() <= k {
        return Err(KlError::TooFewSamples { k, got: into.len() });
    }
    let from_sorted = sorted_copy(from)?;
    let into_sorted = sorted_copy(into)?;
    let m = into_sorted.len();
    let mut result = Vec::with_capacity(from_sorted.len());
    for &value in &from_sorted {
        // Gather the k+1 smallest distances; dropping one exact match (a
        // zero, necessarily among the smallest) then leaves the k-th.
        let want = if exclude_equal { k + 1 } else { k };
        let split = into_sorted.partition_point(|&x| x < value);
        let mut left = split.checked_sub(1);
        let mut right = split;
        let mut gathered = Vec::with_capacity(want);
        while gathered.len() < want && (left.is_some() || right < m) {
            let left_dist = left.map(|l| value - into_sorted[l]);
            let right_dist = (right < m).then(|| into_sorted[right] - value);
            let next = match (left_dist, right_dist) {
                (Some(ld), Some(rd)) if ld <= rd => {
                    left = left.and_then(|l| l.checked_sub(1));
                    ld
                }
                (_, Some(rd)) => {
                    right += 1;
                    rd
                }
                (Some(ld), None) => {
                    left = left.and_then(|l| l.checked_sub(1));
                    ld
                }
                (None, None) => break,
            };
            gathered.push(next);
        }
        let kth = if exclude_equal && gathered.first() == Some(&0.0) {
            gathered[k]
        } else {
            gathered[k - 1]
        };
        result.push(kth);
    }
    Ok(result)
}

/// kNN estimate of `D(P || Q)` from one-dimensional samples.
pub fn knn_kl(p_samples: &[f64], q_samples: &[f64], k: usize) -> Result<KlEstimate> {
    let n = p_samples.len();
    let m = q_samples.len();
    if n <= k {
        return Err(KlError::TooFewSamples { k, got: n });
    }
    let rho = knn_distances_within(p_samples, k)?;
    let nu = knn_distances_cross(p_samples, q_samples, k, true)?;

    let smallest_positive = rho
        .iter()
        .chain(&nu)
        .copied()
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor = if smallest_positive.is_finite() {
        smallest_positive * 1e-9
    } else {
        1.0
    };
    let lift = |d: f64| if d == 0.0 { floor } else { d };

    let log_ratio_sum: f64 = rho
        .iter()
        .zip(&nu)
        .map(|(&r, &v)| (lift(v) / lift(r)).ln())
        .sum();
    let value = log_ratio_sum / n as f64 + (m as f64 / (n as f64 - 1.0)).ln();
    Ok(KlEstimate { value, k, n, m })
}
