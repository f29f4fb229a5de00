use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::{Error, Result};

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::validation(format!(
            "rank correlation needs at least 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::validation("NaN in rank correlation input"));
    }
    Ok(())
}

/// Kendall's tau-b with tie correction:
/// `(P - Q) / sqrt((P + Q + T) (P + Q + U))`, where `T`/`U` count pairs tied
/// only in `x`/only in `y`. `None` when either input is constant.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    check_pair(x, y)?;
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let dx = x[i].partial_cmp(&x[j]).unwrap_or(Ordering::Equal);
            let dy = y[i].partial_cmp(&y[j]).unwrap_or(Ordering::Equal);
            match (dx, dy) {
                (Ordering::Equal, Ordering::Equal) => {}
                (Ordering::Equal, _) => tie_x += 1,
                (_, Ordering::Equal) => tie_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let base = (concordant + discordant) as f64;
    let denom = ((base + tie_x as f64) * (base + tie_y as f64)).sqrt();
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some(((concordant - discordant) as f64 / denom).clamp(-1.0, 1.0)))
}

/// Average ranks (1-based); ties share the mean of their positions.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks. `None` when either
/// input is constant.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    check_pair(x, y)?;
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}

/// Ordinal rank positions (1-based) of `values`, best first. Ties keep their
/// input order, which is how a ranked list of systems assigns positions.
pub fn rank_positions(values: &[f64], ascending: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let c = values[a].total_cmp(&values[b]);
        if ascending {
            c
        } else {
            c.reverse()
        }
    });
    let mut pos = vec![0.0; values.len()];
    for (rank, k) in order.into_iter().enumerate() {
        pos[k] = (rank + 1) as f64;
    }
    pos
}

/// Model ids sorted by metric value; equal values fall back to id order.
/// NaN values sort last.
pub fn rank_models(metric_values: &BTreeMap<String, f64>, ascending: bool) -> Vec<String> {
    let mut entries: Vec<(&String, f64)> = metric_values.iter().map(|(k, v)| (k, *v)).collect();
    entries.sort_by(|a, b| {
        let by_value = match (a.1.is_nan(), b.1.is_nan()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ if ascending => a.1.total_cmp(&b.1),
            _ => b.1.total_cmp(&a.1),
        };
        by_value.then_with(|| a.0.cmp(b.0))
    });
    entries.into_iter().map(|(k, _)| k.clone()).collect()
}
