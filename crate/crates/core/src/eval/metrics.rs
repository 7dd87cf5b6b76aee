//! Ranking and classification metrics over gold sets of standard names.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

fn check_lengths(gold: usize, other: usize) -> Result<()> {
    if gold != other {
        return Err(Error::LengthMismatch { left: gold, right: other });
    }
    Ok(())
}

fn mean(total: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

/// Fraction of queries whose top-ranked name is in the gold set.
pub fn accuracy(gold: &[BTreeSet<String>], ranked: &[Vec<String>]) -> Result<f64> {
    check_lengths(gold.len(), ranked.len())?;
    let hits = gold
        .iter()
        .zip(ranked)
        .filter(|(g, r)| r.first().is_some_and(|top| g.contains(top)))
        .count();
    Ok(mean(hits as f64, gold.len()))
}

/// Micro-averaged F1 over (query, standard name) decisions.
pub fn f1_set(gold: &[BTreeSet<String>], predicted: &[BTreeSet<String>]) -> Result<f64> {
    check_lengths(gold.len(), predicted.len())?;
    let mut true_pos = 0usize;
    let mut n_pred = 0usize;
    let mut n_gold = 0usize;
    for (g, p) in gold.iter().zip(predicted) {
        true_pos += g.intersection(p).count();
        n_pred += p.len();
        n_gold += g.len();
    }
    if n_pred == 0 || n_gold == 0 || true_pos == 0 {
        return Ok(0.0);
    }
    let precision = true_pos as f64 / n_pred as f64;
    let recall = true_pos as f64 / n_gold as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Mean over queries of `|top-k ∩ gold| / |gold|`.
pub fn recall_at_k(gold: &[BTreeSet<String>], ranked: &[Vec<String>], k: usize) -> Result<f64> {
    check_lengths(gold.len(), ranked.len())?;
    let mut total = 0.0;
    for (i, (g, r)) in gold.iter().zip(ranked).enumerate() {
        if g.is_empty() {
            return Err(Error::EmptyGold(i));
        }
        let hits = r.iter().take(k).filter(|name| g.contains(*name)).count();
        total += hits as f64 / g.len() as f64;
    }
    Ok(mean(total, gold.len()))
}

/// NDCG@k with binary relevance and `log2(rank + 1)` discounting.
pub fn ndcg_at_k(gold: &[BTreeSet<String>], ranked: &[Vec<String>], k: usize) -> Result<f64> {
    check_lengths(gold.len(), ranked.len())?;
    let discount = |rank: usize| 1.0 / ((rank + 1) as f64).log2();
    let mut total = 0.0;
    for (i, (g, r)) in gold.iter().zip(ranked).enumerate() {
        if g.is_empty() {
            return Err(Error::EmptyGold(i));
        }
        let dcg: f64 = r
            .iter()
            .take(k)
            .enumerate()
            .filter(|(_, name)| g.contains(*name))
            .map(|(pos, _)| discount(pos + 1))
            .sum();
        let ideal: f64 = (1..=g.len().min(k)).map(discount).sum();
        if ideal > 0.0 {
            total += dcg / ideal;
        }
    }
    Ok(mean(total, gold.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn list(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn accuracy_ratios() {
        let gold = vec![set(&["a"]), set(&["b"]), set(&["c"]), set(&["d"])];
        let all = vec![list(&["a"]), list(&["b"]), list(&["c"]), list(&["d", "x"])];
        assert_eq!(accuracy(&gold, &all).unwrap(), 1.0);
        let none = vec![list(&["x"]), list(&[]), list(&["a"]), list(&["c"])];
        assert_eq!(accuracy(&gold, &none).unwrap(), 0.0);
        let half = vec![list(&["a"]), list(&["b"]), list(&["x", "c"]), list(&[])];
        assert_eq!(accuracy(&gold, &half).unwrap(), 0.5);
        assert!(matches!(accuracy(&gold, &half[..3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn f1_cases() {
        let gold = vec![set(&["a"]), set(&["b"])];
        assert_eq!(f1_set(&gold, &gold).unwrap(), 1.0);
        assert_eq!(f1_set(&gold, &[set(&["x"]), set(&["y"])]).unwrap(), 0.0);
        let f1 = f1_set(&[set(&["a", "b"])], &[set(&["a"])]).unwrap();
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f1_set(&[set(&[])], &[set(&[])]).unwrap(), 0.0);
    }

    #[test]
    fn recall_cases() {
        let g = vec![set(&["a"])];
        assert_eq!(recall_at_k(&g, &[list(&["x", "y", "a"])], 5).unwrap(), 1.0);
        assert_eq!(recall_at_k(&g, &[list(&["1", "2", "3", "4", "5", "a"])], 5).unwrap(), 0.0);
        assert_eq!(recall_at_k(&[set(&["a", "b"])], &[list(&["a", "x"])], 5).unwrap(), 0.5);
        assert!(matches!(recall_at_k(&[set(&[])], &[list(&["a"])], 5), Err(Error::EmptyGold(0))));
    }

    #[test]
    fn ndcg_cases() {
        let g = vec![set(&["a"])];
        assert_eq!(ndcg_at_k(&g, &[list(&["a", "x"])], 5).unwrap(), 1.0);
        let second = ndcg_at_k(&g, &[list(&["x", "a"])], 5).unwrap();
        assert!((second - 1.0 / 3f64.log2()).abs() < 1e-12);
        assert!((second - 0.6309).abs() < 1e-4);
        assert_eq!(ndcg_at_k(&g, &[list(&["x", "y"])], 5).unwrap(), 0.0);
        // all gold names on top
        assert_eq!(ndcg_at_k(&[set(&["a", "b"])], &[list(&["b", "a", "x"])], 5).unwrap(), 1.0);
    }
}
