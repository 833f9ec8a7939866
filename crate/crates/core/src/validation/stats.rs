use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a chi-square test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Number of cells after tail aggregation.
    pub cells: usize,
}

fn upper_tail(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let d = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    1.0 - d.cdf(statistic)
}

/// Goodness of fit of observed counts to cell probabilities.
///
/// `cells` pairs each observed count with its probability; the complement
/// cell (everything not listed) receives `total - Σ observed` draws and
/// probability `1 - Σ p`. Cells with expected count below `min_expected` are
/// merged into the complement cell; if the complement is itself too small it
/// is merged into the smallest remaining cell.
pub fn chi_square_gof(cells: &[(u64, f64)], total: u64, min_expected: f64) -> ChiSquare {
    let n = total as f64;
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let listed_obs: u64 = cells.iter().map(|c| c.0).sum();
    let listed_p: f64 = cells.iter().map(|c| c.1).sum();
    let mut rest_obs = (total - listed_obs) as f64;
    let mut rest_p = (1.0 - listed_p).max(0.0);
    for &(o, p) in cells {
        if p * n >= min_expected {
            kept.push((o as f64, p));
        } else {
            rest_obs += o as f64;
            rest_p += p;
        }
    }
    if rest_p * n >= min_expected || kept.is_empty() {
        kept.push((rest_obs, rest_p));
    } else if rest_obs > 0.0 || rest_p > 0.0 {
        let smallest = kept
            .iter_mut()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        smallest.0 += rest_obs;
        smallest.1 += rest_p;
    }
    let statistic: f64 = kept
        .iter()
        .filter(|c| c.1 > 0.0)
        .map(|&(o, p)| (o - n * p).powi(2) / (n * p))
        .sum();
    let df = kept.len().saturating_sub(1);
    ChiSquare {
        statistic,
        df,
        p_value: upper_tail(statistic, df),
        cells: kept.len(),
    }
}

/// Two-sample chi-square test of homogeneity. Cells whose pooled count is
/// below `min_pooled` are merged into one.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_pooled: u64) -> ChiSquare {
    assert_eq!(a.len(), b.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut rest = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        if x + y >= min_pooled {
            cells.push((x as f64, y as f64));
        } else {
            rest.0 += x as f64;
            rest.1 += y as f64;
        }
    }
    if rest.0 + rest.1 > 0.0 {
        cells.push(rest);
    }
    let na: f64 = cells.iter().map(|c| c.0).sum();
    let nb: f64 = cells.iter().map(|c| c.1).sum();
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let statistic = cells
        .iter()
        .map(|&(x, y)| (ka * x - kb * y).powi(2) / (x + y))
        .sum();
    let df = cells.len().saturating_sub(1);
    ChiSquare {
        statistic,
        df,
        p_value: upper_tail(statistic, df),
        cells: cells.len(),
    }
}

/// Total-variation distance `½ Σ |p_i - q_i|` between two count vectors on
/// the same cells, each normalized by its own total.
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    0.5 * a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_tail_probability() {
        // P(χ²_2 > x) = e^{-x/2}
        assert!((upper_tail(3.0, 2) - (-1.5f64).exp()).abs() < 1e-12);
        assert_eq!(upper_tail(5.0, 0), 1.0);
    }

    #[test]
    fn perfect_fit() {
        let r = chi_square_gof(&[(500, 0.5), (300, 0.3)], 1000, 5.0);
        assert!(r.statistic < 1e-20);
        assert_eq!(r.df, 2);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_cells_are_merged() {
        let r = chi_square_gof(&[(990, 0.99), (3, 0.002), (2, 0.003)], 1000, 5.0);
        // the two small cells and the 0.005 complement merge into one cell
        assert_eq!(r.cells, 2);
        assert!((r.statistic).abs() < 1e-9);
    }

    #[test]
    fn two_sample_identical() {
        let r = chi_square_two_sample(&[10, 20, 30, 1], &[10, 20, 30, 1], 5);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.cells, 4);
        assert_eq!(total_variation(&[1, 3], &[2, 6]), 0.0);
        assert!((total_variation(&[1, 0], &[0, 1]) - 1.0).abs() < 1e-15);
    }
}
