//! Chi-square goodness of fit against the uniform distribution.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use coupon_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

/// Pearson's statistic for `observed` category counts against equal expected
/// counts, with its upper-tail p-value on `k - 1` degrees of freedom.
pub fn chi_square_uniform(observed: &[u64]) -> Result<ChiSquareTest, Error> {
    if observed.len() < 2 {
        return Err(Error::Domain("chi-square test needs at least 2 categories"));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::Domain(
            "chi-square test needs at least one observation",
        ));
    }
    let expected = total as f64 / observed.len() as f64;
    let statistic = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum::<f64>();
    let dof = observed.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(ChiSquareTest {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts_fit_perfectly() {
        let t = chi_square_uniform(&[25, 25, 25, 25]).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
        assert_eq!(t.degrees_of_freedom, 3);
    }

    #[test]
    fn maximal_deviation_is_rejected() {
        let t = chi_square_uniform(&[1_000_000, 0]).unwrap();
        assert!(t.p_value < 1e-12);
    }

    #[test]
    fn known_value() {
        // [5, 15]: statistic 5 on 1 dof, P(chi2_1 > 5) = erfc(sqrt(5/2))
        let t = chi_square_uniform(&[5, 15]).unwrap();
        assert!((t.statistic - 5.0).abs() < 1e-12);
        assert!(
            (t.p_value - 0.025_347_318_677).abs() < 1e-9,
            "{}",
            t.p_value
        );
    }

    #[test]
    fn degenerate_inputs() {
        assert!(chi_square_uniform(&[5]).is_err());
        assert!(chi_square_uniform(&[]).is_err());
        assert!(chi_square_uniform(&[0, 0]).is_err());
    }
}
