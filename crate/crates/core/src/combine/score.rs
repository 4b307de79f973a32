use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::model::JointDistribution;

/// `R = Score(base) / Score(combined)` from precomputed log scores. Both scores
/// are negative, so `R > 1` means the combined model predicts better.
pub fn ratio_from_scores(score_base: f64, score_combined: f64) -> Result<f64> {
    if score_base >= 0.0 || score_combined >= 0.0 {
        return Err(GmmError::precondition(format!(
            "score ratio needs negative scores, got {score_base} and {score_combined}"
        )));
    }
    Ok(score_base / score_combined)
}

pub fn score_ratio(
    base: &dyn JointDistribution,
    combined: &dyn JointDistribution,
    test: &PlayDataset,
) -> Result<f64> {
    ratio_from_scores(base.log_score(test)?, combined.log_score(test)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_cases() {
        let uniform = -500.0 * 10.0 * 2f64.ln();
        assert_eq!(ratio_from_scores(uniform, uniform / 2.0).unwrap(), 2.0);
        assert_eq!(ratio_from_scores(-3.0, -3.0).unwrap(), 1.0);
        assert!(ratio_from_scores(-3.0, -2.0).unwrap() > 1.0);
        assert!(ratio_from_scores(0.0, -1.0).is_err());
    }
}
