//! Domain types shared by every other module: preference and payoff
//! matrices, simplex points, the seeded random stream and the Bernoulli
//! duel-outcome model.

mod context;
mod dist;
mod matrix;
mod record;
mod rng;

pub use context::{Context, FeatureTensor};
pub use dist::{
    ActionDistribution, JointActionDistribution, RENORMALIZE_LIMIT, SIMPLEX_TOLERANCE,
};
pub use matrix::{pair_count, pairs, GeneralMatrix, PreferenceMatrix, SKEW_TOLERANCE};
pub use record::{sample_outcome, Duel, Outcome, RoundRecord};
pub use rng::RngHandle;

/// Validates a K×K matrix against the zero-sum preference invariants.
pub fn validate_preference_matrix(rows: Vec<Vec<f64>>) -> crate::Result<PreferenceMatrix> {
    PreferenceMatrix::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn skew_completion_always_validates(k in 2usize..8, seed in any::<u64>()) {
            let mut rng = RngHandle::new(seed);
            let upper: Vec<f64> = (0..pair_count(k)).map(|_| rng.uniform_range(-1.5, 1.5)).collect();
            let m = PreferenceMatrix::skew_complete(k, &upper);
            prop_assert!(validate_preference_matrix(m.to_rows()).is_ok());
        }
    }
}
