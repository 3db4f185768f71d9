use crate::scenario::Behavior;

use super::marginal::{pairwise_marginal_feasibility, MarginalResult, MarginalSpec};
use super::FeasibilityError;

/// Is there a joint distribution over `(a0, a1, b0, b1)` whose four context
/// marginals equal the behavior? Infeasible means outside the local polytope.
pub fn fine_membership(beh: &Behavior) -> Result<MarginalResult, FeasibilityError> {
    pairwise_marginal_feasibility(&MarginalSpec::from_tables(&beh.context_tables())?)
}
