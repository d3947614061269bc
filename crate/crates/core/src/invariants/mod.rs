//! Numerical invariants of fibers: multiplicities, Segre numbers, Milnor
//! numbers, em and polar multiplicities.

mod genericity;
mod milnor;
mod multiplicity;

pub use genericity::{GenericityConfig, MultiplicityResult};
pub(crate) use genericity::stream;
pub use milnor::{
    augmented_fiber_module, binomial, em_invariant, em_via_milnor, em_via_milnor_weighted,
    milnor_hypersurface, milnor_icis, multiplicity, point_label, polar_multiplicity,
    sectional_milnor_sequence, weighted_milnor_sum,
};
pub(crate) use milnor::lg_colength;
pub use multiplicity::{
    associated_multiplicities, br_multiplicity, generic_reduction, samuel_multiplicity,
    segre_numbers,
};
