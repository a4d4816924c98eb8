//! Matrix-model holomorphy tests, the ∂̃ operator and kernel solvers of ∂̃u = f.

mod corpus;
mod cr;
mod solve;

pub use corpus::{Corpus, CorpusFunction, PairKind};
pub use cr::{
    compat_check, cr_residual, cr_residual_with, dbar_apply, dbar_form, dbar_form_value, partials_with, CRResidual, CompatReport,
    DbarChannels, Differencing, SlotWirtinger,
};
pub use solve::{dbar_solve, dbar_solve_convex, dbar_solve_residual, slice, OperatorField, Slice, SolveResidual, Support};
