//! Non-idempotent multi-types with memory: derivation checking for λI-terms
//! and resource terms, bounded typability, interpretations and separation.

mod deriv;
mod infer;
mod search;
mod separate;
mod types;

pub use deriv::{
    check_derivation, check_resource_derivation, parse_judgment, parse_resource_judgment, CheckError, Derivation,
    Judgment, Rule, Subject, Typing,
};
pub use infer::{
    canonical_judgment, cross_check, from_resource, infer_resource, instance_of, instantiate, interp_enumerate,
    judgment_sets, to_resource, typable_taylor, Inference, InferOptions, InterpBounds, TaylorTyping,
};
pub use search::{expand, typable, unsubst, SearchBounds, Typability};
pub use separate::{separating_judgment, Separation, SeparationError, Side};
pub use types::{parse_mtype, parse_type, parse_type_env, parse_var_env, MTy, OTy, Rules, Ty, TypeEnv, VarEnv};
