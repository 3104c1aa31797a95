//! Numeric side: Legendre periods, elliptic logarithms of sections, and
//! their analytic continuation around the singular points of the base.

pub mod carlson;
pub mod continuation;
pub mod legendre;
pub mod path;
pub mod presentation;
pub mod scheme;

pub use continuation::{
    continue_frame, loop_action, loop_monodromy, AnalyticFrame, ContinuationResult, EngineConfig, FactorFrame,
    LoopAction,
};
pub use legendre::{double_point, elliptic_log_at, periods_at, principal_y, PeriodPair};
pub use path::{auto_loops, LoopPath};
pub use presentation::{
    basic_loops, build_presentation, build_presentation_with, cover_data, cover_loops, free_reduce,
    presentation_for_scheme, CoverData, CoverLoop,
};
pub use scheme::{FactorSpec, Poly, RationalFunction, SchemeSpec, SectionSpec, SingularKind, SingularPoint};
