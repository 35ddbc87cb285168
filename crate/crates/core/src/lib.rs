//! Singular radially symmetric self-similar profiles of the fast diffusion
//! equation `u_t = Δ(u^m/m)` and the logarithmic diffusion equation
//! `u_t = Δ log u`.

pub mod dynamics;
pub mod extend;
pub mod numerics;
pub mod params;
pub mod profile;
pub mod seed;
pub mod verify;

pub use params::{derive_constants, validate, DerivedConstants, Kind, ParamError, ProblemParams, Validated};
pub use seed::{SeedConfig, SeedError, SeedGrid};
pub use extend::{ExtendConfig, ExtendError};
pub use profile::{solve, solve_with_b1, Profile, ProfileError, Sample, SolveError, SolveInfo, SolverSettings, Spacing};
pub use verify::{CheckEntry, Status, VerificationReport, VerifyConfig, VerifyError};
