//! Benchmarks live in `benches/`; this crate only hosts shared fixtures.

use selfsim::ProblemParams;

/// The parameter sets timed by the benches.
pub fn fixtures() -> [(&'static str, ProblemParams); 3] {
    [
        ("fde_reference", ProblemParams::fde(3, 0.1, 1.0, 1.0, 1.0)),
        ("lde_reference", ProblemParams::lde(3, 1.0, 1.0, 1.0)),
        ("fde_small_m", ProblemParams::fde(3, 0.01, 1.0, 1.0, 1.0)),
    ]
}
