//! Shared fixtures for the benchmarks.

use rwsre::{Dist, EnvironmentSpec};

/// Right-transient spec with speed 2/13.
pub fn transient_spec() -> EnvironmentSpec {
    EnvironmentSpec::new(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0])).expect("valid spec")
}

/// Recurrent spec with heavy gaps, as used by the valley experiment.
pub fn sinai_spec() -> EnvironmentSpec {
    EnvironmentSpec::new(Dist::xi_two_point(2.0, 0.5, 0.5), Dist::pareto_gap(0.6)).expect("valid spec")
}

/// Transient spec with tail index 1/2.
pub fn stable_spec() -> EnvironmentSpec {
    EnvironmentSpec::new(Dist::xi_two_point(4.0, 1.0 / 3.0, 0.25), Dist::uniform_on(&[1.0, 2.0])).expect("valid spec")
}
