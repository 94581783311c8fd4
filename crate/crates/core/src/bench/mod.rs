//! Benchmark harness: test functions, error metrics, reference integrals,
//! sweeps and plots. Runs in `f64`.

pub mod experiment;
pub mod functions;
pub mod metrics;
pub mod plot;
pub mod reference;

pub use experiment::{
    preset, run_cubature_table, run_experiment, CubatureRow, CubatureTableConfig, ExperimentConfig, ExperimentRow,
    ExperimentTable, Sweep,
};
pub use functions::{test_function, TestFunctionId};
pub use metrics::{error_metrics, ErrorReport};
pub use reference::{reference_integral, Quadrature};
