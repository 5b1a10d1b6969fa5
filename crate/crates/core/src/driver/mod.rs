//! Benchmarks, the adaptive loop, CSV output and the command line front end.

mod afem;
mod benchmarks;
mod config;
mod marking;
mod output;
mod rates;
pub mod verify;

pub use afem::{run_afem, AfemConfig, AfemRun, ConvergenceRecord, LevelCheck};
pub use benchmarks::{
    benchmark, benchmark_library, exact_energy, twowell_benchmark, Benchmark, BenchmarkId, ExactSolution,
    ODP_LSHAPE_ENERGY, ODP_LSHAPE_LAMBDA, ODP_SQUARE_ENERGY, ODP_SQUARE_LAMBDA, PLAPLACE_LSHAPE_ENERGY,
    PLAPLACE_SQUARE_ENERGY, TWOWELL_ALPHA,
};
pub use config::{init_threads, RunSettings, THREADS_ENV};
pub use marking::{aitken_extrapolate, dorfler_mark, Extrapolation};
pub use output::{read_csv, write_csv, CSV_HEADER};
pub use rates::{loglog_slope, rate_table, RateRow};
