//! Seeded, repeated experiment runs: config parsing, the training loop,
//! aggregation, and CSV/SVG emission.

pub mod config;
pub mod outputs;
pub mod plot;
pub mod runner;
pub mod summary;

pub use config::{
    experiments_from_value, load_experiments, parse_override, AisBaseKind, AisSettings,
    DatasetSpec, ExperimentConfig, ExperimentFile, NllMode, Task, CONFIG_SCHEMA_VERSION,
};
pub use outputs::{
    emit_outputs, read_metrics_csv, read_summary_csv, write_metrics_csv, write_summary_csv,
};
pub use plot::{density_scatter_svg, learning_curve_svg, CurveSeries};
pub use runner::{
    evaluate_model, run_experiment, run_experiment_with_models, EpochMetrics, Evaluation,
    MetricRow, TrainedRun, WALL_CLOCK_METRIC,
};
pub use summary::{percentile_linear, summarize, SummaryRow};
