//! Configuration, experiment orchestration and CSV output.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{load_config, Connectivity, PairSpec, ScenarioConfig};
pub use experiment::{
    build_scenario, run_experiment, run_on, run_seeds, select_pairs, sweep, Axis, Experiment, Run,
    Scenario, SummaryRow,
};
pub use output::{anomaly_csv, meta_text, packets_csv, summary_csv, write_outputs};
