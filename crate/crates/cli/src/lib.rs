//! Staged, file-based driver for the subcategorization acquisition pipeline.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod stage;

pub use config::{Overrides, PipelineConfig};
pub use error::{CliError, CliResult};
pub use pipeline::Pipeline;
pub use stage::Stage;

/// Validate the config for `stages` and run them.
pub fn run_pipeline(cfg: &PipelineConfig, stages: &[Stage]) -> CliResult<()> {
    cfg.validate(stages, false)?;
    Pipeline::new(cfg)?.run(stages)
}

/// Validate the config and write a synthetic corpus with its gold files.
pub fn run_synth(cfg: &PipelineConfig) -> CliResult<()> {
    cfg.validate(&[], true)?;
    Pipeline::new(cfg)?.synth()
}
