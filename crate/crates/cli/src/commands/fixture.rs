use std::path::PathBuf;

use chemeval_core::corpus::{generate_fixture, FixtureParams, Perturbation};
use clap::Args;

use crate::error::CliError;

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long)]
    pub seed: u64,
    /// Directory receiving gt.json, pred.json and expected.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "Synthetic")]
    pub dataset: String,
    #[arg(long, default_value_t = 10)]
    pub pages: usize,
    #[arg(long, default_value_t = 3)]
    pub molecules_min: usize,
    #[arg(long, default_value_t = 10)]
    pub molecules_max: usize,
    #[arg(long, default_value_t = 0)]
    pub reactions_min: usize,
    #[arg(long, default_value_t = 3)]
    pub reactions_max: usize,
    #[arg(long, default_value_t = 20)]
    pub max_atoms: usize,
    /// Box edge jitter as a fraction of box size.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Probability that a predicted structure is wrong or unreadable.
    #[arg(long, default_value_t = 0.0)]
    pub corruption: f64,
    /// Probability that a molecule or reaction has no prediction.
    #[arg(long, default_value_t = 0.0)]
    pub drop: f64,
    /// Probability that an empty cell gets a spurious prediction.
    #[arg(long, default_value_t = 0.0)]
    pub spurious: f64,
    /// Probability that a predicted reaction has a role error.
    #[arg(long, default_value_t = 0.0)]
    pub role_errors: f64,
}

impl FixtureArgs {
    fn params(&self) -> FixtureParams {
        FixtureParams {
            dataset: self.dataset.clone(),
            pages: self.pages,
            molecules_per_page: [self.molecules_min, self.molecules_max],
            reactions_per_page: [self.reactions_min, self.reactions_max],
            max_atoms: self.max_atoms,
            perturbation: Perturbation {
                box_jitter: self.jitter,
                structure_corruption_rate: self.corruption,
                drop_rate: self.drop,
                spurious_rate: self.spurious,
                role_error_rate: self.role_errors,
            },
        }
    }
}

pub fn run(args: &FixtureArgs) -> Result<(), CliError> {
    let fixture = generate_fixture(args.seed, &args.params())?;
    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    for (name, text) in [
        ("gt.json", fixture.ground_truth_json()),
        ("pred.json", fixture.predictions_json()),
        ("expected.json", fixture.expected_json()),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}
