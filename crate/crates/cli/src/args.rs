use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gks", version, about = "Group key establishment over inner-product spaces on prime fields")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with defaults for the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Field modulus, decimal or 0x-hex.
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub ambient_dim: Option<usize>,
    #[arg(long, global = true)]
    pub subspace_dim: Option<usize>,
    #[arg(long, global = true)]
    pub poly_degree: Option<usize>,
    /// Seed for the invocation's generator. Unseeded runs draw from the OS.
    #[arg(long, global = true, env = "GKS_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a group manager state file.
    Setup {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite an existing state file.
        #[arg(long)]
        force: bool,
    },
    /// Register a member and write its credential.
    Register {
        #[arg(long)]
        gm: Option<PathBuf>,
        /// Public value; drawn at random when omitted.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one challenge-response round for a credential.
    Auth {
        #[arg(long)]
        gm: Option<PathBuf>,
        #[arg(long)]
        credential: PathBuf,
    },
    /// Broadcast a fresh group key and derive it from each credential.
    Groupkey {
        #[arg(long)]
        gm: Option<PathBuf>,
        #[arg(long = "credential", required = true)]
        credentials: Vec<PathBuf>,
    },
    /// Enroll a new member from an existing credential.
    Sponsor {
        #[arg(long)]
        credential: PathBuf,
        #[arg(long)]
        index: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named scenario and check its expected outcomes.
    Simulate {
        scenario: String,
        /// Transcript destination (line-delimited JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time projections and count inner products.
    Bench {
        #[arg(long, default_value_t = 10)]
        n_min: usize,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        n_step: usize,
        /// solve-cold, solve-warm, gram-schmidt or all.
        #[arg(long, default_value = "all")]
        method: String,
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
    /// Run an attack experiment; exits 0 iff its predicate holds.
    Attack {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Describe a state or credential file.
    Inspect {
        file: PathBuf,
        /// Also print secret material.
        #[arg(long)]
        unsafe_dump: bool,
    },
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Count polynomials consistent with leaked (x, f(x)) pairs.
    Interpolation {
        #[arg(long)]
        points: usize,
    },
    /// Recover value ratios from credentials and build an equivalent manager state.
    Ratio {
        #[arg(long, default_value_t = 3)]
        members: usize,
    },
    /// Answer challenges with random bases and compare the acceptance rate to q^-m.
    Guessing {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}
