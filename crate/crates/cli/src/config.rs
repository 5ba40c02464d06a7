use std::path::{Path, PathBuf};

use gks_core::{GroupParams, PrimeField};
use serde::{Deserialize, Serialize};

use crate::args::{Format, GlobalArgs};
use crate::error::CliError;

pub const DEFAULT_GM_STATE: &str = "gm.state";

/// Effective settings after merging flags, `GKS_SEED`, the config file and
/// defaults, in that order of precedence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub q: String,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub poly_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub format: Format,
    pub gm_state: PathBuf,
}

/// A config file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    q: Option<String>,
    ambient_dim: Option<usize>,
    subspace_dim: Option<usize>,
    poly_degree: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    gm_state: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            q: "101".into(),
            ambient_dim: 16,
            subspace_dim: 4,
            poly_degree: 8,
            seed: None,
            format: Format::Human,
            gm_state: DEFAULT_GM_STATE.into(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        let d = Config::default();
        Ok(Config {
            q: file.q.unwrap_or(d.q),
            ambient_dim: file.ambient_dim.unwrap_or(d.ambient_dim),
            subspace_dim: file.subspace_dim.unwrap_or(d.subspace_dim),
            poly_degree: file.poly_degree.unwrap_or(d.poly_degree),
            seed: file.seed,
            format: file.format.unwrap_or(d.format),
            gm_state: file.gm_state.unwrap_or(d.gm_state),
        })
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn resolve(args: &GlobalArgs) -> Result<Config, CliError> {
        let mut c = match &args.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        if let Some(q) = &args.q {
            c.q = q.clone();
        }
        c.ambient_dim = args.ambient_dim.unwrap_or(c.ambient_dim);
        c.subspace_dim = args.subspace_dim.unwrap_or(c.subspace_dim);
        c.poly_degree = args.poly_degree.unwrap_or(c.poly_degree);
        c.seed = args.seed.or(c.seed);
        c.format = args.format.unwrap_or(c.format);
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn field(&self) -> Result<PrimeField, CliError> {
        PrimeField::parse(&self.q).map_err(|e| CliError::Usage(format!("--q {}: {e}", self.q)))
    }

    pub fn params(&self) -> Result<GroupParams, CliError> {
        GroupParams::new(self.field()?, self.ambient_dim, self.subspace_dim, self.poly_degree)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}
