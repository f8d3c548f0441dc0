//! `--config` files: TOML with the same keys as the long flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Common, Format, VerifyArgs, WithSymmetry};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    manifold: Option<String>,
    order: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    #[serde(default)]
    type1: bool,
    kappa: Option<usize>,
    #[serde(default)]
    type2: bool,
    #[serde(default)]
    all: bool,
    #[serde(default)]
    select: Vec<String>,
    grid: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&src).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn common(&self, c: Common) -> Common {
        Common {
            manifold: c.manifold.or_else(|| self.manifold.clone()),
            order: c.order.or(self.order),
            format: c.format.or(self.format),
            out: c.out.or_else(|| self.out.clone()),
        }
    }

    /// File symmetry applies only when the flags name none.
    pub fn with_symmetry(&self, a: WithSymmetry) -> WithSymmetry {
        let flagged = a.type1 || a.type2;
        WithSymmetry {
            common: self.common(a.common),
            type1: if flagged { a.type1 } else { self.type1 },
            kappa: a.kappa.or(self.kappa),
            type2: if flagged { a.type2 } else { self.type2 },
        }
    }

    pub fn verify(&self, a: VerifyArgs) -> VerifyArgs {
        let chosen = a.all || a.prop1 || a.prop2 || a.prop3 || a.string || !a.select.is_empty();
        VerifyArgs {
            sym: self.with_symmetry(a.sym),
            all: a.all || (!chosen && self.all),
            select: if chosen {
                a.select
            } else {
                self.select.clone()
            },
            grid: a.grid.or_else(|| self.grid.clone()),
            ..a
        }
    }
}
