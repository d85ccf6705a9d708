//! Run configuration: a TOML file plus command-line overrides.
//!
//! ```toml
//! spacing = 0.015625
//! seed = 0
//! dirs = 16
//!
//! [kernel]
//! kind = "step"          # power | step | indicator | table
//! d = 2
//! levels = [3.0, 2.0, 1.0]
//! radii = [1.0, 2.0, 3.0]
//! # alpha = 0.5                       (power)
//! # r = 0.8                           (indicator)
//! # table = [[0.5, 4.0], [1.5, 1.0]]  (table: [t, phi] pairs)
//!
//! [set]                  # exactly one source
//! balls = { centers = [[0.0, 0.0]], radius = 1.0 }
//! # file = "set.nlgrid"
//! # ellipse = { center = [0.0, 0.0], semi_axes = [1.4, 0.7] }
//!
//! [tolerances]
//! pair_budget = 1000000
//! criticality_factor = 3.0
//! fit_rms = 3.0
//! max_balls = 64
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nlrigid::curvature::NondegOptions;
use nlrigid::moving_planes::SweepSettings;
use nlrigid::rigidity::RigidityOptions;
use nlrigid::{gridfile, IndicatorGrid, RadialKernel};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spacing: Option<f64>,
    pub seed: Option<u64>,
    pub dirs: Option<usize>,
    pub out: Option<PathBuf>,
    pub kernel: Spanned<KernelSpec>,
    pub set: Option<Spanned<SetSpec>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(skip)]
    source: String,
    #[serde(skip)]
    base: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub kind: String,
    pub d: usize,
    pub alpha: Option<f64>,
    pub levels: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
    pub r: Option<f64>,
    pub table: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub balls: Option<Balls>,
    pub file: Option<PathBuf>,
    pub ellipse: Option<Ellipse>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Balls {
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ellipse {
    pub center: Option<Vec<f64>>,
    pub semi_axes: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub pair_budget: Option<usize>,
    pub criticality_factor: Option<f64>,
    pub fit_rms: Option<f64>,
    pub max_balls: Option<usize>,
    pub sweep_step: Option<f64>,
    pub inclusion_tol: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&source).map_err(|e| {
            let line = e.span().map(|s| line_of(&source, s.start)).unwrap_or(0);
            anyhow!("{}:{line}: {}", path.display(), e.message())
        })?;
        cfg.source = source;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if let Some(h) = cfg.spacing {
            if !(h > 0.0 && h.is_finite()) {
                bail!("{}: spacing must be positive, got {h}", cfg.where_is(0..0));
            }
        }
        Ok(cfg)
    }

    fn where_is(&self, span: Range<usize>) -> String {
        format!("line {}", line_of(&self.source, span.start))
    }

    pub fn kernel(&self) -> Result<RadialKernel> {
        let spec = self.kernel.get_ref();
        let at = self.where_is(self.kernel.span());
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| anyhow!("{at}: kernel kind {} needs `{key}`", spec.kind));
        let built = match spec.kind.as_str() {
            "power" => RadialKernel::power(need(spec.alpha, "alpha")?, spec.d),
            "indicator" => RadialKernel::indicator(need(spec.r, "r")?, spec.d),
            "step" => {
                let levels = spec.levels.as_ref().ok_or_else(|| anyhow!("{at}: kernel kind step needs `levels`"))?;
                let radii = spec.radii.as_ref().ok_or_else(|| anyhow!("{at}: kernel kind step needs `radii`"))?;
                RadialKernel::step(levels, radii, spec.d)
            }
            "table" => {
                let pairs = spec.table.as_ref().ok_or_else(|| anyhow!("{at}: kernel kind table needs `table`"))?;
                RadialKernel::table(pairs, spec.d)
            }
            other => bail!("{at}: unknown kernel kind `{other}` (expected power, step, indicator or table)"),
        };
        built.map_err(|e| anyhow!("{at}: {e}"))
    }

    pub fn spacing(&self) -> Result<f64> {
        self.spacing.ok_or_else(|| anyhow!("no grid spacing: set `spacing` in the config or pass --spacing"))
    }

    pub fn build_set(&self) -> Result<IndicatorGrid> {
        let set = self.set.as_ref().ok_or_else(|| anyhow!("the config has no [set] table"))?;
        let at = self.where_is(set.span());
        let spec = set.get_ref();
        let sources = [spec.balls.is_some(), spec.file.is_some(), spec.ellipse.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            bail!("{at}: [set] needs exactly one of `balls`, `file`, `ellipse`");
        }
        let grid = if let Some(b) = &spec.balls {
            IndicatorGrid::from_balls(&b.centers, b.radius, self.spacing()?)
        } else if let Some(e) = &spec.ellipse {
            let center = e.center.clone().unwrap_or_else(|| vec![0.0; e.semi_axes.len()]);
            IndicatorGrid::from_ellipsoid(&center, &e.semi_axes, self.spacing()?)
        } else {
            let path = self.base.join(spec.file.as_ref().unwrap());
            return gridfile::from_file(&path).map_err(|e| anyhow!("{}: {e}", path.display()));
        };
        grid.map_err(|e| anyhow!("{at}: {e}"))
    }

    pub fn nondeg(&self) -> NondegOptions {
        let mut o = NondegOptions { seed: self.seed.unwrap_or(0), ..NondegOptions::default() };
        if let Some(b) = self.tolerances.pair_budget {
            o.pair_budget = b;
        }
        o
    }

    pub fn sweep(&self) -> SweepSettings {
        SweepSettings {
            step: self.tolerances.sweep_step,
            inclusion_tol: self.tolerances.inclusion_tol,
            ..SweepSettings::default()
        }
    }

    pub fn rigidity(&self) -> RigidityOptions {
        let d = RigidityOptions::default();
        RigidityOptions {
            max_balls: self.tolerances.max_balls.unwrap_or(d.max_balls),
            sweep: self.sweep(),
            nondeg: self.nondeg(),
            criticality_factor: self.tolerances.criticality_factor.unwrap_or(d.criticality_factor),
            fit_rms: self.tolerances.fit_rms.unwrap_or(d.fit_rms),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}
