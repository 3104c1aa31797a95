//! Run configuration and the checked-in fixture library.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use relmon_core::affine::Presentation;
use relmon_core::fixtures::FIXTURE_NAMES;
use relmon_core::periods::{EngineConfig, LoopPath, SchemeSpec};
use relmon_core::search::SearchConfig;

const FIXTURE_FILES: [(&str, &str); 3] = [
    ("ISO-EXAMPLE", include_str!("../fixtures/iso-example.json")),
    ("NONISO-EXAMPLE", include_str!("../fixtures/noniso-example.json")),
    ("REMARK-FIXTURE", include_str!("../fixtures/remark-fixture.json")),
];

/// Either the name of a fixture or a full scheme description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeSource {
    Named(String),
    Spec(SchemeSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoLoops {
    Auto,
}

/// `"auto"` for one circuit around each singular point, closed up on the
/// section cover, or an explicit list of loops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoopSource {
    Auto(AutoLoops),
    Explicit(Vec<LoopPath>),
}

impl Default for LoopSource {
    fn default() -> Self {
        LoopSource::Auto(AutoLoops::Auto)
    }
}

/// Output locations. File names are relative to `dir`; unset names default
/// to `<command>.json` and `<command>.txt`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

fn default_lambdas() -> Vec<C> {
    vec![C::new(0.5, 0.0), C::new(0.25, 0.25), C::new(-1.0, 0.5), C::new(2.0, 1.0)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSource>,
    /// A ready-made presentation; no numerics are run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<Presentation>,
    #[serde(default)]
    pub loops: LoopSource,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub search: SearchConfig,
    /// Sample points for the periods table.
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<C>,
    #[serde(default)]
    pub output: OutputPaths,
}

/// Where the generators come from once a config is resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Scheme(SchemeSpec),
    Synthetic(Presentation),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub name: String,
    pub source: Source,
    pub loops: LoopSource,
    pub engine: EngineConfig,
    pub search: SearchConfig,
    pub lambdas: Vec<C>,
    pub output: OutputPaths,
}

/// The checked-in config of a named fixture.
pub fn fixture_config(name: &str) -> Result<RunConfig> {
    let Some((_, text)) = FIXTURE_FILES.iter().find(|(n, _)| *n == name) else {
        bail!("unknown fixture `{name}` (known: {})", FIXTURE_NAMES.join(", "));
    };
    serde_json::from_str(text).with_context(|| format!("fixture `{name}` does not parse"))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl RunConfig {
    /// Expands a fixture name in `scheme` into that fixture's source and
    /// checks that exactly one source is given.
    pub fn resolve(self) -> Result<Resolved> {
        let source = match (self.scheme, self.presentation) {
            (Some(_), Some(_)) => bail!("config gives both `scheme` and `presentation`"),
            (None, None) => bail!("config gives neither `scheme` nor `presentation`"),
            (None, Some(p)) => Source::Synthetic(p),
            (Some(SchemeSource::Spec(s)), None) => Source::Scheme(s),
            (Some(SchemeSource::Named(n)), None) => {
                let f = fixture_config(&n)?;
                match (f.scheme, f.presentation) {
                    (Some(SchemeSource::Spec(s)), None) => Source::Scheme(s),
                    (None, Some(p)) => Source::Synthetic(p),
                    _ => bail!("fixture `{n}` is not fully specified"),
                }
            }
        };
        let name = if self.name.is_empty() {
            match &source {
                Source::Scheme(s) if !s.name.is_empty() => s.name.clone(),
                _ => "run".into(),
            }
        } else {
            self.name
        };
        if let Source::Scheme(s) = &source {
            s.validate()?;
        }
        self.search.validate()?;
        Ok(Resolved {
            name,
            source,
            loops: self.loops,
            engine: self.engine,
            search: self.search,
            lambdas: self.lambdas,
            output: self.output,
        })
    }
}
