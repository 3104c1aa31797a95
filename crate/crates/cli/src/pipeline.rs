//! The commands: each resolves its inputs, runs the core pipeline and
//! returns a report body. Writing files is left to the caller.

use anyhow::{anyhow, bail, Result};

use relmon_core::affine::Presentation;
use relmon_core::par;
use relmon_core::periods::presentation::word_label;
use relmon_core::periods::{cover_data, loop_monodromy, periods_at, LoopPath, SchemeSpec};
use relmon_core::search::classify;

use crate::cache::Cache;
use crate::config::{LoopSource, Resolved, Source};
use crate::report::{ClassifyBody, LoopRecord, MonodromyBody, PeriodRow, PeriodsBody};

/// Options that change how failures are handled, not what is computed.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub keep_going: bool,
}

fn scheme_of(run: &Resolved) -> Option<&SchemeSpec> {
    match &run.source {
        Source::Scheme(s) => Some(s),
        Source::Synthetic(_) => None,
    }
}

/// Periods of every factor at every sample point. A failing point becomes
/// an error row; the count of error rows is returned alongside.
pub fn periods(run: &Resolved) -> Result<(PeriodsBody, usize)> {
    let Some(scheme) = scheme_of(run) else {
        bail!("`{}` is a synthetic presentation and has no periods", run.name);
    };
    let mut rows = Vec::new();
    for &lambda in &run.lambdas {
        for (i, f) in scheme.factors.iter().enumerate() {
            let parameter = f.parameter.eval(lambda);
            let row = match periods_at(parameter, run.engine.clearance) {
                Ok(p) => PeriodRow {
                    lambda,
                    factor: i + 1,
                    parameter,
                    omega1: Some(p.omega1),
                    omega2: Some(p.omega2),
                    tau: Some(p.tau()),
                    error: None,
                },
                Err(e) => PeriodRow {
                    lambda,
                    factor: i + 1,
                    parameter,
                    omega1: None,
                    omega2: None,
                    tau: None,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok((PeriodsBody { rows }, failed))
}

/// Extracts the monodromy of every configured loop through the cache.
pub fn monodromy(run: &Resolved, cache: &Cache, opts: RunOptions) -> Result<MonodromyBody> {
    let scheme = match &run.source {
        Source::Synthetic(p) => {
            return Ok(MonodromyBody {
                k: p.k(),
                base_point: None,
                singular_points: Vec::new(),
                loops: Vec::new(),
                presentation: p.clone(),
            })
        }
        Source::Scheme(s) => s,
    };
    let parallel = run.search.parallel;
    let (paths, words): (Vec<LoopPath>, Vec<Option<String>>) = match &run.loops {
        LoopSource::Auto(_) => {
            let data = cover_data(scheme, &run.engine, parallel)?;
            data.loops
                .iter()
                .map(|c| (c.path.clone(), Some(word_label(&c.word, &data.basic))))
                .unzip()
        }
        LoopSource::Explicit(list) => (list.clone(), vec![None; list.len()]),
    };
    let results = par::map_ordered_coarse(&paths, parallel, |p| {
        cache.get_or_compute(scheme, p, &run.engine, || loop_monodromy(p, scheme, &run.engine))
    });

    let mut loops = Vec::with_capacity(paths.len());
    let mut presentation = Presentation::new(scheme.k());
    for ((path, word), result) in paths.iter().zip(words).zip(results) {
        match result {
            Ok(r) => {
                let provenance = format!(
                    "{}continuation, residual {:.1e}, {} samples",
                    word.as_ref().map(|w| format!("{w} ")).unwrap_or_default(),
                    r.residual,
                    r.frames_sampled
                );
                presentation.push(path.name.clone(), r.element.clone(), provenance)?;
                loops.push(LoopRecord {
                    name: path.name.clone(),
                    word,
                    vertices: path.vertices.clone(),
                    element: Some(r.element),
                    residual: Some(r.residual),
                    frames_sampled: Some(r.frames_sampled),
                    error: None,
                });
            }
            Err(e) => {
                if !opts.keep_going {
                    return Err(anyhow!(e).context(format!("loop `{}`", path.name)));
                }
                loops.push(LoopRecord {
                    name: path.name.clone(),
                    word,
                    vertices: path.vertices.clone(),
                    element: None,
                    residual: None,
                    frames_sampled: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    Ok(MonodromyBody {
        k: scheme.k(),
        base_point: Some(run.engine.base_point),
        singular_points: scheme.singular_points(),
        loops,
        presentation,
    })
}

/// Monodromy followed by the kernel search and the classification.
pub fn classify_run(run: &Resolved, cache: &Cache, opts: RunOptions) -> Result<(MonodromyBody, ClassifyBody)> {
    let mono = monodromy(run, cache, opts)?;
    if mono.presentation.is_empty() {
        bail!("no generators to classify");
    }
    let report = classify(&mono.presentation, &run.search)?;
    let dropped = mono.loops.iter().filter(|l| l.error.is_some()).map(|l| l.name.clone()).collect();
    let body = ClassifyBody {
        presentation: mono.presentation.clone(),
        dropped_loops: dropped,
        report,
    };
    Ok((mono, body))
}
