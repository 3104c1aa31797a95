//! Analytic continuation of periods, section logarithms and square-root
//! branches along polygonal loops, and integer extraction of the resulting
//! monodromy.
//!
//! At every sample the principal values are recomputed and then matched to
//! the continuous determination: each tracked quantity moves to the nearest
//! candidate among lattice translates (and sign flips, for the logarithm and
//! the square roots). A step is accepted only when every match is clear, i.e.
//! the jump is below a tenth of the shortest lattice vector and the runner-up
//! candidate is at least twice as far. Otherwise the step is halved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::legendre::{elliptic_log_at, periods_at, principal_y, PeriodPair};
use super::path::LoopPath;
use super::scheme::{section_y, SchemeSpec};
use crate::affine::{AffineElement, UniMat2};
use crate::error::{Error, Result};
use crate::lattice::IntVector;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub base_point: C,
    /// Minimum distance between any path and any singular point.
    pub clearance: f64,
    /// Initial number of samples per loop.
    pub initial_segments: usize,
    /// Half-width of the lattice-coefficient search window around the
    /// rounded prediction.
    pub window: i64,
    /// Largest accepted distance of an extracted coefficient from an integer.
    pub extraction_tolerance: f64,
    /// Vertices used for the circle of each automatically generated loop.
    pub circle_vertices: usize,
    /// Step halvings allowed before continuation gives up.
    pub max_halvings: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            base_point: C::new(0.25, 0.25),
            clearance: 0.05,
            initial_segments: 64,
            window: 3,
            extraction_tolerance: 1e-6,
            circle_vertices: 64,
            max_halvings: 30,
        }
    }
}

/// Determinations for one elliptic factor at a point of the base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorFrame {
    pub lambda: C,
    pub periods: PeriodPair,
    /// Logarithm of the section, if the factor carries one.
    pub log: Option<C>,
    /// Branch sign of each tracked square root relative to the principal root.
    pub signs: Vec<i8>,
    /// Current values of the tracked square roots.
    pub sqrt_values: Vec<C>,
}

/// Snapshot of all determinations at a base point `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFrame {
    pub lambda: C,
    pub factors: Vec<FactorFrame>,
}

impl AnalyticFrame {
    /// Principal determinations at `lambda`; square-root signs start at `+`.
    pub fn initial(scheme: &SchemeSpec, lambda: C, cfg: &EngineConfig) -> Result<Self> {
        let mut factors = Vec::with_capacity(scheme.k());
        for f in &scheme.factors {
            let li = f.parameter.eval(lambda);
            let periods = periods_at(li, cfg.clearance.min(1e-6))?;
            let (log, signs, sqrt_values) = match &f.section {
                None => (None, Vec::new(), Vec::new()),
                Some(sec) => {
                    let signs = vec![1i8; sec.sqrt.len()];
                    let sqrt_values: Vec<C> = sec.sqrt.iter().map(|r| r.eval(lambda).sqrt()).collect();
                    let x = sec.x.eval(lambda);
                    let y = section_y(sec, lambda, &signs);
                    let py = principal_y(li, x);
                    let branch = if (y - py).norm() <= (y + py).norm() { 1 } else { -1 };
                    (Some(elliptic_log_at(li, x, branch)?), signs, sqrt_values)
                }
            };
            factors.push(FactorFrame {
                lambda: li,
                periods,
                log,
                signs,
                sqrt_values,
            });
        }
        Ok(AnalyticFrame { lambda, factors })
    }

    pub fn signs(&self) -> Vec<i8> {
        self.factors.iter().flat_map(|f| f.signs.iter().copied()).collect()
    }
}

/// Closest candidate `base + m·ω₁ + n·ω₂` to `target`, searching the window
/// around the rounded real solution. Returns `(candidate, coefficients,
/// best distance, runner-up distance)`.
fn nearest_translate(lattice: &PeriodPair, base: C, target: C, window: i64) -> (C, [i64; 2], f64, f64) {
    let [a, b] = lattice.coords(target - base);
    let (a0, b0) = (a.round() as i64, b.round() as i64);
    let mut best = (base, [0, 0], f64::INFINITY);
    let mut second = f64::INFINITY;
    for m in a0 - window..=a0 + window {
        for n in b0 - window..=b0 + window {
            let cand = base + lattice.point(m as f64, n as f64);
            let d = (cand - target).norm();
            if d < best.2 {
                second = best.2;
                best = (cand, [m, n], d);
            } else if d < second {
                second = d;
            }
        }
    }
    (best.0, best.1, best.2, second)
}

struct StepRejected;

/// Largest step as a fraction of the distance to the nearest singular point.
const LOCAL_STEP_FRACTION: f64 = 0.5;

/// Advances every determination from `prev` to the base point `lambda`.
fn advance(scheme: &SchemeSpec, prev: &AnalyticFrame, lambda: C, cfg: &EngineConfig) -> std::result::Result<AnalyticFrame, StepRejected> {
    let zero = C::new(0.0, 0.0);
    let mut factors = Vec::with_capacity(prev.factors.len());
    for (f, pf) in scheme.factors.iter().zip(&prev.factors) {
        let li = f.parameter.eval(lambda);
        let principal = periods_at(li, 1e-12).map_err(|_| StepRejected)?;
        let min_norm = principal.min_norm();
        let limit = 0.1 * min_norm;

        // Continue the previous principal basis into the new lattice; its
        // vectors are short, so each moves little over one step. Tracked
        // periods and the logarithm are then carried over in coordinates.
        let before = periods_at(pf.lambda, 1e-12).map_err(|_| StepRejected)?;
        let mut moved = [zero; 2];
        let mut coeffs = [[0i64; 2]; 2];
        for (i, old) in [before.omega1, before.omega2].into_iter().enumerate() {
            let (cand, mn, d1, d2) = nearest_translate(&principal, zero, old, cfg.window);
            if d1 > limit || d2 < 2.0 * d1 {
                return Err(StepRejected);
            }
            moved[i] = cand;
            coeffs[i] = mn;
        }
        let det = coeffs[0][0] * coeffs[1][1] - coeffs[0][1] * coeffs[1][0];
        if det != 1 {
            return Err(StepRejected);
        }
        let carried = PeriodPair {
            omega1: moved[0],
            omega2: moved[1],
        };
        let mut tracked = [zero; 2];
        for (i, old) in [pf.periods.omega1, pf.periods.omega2].into_iter().enumerate() {
            let [a, b] = before.coords(old);
            let (ka, kb) = (a.round(), b.round());
            if (a - ka).abs() > 1e-6 || (b - kb).abs() > 1e-6 {
                return Err(StepRejected);
            }
            tracked[i] = carried.point(ka, kb);
        }
        let periods = PeriodPair {
            omega1: tracked[0],
            omega2: tracked[1],
        };

        let (log, signs, sqrt_values) = match &f.section {
            None => (None, Vec::new(), Vec::new()),
            Some(sec) => {
                let mut signs = Vec::with_capacity(sec.sqrt.len());
                let mut values = Vec::with_capacity(sec.sqrt.len());
                for (r, &old) in sec.sqrt.iter().zip(&pf.sqrt_values) {
                    let v = r.eval(lambda).sqrt();
                    let (dp, dm) = ((v - old).norm(), (v + old).norm());
                    let (s, d1, d2) = if dp <= dm { (1i8, dp, dm) } else { (-1i8, dm, dp) };
                    if d2 < 2.0 * d1 || d1 > 0.5 * old.norm().max(v.norm()) {
                        return Err(StepRejected);
                    }
                    signs.push(s);
                    values.push(v * s as f64);
                }
                let x = sec.x.eval(lambda);
                let zp = elliptic_log_at(li, x, 1).map_err(|_| StepRejected)?;
                let [a, b] = before.coords(pf.log.expect("factor with a section has a logarithm"));
                let target = carried.point(a, b);
                let (cp, _, dp1, dp2) = nearest_translate(&principal, zp, target, cfg.window);
                let (cm, _, dm1, dm2) = nearest_translate(&principal, -zp, target, cfg.window);
                let (cand, d1, d2) = if dp1 <= dm1 {
                    (cp, dp1, dp2.min(dm1))
                } else {
                    (cm, dm1, dm2.min(dp1))
                };
                if d1 > limit || d2 < 2.0 * d1 {
                    return Err(StepRejected);
                }
                (Some(cand), signs, values)
            }
        };
        factors.push(FactorFrame {
            lambda: li,
            periods,
            log,
            signs,
            sqrt_values,
        });
    }
    Ok(AnalyticFrame { lambda, factors })
}

/// Continues `start` along `path`; returns the end frame and the number of
/// accepted samples.
pub fn continue_frame_counted(
    path: &LoopPath,
    scheme: &SchemeSpec,
    start: &AnalyticFrame,
    cfg: &EngineConfig,
) -> Result<(AnalyticFrame, usize)> {
    if (start.lambda - path.base_point).norm() > 1e-12 {
        return Err(Error::Input(format!(
            "frame at {} does not sit at the base point {} of `{}`",
            start.lambda, path.base_point, path.name
        )));
    }
    let singular = scheme.branch_points();
    path.check_clearance(&singular, cfg.clearance)?;
    let total = path.length();
    if total == 0.0 {
        return Ok((start.clone(), 0));
    }
    let h0 = total / cfg.initial_segments.max(1) as f64;
    let floor = h0 / 2f64.powi(cfg.max_halvings as i32);
    let mut frame = start.clone();
    let mut samples = 0;
    for w in path.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = (b - a).norm();
        if seg == 0.0 {
            continue;
        }
        let mut s = 0.0;
        let mut h = h0.min(seg);
        while s < seg {
            // steps stay short near singular points whatever the loop length
            let near = singular.iter().map(|p| (frame.lambda - p).norm()).fold(f64::INFINITY, f64::min);
            let step = h.min(seg - s).min((LOCAL_STEP_FRACTION * near).max(floor));
            let t = if s + step >= seg { 1.0 } else { (s + step) / seg };
            let lambda = a + (b - a) * t;
            match advance(scheme, &frame, lambda, cfg) {
                Ok(next) => {
                    frame = next;
                    s += step;
                    samples += 1;
                    h = (h * 1.5).min(h0);
                }
                Err(StepRejected) => {
                    h /= 2.0;
                    if h < floor {
                        return Err(Error::Continuation {
                            path: path.name.clone(),
                            reason: format!("step refinement floor reached near λ = {lambda}"),
                        });
                    }
                }
            }
        }
    }
    Ok((frame, samples))
}

pub fn continue_frame(path: &LoopPath, scheme: &SchemeSpec, start: &AnalyticFrame, cfg: &EngineConfig) -> Result<AnalyticFrame> {
    continue_frame_counted(path, scheme, start, cfg).map(|(f, _)| f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationResult {
    pub element: AffineElement,
    /// Largest distance of an extracted coefficient from its rounded value.
    pub residual: f64,
    pub frames_sampled: usize,
}

/// Monodromy data of a loop that need not close on the cover.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopAction {
    /// Square-root signs at the end, relative to the start.
    pub sign_flips: Vec<bool>,
    /// Period blocks `T` per factor.
    pub blocks: Vec<UniMat2>,
    /// Per factor with a section: `+1` if the logarithm returned up to a
    /// period, `-1` if it returned negated up to a period.
    pub log_signs: Vec<Option<i8>>,
    pub residual: f64,
    pub frames_sampled: usize,
}

fn round_checked(x: f64, residual: &mut f64) -> i64 {
    let r = x.round();
    *residual = residual.max((x - r).abs());
    r as i64
}

/// Period change `Ω_end = P·Ω_start` rounded to integers.
fn period_matrix(start: &PeriodPair, end: &PeriodPair, residual: &mut f64) -> [[i64; 2]; 2] {
    let r1 = start.coords(end.omega1);
    let r2 = start.coords(end.omega2);
    [
        [round_checked(r1[0], residual), round_checked(r1[1], residual)],
        [round_checked(r2[0], residual), round_checked(r2[1], residual)],
    ]
}

/// `T = (P⁻¹)ᵀ`, so that extraction is a homomorphism for left-to-right
/// concatenation of loops.
fn block_from_period_matrix(p: [[i64; 2]; 2], name: &str) -> Result<UniMat2> {
    let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    if det != 1 {
        return Err(Error::Continuation {
            path: name.to_string(),
            reason: format!("period change {p:?} has determinant {det}"),
        });
    }
    UniMat2::from_i64(p[1][1], -p[1][0], -p[0][1], p[0][0])
}

fn run(path: &LoopPath, scheme: &SchemeSpec, cfg: &EngineConfig) -> Result<(AnalyticFrame, AnalyticFrame, usize)> {
    path.validate()?;
    let start = AnalyticFrame::initial(scheme, path.base_point, cfg)?;
    let (end, samples) = continue_frame_counted(path, scheme, &start, cfg)?;
    Ok((start, end, samples))
}

/// Sign and period action of an arbitrary loop (it may swap sheets of the
/// cover on which the section is defined).
pub fn loop_action(path: &LoopPath, scheme: &SchemeSpec, cfg: &EngineConfig) -> Result<LoopAction> {
    let (start, end, samples) = run(path, scheme, cfg)?;
    let mut residual = 0.0f64;
    let mut blocks = Vec::new();
    let mut log_signs = Vec::new();
    for (s, e) in start.factors.iter().zip(&end.factors) {
        let p = period_matrix(&s.periods, &e.periods, &mut residual);
        blocks.push(block_from_period_matrix(p, &path.name)?);
        log_signs.push(match (s.log, e.log) {
            (Some(zs), Some(ze)) => {
                let same = s.periods.lattice_defect(ze - zs);
                let flipped = s.periods.lattice_defect(ze + zs);
                Some(if same <= flipped { 1 } else { -1 })
            }
            _ => None,
        });
    }
    let sign_flips = start.signs().iter().zip(end.signs()).map(|(a, b)| *a != b).collect();
    Ok(LoopAction {
        sign_flips,
        blocks,
        log_signs,
        residual,
        frames_sampled: samples,
    })
}

fn extract(path: &LoopPath, scheme: &SchemeSpec, cfg: &EngineConfig) -> Result<ContinuationResult> {
    let (start, end, samples) = run(path, scheme, cfg)?;
    if start.signs() != end.signs() {
        return Err(Error::OpenOnCover(path.name.clone()));
    }
    let mut residual = 0.0f64;
    let mut element: Option<AffineElement> = None;
    for (s, e) in start.factors.iter().zip(&end.factors) {
        let p = period_matrix(&s.periods, &e.periods, &mut residual);
        let block = block_from_period_matrix(p, &path.name)?;
        let w = match (s.log, e.log) {
            (Some(zs), Some(ze)) => {
                // coefficients of log_end − log_start in the continued basis
                let end_basis = e.periods;
                let [u, v] = end_basis.coords(ze - zs);
                IntVector::from_i64s(&[round_checked(u, &mut residual), round_checked(v, &mut residual)])
            }
            _ => IntVector::zeros(2),
        };
        let factor = AffineElement::new(vec![block], w)?;
        element = Some(match element {
            None => factor,
            Some(acc) => acc.direct_sum(&factor),
        });
    }
    Ok(ContinuationResult {
        element: element.expect("scheme has at least one factor"),
        residual,
        frames_sampled: samples,
    })
}

/// Monodromy `(T_g, w_g)` of a closed loop on the cover.
///
/// With `Ω_end = P·Ω_start`, the block is `T = (P⁻¹)ᵀ` and `w` holds the
/// coefficients of `log_end − log_start` in the continued basis `Ω_end`.
/// On a residual above tolerance the path is resampled four times finer and
/// extraction is retried once.
pub fn loop_monodromy(path: &LoopPath, scheme: &SchemeSpec, cfg: &EngineConfig) -> Result<ContinuationResult> {
    let first = extract(path, scheme, cfg)?;
    if first.residual < cfg.extraction_tolerance {
        return Ok(first);
    }
    let finer = EngineConfig {
        initial_segments: cfg.initial_segments * 4,
        ..cfg.clone()
    };
    let second = extract(path, scheme, &finer)?;
    if second.residual < cfg.extraction_tolerance {
        return Ok(second);
    }
    Err(Error::Extraction {
        path: path.name.clone(),
        residual: second.residual,
        tolerance: cfg.extraction_tolerance,
    })
}
