//! Learning-rate machinery: the constant-warmup inverse-square-root
//! schedule and a geometric window search over a black-box objective.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TuningError {
    #[error("objective returned a non-finite score for candidate {candidate}")]
    ObjectiveError { candidate: f64 },
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

/// Constant warmup followed by inverse-square-root decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub peak_lr: f64,
    pub warmup_steps: u64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            peak_lr: 5e-3,
            warmup_steps: 1024,
        }
    }
}

/// Learning rate at `step`: `peak_lr` during warmup, then
/// `peak_lr * sqrt(warmup_steps / step)`. Continuous at the boundary.
pub fn lr_at(cfg: &ScheduleConfig, step: u64) -> f64 {
    if step < cfg.warmup_steps {
        cfg.peak_lr
    } else {
        cfg.peak_lr * (cfg.warmup_steps as f64 / step as f64).sqrt()
    }
}

/// One evaluated candidate, in evaluation order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeRecord {
    pub candidate: f64,
    pub score: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GeometricSearchConfig {
    /// Anchor of the geometric grid.
    pub start: f64,
    /// Grid ratio, > 1.
    pub factor: f64,
    /// Hard cap on objective evaluations.
    pub max_probes: usize,
}

impl Default for GeometricSearchConfig {
    fn default() -> Self {
        Self {
            start: 4e-4,
            factor: 2.0,
            max_probes: 32,
        }
    }
}

/// Search the geometric grid `start * factor^i` with a sliding
/// three-point window. The window starts centered on `start`; when the
/// middle point scores strictly best the search stops, otherwise the
/// window shifts one step toward the better endpoint (ties move upward)
/// and only the one new endpoint is evaluated. Stops early with the best
/// probed candidate once `max_probes` evaluations are spent.
pub fn geometric_search<F>(
    cfg: &GeometricSearchConfig,
    mut objective: F,
) -> Result<(f64, Vec<ProbeRecord>), TuningError>
where
    F: FnMut(f64) -> f64,
{
    if cfg.start <= 0.0 || !cfg.start.is_finite() {
        return Err(TuningError::InvalidConfig(format!(
            "start must be positive, got {}",
            cfg.start
        )));
    }
    if cfg.factor <= 1.0 || !cfg.factor.is_finite() {
        return Err(TuningError::InvalidConfig(format!(
            "factor must be > 1, got {}",
            cfg.factor
        )));
    }
    if cfg.max_probes < 3 {
        return Err(TuningError::InvalidConfig(
            "max_probes must be at least 3".into(),
        ));
    }

    let candidate = |i: i64| cfg.start * cfg.factor.powi(i as i32);
    // Cache keyed by grid index; probed values are never re-evaluated.
    let mut cache: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    let mut log: Vec<ProbeRecord> = Vec::new();

    let mut center: i64 = 0;
    loop {
        let mut exhausted = false;
        for i in [center - 1, center, center + 1] {
            if cache.contains_key(&i) {
                continue;
            }
            if log.len() >= cfg.max_probes {
                exhausted = true;
                break;
            }
            let value = candidate(i);
            let score = objective(value);
            if !score.is_finite() {
                return Err(TuningError::ObjectiveError { candidate: value });
            }
            cache.insert(i, score);
            log.push(ProbeRecord {
                candidate: value,
                score,
            });
        }
        if exhausted {
            break;
        }
        let left = cache[&(center - 1)];
        let mid = cache[&center];
        let right = cache[&(center + 1)];
        if mid > left && mid > right {
            return Ok((candidate(center), log));
        }
        // Shift toward the better endpoint; a tie continues upward.
        center += if right >= left { 1 } else { -1 };
    }

    let best = log
        .iter()
        .max_by(|a, b| a.score.partial_cmp(&b.score).expect("finite scores"))
        .expect("at least max_probes >= 3 evaluations");
    Ok((best.candidate, log))
}
