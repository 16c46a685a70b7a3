//! Log-linear least squares for exponentially decaying series.

use crate::error::{Error, Result};

/// Values below this are treated as having reached the numerical floor and
/// end the usable part of a series.
pub const SERIES_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Slope of ln(value) against t; negative for a decaying series.
    pub rate: f64,
    /// e^{intercept}.
    pub prefactor: f64,
    /// Root-mean-square residual of ln(value).
    pub residual: f64,
    pub points: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl RateFit {
    pub fn decay_rate(&self) -> f64 {
        -self.rate
    }

    pub fn is_decaying(&self) -> bool {
        self.rate < -1e-8
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.prefactor * (self.rate * t).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FitWindow {
    /// Last half of the series without its final 5%.
    #[default]
    Tail,
    /// Every point.
    Full,
    /// Points with t0 ≤ t ≤ t1.
    Range(f64, f64),
}

impl FitWindow {
    fn select<'a>(&self, series: &'a [(f64, f64)]) -> Vec<&'a (f64, f64)> {
        match *self {
            FitWindow::Full => series.iter().collect(),
            FitWindow::Range(a, b) => series.iter().filter(|(t, _)| *t >= a && *t <= b).collect(),
            FitWindow::Tail => {
                let (Some(first), Some(last)) = (series.first(), series.last()) else {
                    return Vec::new();
                };
                let span = last.0 - first.0;
                let a = first.0 + 0.5 * span;
                let b = last.0 - 0.05 * span;
                series.iter().filter(|(t, _)| *t >= a - 1e-12 && *t <= b + 1e-12).collect()
            }
        }
    }
}

/// Least squares of ln(value) on t over the window.
pub fn rate_fit(series: &[(f64, f64)], window: FitWindow) -> Result<RateFit> {
    let pts = window.select(series);
    if pts.len() < 4 {
        return Err(Error::FitFailure(format!("{} points in the fit window, need at least 4", pts.len())));
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::FitFailure(format!("non-positive value {v:e} at t = {t}")));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for (t, v) in &pts {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (v.ln() - my);
    }
    if stt == 0.0 {
        return Err(Error::FitFailure("all fit points share one time".into()));
    }
    let rate = sty / stt;
    let intercept = my - rate * mt;
    let residual = (pts.iter().map(|(t, v)| (v.ln() - intercept - rate * t).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit {
        rate,
        prefactor: intercept.exp(),
        residual,
        points: pts.len(),
        t_start: pts[0].0,
        t_end: pts[pts.len() - 1].0,
    })
}

/// The series up to (not including) the first value below [`SERIES_FLOOR`].
pub fn above_floor(series: &[(f64, f64)]) -> &[(f64, f64)] {
    let k = series.iter().position(|(_, v)| *v < SERIES_FLOOR).unwrap_or(series.len());
    &series[..k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_exponential() {
        let s: Vec<_> = (0..50).map(|k| (k as f64 * 0.5, 3.0 * (-0.7 * k as f64 * 0.5).exp())).collect();
        let r = rate_fit(&s, FitWindow::Full).unwrap();
        assert!((r.rate + 0.7).abs() < 1e-10);
        assert!((r.prefactor - 3.0).abs() < 1e-10);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn noisy_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s: Vec<_> = (0..200)
            .map(|k| {
                let t = k as f64 * 0.25;
                (t, 2.0 * (-0.4 * t).exp() * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            })
            .collect();
        let r = rate_fit(&s, FitWindow::Tail).unwrap();
        assert!((r.decay_rate() - 0.4).abs() < 0.05 * 0.4, "rate {}", r.rate);
    }

    #[test]
    fn constant_is_not_decaying() {
        let s: Vec<_> = (0..10).map(|k| (k as f64, 0.3)).collect();
        let r = rate_fit(&s, FitWindow::Full).unwrap();
        assert!(r.rate.abs() < 1e-14);
        assert!(!r.is_decaying());
    }

    #[test]
    fn rejects_short_or_nonpositive() {
        let s = [(0.0, 1.0), (1.0, 0.5), (2.0, 0.25)];
        assert!(matches!(rate_fit(&s, FitWindow::Full), Err(Error::FitFailure(_))));
        let s = [(0.0, 1.0), (1.0, 0.5), (2.0, 0.0), (3.0, 0.1)];
        assert!(matches!(rate_fit(&s, FitWindow::Full), Err(Error::FitFailure(_))));
    }

    #[test]
    fn tail_window_bounds() {
        let s: Vec<_> = (0..=100).map(|k| (k as f64, 1.0)).collect();
        let pts = FitWindow::Tail.select(&s);
        assert_eq!(pts.first().unwrap().0, 50.0);
        assert_eq!(pts.last().unwrap().0, 95.0);
    }
}
