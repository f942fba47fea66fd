//! Post-run metrics: settling times, steady-state error suprema, chattering
//! index, and empirical accuracy-scaling exponents.

use thiserror::Error;

use crate::integrator::TimeSeries;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("window [{start}, {end}] is outside the series span [{t0}, {t1}]")]
    WindowOutOfRange {
        start: f64,
        end: f64,
        t0: f64,
        t1: f64,
    },
    #[error("need at least {need} points, got {got}")]
    NotEnoughPoints { need: usize, got: usize },
    #[error("abscissae span {span:.3} decades; need at least one")]
    InsufficientSpan { span: f64 },
}

/// Tracking errors `e1 = x1 - v0` and `e2 = x2 - dv0`.
pub fn error_series(s: &TimeSeries) -> (Vec<f64>, Vec<f64>) {
    let e1 = s.x1.iter().zip(&s.v0).map(|(x, v)| x - v).collect();
    let e2 = s.x2.iter().zip(&s.dv0).map(|(x, v)| x - v).collect();
    (e1, e2)
}

/// First time after which `|e|` stays within `tol` for the rest of the
/// series. `None` if the final sample is still outside the band.
pub fn settling_time(t: &[f64], e: &[f64], tol: f64) -> Option<f64> {
    assert_eq!(t.len(), e.len());
    assert!(tol > 0.0, "settling tolerance must be positive");
    if e.is_empty() {
        return None;
    }
    let mut idx = None;
    for k in (0..e.len()).rev() {
        if e[k].abs() > tol {
            idx = Some(k);
            break;
        }
    }
    match idx {
        None => Some(t[0]),
        Some(k) if k + 1 < t.len() => Some(t[k + 1]),
        Some(_) => None,
    }
}

fn window_indices(t: &[f64], start: f64, end: f64) -> Result<(usize, usize), MetricsError> {
    let (t0, t1) = (*t.first().unwrap_or(&0.0), *t.last().unwrap_or(&0.0));
    if t.is_empty() || start < t0 - 1e-12 || end > t1 + 1e-12 || start > end {
        return Err(MetricsError::WindowOutOfRange { start, end, t0, t1 });
    }
    let lo = t.partition_point(|&x| x < start - 1e-12);
    let hi = t.partition_point(|&x| x <= end + 1e-12);
    Ok((lo, hi))
}

/// Supremum of `|e|` over the time window `[start, end]`.
pub fn steady_sup(t: &[f64], e: &[f64], start: f64, end: f64) -> Result<f64, MetricsError> {
    let (lo, hi) = window_indices(t, start, end)?;
    Ok(e[lo..hi].iter().fold(0.0f64, |a, v| a.max(v.abs())))
}

/// Excess total variation of the derivative estimate over the window:
/// `TV(x2) - TV(dv0)`. A smooth, well-tracking estimate scores near zero;
/// a chattering estimate scores large and positive.
pub fn chattering_index(s: &TimeSeries, start: f64, end: f64) -> Result<f64, MetricsError> {
    let (lo, hi) = window_indices(&s.t, start, end)?;
    let tv = |v: &[f64]| -> f64 {
        v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    };
    Ok(tv(&s.x2[lo..hi]) - tv(&s.dv0[lo..hi]))
}

/// Summary metrics for one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub label: String,
    pub settling_time_e1: Option<f64>,
    pub settling_time_e2: Option<f64>,
    pub steady_e1_sup: f64,
    pub steady_e2_sup: f64,
    pub chattering_index: f64,
    pub peak_x2: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "unsettled".into(), |x| format!("{x:.6}"))
}

impl RunReport {
    /// Key-value block, one metric per line.
    pub fn to_kv(&self) -> String {
        format!(
            "label = {}\nsettling_time_e1 = {}\nsettling_time_e2 = {}\n\
             steady_e1_sup = {:.6e}\nsteady_e2_sup = {:.6e}\n\
             chattering_index = {:.6e}\npeak_x2 = {:.6e}\n",
            self.label,
            opt(self.settling_time_e1),
            opt(self.settling_time_e2),
            self.steady_e1_sup,
            self.steady_e2_sup,
            self.chattering_index,
            self.peak_x2,
        )
    }

    pub const CSV_HEADER: &'static str = "label,settling_time_e1,settling_time_e2,\
steady_e1_sup,steady_e2_sup,chattering_index,peak_x2";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6e},{:.6e},{:.6e},{:.6e}",
            self.label,
            opt(self.settling_time_e1),
            opt(self.settling_time_e2),
            self.steady_e1_sup,
            self.steady_e2_sup,
            self.chattering_index,
            self.peak_x2,
        )
    }

    /// Compute all metrics from a run over the steady-state window
    /// `[start, end]` with settling tolerance `tol`.
    pub fn from_series(
        label: &str,
        s: &TimeSeries,
        start: f64,
        end: f64,
        tol: f64,
    ) -> Result<Self, MetricsError> {
        let (e1, e2) = error_series(s);
        Ok(RunReport {
            label: label.to_string(),
            settling_time_e1: settling_time(&s.t, &e1, tol),
            settling_time_e2: settling_time(&s.t, &e2, tol),
            steady_e1_sup: steady_sup(&s.t, &e1, start, end)?,
            steady_e2_sup: steady_sup(&s.t, &e2, start, end)?,
            chattering_index: chattering_index(s, start, end)?,
            peak_x2: s.x2.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        })
    }
}

/// Least-squares slope of `log10(err)` against `log10(x)`: the empirical
/// scaling exponent of an accuracy sweep. Requires at least four points
/// spanning at least one decade in `x`.
pub fn accuracy_scaling(points: &[(f64, f64)]) -> Result<f64, MetricsError> {
    if points.len() < 4 {
        return Err(MetricsError::NotEnoughPoints {
            need: 4,
            got: points.len(),
        });
    }
    for &(x, y) in points {
        assert!(x > 0.0 && y > 0.0, "accuracy_scaling needs positive data");
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < 1.0 - 1e-9 {
        return Err(MetricsError::InsufficientSpan { span });
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
