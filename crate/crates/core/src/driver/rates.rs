use super::afem::ConvergenceRecord;

/// Least-squares slope of `log y` against `log x`. Needs two or more points,
/// all positive.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub quantity: &'static str,
    /// Slope over all levels.
    pub all: Option<f64>,
    /// Slope over the last `last` levels.
    pub tail: Option<f64>,
}

/// Convergence rates with respect to ndof of the error quantities of a
/// history. `E - LEB` uses `reference` for `E`.
pub fn rate_table(records: &[ConvergenceRecord], reference: f64, last: usize) -> Vec<RateRow> {
    type Getter = fn(&ConvergenceRecord, f64) -> Option<f64>;
    let quantities: [(&'static str, Getter); 7] = [
        ("err_stress^2", |r, _| r.err_stress.map(|e| e * e)),
        ("err_grad^2", |r, _| r.err_grad.map(|e| e * e)),
        ("err_l2", |r, _| r.err_l2),
        ("gap", |r, _| Some(r.gap)),
        ("E-LEB", |r, e| Some(e - r.leb)),
        ("RHS", |r, _| Some(r.rhs)),
        ("eta_sum", |r, _| Some(r.eta_sum)),
    ];
    quantities
        .iter()
        .map(|&(quantity, get)| {
            let pts: Option<Vec<(f64, f64)>> = records.iter().map(|r| get(r, reference).map(|y| (r.ndof as f64, y))).collect();
            let slope = |pts: &[(f64, f64)]| {
                let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
                loglog_slope(&x, &y)
            };
            match pts {
                Some(pts) => {
                    let tail = &pts[pts.len().saturating_sub(last)..];
                    RateRow { quantity, all: slope(&pts), tail: slope(tail) }
                }
                None => RateRow { quantity, all: None, tail: None },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [10.0, 40.0, 160.0, 640.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 1.5).abs() < 1e-12);
        assert!(loglog_slope(&x[..1], &y[..1]).is_none());
        assert!(loglog_slope(&[1.0, 2.0], &[1.0, 0.0]).is_none());
    }
}
