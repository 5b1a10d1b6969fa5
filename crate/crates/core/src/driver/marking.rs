/// Minimal set of triangles with `sum_{M} eta >= theta sum eta`: indices
/// sorted by decreasing `eta` (ties by index), shortest sufficient prefix.
/// Triangles with `eta = 0` are never marked.
pub fn dorfler_mark(eta: &[f64], theta: f64) -> Vec<usize> {
    let total: f64 = eta.iter().sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..eta.len()).collect();
    order.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
    let goal = theta * total;
    let mut sum = 0.0;
    let mut marked = Vec::new();
    for t in order {
        if sum >= goal || eta[t] <= 0.0 {
            break;
        }
        sum += eta[t];
        marked.push(t);
    }
    marked
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// The second difference vanished and `value` is the last entry.
    pub degenerate: bool,
}

/// Aitken's delta-squared extrapolation of the last three values.
pub fn aitken_extrapolate(values: &[f64]) -> Option<Extrapolation> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let (x0, x1, x2) = (values[n - 3], values[n - 2], values[n - 1]);
    let denom = (x2 - x1) - (x1 - x0);
    if denom == 0.0 {
        return Some(Extrapolation { value: x2, degenerate: true });
    }
    Some(Extrapolation { value: x2 - (x2 - x1).powi(2) / denom, degenerate: false })
}
