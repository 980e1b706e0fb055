//! Local maxima and widths on sampled curves.

/// A local maximum with its topographic prominence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub height: f64,
    pub prominence: f64,
}

/// Interior local maxima; a flat top counts once, at its left edge.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Local maxima annotated with prominence, in index order.
pub fn find_peaks(values: &[f64]) -> Vec<Peak> {
    local_maxima(values)
        .into_iter()
        .map(|i| {
            let h = values[i];
            let left_base = values[..i]
                .iter()
                .rev()
                .take_while(|&&v| v <= h)
                .cloned()
                .fold(h, f64::min);
            let right_base = values[i + 1..]
                .iter()
                .take_while(|&&v| v <= h)
                .cloned()
                .fold(h, f64::min);
            Peak {
                index: i,
                height: h,
                prominence: h - left_base.max(right_base),
            }
        })
        .collect()
}

/// Peaks whose prominence is at least `fraction` of the largest value.
pub fn prominent_peaks(values: &[f64], fraction: f64) -> Vec<Peak> {
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    find_peaks(values)
        .into_iter()
        .filter(|p| p.prominence >= fraction * top)
        .collect()
}

/// Centred moving average over `window` points (shrinking at the edges).
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Full width at half of `values[index]`, by linear interpolation of the crossings.
pub fn fwhm(x: &[f64], values: &[f64], index: usize) -> Option<f64> {
    let half = 0.5 * values[index];
    let left = (0..index).rev().find(|&i| values[i] <= half)?;
    let right = (index + 1..values.len()).find(|&i| values[i] <= half)?;
    let cross = |a: usize, b: usize| {
        let (ya, yb) = (values[a], values[b]);
        if ya == yb {
            x[a]
        } else {
            x[a] + (half - ya) * (x[b] - x[a]) / (yb - ya)
        }
    };
    Some(cross(right - 1, right) - cross(left, left + 1))
}

/// Trapezoidal integral of `y` over `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}
