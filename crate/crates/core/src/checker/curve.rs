use super::CheckError;

/// Band between two nondecreasing curves sampled at ascending horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveBand {
    pub horizons: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Turns a box over a horizon family into a band. The lower curve is the
/// running maximum of the lower bounds and the upper curve the running
/// minimum of the upper bounds taken from the right; any nondecreasing curve
/// through the box stays inside the band. Values are clamped to [0, 1].
pub fn region_to_curve(
    lower: &[f64],
    upper: &[f64],
    horizons: &[f64],
) -> Result<CurveBand, CheckError> {
    if lower.len() != horizons.len()
        || upper.len() != horizons.len()
        || horizons.is_empty()
        || horizons.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(CheckError::NotHorizonFamily);
    }
    let mut lo = Vec::with_capacity(lower.len());
    let mut best = f64::NEG_INFINITY;
    for &l in lower {
        best = best.max(l);
        lo.push(best.clamp(0.0, 1.0));
    }
    let mut hi = vec![0.0; upper.len()];
    let mut least = f64::INFINITY;
    for (k, &u) in upper.iter().enumerate().rev() {
        least = least.min(u);
        hi[k] = least.clamp(0.0, 1.0);
    }
    Ok(CurveBand {
        horizons: horizons.to_vec(),
        lower: lo,
        upper: hi,
    })
}

impl CurveBand {
    /// Bounds at an arbitrary time: the lower curve steps at each horizon,
    /// the upper curve takes the value of the next horizon. Outside the
    /// horizon range the band is [0, first upper] and [last lower, 1].
    pub fn at(&self, t: f64) -> (f64, f64) {
        let k = self.horizons.partition_point(|&h| h <= t);
        let lower = if k == 0 { 0.0 } else { self.lower[k - 1] };
        let j = self.horizons.partition_point(|&h| h < t);
        let upper = if j == self.horizons.len() {
            1.0
        } else {
            self.upper[j]
        };
        (lower, upper)
    }

    /// Linear interpolation of both curves, for plotting.
    pub fn interpolated(&self, t: f64) -> (f64, f64) {
        let h = &self.horizons;
        if t <= h[0] {
            return (self.lower[0], self.upper[0]);
        }
        if t >= h[h.len() - 1] {
            return (self.lower[h.len() - 1], self.upper[h.len() - 1]);
        }
        let k = h.partition_point(|&x| x <= t);
        let w = (t - h[k - 1]) / (h[k] - h[k - 1]);
        let mix = |v: &[f64]| v[k - 1] + w * (v[k] - v[k - 1]);
        (mix(&self.lower), mix(&self.upper))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,lower,upper\n");
        for k in 0..self.horizons.len() {
            s.push_str(&format!(
                "{},{},{}\n",
                self.horizons[k], self.lower[k], self.upper[k]
            ));
        }
        s
    }
}
