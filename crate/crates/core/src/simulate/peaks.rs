use serde::{Deserialize, Serialize};

/// A local maximum of a uniformly sampled series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

/// Interior local maxima of `series` sampled at `t = k dt`, refined by a
/// parabola through the three samples around each discrete maximum. On a
/// plateau the earliest sample is taken.
pub fn detect_peaks(series: &[f64], dt: f64) -> Vec<Peak> {
    let mut peaks = Vec::new();
    let n = series.len();
    let mut i = 1;
    while i + 1 < n {
        if series[i] > series[i - 1] {
            let mut j = i;
            while j + 1 < n && series[j + 1] == series[i] {
                j += 1;
            }
            if j + 1 < n && series[j + 1] < series[i] {
                peaks.push(if j == i {
                    refine(series, i, dt)
                } else {
                    Peak {
                        t: i as f64 * dt,
                        value: series[i],
                    }
                });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

fn refine(series: &[f64], i: usize, dt: f64) -> Peak {
    let (a, b, c) = (series[i - 1], series[i], series[i + 1]);
    let curvature = a - 2.0 * b + c;
    if curvature >= 0.0 {
        return Peak {
            t: i as f64 * dt,
            value: b,
        };
    }
    let delta = 0.5 * (a - c) / curvature;
    Peak {
        t: (i as f64 + delta) * dt,
        value: b - 0.25 * (a - c) * delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex_recovered() {
        let dt = 0.1;
        let series: Vec<f64> = (0..50)
            .map(|k| {
                let t = k as f64 * dt;
                3.0 - (t - 2.437) * (t - 2.437)
            })
            .collect();
        let peaks = detect_peaks(&series, dt);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].t - 2.437).abs() < 1e-12);
        assert!((peaks[0].value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn plateau_takes_earliest_and_endpoints_ignored() {
        let s = [5.0, 1.0, 2.0, 2.0, 2.0, 1.0, 3.0];
        let p = detect_peaks(&s, 1.0);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].t, 2.0);
    }

    #[test]
    fn sine_peaks_are_ordered() {
        let dt = 0.01;
        let s: Vec<f64> = (0..2000).map(|k| (k as f64 * dt).sin()).collect();
        let p = detect_peaks(&s, dt);
        assert_eq!(p.len(), 3);
        assert!(p.windows(2).all(|w| w[0].t < w[1].t));
        assert!((p[0].t - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }
}
