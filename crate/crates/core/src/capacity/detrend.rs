use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::state::StateMatrix;
use super::CapacityError;

/// One removed sinusoid `amplitude * cos(2 pi bin t / T + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierComponent {
    pub column: usize,
    pub bin: usize,
    pub frequency: f64,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Debug, Clone)]
pub struct DetrendOutput {
    pub state: StateMatrix,
    pub means: Vec<f64>,
    pub components: Vec<FourierComponent>,
}

/// Removes each column's mean and its `max_harmonics` largest-amplitude
/// DFT components, leaving only the input-driven fluctuations.
pub fn detrend(state: &StateMatrix, max_harmonics: usize) -> Result<DetrendOutput, CapacityError> {
    let t = state.rows();
    if t < 4 {
        return Err(CapacityError::Shape(format!("detrend needs at least 4 rows, got {t}")));
    }
    let centered = state.centered();
    let means: Vec<f64> = (0..state.cols())
        .map(|j| crate::numeric::mean(&state.column(j)))
        .collect();
    let mut data = centered.into_data();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(t);
    let tf = t as f64;
    let mut components = Vec::new();
    for (j, mut col) in data.column_iter_mut().enumerate() {
        let mut buf: Vec<Complex<f64>> = col.iter().map(|&x| Complex::new(x, 0.0)).collect();
        fft.process(&mut buf);
        let mut bins: Vec<usize> = (1..=t / 2).collect();
        bins.sort_by(|&a, &b| buf[b].norm().total_cmp(&buf[a].norm()).then(a.cmp(&b)));
        for &k in bins.iter().take(max_harmonics) {
            let xk = buf[k];
            let nyquist = t % 2 == 0 && k == t / 2;
            let amp = if nyquist { xk.norm() / tf } else { 2.0 * xk.norm() / tf };
            let phase = xk.arg();
            if amp == 0.0 {
                continue;
            }
            for (i, v) in col.iter_mut().enumerate() {
                let r = ((k as u128 * i as u128) % t as u128) as f64;
                let ang = 2.0 * std::f64::consts::PI * r / tf;
                *v -= amp * (ang + phase).cos();
            }
            components.push(FourierComponent {
                column: j,
                bin: k,
                frequency: k as f64 / tf,
                amplitude: amp,
                phase,
            });
        }
    }
    let mut out = StateMatrix::new(data, state.washout)?;
    out.labels = state.labels.clone();
    out.metadata = state.metadata.clone();
    out.metadata
        .insert("detrend_components".into(), components.len().to_string());
    Ok(DetrendOutput {
        state: out,
        means,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column_vanishes() {
        let s = StateMatrix::from_column(&[2.5; 16], 0).unwrap();
        let d = detrend(&s, 2).unwrap();
        assert!(d.state.column(0).iter().all(|x| x.abs() < 1e-15));
        assert_eq!(d.means, vec![2.5]);
    }

    #[test]
    fn exact_bin_cosine_removed() {
        let t = 1000;
        let x: Vec<f64> = (0..t)
            .map(|i| 3.0 * (2.0 * std::f64::consts::PI * i as f64 / t as f64 + 0.4).cos())
            .collect();
        let s = StateMatrix::from_column(&x, 0).unwrap();
        let d = detrend(&s, 1).unwrap();
        let res: f64 = d.state.column(0).iter().map(|v| v * v).sum::<f64>().sqrt();
        let orig: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res <= 1e-6 * orig);
        let c = d.components[0];
        assert_eq!(c.bin, 1);
        assert!((c.amplitude - 3.0).abs() < 1e-10 && (c.phase - 0.4).abs() < 1e-10);
    }

    #[test]
    fn too_short_is_error() {
        let s = StateMatrix::from_column(&[1.0, 2.0, 3.0], 0).unwrap();
        assert!(detrend(&s, 1).is_err());
    }
}
