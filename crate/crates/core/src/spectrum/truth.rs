use num_complex::Complex64;
use rayon::prelude::*;

use super::{integrated_spectrum, SpectralSurface};
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, QuantileGrid};
use crate::models::ModelSpec;
use crate::rng::{label_key, stream_id};

/// Replications summed sequentially inside one chunk; chunk sums are then
/// combined in index order, so the average is independent of scheduling.
const CHUNK: usize = 32;

/// Integrated copula spectrum of an i.i.d. sequence:
/// `(λ/2π)(min(τ1, τ2) - τ1τ2)`.
pub fn iid_truth(lambda: f64, tau1: f64, tau2: f64) -> Complex64 {
    Complex64::new(
        lambda / (2.0 * std::f64::consts::PI) * (tau1.min(tau2) - tau1 * tau2),
        0.0,
    )
}

pub fn iid_truth_surface(fgrid: &FrequencyGrid, qgrid: &QuantileGrid) -> SpectralSurface {
    SpectralSurface::from_fn(*fgrid, qgrid.clone(), iid_truth)
}

/// Average of `reps` estimates from independent draws of `model`.
pub fn monte_carlo_truth(
    model: &ModelSpec,
    n: usize,
    reps: usize,
    fgrid: &FrequencyGrid,
    qgrid: &QuantileGrid,
    seed: u64,
) -> Result<SpectralSurface> {
    if reps == 0 {
        return Err(Error::InvalidConfig("Monte Carlo truth needs reps >= 1".into()));
    }
    let key = label_key(&model.name());
    let chunks: Vec<SpectralSurface> = (0..reps.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = SpectralSurface::zeros(*fgrid, qgrid.clone());
            for r in c * CHUNK..((c + 1) * CHUNK).min(reps) {
                let series = model.generate(n, seed, stream_id(&[key, n as u64, r as u64]))?;
                acc.add_assign(&integrated_spectrum(series.values(), fgrid, qgrid)?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = SpectralSurface::zeros(*fgrid, qgrid.clone());
    for chunk in &chunks {
        total.add_assign(chunk);
    }
    total.scale(1.0 / reps as f64);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_truth_examples() {
        let pi = std::f64::consts::PI;
        assert!((iid_truth(pi, 0.5, 0.5).re - 0.125).abs() < 1e-15);
        assert_eq!(iid_truth(0.0, 0.3, 0.8), Complex64::new(0.0, 0.0));
        assert!((iid_truth(pi, 0.25, 0.75).re - 0.03125).abs() < 1e-15);
        assert_eq!(iid_truth(pi, 0.25, 0.75).im, 0.0);
    }

    #[test]
    fn single_replication_is_a_plain_estimate() {
        let model = ModelSpec::parse("M0").unwrap();
        let fgrid = FrequencyGrid::new(8).unwrap();
        let qgrid = QuantileGrid::equispaced(4).unwrap();
        let mc = monte_carlo_truth(&model, 64, 1, &fgrid, &qgrid, 3).unwrap();
        let series = model
            .generate(64, 3, stream_id(&[label_key("M0"), 64, 0]))
            .unwrap();
        let direct = integrated_spectrum(series.values(), &fgrid, &qgrid).unwrap();
        assert_eq!(mc, direct);
        assert!(monte_carlo_truth(&model, 64, 0, &fgrid, &qgrid, 3).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let model = ModelSpec::parse("M6a").unwrap();
        let fgrid = FrequencyGrid::new(8).unwrap();
        let qgrid = QuantileGrid::equispaced(4).unwrap();
        let a = monte_carlo_truth(&model, 64, 70, &fgrid, &qgrid, 11).unwrap();
        let b = monte_carlo_truth(&model, 64, 70, &fgrid, &qgrid, 11).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_truth(&model, 64, 70, &fgrid, &qgrid, 12).unwrap();
        assert_ne!(a, c);
    }
}
