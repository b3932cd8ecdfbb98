use alloc::vec::Vec;
use core::f64::consts::PI;

use super::DwellDensity;
use crate::math::exp;
use crate::optics::Beam;
use crate::Vec3;

/// A beam together with the dwell density of its painting motion.
#[derive(Debug, Clone, PartialEq)]
pub struct PaintedBeam {
    pub beam: Beam,
    pub dwell: DwellDensity,
}

impl PaintedBeam {
    pub fn new(beam: Beam, dwell: DwellDensity) -> Self {
        Self { beam, dwell }
    }

    pub fn unpainted(beam: Beam) -> Self {
        Self::new(beam, DwellDensity::point_mass())
    }

    /// Time-averaged intensity at `point`.
    ///
    /// A displacement along the paint axis leaves the axial coordinate, and
    /// hence the local beam radii, unchanged, so the average factorises into
    /// the transverse Gaussian times the dwell-smeared paint-axis profile.
    pub fn intensity(&self, point: &Vec3) -> f64 {
        let b = &self.beam;
        let c = b.local_coordinates(point);
        let (wx, wy) = b.radii_at(c.axial);
        let transverse = exp(-2.0 * c.transverse * c.transverse / (wy * wy));
        if transverse == 0.0 {
            return 0.0;
        }
        2.0 * b.power / (PI * wx * wy) * transverse * self.dwell.smeared_gaussian(c.paint, wx)
    }

    /// Effective 1/e² half-width along the paint axis, `x_s + w_x`.
    pub fn painted_half_width(&self) -> f64 {
        self.dwell.half_width() + self.beam.waist_x
    }
}

/// Time-averaged intensity of a painted beam on a set of sample points.
pub fn time_averaged_intensity(beam: &Beam, dwell: &DwellDensity, points: &[Vec3]) -> Vec<f64> {
    let painted = PaintedBeam::new(*beam, dwell.clone());
    points.iter().map(|p| painted.intensity(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::painting::{frequency_trajectory, PaintingSpec};
    use proptest::prelude::*;

    fn beam(waist: f64) -> Beam {
        Beam::new(20.0, waist, waist, 1064e-9, Vec3::x(), Vec3::zeros(), Vec3::y()).unwrap()
    }

    /// Average of the static beam displaced along the waveform's position
    /// samples.
    fn time_sampled(beam: &Beam, spec: &PaintingSpec, dwell: &DwellDensity, p: &Vec3) -> f64 {
        let w = frequency_trajectory(dwell, spec, 1e4 * spec.painting_frequency).unwrap();
        let n = w.samples_per_period();
        w.frequency
            .iter()
            .map(|f| {
                let x = (f - spec.center_frequency) * spec.calibration;
                beam.intensity(&(p - x * beam.paint_axis))
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn point_mass_is_static_profile() {
        let b = beam(5e-6);
        let pts: Vec<Vec3> = (0..20)
            .map(|i| Vec3::new(1e-5 * i as f64, 1e-6 * i as f64, -2e-7 * i as f64))
            .collect();
        let avg = time_averaged_intensity(&b, &DwellDensity::point_mass(), &pts);
        for (p, a) in pts.iter().zip(avg) {
            let s = b.intensity(p);
            assert!((a - s).abs() <= 1e-12 * s.max(1e-300));
        }
    }

    #[test]
    fn uniform_flat_top_peak() {
        // peak ≈ I0 · sqrt(π/2) · w0 / (2 x_s) for x_s ≫ w0
        let b = beam(35e-6);
        let xs = 550e-6;
        let d = DwellDensity::uniform(xs, 200).unwrap();
        let painted = PaintedBeam::new(b, d.clone());
        let peak = painted.intensity(&Vec3::zeros()) / b.peak_intensity();
        let closed = (PI / 2.0).sqrt() * 35e-6 / (2.0 * xs);
        assert!((peak - closed).abs() / closed < 1e-3);
        assert!((peak - 0.040).abs() < 0.001);
        let spec = PaintingSpec::from_stroke(xs, 80e6, 100e3, 1e-11).unwrap();
        let sampled = time_sampled(&b, &spec, &d, &Vec3::zeros()) / b.peak_intensity();
        assert!((sampled - peak).abs() / peak < 1e-3);
    }

    #[test]
    fn painted_width_ratio_for_full_stroke() {
        // FWHM of the flat top against the static FWHM
        let b = beam(35e-6);
        let painted = PaintedBeam::new(b, DwellDensity::uniform(550e-6, 200).unwrap());
        let fwhm = |f: &dyn Fn(f64) -> f64| {
            let peak = f(0.0);
            let mut x = 0.0;
            while f(x) > 0.5 * peak {
                x += 1e-7;
            }
            2.0 * x
        };
        let static_w = fwhm(&|y| b.intensity(&Vec3::new(0.0, y, 0.0)));
        let painted_w = fwhm(&|y| painted.intensity(&Vec3::new(0.0, y, 0.0)));
        let ratio = painted_w / static_w;
        assert!((ratio - 26.7).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn painting_conserves_power() {
        let b = beam(5e-6);
        let painted = PaintedBeam::new(b, DwellDensity::parabolic(30e-6, 24).unwrap());
        let axial = 20e-6;
        let n = 600;
        let (ly, lz) = (60e-6, 25e-6);
        let (dy, dz) = (2.0 * ly / n as f64, 2.0 * lz / n as f64);
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = Vec3::new(axial, -ly + (i as f64 + 0.5) * dy, -lz + (j as f64 + 0.5) * dz);
                total += painted.intensity(&p) * dy * dz;
            }
        }
        assert!((total - 20.0).abs() / 20.0 < 5e-3, "{total}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn convolution_equals_time_average(
            weights in proptest::collection::vec(0.02f64..1.0, 3..40),
            stroke in 5e-6f64..200e-6,
        ) {
            let b = beam(5e-6);
            let spec = PaintingSpec::from_stroke(stroke, 80e6, 100e3, 1e-11).unwrap();
            let d = DwellDensity::from_weights(stroke, weights).unwrap();
            let painted = PaintedBeam::new(b, d.clone());
            let pts: Vec<Vec3> = (0..41)
                .map(|i| Vec3::new(3e-6, -1.2 * stroke + 2.4 * stroke * i as f64 / 40.0, 1e-6))
                .collect();
            let conv: Vec<f64> = pts.iter().map(|p| painted.intensity(p)).collect();
            let sampled: Vec<f64> = pts.iter().map(|p| time_sampled(&b, &spec, &d, p)).collect();
            let scale = conv.iter().cloned().fold(0.0, f64::max);
            let err = conv.iter().zip(&sampled).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
            prop_assert!(err < 1e-3, "err = {}", err);
        }
    }
}
