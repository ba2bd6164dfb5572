use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::qplate::QPlateSpec;
use super::ElementError;
use crate::angle::{axis_distance, wrap_pi};

/// Rotational symmetry of a q-plate's axis pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// q = 1: the pattern is invariant under every rotation.
    RotationallyInvariant,
    /// Invariant under rotation by 2π/n.
    Fold(u32),
}

/// `|2(q − 1)|`-fold symmetry, or rotational invariance for q = 1.
pub fn symmetry_order(spec: &QPlateSpec) -> Symmetry {
    match (spec.two_q() - 2).unsigned_abs() {
        0 => Symmetry::RotationallyInvariant,
        n => Symmetry::Fold(n),
    }
}

/// Optical-axis orientation sampled on a polar grid, reduced mod π.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    spec: QPlateSpec,
    radii: Vec<f64>,
    phis: Vec<f64>,
    /// Row-major, radius outer.
    alpha: Vec<f64>,
}

/// Samples `α(r, φ) = qφ + α₀` at radii `(i+1)/n_r` and azimuths `2πj/n_phi`.
pub fn orientation_field(spec: &QPlateSpec, n_r: usize, n_phi: usize) -> Result<OrientationField, ElementError> {
    if n_r == 0 || n_phi == 0 {
        return Err(ElementError::EmptyGrid);
    }
    let radii: Vec<f64> = (0..n_r).map(|i| (i + 1) as f64 / n_r as f64).collect();
    let phis: Vec<f64> = (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect();
    let alpha = radii
        .iter()
        .flat_map(|_| phis.iter().map(|&phi| wrap_pi(spec.axis_angle(phi))))
        .collect();
    Ok(OrientationField {
        spec: *spec,
        radii,
        phis,
        alpha,
    })
}

impl OrientationField {
    pub fn spec(&self) -> &QPlateSpec {
        &self.spec
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn alpha(&self, i_r: usize, j_phi: usize) -> f64 {
        self.alpha[i_r * self.phis.len() + j_phi]
    }

    /// `(r, φ, α)` rows in grid order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.radii.iter().enumerate().flat_map(move |(i, &r)| {
            self.phis
                .iter()
                .enumerate()
                .map(move |(j, &phi)| (r, phi, self.alpha(i, j)))
        })
    }

    /// Largest spread of α across radii at fixed φ.
    pub fn radial_variation(&self) -> f64 {
        (0..self.phis.len())
            .map(|j| {
                let a0 = self.alpha(0, j);
                (1..self.radii.len())
                    .map(|i| axis_distance(self.alpha(i, j), a0))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Orientation of the plate rotated rigidly by `rho`, sampled on the same
    /// grid: the axis found at φ came from φ − ρ and turned by ρ.
    pub fn rotated(&self, rho: f64) -> Vec<f64> {
        self.samples()
            .map(|(_, phi, _)| wrap_pi(self.spec.axis_angle(phi - rho) + rho))
            .collect()
    }

    /// Largest axis mismatch (mod π) between the field and its rotation.
    pub fn rotation_defect(&self, rho: f64) -> f64 {
        self.rotated(rho)
            .iter()
            .zip(&self.alpha)
            .map(|(a, b)| axis_distance(*a, *b))
            .fold(0.0, f64::max)
    }

    /// CSV with header `r,phi,alpha`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "r,phi,alpha")?;
        for (r, phi, a) in self.samples() {
            writeln!(w, "{r:.16e},{phi:.16e},{a:.16e}")?;
        }
        Ok(())
    }
}

/// Smallest rotation leaving the pattern invariant, `None` for q = 1.
pub fn symmetry_angle(spec: &QPlateSpec) -> Option<f64> {
    match symmetry_order(spec) {
        Symmetry::RotationallyInvariant => None,
        Symmetry::Fold(n) => Some(2.0 * PI / f64::from(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn spec(q: f64, a0: f64) -> QPlateSpec {
        QPlateSpec::new(q, a0).unwrap()
    }

    #[test]
    fn orientation_values() {
        let f = orientation_field(&spec(1.0, 0.0), 1, 4).unwrap();
        assert!((f.alpha(0, 1) - FRAC_PI_2).abs() < 1e-15);
        let f = orientation_field(&spec(0.5, 0.0), 1, 2).unwrap();
        assert!((f.alpha(0, 1) - FRAC_PI_2).abs() < 1e-15);
        let f = orientation_field(&spec(3.0, 0.4), 3, 5).unwrap();
        for i in 0..3 {
            assert!((f.alpha(i, 0) - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        assert_eq!(
            orientation_field(&QPlateSpec::unit(), 0, 3),
            Err(ElementError::EmptyGrid)
        );
    }

    #[test]
    fn field_independent_of_radius() {
        let f = orientation_field(&spec(-1.5, 0.2), 7, 33).unwrap();
        assert_eq!(f.radial_variation(), 0.0);
    }

    #[test]
    fn symmetry_orders() {
        assert_eq!(symmetry_order(&spec(1.0, 0.0)), Symmetry::RotationallyInvariant);
        assert_eq!(symmetry_order(&spec(2.0, 0.0)), Symmetry::Fold(2));
        assert_eq!(symmetry_order(&spec(3.0, 0.0)), Symmetry::Fold(4));
        assert_eq!(symmetry_order(&spec(0.5, 0.0)), Symmetry::Fold(1));
        assert_eq!(symmetry_order(&spec(1.5, 0.0)), Symmetry::Fold(1));
        assert_eq!(symmetry_order(&spec(-1.0, 0.0)), Symmetry::Fold(4));
    }

    #[test]
    fn rotation_by_symmetry_angle_is_invariant() {
        for q in [-2.0, -0.5, 0.0, 0.5, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let s = spec(q, 0.3);
            let f = orientation_field(&s, 2, 48).unwrap();
            let rho = symmetry_angle(&s).unwrap();
            assert!(f.rotation_defect(rho) < 1e-12, "q={q}");
            // half the symmetry angle is not a symmetry
            assert!(f.rotation_defect(rho / 2.0) > 0.1, "q={q}");
        }
    }

    #[test]
    fn unit_plate_invariant_under_any_rotation() {
        let f = orientation_field(&QPlateSpec::unit(), 2, 24).unwrap();
        for rho in [0.1, 1.0, 2.5] {
            assert!(f.rotation_defect(rho) < 1e-12);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let f = orientation_field(&QPlateSpec::unit(), 2, 3).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("r,phi,alpha"));
        assert_eq!(text.lines().count(), 7);
    }
}
