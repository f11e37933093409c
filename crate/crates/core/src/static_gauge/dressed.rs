use super::peierls::wrap_angle;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Largest accepted step between neighbouring samples, in `theta` and in
/// `sin(theta/2)` times the phase step.
const MAX_STEP: f64 = PI / 2.0;

/// Mixing angle `theta` and phase `phi` of a position-dependent two-level
/// coupling, sampled on a rectangular grid (index `ix + nx * iy`).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelField {
    pub shape: [usize; 2],
    pub spacing: [f64; 2],
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub rabi: f64,
    pub mass: f64,
}

impl TwoLevelField {
    /// Samples `f(x, y) -> (theta, phi)` at `x = ix dx`, `y = iy dy`;
    /// `phi` is reduced to `[0, 2 pi)`.
    pub fn from_fn<F>(
        shape: [usize; 2],
        spacing: [f64; 2],
        rabi: f64,
        mass: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> (f64, f64),
    {
        let n = shape[0] * shape[1];
        let mut theta = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        for iy in 0..shape[1] {
            for ix in 0..shape[0] {
                let (th, ph) = f(ix as f64 * spacing[0], iy as f64 * spacing[1]);
                theta.push(th);
                phi.push(ph.rem_euclid(2.0 * PI));
            }
        }
        let field = TwoLevelField {
            shape,
            spacing,
            theta,
            phi,
            rabi,
            mass,
        };
        field.validate()?;
        Ok(field)
    }

    /// Directions on the unit sphere: `theta` from 0 to pi inclusive along
    /// x, `phi` over `[0, 2 pi)` along y.
    pub fn monopole(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::InvalidParameter("monopole grid too small".into()));
        }
        let spacing = [PI / (n_theta - 1) as f64, 2.0 * PI / n_phi as f64];
        Self::from_fn([n_theta, n_phi], spacing, 1.0, 1.0, |x, y| (x.min(PI), y))
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.shape[0] * self.shape[1];
        if self.shape[0] < 3 || self.shape[1] < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid {:?} too small for finite differences",
                self.shape
            )));
        }
        if self.theta.len() != n || self.phi.len() != n {
            return Err(Error::InvalidParameter(
                "angle grids do not match the shape".into(),
            ));
        }
        if !self.spacing.iter().all(|h| h.is_finite() && *h > 0.0) {
            return Err(Error::InvalidParameter(
                "grid spacing must be positive".into(),
            ));
        }
        if !(self.mass.is_finite() && self.mass > 0.0 && self.rabi.is_finite()) {
            return Err(Error::InvalidParameter(
                "mass must be positive and the coupling finite".into(),
            ));
        }
        if let Some(th) = self.theta.iter().find(|t| !(0.0..=PI).contains(*t)) {
            return Err(Error::InvalidParameter(format!(
                "mixing angle {th} outside [0, pi]"
            )));
        }
        if let Some(ph) = self.phi.iter().find(|p| !(0.0..2.0 * PI).contains(*p)) {
            return Err(Error::InvalidParameter(format!(
                "phase {ph} outside [0, 2 pi)"
            )));
        }
        Ok(())
    }

    fn index(&self, ix: usize, iy: usize) -> usize {
        ix + self.shape[0] * iy
    }

    /// Coupling `(Omega/2) [[cos theta, e^{-i phi} sin theta], [e^{i phi} sin theta, -cos theta]]`.
    pub fn coupling(&self, index: usize) -> DMatrix<C64> {
        let (th, ph) = (self.theta[index], self.phi[index]);
        let half = 0.5 * self.rabi;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(half * th.cos(), 0.0),
                C64::from_polar(half * th.sin(), -ph),
                C64::from_polar(half * th.sin(), ph),
                C64::new(-half * th.cos(), 0.0),
            ],
        )
    }

    /// Upper dressed state `(cos theta/2, e^{i phi} sin theta/2)`.
    pub fn dressed_state(&self, index: usize) -> [C64; 2] {
        chi_one(self.theta[index], self.phi[index])
    }

    fn check_resolution(&self) -> Result<()> {
        let [nx, ny] = self.shape;
        for iy in 0..ny {
            for ix in 0..nx {
                let a = self.index(ix, iy);
                for b in [(ix + 1 < nx).then(|| a + 1), (iy + 1 < ny).then(|| a + nx)]
                    .into_iter()
                    .flatten()
                {
                    let dtheta = (self.theta[b] - self.theta[a]).abs();
                    let weight = (0.5 * self.theta[a]).sin().max((0.5 * self.theta[b]).sin());
                    let dphi = wrap_angle(self.phi[b] - self.phi[a]).abs();
                    if dtheta > MAX_STEP || weight * dphi > MAX_STEP {
                        return Err(Error::Precondition(format!(
                            "grid too coarse near sample {a}: angle steps {dtheta:.3}, {dphi:.3}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn chi_one(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new((0.5 * theta).cos(), 0.0),
        C64::from_polar((0.5 * theta).sin(), phi),
    ]
}

/// Geometric vector potential `A_i` (one grid per axis) and scalar
/// potential `V` of the upper dressed state.
#[derive(Clone, Debug, PartialEq)]
pub struct DressedPotentials {
    pub vector: [Vec<f64>; 2],
    pub scalar: Vec<f64>,
}

/// Second-order finite difference along `axis` at every grid point:
/// centered inside, one-sided at the edges. `diff(a, b)` is `f(a) - f(b)`.
fn gradient<D>(shape: [usize; 2], h: f64, axis: usize, diff: D) -> Vec<f64>
where
    D: Fn(usize, usize) -> f64 + Sync,
{
    let [nx, ny] = shape;
    let (n, stride) = if axis == 0 { (nx, 1) } else { (ny, nx) };
    (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let pos = if axis == 0 { idx % nx } else { idx / nx };
            if pos == 0 {
                // (-3 f0 + 4 f1 - f2) / 2h
                (4.0 * diff(idx + stride, idx) - diff(idx + 2 * stride, idx)) / (2.0 * h)
            } else if pos + 1 == n {
                (4.0 * diff(idx, idx - stride) - diff(idx, idx - 2 * stride)) / (2.0 * h)
            } else {
                diff(idx + stride, idx - stride) / (2.0 * h)
            }
        })
        .collect()
}

/// `A_i = (cos theta - 1)/2 d_i phi` and
/// `V = ((grad theta)^2 + sin^2 theta (grad phi)^2) / 8m`, with phase
/// differences unwrapped between samples.
pub fn dressed_potentials(field: &TwoLevelField) -> Result<DressedPotentials> {
    field.validate()?;
    field.check_resolution()?;
    let dphi: Vec<Vec<f64>> = (0..2)
        .map(|axis| {
            gradient(field.shape, field.spacing[axis], axis, |a, b| {
                wrap_angle(field.phi[a] - field.phi[b])
            })
        })
        .collect();
    let dtheta: Vec<Vec<f64>> = (0..2)
        .map(|axis| {
            gradient(field.shape, field.spacing[axis], axis, |a, b| {
                field.theta[a] - field.theta[b]
            })
        })
        .collect();
    let vector = [0, 1].map(|axis| {
        field
            .theta
            .iter()
            .zip(&dphi[axis])
            .map(|(th, dp)| 0.5 * (th.cos() - 1.0) * dp)
            .collect::<Vec<f64>>()
    });
    let scalar = (0..field.len())
        .map(|k| {
            let grad_theta = dtheta[0][k].powi(2) + dtheta[1][k].powi(2);
            let grad_phi = dphi[0][k].powi(2) + dphi[1][k].powi(2);
            (grad_theta + field.theta[k].sin().powi(2) * grad_phi) / (8.0 * field.mass)
        })
        .collect();
    Ok(DressedPotentials { vector, scalar })
}

/// Berry connection `i <chi_1 | d_i chi_1>` from finite differences of the
/// dressed eigenvector itself.
pub fn berry_connection(field: &TwoLevelField) -> Result<[Vec<f64>; 2]> {
    field.validate()?;
    field.check_resolution()?;
    let states: Vec<[C64; 2]> = (0..field.len()).map(|k| field.dressed_state(k)).collect();
    Ok([0, 1].map(|axis| {
        let parts: Vec<Vec<f64>> = (0..2)
            .flat_map(|comp| {
                let re = gradient(field.shape, field.spacing[axis], axis, |a, b| {
                    states[a][comp].re - states[b][comp].re
                });
                let im = gradient(field.shape, field.spacing[axis], axis, |a, b| {
                    states[a][comp].im - states[b][comp].im
                });
                [re, im]
            })
            .collect();
        (0..field.len())
            .map(|k| {
                let d = [
                    C64::new(parts[0][k], parts[1][k]),
                    C64::new(parts[2][k], parts[3][k]),
                ];
                let overlap = states[k][0].conj() * d[0] + states[k][1].conj() * d[1];
                -overlap.im
            })
            .collect()
    }))
}

/// Total Berry curvature flux of the upper dressed state through the grid,
/// from gauge-invariant plaquette products of overlaps. `wrap[axis]` closes
/// the grid periodically along that axis.
pub fn berry_flux(field: &TwoLevelField, wrap: [bool; 2]) -> Result<f64> {
    field.validate()?;
    let [nx, ny] = field.shape;
    let states: Vec<[C64; 2]> = (0..field.len()).map(|k| field.dressed_state(k)).collect();
    let overlap = |a: usize, b: usize| {
        states[a][0].conj() * states[b][0] + states[a][1].conj() * states[b][1]
    };
    let cells_x = if wrap[0] { nx } else { nx - 1 };
    let cells_y = if wrap[1] { ny } else { ny - 1 };
    Ok((0..cells_x * cells_y)
        .into_par_iter()
        .map(|c| {
            let (ix, iy) = (c % cells_x, c / cells_x);
            let (jx, jy) = ((ix + 1) % nx, (iy + 1) % ny);
            let (a, b, d, e) = (
                field.index(ix, iy),
                field.index(jx, iy),
                field.index(jx, jy),
                field.index(ix, jy),
            );
            -(overlap(a, b) * overlap(b, d) * overlap(d, e) * overlap(e, a)).arg()
        })
        .sum())
}

/// Line integral of the closed-form connection `(cos theta - 1)/2 d phi`
/// along a closed path of `(theta, phi)` samples (trapezoid rule).
pub fn line_berry_phase(path: &[(f64, f64)]) -> f64 {
    let n = path.len();
    (0..n)
        .map(|k| {
            let (t0, p0) = path[k];
            let (t1, p1) = path[(k + 1) % n];
            0.25 * ((t0.cos() - 1.0) + (t1.cos() - 1.0)) * wrap_angle(p1 - p0)
        })
        .sum()
}

/// Discrete Wilson-loop phase `-arg prod <chi_1(k)|chi_1(k+1)>` along a
/// closed path, in `(-pi, pi]`.
pub fn wilson_loop_phase(path: &[(f64, f64)]) -> f64 {
    let n = path.len();
    let product = (0..n).fold(C64::new(1.0, 0.0), |acc, k| {
        let a = chi_one(path[k].0, path[k].1);
        let b = chi_one(path[(k + 1) % n].0, path[(k + 1) % n].1);
        acc * (a[0].conj() * b[0] + a[1].conj() * b[1])
    });
    wrap_angle(-product.arg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn texture(n: usize, h: f64) -> TwoLevelField {
        TwoLevelField::from_fn([n, n], [h, h], 2.0, 0.7, |x, y| {
            (
                0.9 + 0.4 * (1.3 * x).sin() * (0.8 * y).cos(),
                1.1 * x - 0.6 * y + 0.3 * (x * y).sin(),
            )
        })
        .unwrap()
    }

    #[test]
    fn dressed_state_is_upper_eigenvector() {
        let f = texture(5, 0.3);
        for k in 0..f.len() {
            let chi = f.dressed_state(k);
            let v = DVector::from_vec(chi.to_vec());
            let image = f.coupling(k) * &v;
            assert!((image - v * C64::new(0.5 * f.rabi, 0.0)).camax() < 1e-14);
            assert!((f.coupling(k) - f.coupling(k).adjoint()).camax() < 1e-15);
        }
    }

    #[test]
    fn uniform_theta_zero_has_no_potentials() {
        let f = TwoLevelField::from_fn([6, 5], [0.1, 0.2], 1.0, 1.0, |x, y| (0.0, x + 2.0 * y))
            .unwrap();
        let d = dressed_potentials(&f).unwrap();
        assert!(d
            .vector
            .iter()
            .flatten()
            .chain(&d.scalar)
            .all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn closed_form_matches_eigenvector_derivative() {
        let f = texture(200, 0.001);
        let d = dressed_potentials(&f).unwrap();
        let a = berry_connection(&f).unwrap();
        for axis in 0..2 {
            let worst = d.vector[axis]
                .iter()
                .zip(&a[axis])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "axis {axis}: {worst}");
        }
        assert!(d.scalar.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn scalar_potential_of_linear_texture() {
        // theta = a x, phi = b y: V = (a^2 + sin^2(a x) b^2) / 8m
        let (a, b, m) = (0.5, 1.5, 0.25);
        let f =
            TwoLevelField::from_fn([40, 40], [0.05, 0.05], 1.0, m, |x, y| (a * x, b * y)).unwrap();
        let d = dressed_potentials(&f).unwrap();
        for iy in 0..40 {
            for ix in 0..40 {
                let k = ix + 40 * iy;
                let x = ix as f64 * 0.05;
                let expect = (a * a + (a * x).sin().powi(2) * b * b) / (8.0 * m);
                assert!((d.scalar[k] - expect).abs() < 1e-12);
                assert!((d.vector[1][k] - 0.5 * ((a * x).cos() - 1.0) * b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn latitude_loop_phase() {
        for &theta0 in &[0.3, 1.0, 2.0, 2.9] {
            let path: Vec<(f64, f64)> = (0..2000)
                .map(|k| (theta0, 2.0 * PI * k as f64 / 2000.0))
                .collect();
            let expect = PI * (theta0.cos() - 1.0);
            assert!((line_berry_phase(&path) - expect).abs() < 1e-12);
            assert!(wrap_angle(wilson_loop_phase(&path) - expect).abs() < 1e-5);
        }
    }

    #[test]
    fn monopole_flux_is_minus_two_pi() {
        let f = TwoLevelField::monopole(200, 200).unwrap();
        let flux = berry_flux(&f, [false, true]).unwrap();
        assert!((flux + 2.0 * PI).abs() < 1e-3, "flux {flux}");
    }

    #[test]
    fn coarse_or_malformed_grids_are_flagged() {
        let coarse =
            TwoLevelField::from_fn([5, 5], [1.0, 1.0], 1.0, 1.0, |x, y| (2.0, 3.0 * x + y))
                .unwrap();
        assert!(matches!(
            dressed_potentials(&coarse),
            Err(Error::Precondition(_))
        ));
        assert!(TwoLevelField::from_fn([5, 5], [0.1, 0.1], 1.0, 1.0, |_, _| (4.0, 0.0)).is_err());
        assert!(TwoLevelField::from_fn([2, 5], [0.1, 0.1], 1.0, 1.0, |_, _| (1.0, 0.0)).is_err());
    }
}
