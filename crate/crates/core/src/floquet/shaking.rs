use crate::lattice::Lattice;
use crate::{Error, Result, C64};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Quadrature points per period used for `<e^{i w}>`.
const QUADRATURE_POINTS: usize = 4096;

/// A periodic on-site energy offset `v(t)` over one drive period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Waveform {
    Constant {
        value: f64,
    },
    /// `amplitude cos(harmonic w t + phase)`.
    Sinusoid {
        amplitude: f64,
        #[serde(default = "one")]
        harmonic: u32,
        #[serde(default)]
        phase: f64,
    },
    /// Uniform samples on `[0, T]`, both endpoints included.
    Sampled {
        values: Vec<f64>,
    },
}

fn one() -> u32 {
    1
}

impl Waveform {
    fn validate(&self) -> Result<()> {
        match self {
            Waveform::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidParameter("non-finite constant offset".into()))
            }
            Waveform::Sinusoid {
                amplitude,
                harmonic,
                phase,
            } => {
                if !(amplitude.is_finite() && phase.is_finite()) || *harmonic == 0 {
                    return Err(Error::InvalidParameter(
                        "sinusoid needs finite amplitude and phase and harmonic >= 1".into(),
                    ));
                }
                Ok(())
            }
            Waveform::Sampled { values } => {
                if values.len() < 3 || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "sampled waveform needs at least 3 finite samples".into(),
                    ));
                }
                let (first, last) = (values[0], values[values.len() - 1]);
                if (first - last).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "sampled waveform is not periodic: v(0) = {first}, v(T) = {last}"
                    )));
                }
                Ok(())
            }
            Waveform::Constant { .. } => Ok(()),
        }
    }

    /// Fourier coefficients `(k, c_k)` of `v(t) = sum_k c_k e^{i k w t}`,
    /// mean included at `k = 0`.
    fn fourier(&self) -> Vec<(i64, C64)> {
        match self {
            Waveform::Constant { value } => vec![(0, C64::new(*value, 0.0))],
            Waveform::Sinusoid {
                amplitude,
                harmonic,
                phase,
            } => {
                let k = *harmonic as i64;
                let c = C64::from_polar(0.5 * amplitude, *phase);
                vec![(k, c), (-k, c.conj())]
            }
            Waveform::Sampled { values } => {
                let n = values.len() - 1;
                let mut buffer: Vec<C64> = values[..n].iter().map(|&v| C64::new(v, 0.0)).collect();
                FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
                buffer
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let k = if j <= n / 2 {
                            j as i64
                        } else {
                            j as i64 - n as i64
                        };
                        (k, c / n as f64)
                    })
                    .collect()
            }
        }
    }
}

/// Per-site offsets `v_r(t)` sharing the drive frequency `omega`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShakingProtocol {
    pub omega: f64,
    pub sites: Vec<Waveform>,
}

impl ShakingProtocol {
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }
}

/// `<e^{i w(t)}>` over one period, where `w` is the zero-mean time integral
/// of the mean-subtracted offset difference with coefficients `diff`.
fn averaged_phase(diff: &[(i64, C64)], omega: f64) -> C64 {
    let terms: Vec<(i64, C64)> = diff
        .iter()
        .filter(|(k, c)| *k != 0 && c.norm() > 0.0)
        .map(|&(k, c)| (k, c / C64::new(0.0, k as f64 * omega)))
        .collect();
    if terms.is_empty() {
        return C64::new(1.0, 0.0);
    }
    let m = QUADRATURE_POINTS;
    let sum: C64 = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let w: f64 = terms
                .iter()
                .map(|&(k, c)| (c * C64::from_polar(1.0, k as f64 * theta)).re)
                .sum();
            C64::from_polar(1.0, w)
        })
        .sum();
    sum / m as f64
}

/// Renormalization factor `<e^{i w_{r,j}}>` of the hopping on every link
/// (indexed like `lattice.links()`), with `w_{r,j}` the integrated phase
/// difference `v_r - v_{r+j}` in the co-moving frame.
pub fn shaken_hopping_factors(protocol: &ShakingProtocol, lattice: &Lattice) -> Result<Vec<C64>> {
    if !(protocol.omega.is_finite() && protocol.omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "drive frequency must be positive, got {}",
            protocol.omega
        )));
    }
    if protocol.sites.len() != lattice.n_sites() {
        return Err(Error::InvalidParameter(format!(
            "{} waveforms for {} sites",
            protocol.sites.len(),
            lattice.n_sites()
        )));
    }
    for w in &protocol.sites {
        w.validate()?;
    }
    let series: Vec<Vec<(i64, C64)>> = protocol.sites.iter().map(Waveform::fourier).collect();
    Ok(lattice
        .links()
        .iter()
        .map(|l| {
            let mut diff: Vec<(i64, C64)> = series[l.origin].clone();
            diff.extend(series[l.target].iter().map(|&(k, c)| (k, -c)));
            diff.sort_by_key(|&(k, _)| k);
            let mut merged: Vec<(i64, C64)> = Vec::new();
            for (k, c) in diff {
                match merged.last_mut() {
                    Some((lk, lc)) if *lk == k => *lc += c,
                    _ => merged.push((k, c)),
                }
            }
            averaged_phase(&merged, protocol.omega)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn bessel_j0(x: f64) -> f64 {
        // power series, ample for |x| <= 10
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..80 {
            term *= -(x * x) / (4.0 * (m * m) as f64);
            sum += term;
        }
        sum
    }

    fn two_sites(a: Waveform, b: Waveform, omega: f64) -> C64 {
        let lat = Lattice::chain(2, Boundary::Open).unwrap();
        shaken_hopping_factors(
            &ShakingProtocol {
                omega,
                sites: vec![a, b],
            },
            &lat,
        )
        .unwrap()[0]
    }

    #[test]
    fn static_offsets_leave_hopping_unchanged() {
        let f = two_sites(
            Waveform::Constant { value: 3.0 },
            Waveform::Constant { value: -1.0 },
            2.0,
        );
        assert_eq!(f, C64::new(1.0, 0.0));
    }

    #[test]
    fn sinusoid_gives_bessel_factor() {
        for &a in &[0.0, 0.7, 1.5, 2.4048, 3.3, 5.0] {
            let omega = 1.7;
            let f = two_sites(
                Waveform::Sinusoid {
                    amplitude: a * omega,
                    harmonic: 1,
                    phase: 0.4,
                },
                Waveform::Constant { value: 0.2 },
                omega,
            );
            assert!(
                (f - C64::new(bessel_j0(a), 0.0)).norm() < 1e-10,
                "A = {a}: {f}"
            );
        }
        let zero = two_sites(
            Waveform::Sinusoid {
                amplitude: 2.404_825_557_695_773,
                harmonic: 1,
                phase: 0.0,
            },
            Waveform::Constant { value: 0.0 },
            1.0,
        );
        assert!(zero.norm() < 1e-3);
    }

    #[test]
    fn sampled_sinusoid_matches_closed_form() {
        let omega = 1.0;
        let n = 1001;
        let values: Vec<f64> = (0..n)
            .map(|j| 1.8 * (2.0 * PI * j as f64 / (n - 1) as f64).cos())
            .collect();
        let f = two_sites(
            Waveform::Sampled { values },
            Waveform::Constant { value: 0.0 },
            omega,
        );
        assert!((f.re - bessel_j0(1.8)).abs() < 1e-10 && f.im.abs() < 1e-10);
    }

    #[test]
    fn sawtooth_generates_a_peierls_phase() {
        let n = 1001;
        let saw: Vec<f64> = (0..n)
            .map(|j| {
                let x = j as f64 / (n - 1) as f64;
                if j == n - 1 {
                    -0.5
                } else {
                    x - 0.5
                }
            })
            .collect();
        let f = two_sites(
            Waveform::Sampled {
                values: saw.clone(),
            },
            Waveform::Constant { value: 0.0 },
            0.5,
        );
        assert!(f.arg().abs() > 1e-3, "factor {f}");
        assert!(f.norm() <= 1.0);
        // v(T - t) on the same grid
        let mut reversed = saw;
        reversed.reverse();
        let g = two_sites(
            Waveform::Sampled { values: reversed },
            Waveform::Constant { value: 0.0 },
            0.5,
        );
        assert!((g - f.conj()).norm() < 1e-10, "{g} vs {f}");
    }

    #[test]
    fn aperiodic_samples_are_rejected() {
        let lat = Lattice::chain(2, Boundary::Open).unwrap();
        let p = ShakingProtocol {
            omega: 1.0,
            sites: vec![
                Waveform::Sampled {
                    values: vec![0.0, 1.0, 2.0],
                },
                Waveform::Constant { value: 0.0 },
            ],
        };
        assert!(shaken_hopping_factors(&p, &lat).is_err());
    }

    proptest! {
        #[test]
        fn factors_never_exceed_one(a in 0.0f64..6.0, b in 0.0f64..6.0, p in 0.0f64..6.3, k in 1u32..4) {
            let f = two_sites(
                Waveform::Sinusoid { amplitude: a, harmonic: k, phase: p },
                Waveform::Sinusoid { amplitude: b, harmonic: 1, phase: 0.0 },
                1.3,
            );
            prop_assert!(f.norm() <= 1.0 + 1e-12);
        }
    }
}
