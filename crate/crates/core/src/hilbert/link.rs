use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integer or half-integer, stored doubled.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Accepts only exact multiples of one half.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || twice.round() != twice || twice.abs() > i32::MAX as f64 {
            return Err(Error::InvalidParameter(format!(
                "{x} is not an integer or half-integer"
            )));
        }
        Ok(HalfInt(twice as i32))
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Finite-dimensional replacement for a U(1) link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkKind {
    /// Spin-`S` quantum link, `S = two_s / 2`: `L = S^z`, `U = S^+ / sqrt(S(S+1))`.
    QuantumLinkSpin { two_s: u32 },
    /// Electric field truncated to `|L| <= cutoff`, `U` a unit raising
    /// operator that annihilates the top state.
    TruncatedWilson { cutoff: u32 },
}

impl LinkKind {
    pub fn spin_half() -> Self {
        LinkKind::QuantumLinkSpin { two_s: 1 }
    }

    /// Spin link from `S` given as a float (must be a positive half-integer).
    pub fn quantum_link(spin: f64) -> Result<Self> {
        let two_s = HalfInt::from_f64(spin)?.twice();
        if two_s <= 0 {
            return Err(Error::InvalidParameter(format!(
                "link spin must be positive, got {spin}"
            )));
        }
        Ok(LinkKind::QuantumLinkSpin {
            two_s: two_s as u32,
        })
    }

    pub fn local_dim(self) -> usize {
        match self {
            LinkKind::QuantumLinkSpin { two_s } => two_s as usize + 1,
            LinkKind::TruncatedWilson { cutoff } => 2 * cutoff as usize + 1,
        }
    }

    /// Doubled `L` eigenvalue of `level` (levels count up from the lowest `L`).
    pub fn twice_l(self, level: usize) -> i32 {
        match self {
            LinkKind::QuantumLinkSpin { two_s } => 2 * level as i32 - two_s as i32,
            LinkKind::TruncatedWilson { cutoff } => 2 * (level as i32 - cutoff as i32),
        }
    }

    pub fn level_of(self, twice_l: i32) -> Option<usize> {
        let offset = match self {
            LinkKind::QuantumLinkSpin { two_s } => twice_l + two_s as i32,
            LinkKind::TruncatedWilson { cutoff } => twice_l + 2 * cutoff as i32,
        };
        if offset < 0 || offset % 2 != 0 {
            return None;
        }
        let level = (offset / 2) as usize;
        (level < self.local_dim()).then_some(level)
    }

    /// `<level+1| U |level>`, or `None` at the top of the ladder.
    pub fn raise_amplitude(self, level: usize) -> Option<f64> {
        if level + 1 >= self.local_dim() {
            return None;
        }
        match self {
            LinkKind::QuantumLinkSpin { two_s } => {
                let s = two_s as f64 / 2.0;
                let m = self.twice_l(level) as f64 / 2.0;
                Some(((s * (s + 1.0) - m * (m + 1.0)) / (s * (s + 1.0))).sqrt())
            }
            LinkKind::TruncatedWilson { .. } => Some(1.0),
        }
    }

    pub fn l_matrix(self) -> DMatrix<f64> {
        let d = self.local_dim();
        DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                self.twice_l(r) as f64 / 2.0
            } else {
                0.0
            }
        })
    }

    pub fn u_matrix(self) -> DMatrix<f64> {
        let d = self.local_dim();
        DMatrix::from_fn(d, d, |r, c| {
            if r == c + 1 {
                self.raise_amplitude(c).unwrap_or(0.0)
            } else {
                0.0
            }
        })
    }

    pub fn describe(self) -> String {
        match self {
            LinkKind::QuantumLinkSpin { two_s } => {
                format!("quantum-link S={}", HalfInt::from_twice(two_s as i32))
            }
            LinkKind::TruncatedWilson { cutoff } => format!("truncated-wilson cutoff={cutoff}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a * b - b * a
    }

    #[test]
    fn half_int_parsing() {
        assert_eq!(HalfInt::from_f64(-1.5).unwrap().twice(), -3);
        assert!(HalfInt::from_f64(0.3).is_err());
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
    }

    #[test]
    fn quantum_link_algebra_is_exact() {
        for two_s in 1..=6u32 {
            let kind = LinkKind::QuantumLinkSpin { two_s };
            let s = two_s as f64 / 2.0;
            let (l, u) = (kind.l_matrix(), kind.u_matrix());
            assert_eq!(l.nrows(), two_s as usize + 1);
            assert!((commutator(&l, &u) - &u).amax() < 1e-12);
            let uu = commutator(&u, &u.transpose());
            assert!((uu - &l * (2.0 / (s * (s + 1.0)))).amax() < 1e-12);
        }
    }

    #[test]
    fn quantum_link_matrix_elements() {
        let kind = LinkKind::QuantumLinkSpin { two_s: 2 };
        // <0|U|-1> = sqrt(2 - 0) / sqrt(2)
        assert!((kind.raise_amplitude(0).unwrap() - 1.0).abs() < 1e-15);
        assert!(kind.raise_amplitude(2).is_none());
    }

    #[test]
    fn truncated_wilson_commutators_only_fail_at_edges() {
        for cutoff in 1..=4u32 {
            let kind = LinkKind::TruncatedWilson { cutoff };
            let (l, u) = (kind.l_matrix(), kind.u_matrix());
            assert!((commutator(&l, &u) - &u).amax() < 1e-12);
            let uu = commutator(&u, &u.transpose());
            let d = kind.local_dim();
            for r in 0..d {
                for c in 0..d {
                    let expect = if r == c && r == 0 {
                        -1.0
                    } else if r == c && r == d - 1 {
                        1.0
                    } else {
                        0.0
                    };
                    assert_eq!(uu[(r, c)], expect, "cutoff {cutoff} entry ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn levels_round_trip() {
        for kind in [
            LinkKind::QuantumLinkSpin { two_s: 3 },
            LinkKind::TruncatedWilson { cutoff: 2 },
        ] {
            for level in 0..kind.local_dim() {
                assert_eq!(kind.level_of(kind.twice_l(level)), Some(level));
            }
            assert_eq!(kind.level_of(kind.twice_l(kind.local_dim() - 1) + 2), None);
        }
        assert_eq!(LinkKind::spin_half().level_of(0), None);
    }
}
