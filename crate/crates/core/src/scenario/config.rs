//! Scenario configuration documents (TOML). Unknown keys are rejected;
//! numerical controls have defaults that are echoed into the metadata.

use crate::dynamics::KrylovOptions;
use crate::floquet::ShakingProtocol;
use crate::hamiltonians::HoppingConvention;
use crate::lattice::Boundary;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

fn open() -> Boundary {
    Boundary::Open
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LinkConfig {
    QuantumLink { spin: f64 },
    TruncatedWilson { cutoff: u32 },
}

/// Physical system shared by the `spectrum`, `evolve` and `trotter`
/// scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Gauge-matter chain restricted to its Gauss sector.
    Schwinger {
        n_sites: usize,
        #[serde(default = "open")]
        boundary: Boundary,
        t: f64,
        m: f64,
        g2: f64,
        link: LinkConfig,
        background: f64,
        #[serde(default)]
        fermion_number: Option<usize>,
        #[serde(default)]
        convention: HoppingConvention,
    },
    /// Link-free spin chain with the gauge field integrated out.
    Encoded {
        n_sites: usize,
        t: f64,
        m: f64,
        g2: f64,
        background: f64,
        #[serde(default)]
        fermion_number: Option<usize>,
    },
    /// Schwinger-boson links with a Gauss-law energy penalty, on the full
    /// unconstrained space.
    Penalty {
        n_sites: usize,
        t_f: f64,
        t_b: f64,
        spin: f64,
        background: f64,
        gamma: f64,
        #[serde(default)]
        v_f: Vec<f64>,
        #[serde(default)]
        v_b: Vec<[f64; 2]>,
        #[serde(default)]
        u: f64,
        #[serde(default)]
        fermion_number: Option<usize>,
    },
    /// Staggered fermions with gauge links on a square lattice.
    Staggered2d {
        lx: usize,
        ly: usize,
        #[serde(default = "open")]
        boundary: Boundary,
        t: [f64; 2],
        m: f64,
        g2: f64,
        /// Plaquette coefficient; `1/(4 g^2)` when absent.
        #[serde(default)]
        plaquette: Option<f64>,
        link: LinkConfig,
        #[serde(default)]
        fermion_number: Option<usize>,
    },
}

/// Where artifacts go when `--out` is not given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolveMethod {
    #[default]
    Exact,
    Krylov,
}

/// Time grid `t_k = k t_max / n_steps`, `k = 0..=n_steps`, starting from the
/// bare vacuum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionControls {
    pub t_max: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub method: EvolveMethod,
    #[serde(default)]
    pub krylov: KrylovOptions,
    /// Entropy cut (sites `0..cut` on the left); half the system when absent.
    #[serde(default)]
    pub cut: Option<usize>,
    /// Records the half/half logarithmic negativity as well.
    #[serde(default)]
    pub negativity: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub model: ModelConfig,
    pub evolution: EvolutionControls,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

fn default_trotter_steps() -> Vec<usize> {
    vec![16, 32, 64, 128]
}

fn default_orders() -> Vec<u8> {
    vec![1, 2]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterControls {
    pub t_final: f64,
    #[serde(default = "default_trotter_steps")]
    pub n_steps: Vec<usize>,
    #[serde(default = "default_orders")]
    pub orders: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterConfig {
    pub model: ModelConfig,
    pub trotter: TrotterControls,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

/// Built-in periodically driven test systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriveModel {
    /// `H0 = h sigma_y`, `V_+ = rabi sigma^+`.
    TwoLevel { h: f64, rabi: f64 },
    /// `H0 = h sum sigma_y + j sum sigma_y sigma_y` on an open chain,
    /// `V_+ = rabi sum sigma^+`.
    SpinChain {
        n_sites: usize,
        h: f64,
        j: f64,
        rabi: f64,
    },
}

fn default_taus() -> Vec<f64> {
    vec![0.1, 0.05, 0.025, 0.0125]
}

fn default_substeps() -> usize {
    4000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetConfig {
    pub drive: DriveModel,
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "default_substeps")]
    pub n_substeps: usize,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub extents: Vec<usize>,
    pub boundary: Vec<Boundary>,
}

/// Two-site sinusoidal drive `K cos(w t)` evaluated at `K / w` = each
/// listed amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesselSweep {
    pub amplitudes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShakingConfig {
    pub lattice: LatticeConfig,
    pub protocol: ShakingProtocol,
    #[serde(default)]
    pub sweep: Option<BesselSweep>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

fn default_k_grid() -> [usize; 2] {
    [40, 40]
}

/// Shared by the `hofstadter` and `chern` scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HofstadterConfig {
    pub p: u32,
    pub q: u32,
    pub t: f64,
    #[serde(default = "default_k_grid")]
    pub nk: [usize; 2],
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Texture {
    /// `theta`, `phi` equal to the spherical angles of a direction.
    Monopole { n_theta: usize, n_phi: usize },
    /// `theta = pi (1 - exp(-r^2 / width^2))`, `phi` the polar angle about
    /// the grid centre.
    Vortex { n: usize, spacing: f64, width: f64 },
    /// Angles linear in position.
    Gradient {
        shape: [usize; 2],
        spacing: [f64; 2],
        theta0: f64,
        theta_gradient: [f64; 2],
        phi0: f64,
        phi_gradient: [f64; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerryConfig {
    pub texture: Texture,
    pub mass: f64,
    pub rabi: f64,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

/// Schwinger-boson chain without the penalty strength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySystem {
    pub n_sites: usize,
    pub t_f: f64,
    pub t_b: f64,
    pub spin: f64,
    pub background: f64,
    #[serde(default)]
    pub v_f: Vec<f64>,
    #[serde(default)]
    pub v_b: Vec<[f64; 2]>,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub fermion_number: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyCheckConfig {
    pub system: PenaltySystem,
    pub gammas: Vec<f64>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    pub t: f64,
    pub m: f64,
    pub g2: f64,
}

/// `count` coupling sets drawn from a seeded generator:
/// `t in [0.5, 1.5)`, `m in [0, 1)`, `g2 in [0.5, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeededCouplings {
    pub seed: u64,
    pub count: usize,
}

fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceConfig {
    pub n_sites: usize,
    /// Integer background field `L_0`.
    pub background: i32,
    /// Truncation `|L| <= cutoff` of the link model; large enough to hold
    /// every induced field when absent.
    #[serde(default)]
    pub cutoff: Option<u32>,
    #[serde(default)]
    pub couplings: Vec<Couplings>,
    #[serde(default)]
    pub seeded: Option<SeededCouplings>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub output: Option<OutputSection>,
}
