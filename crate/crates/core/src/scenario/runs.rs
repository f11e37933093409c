use super::config::*;
use super::models::{build_model, penalty_basis, penalty_params, BuiltModel};
use super::output::{fmt_f64, CsvTable};
use crate::dynamics::{evolve_exact, evolve_krylov, trotter_evolve, EvolutionResult, TermSplit};
use crate::floquet::{
    shaken_hopping_factors, stroboscopic_error, DriveSpec, ShakingProtocol, Waveform,
};
use crate::hamiltonians::{
    bond_parity_split, effective_second_order, penalty_hamiltonian, penalty_parts,
    schwinger_hamiltonian, spin_encoded_hamiltonian, SchwingerParams, SpinModelParams,
};
use crate::hilbert::{gauss_sector_1d, GaussLaw, HalfInt, LinkKind, SectorBasis};
use crate::lattice::{Boundary, Lattice};
use crate::linalg::{loglog_slope, max_deviation, spectrum};
use crate::observables::{trajectory_records, RecordOptions};
use crate::operator::SparseOperator;
use crate::static_gauge::{
    berry_connection, berry_flux, chern_numbers, dressed_potentials, hofstadter_spectrum,
    TwoLevelField,
};
use crate::{Error, Result, C64};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::f64::consts::PI;
use std::sync::Arc;

/// Largest chain accepted by the equivalence check.
pub const MAX_EQUIVALENCE_SITES: usize = 8;

/// Tables and summary of one run; `failure` carries the reason when a
/// built-in verdict did not pass.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub tables: Vec<CsvTable>,
    pub summary: serde_json::Value,
    pub failure: Option<String>,
}

impl RunOutput {
    fn ok(tables: Vec<CsvTable>, summary: serde_json::Value) -> Self {
        RunOutput {
            tables,
            summary,
            failure: None,
        }
    }
}

fn checked_model(config: &ModelConfig) -> Result<(BuiltModel, f64)> {
    let model = build_model(config)?;
    let commutator = model.validate()?;
    Ok((model, commutator))
}

fn slopes(xs: &[f64], ys: &[f64]) -> Option<f64> {
    (xs.len() >= 2 && ys.iter().all(|y| *y > 0.0)).then(|| loglog_slope(xs, ys))
}

pub fn run_spectrum(config: &SpectrumConfig) -> Result<RunOutput> {
    let (model, commutator) = checked_model(&config.model)?;
    let energies = spectrum(&model.h)?;
    let mut table = CsvTable::new("spectrum.csv", &["index", "energy"]);
    for (k, e) in energies.iter().enumerate() {
        table.push(vec![k.to_string(), fmt_f64(*e)]);
    }
    let summary = json!({
        "dimension": model.basis.len(),
        "ground_energy": energies[0],
        "max_gauge_commutator": commutator,
    });
    Ok(RunOutput::ok(vec![table], summary))
}

pub fn run_evolve(config: &EvolveConfig) -> Result<RunOutput> {
    let c = &config.evolution;
    if c.n_steps == 0 || !(c.t_max.is_finite() && c.t_max >= 0.0) {
        return Err(Error::InvalidParameter(
            "evolution needs n_steps >= 1 and a finite t_max >= 0".into(),
        ));
    }
    let (model, commutator) = checked_model(&config.model)?;
    let n = model.basis.n_sites();
    let cut = c.cut.unwrap_or(n / 2);
    if cut > n {
        return Err(Error::InvalidParameter(format!(
            "entropy cut {cut} beyond {n} sites"
        )));
    }
    let psi0 = model.bare_vacuum()?;
    let dt = c.t_max / c.n_steps as f64;
    let trajectory = match c.method {
        EvolveMethod::Exact => {
            let times: Vec<f64> = (0..=c.n_steps).map(|k| k as f64 * dt).collect();
            evolve_exact(&model.h, &psi0, &times)?
        }
        EvolveMethod::Krylov => evolve_krylov(&model.h, &psi0, dt, c.n_steps, &c.krylov)?,
    };
    let options = RecordOptions {
        background: model.background,
        generators: model.generators.clone(),
        cut: Some(cut),
        negativity_blocks: c
            .negativity
            .then(|| ((0..cut).collect(), (cut..n).collect())),
    };
    let records = trajectory_records(&model.basis, &trajectory, &psi0, &options)?;
    let n_fields = records.first().map_or(0, |r| r.electric_field.len());
    let mut header: Vec<String> = [
        "time",
        "density",
        "persistence_re",
        "persistence_im",
        "gauss_violation",
        "entropy",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if c.negativity {
        header.push("negativity".into());
    }
    header.extend((0..n_fields).map(|l| format!("field_{l}")));
    let mut table = CsvTable::with_header("trajectory.csv", header);
    for r in &records {
        let mut row = vec![
            r.time,
            r.density,
            r.persistence.re,
            r.persistence.im,
            r.gauss_violation,
            r.entropy,
        ];
        row.extend(r.negativity);
        row.extend(&r.electric_field);
        table.push_floats(&row);
    }
    let summary = json!({
        "dimension": model.basis.len(),
        "max_gauge_commutator": commutator,
        "method": trajectory.method,
        "max_norm_drift": trajectory.max_norm_drift(),
        "max_gauss_violation": records.iter().map(|r| r.gauss_violation).fold(0.0, f64::max),
        "max_density": records.iter().map(|r| r.density).fold(0.0, f64::max),
    });
    Ok(RunOutput::ok(vec![table], summary))
}

/// Diagonal, even-bond and odd-bond parts of a chain Hamiltonian, without
/// empty terms.
pub fn bond_split(model: &BuiltModel) -> Result<TermSplit> {
    let terms: Vec<SparseOperator> = bond_parity_split(&model.h, &model.basis)?
        .into_iter()
        .filter(|t| t.max_abs() > 0.0)
        .collect();
    TermSplit::new(terms, &model.h)
}

pub fn run_trotter(config: &TrotterConfig) -> Result<RunOutput> {
    let c = &config.trotter;
    if !(c.t_final.is_finite() && c.t_final > 0.0) || c.n_steps.is_empty() || c.n_steps.contains(&0)
    {
        return Err(Error::InvalidParameter(
            "Trotter run needs t_final > 0 and step counts >= 1".into(),
        ));
    }
    if let Some(o) = c.orders.iter().find(|o| !(1..=2).contains(*o)) {
        return Err(Error::InvalidParameter(format!(
            "product-formula order must be 1 or 2, got {o}"
        )));
    }
    let (model, commutator) = checked_model(&config.model)?;
    let psi0 = model.bare_vacuum()?;
    let split = bond_split(&model)?;
    let exact = evolve_exact(&model.h, &psi0, &[c.t_final])?;
    let reference = exact.final_state().expect("one time");
    let mut table = CsvTable::new("trotter.csv", &["order", "n_steps", "error"]);
    let mut fitted = serde_json::Map::new();
    for &order in &c.orders {
        let mut errors = Vec::with_capacity(c.n_steps.len());
        for &n in &c.n_steps {
            let run: EvolutionResult = trotter_evolve(&split, &psi0, c.t_final, n, order)?;
            let err = (run.final_state().expect("final state") - reference).norm();
            table.push(vec![order.to_string(), n.to_string(), fmt_f64(err)]);
            errors.push(err);
        }
        let steps: Vec<f64> = c.n_steps.iter().map(|&n| n as f64).collect();
        fitted.insert(format!("order_{order}"), json!(slopes(&steps, &errors)));
    }
    let summary = json!({
        "dimension": model.basis.len(),
        "max_gauge_commutator": commutator,
        "n_terms": split.len(),
        "error_slopes": fitted,
    });
    Ok(RunOutput::ok(vec![table], summary))
}

fn spin_flip(n: usize, site: usize, lower: C64, raise: C64) -> Vec<(usize, usize, C64)> {
    (0..1usize << n)
        .map(|col| {
            let row = col ^ (1 << site);
            let amp = if col >> site & 1 == 1 { lower } else { raise };
            (row, col, amp)
        })
        .collect()
}

impl DriveModel {
    /// `(H0, V_+)` on the `2^N` spin space, bit `k` of the index holding
    /// spin `k` (`1` = up).
    pub fn operators(&self) -> Result<(SparseOperator, SparseOperator)> {
        let (n, h, j, rabi) = match *self {
            DriveModel::TwoLevel { h, rabi } => (1, h, 0.0, rabi),
            DriveModel::SpinChain {
                n_sites,
                h,
                j,
                rabi,
            } => (n_sites, h, j, rabi),
        };
        if n == 0 || n > 10 {
            return Err(Error::InvalidParameter(format!(
                "driven chain needs 1..=10 spins, got {n}"
            )));
        }
        let dim = 1 << n;
        let sigma_y = |k: usize| {
            SparseOperator::from_triplets(
                dim,
                spin_flip(n, k, C64::new(0.0, -1.0), C64::new(0.0, 1.0)),
            )
        };
        let sigma_plus = |k: usize| {
            SparseOperator::from_triplets(
                dim,
                spin_flip(n, k, C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            )
        };
        let mut h0 = SparseOperator::zeros(dim);
        let mut v = SparseOperator::zeros(dim);
        for k in 0..n {
            h0 = h0.add(&sigma_y(k).scale(C64::new(h, 0.0)));
            v = v.add(&sigma_plus(k).scale(C64::new(rabi, 0.0)));
            if k + 1 < n {
                h0 = h0.add(&sigma_y(k).matmul(&sigma_y(k + 1)).scale(C64::new(j, 0.0)));
            }
        }
        Ok((h0, v))
    }
}

pub fn run_floquet(config: &FloquetConfig) -> Result<RunOutput> {
    if config.taus.is_empty() || config.taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParameter("periods must be positive".into()));
    }
    let (h0, v) = config.drive.operators()?;
    let base = DriveSpec::new(h0, vec![(1, v)], 2.0 * PI / config.taus[0])?;
    let mut table = CsvTable::new("floquet.csv", &["tau", "omega", "error"]);
    let mut errors = Vec::new();
    for &tau in &config.taus {
        let omega = 2.0 * PI / tau;
        let err = stroboscopic_error(&base.with_omega(omega)?, config.n_substeps)?;
        table.push_floats(&[tau, omega, err]);
        errors.push(err);
    }
    let summary = json!({ "dimension": base.dim(), "error_slope": slopes(&config.taus, &errors) });
    Ok(RunOutput::ok(vec![table], summary))
}

/// Hopping factor of a two-site link whose first site carries
/// `K cos(omega t)` with `K / omega = amplitude`.
pub fn bessel_factor(amplitude: f64, omega: f64) -> Result<C64> {
    let lattice = Lattice::chain(2, Boundary::Open)?;
    let protocol = ShakingProtocol {
        omega,
        sites: vec![
            Waveform::Sinusoid {
                amplitude: amplitude * omega,
                harmonic: 1,
                phase: 0.0,
            },
            Waveform::Constant { value: 0.0 },
        ],
    };
    Ok(shaken_hopping_factors(&protocol, &lattice)?[0])
}

pub fn run_shaking(config: &ShakingConfig) -> Result<RunOutput> {
    let lattice = Lattice::new(&config.lattice.extents, &config.lattice.boundary)?;
    let factors = shaken_hopping_factors(&config.protocol, &lattice)?;
    let mut table = CsvTable::new(
        "factors.csv",
        &["link", "origin", "target", "direction", "re", "im", "abs"],
    );
    for (k, (l, f)) in lattice.links().iter().zip(&factors).enumerate() {
        table.push(vec![
            k.to_string(),
            l.origin.to_string(),
            l.target.to_string(),
            l.direction.to_string(),
            fmt_f64(f.re),
            fmt_f64(f.im),
            fmt_f64(f.norm()),
        ]);
    }
    let mut tables = vec![table];
    if let Some(sweep) = &config.sweep {
        let mut t = CsvTable::new("bessel.csv", &["amplitude", "re", "im"]);
        for &a in &sweep.amplitudes {
            let f = bessel_factor(a, config.protocol.omega)?;
            t.push_floats(&[a, f.re, f.im]);
        }
        tables.push(t);
    }
    let summary = json!({
        "n_links": lattice.n_links(),
        "min_abs_factor": factors.iter().map(|f| f.norm()).fold(f64::INFINITY, f64::min),
        "max_abs_factor": factors.iter().map(|f| f.norm()).fold(0.0, f64::max),
    });
    Ok(RunOutput::ok(tables, summary))
}

pub fn run_hofstadter(config: &HofstadterConfig) -> Result<RunOutput> {
    let bands = hofstadter_spectrum(config.p, config.q, config.nk, config.t)?;
    let q = bands.n_bands();
    let mut header: Vec<String> = ["i", "j", "kappa", "ky"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..q).map(|b| format!("band_{b}")));
    let mut table = CsvTable::with_header("bands.csv", header);
    for j in 0..config.nk[1] {
        for i in 0..config.nk[0] {
            let (kappa, ky) = bands.k_point(i, j);
            let mut row = vec![i.to_string(), j.to_string(), fmt_f64(kappa), fmt_f64(ky)];
            row.extend((0..q).map(|b| fmt_f64(bands.energy(b, i, j))));
            table.push(row);
        }
    }
    let gaps: Vec<f64> = (0..q.saturating_sub(1))
        .map(|b| bands.min_gap_above(b))
        .collect();
    let summary =
        json!({ "alpha": config.p as f64 / config.q as f64, "n_bands": q, "min_gaps": gaps });
    Ok(RunOutput::ok(vec![table], summary))
}

pub fn run_chern(config: &HofstadterConfig) -> Result<RunOutput> {
    let bands = hofstadter_spectrum(config.p, config.q, config.nk, config.t)?;
    let cherns = chern_numbers(&bands)?;
    let q = bands.n_bands();
    let mut table = CsvTable::new("chern.csv", &["band", "chern", "min_gap_above"]);
    for (b, c) in cherns.iter().enumerate() {
        let gap = if b + 1 < q {
            fmt_f64(bands.min_gap_above(b))
        } else {
            String::new()
        };
        table.push(vec![
            b.to_string(),
            c.map_or("undefined".into(), |c| c.to_string()),
            gap,
        ]);
    }
    let defined: Vec<i32> = cherns.iter().flatten().copied().collect();
    let summary = json!({
        "alpha": config.p as f64 / config.q as f64,
        "chern_numbers": cherns,
        "all_defined": defined.len() == q,
        "sum": defined.iter().sum::<i32>(),
    });
    Ok(RunOutput::ok(vec![table], summary))
}

fn texture_field(config: &BerryConfig) -> Result<(TwoLevelField, [bool; 2])> {
    let (rabi, mass) = (config.rabi, config.mass);
    match config.texture {
        Texture::Monopole { n_theta, n_phi } => {
            let mut field = TwoLevelField::monopole(n_theta, n_phi)?;
            field.rabi = rabi;
            field.mass = mass;
            field.validate()?;
            Ok((field, [false, true]))
        }
        Texture::Vortex { n, spacing, width } => {
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "vortex width must be positive, got {width}"
                )));
            }
            let centre = 0.5 * (n as f64 - 1.0) * spacing;
            let field = TwoLevelField::from_fn([n, n], [spacing, spacing], rabi, mass, |x, y| {
                let (dx, dy) = (x - centre, y - centre);
                let r2 = dx * dx + dy * dy;
                (PI * (1.0 - (-r2 / (width * width)).exp()), dy.atan2(dx))
            })?;
            Ok((field, [false, false]))
        }
        Texture::Gradient {
            shape,
            spacing,
            theta0,
            theta_gradient,
            phi0,
            phi_gradient,
        } => {
            let field = TwoLevelField::from_fn(shape, spacing, rabi, mass, |x, y| {
                (
                    theta0 + theta_gradient[0] * x + theta_gradient[1] * y,
                    phi0 + phi_gradient[0] * x + phi_gradient[1] * y,
                )
            })?;
            Ok((field, [false, false]))
        }
    }
}

pub fn run_berry(config: &BerryConfig) -> Result<RunOutput> {
    let (field, wrap) = texture_field(config)?;
    let potentials = dressed_potentials(&field)?;
    let fd = berry_connection(&field)?;
    let flux = berry_flux(&field, wrap)?;
    let mut table = CsvTable::new(
        "potentials.csv",
        &[
            "ix", "iy", "theta", "phi", "a_x", "a_y", "berry_x", "berry_y", "scalar",
        ],
    );
    let nx = field.shape[0];
    let mut deviation: f64 = 0.0;
    for k in 0..field.len() {
        let a = [potentials.vector[0][k], potentials.vector[1][k]];
        let b = [fd[0][k], fd[1][k]];
        deviation = deviation.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        let mut row = vec![(k % nx).to_string(), (k / nx).to_string()];
        row.extend(
            [
                field.theta[k],
                field.phi[k],
                a[0],
                a[1],
                b[0],
                b[1],
                potentials.scalar[k],
            ]
            .into_iter()
            .map(fmt_f64),
        );
        table.push(row);
    }
    let summary = json!({
        "shape": field.shape,
        "max_connection_deviation": deviation,
        "berry_flux": flux,
        "flux_over_2pi": flux / (2.0 * PI),
    });
    Ok(RunOutput::ok(vec![table], summary))
}

/// Largest deviation between the lowest levels of the penalized model and
/// the second-order effective spectrum, with the effective dimension.
pub fn penalty_residual(system: &PenaltySystem, gamma: f64) -> Result<(f64, usize)> {
    let params = penalty_params(system, gamma)?;
    let basis = penalty_basis(system, &params)?;
    let (h0, generators) = penalty_parts(&params, &basis)?;
    let full = spectrum(&penalty_hamiltonian(&params, &basis)?)?;
    let eff = effective_second_order(&h0, &generators, gamma)?.spectrum();
    if eff.is_empty() {
        return Err(Error::InvalidParameter(
            "the gauge-invariant subspace is empty".into(),
        ));
    }
    Ok((max_deviation(&full[..eff.len()], &eff), eff.len()))
}

pub fn run_penalty_check(config: &PenaltyCheckConfig) -> Result<RunOutput> {
    if config.gammas.is_empty() || config.gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidParameter(
            "penalty scales must be positive".into(),
        ));
    }
    let mut table = CsvTable::new("penalty.csv", &["gamma", "residual", "kernel_dim"]);
    let mut residuals = Vec::new();
    for &gamma in &config.gammas {
        let (res, k) = penalty_residual(&config.system, gamma)?;
        table.push(vec![fmt_f64(gamma), fmt_f64(res), k.to_string()]);
        residuals.push(res);
    }
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let summary = json!({
        "residuals": residuals,
        "ratios": ratios,
        "residual_slope": slopes(&config.gammas, &residuals),
    });
    Ok(RunOutput::ok(vec![table], summary))
}

/// One coupling set of an equivalence check.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub couplings: Couplings,
    pub sector_dim: usize,
    /// `None` when the sector has lost states to the truncation.
    pub max_deviation: Option<f64>,
}

/// Coupling sets requested by a config: the explicit list, then the seeded
/// draws; a single default set when neither is given.
pub fn equivalence_couplings(config: &EquivalenceConfig) -> Vec<Couplings> {
    let mut sets = config.couplings.clone();
    if let Some(s) = config.seeded {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for _ in 0..s.count {
            let t = rng.random_range(0.5..1.5);
            let m = rng.random_range(0.0..1.0);
            let g2 = rng.random_range(0.5..2.0);
            sets.push(Couplings { t, m, g2 });
        }
    }
    if sets.is_empty() {
        sets.push(Couplings {
            t: 1.0,
            m: 0.5,
            g2: 1.0,
        });
    }
    sets
}

/// Default truncation that holds every field reachable from `L_0`.
pub fn default_cutoff(n_sites: usize, background: i32) -> u32 {
    background.unsigned_abs() + n_sites.div_ceil(2) as u32
}

pub fn equivalence_rows(config: &EquivalenceConfig) -> Result<(u32, Vec<EquivalenceRow>)> {
    let n = config.n_sites;
    if n > MAX_EQUIVALENCE_SITES {
        return Err(Error::Capacity {
            what: "equivalence-check chain sites".into(),
            required: n as u128,
            limit: MAX_EQUIVALENCE_SITES as u128,
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need N >= 2 sites, got {n}"
        )));
    }
    let cutoff = config
        .cutoff
        .unwrap_or_else(|| default_cutoff(n, config.background));
    let background = HalfInt::from_int(config.background);
    let lattice = Arc::new(Lattice::chain(n, Boundary::Open)?);
    let qubits = SectorBasis::matter_only(lattice.clone(), None)?;
    let sector = gauss_sector_1d(
        lattice,
        LinkKind::TruncatedWilson { cutoff },
        &GaussLaw::with_background(background),
        None,
    )?;
    let rows = equivalence_couplings(config)
        .into_iter()
        .map(|c| {
            let max_deviation = if sector.len() == qubits.len() {
                let encoded = SpinModelParams {
                    t: c.t,
                    m: c.m,
                    g2: c.g2,
                    n_sites: n,
                    background,
                };
                let a = spectrum(&spin_encoded_hamiltonian(&encoded, &qubits)?)?;
                let b = spectrum(&schwinger_hamiltonian(
                    &SchwingerParams::new(c.t, c.m, c.g2),
                    &sector,
                )?)?;
                Some(max_deviation(&a, &b))
            } else {
                SchwingerParams::new(c.t, c.m, c.g2).validate()?;
                None
            };
            Ok(EquivalenceRow {
                couplings: c,
                sector_dim: sector.len(),
                max_deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cutoff, rows))
}

pub fn run_equivalence(config: &EquivalenceConfig) -> Result<RunOutput> {
    if !(config.tolerance.is_finite() && config.tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let (cutoff, rows) = equivalence_rows(config)?;
    let expected = 1usize << config.n_sites;
    let mut table = CsvTable::new(
        "equivalence.csv",
        &["set", "t", "m", "g2", "sector_dim", "max_deviation", "pass"],
    );
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for (k, r) in rows.iter().enumerate() {
        let ok = r.max_deviation.is_some_and(|d| d < config.tolerance);
        pass &= ok;
        if let Some(d) = r.max_deviation {
            worst = worst.max(d);
        }
        table.push(vec![
            k.to_string(),
            fmt_f64(r.couplings.t),
            fmt_f64(r.couplings.m),
            fmt_f64(r.couplings.g2),
            r.sector_dim.to_string(),
            r.max_deviation.map_or("undefined".into(), fmt_f64),
            ok.to_string(),
        ]);
    }
    let sector_dim = rows[0].sector_dim;
    let failure = if sector_dim != expected {
        Some(format!(
            "truncation cutoff {cutoff} keeps only {sector_dim} of the {expected} gauge-invariant states; \
             raise the truncation cutoff to at least {}",
            default_cutoff(config.n_sites, config.background)
        ))
    } else if !pass {
        Some(format!(
            "max spectral deviation {worst:.3e} exceeds tolerance {:.3e}",
            config.tolerance
        ))
    } else {
        None
    };
    let summary = json!({
        "pass": failure.is_none(),
        "cutoff": cutoff,
        "sector_dim": sector_dim,
        "expected_dim": expected,
        "n_sets": rows.len(),
        "max_deviation": (sector_dim == expected).then_some(worst),
        "diagnostic": failure,
    });
    Ok(RunOutput {
        tables: vec![table],
        summary,
        failure,
    })
}
