//! Trapped-electron states on a rough surface: converts a height profile
//! plus a vertical holding field into a 1D effective potential, solves the
//! bound-state spectrum, and reports transition frequencies and dipole
//! moments. An electron pressed onto the surface by a field F rides the
//! height landscape, so V(x) = e F (h(x) - min h).

use rayon::prelude::*;

use crate::consts::{ELEMENTARY_CHARGE, ELECTRON_MASS, HBAR, PLANCK};
use crate::error::{Error, Result};
use crate::morphology::SurfaceProfile;
use crate::tridiag::lowest_eigenpairs;

/// 1D effective potential on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotential {
    /// First sample position (m).
    pub x0: f64,
    /// Sample spacing (m).
    pub dx: f64,
    /// Potential energy per sample (J); min is 0 by construction.
    pub v: Vec<f64>,
    /// Vertical holding field (V/m).
    pub holding_field: f64,
}

impl EffectivePotential {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    /// Escape threshold: the largest potential on the boundary-adjacent 5%
    /// of samples at each end. States below it count as bound.
    pub fn escape_threshold(&self) -> f64 {
        let n = self.len();
        let strip = (n / 20).max(1);
        let left = self.v[..strip].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let right = self.v[n - strip..]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        left.max(right)
    }
}

/// V(x) = e F_perp (h(x) - min h); the minimum of V is exactly 0.
pub fn effective_potential(profile: &SurfaceProfile, f_perp: f64) -> Result<EffectivePotential> {
    if !(f_perp > 0.0) || !f_perp.is_finite() {
        return Err(Error::InvalidInput(format!(
            "holding field must be positive, got {f_perp:e}"
        )));
    }
    let h_min = profile
        .heights
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let v = profile
        .heights
        .iter()
        .map(|h| ELEMENTARY_CHARGE * f_perp * (h - h_min))
        .collect();
    Ok(EffectivePotential {
        x0: profile.x0,
        dx: profile.dx,
        v,
        holding_field: f_perp,
    })
}

/// Bound-state spectrum of a 1D potential with hard walls at the ends.
#[derive(Debug, Clone)]
pub struct BoundStateSpectrum {
    /// Eigenenergies, ascending (J).
    pub energies: Vec<f64>,
    /// Wavefunctions on the full grid (including the zero end points),
    /// orthonormal under the trapezoidal inner product.
    pub wavefunctions: Vec<Vec<f64>>,
    /// Count of states below the escape threshold.
    pub n_bound: usize,
    /// Escape threshold used (J).
    pub escape_threshold: f64,
    /// Grid origin (m).
    pub x0: f64,
    /// Grid spacing (m).
    pub dx: f64,
}

impl BoundStateSpectrum {
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    /// Trapezoidal inner product <a|b> on this grid.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..a.len() {
            let w = if i == 0 || i + 1 == a.len() { 0.5 } else { 1.0 };
            acc += w * a[i] * b[i];
        }
        acc * self.dx
    }

    /// Position matrix element <a|x|b> (m).
    pub fn position_element(&self, a: usize, b: usize) -> f64 {
        let pa = &self.wavefunctions[a];
        let pb = &self.wavefunctions[b];
        let mut acc = 0.0;
        for i in 0..pa.len() {
            let w = if i == 0 || i + 1 == pa.len() { 0.5 } else { 1.0 };
            acc += w * pa[i] * self.x(i) * pb[i];
        }
        acc * self.dx
    }

    /// RMS spatial spread sqrt(<x^2> - <x>^2) of state `n` (m).
    pub fn spread(&self, n: usize) -> f64 {
        let psi = &self.wavefunctions[n];
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for i in 0..psi.len() {
            let w = if i == 0 || i + 1 == psi.len() { 0.5 } else { 1.0 };
            let p = w * psi[i] * psi[i] * self.dx;
            let x = self.x(i);
            m1 += p * x;
            m2 += p * x * x;
        }
        (m2 - m1 * m1).max(0.0).sqrt()
    }

    /// Number of interior sign changes of state `n`.
    pub fn node_count(&self, n: usize) -> usize {
        let psi = &self.wavefunctions[n];
        let max = psi.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let floor = 1e-8 * max;
        let mut nodes = 0;
        let mut last_sign = 0i8;
        for &v in psi.iter() {
            if v.abs() <= floor {
                continue;
            }
            let sign = if v > 0.0 { 1 } else { -1 };
            if last_sign != 0 && sign != last_sign {
                nodes += 1;
            }
            last_sign = sign;
        }
        nodes
    }
}

/// Relative ground-state-energy change above which the grid is declared
/// too coarse.
pub const REFINEMENT_LIMIT: f64 = 1e-3;

/// Solves the lowest `n_states` eigenpairs of
/// -(hbar^2 / 2 m_e) psi'' + V psi = E psi with hard walls at the profile
/// ends. A half-spacing refinement of the ground state validates the grid.
pub fn solve_bound_states(
    pot: &EffectivePotential,
    n_states: usize,
) -> Result<BoundStateSpectrum> {
    let spectrum = solve_eigenpairs(pot, n_states)?;

    // refinement check: halve the spacing, interpolate V, compare E0
    let refined = refine_potential(pot);
    let e0_refined = solve_lowest_energy(&refined)?;
    let e0 = spectrum.energies[0];
    let rel = (e0 - e0_refined).abs() / e0_refined.abs().max(f64::MIN_POSITIVE);
    if rel > REFINEMENT_LIMIT {
        return Err(Error::GridTooCoarse {
            rel_change: rel,
            limit: REFINEMENT_LIMIT,
        });
    }

    if spectrum.n_bound == 0 {
        return Err(Error::NoBoundState);
    }
    Ok(spectrum)
}

fn hamiltonian(pot: &EffectivePotential) -> (Vec<f64>, Vec<f64>) {
    let n_interior = pot.len() - 2;
    let kin = HBAR * HBAR / (2.0 * ELECTRON_MASS * pot.dx * pot.dx);
    let diag: Vec<f64> = (0..n_interior).map(|i| 2.0 * kin + pot.v[i + 1]).collect();
    let off = vec![-kin; n_interior - 1];
    (diag, off)
}

fn solve_eigenpairs(pot: &EffectivePotential, n_states: usize) -> Result<BoundStateSpectrum> {
    if pot.len() < 8 {
        return Err(Error::TooFewSamples {
            found: pot.len(),
            required: 8,
        });
    }
    let (diag, off) = hamiltonian(pot);
    let k = n_states.max(1).min(diag.len());
    let (energies, vectors) = lowest_eigenpairs(&diag, &off, k);

    // l2-normalized interior vectors become unit-norm wavefunctions under
    // the trapezoidal product after dividing by sqrt(dx)
    let inv_sqrt_dx = 1.0 / pot.dx.sqrt();
    let wavefunctions: Vec<Vec<f64>> = vectors
        .into_iter()
        .map(|v| {
            let mut psi = Vec::with_capacity(pot.len());
            psi.push(0.0);
            psi.extend(v.into_iter().map(|c| c * inv_sqrt_dx));
            psi.push(0.0);
            psi
        })
        .collect();

    let threshold = pot.escape_threshold();
    let n_bound = energies.iter().filter(|&&e| e < threshold).count();
    Ok(BoundStateSpectrum {
        energies,
        wavefunctions,
        n_bound,
        escape_threshold: threshold,
        x0: pot.x0,
        dx: pot.dx,
    })
}

fn refine_potential(pot: &EffectivePotential) -> EffectivePotential {
    let n = pot.len();
    let mut v = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        v.push(pot.v[i]);
        v.push(0.5 * (pot.v[i] + pot.v[i + 1]));
    }
    v.push(pot.v[n - 1]);
    EffectivePotential {
        x0: pot.x0,
        dx: 0.5 * pot.dx,
        v,
        holding_field: pot.holding_field,
    }
}

fn solve_lowest_energy(pot: &EffectivePotential) -> Result<f64> {
    let (diag, off) = hamiltonian(pot);
    let (energies, _) = lowest_eigenpairs(&diag, &off, 1);
    Ok(energies[0])
}

/// As [`solve_bound_states`], but when the refinement check trips, the
/// potential is interpolated onto successively halved spacings (up to
/// `max_refinements`) until the ground state is grid-converged. Tight states
/// at strong holding fields need this on AFM-pitch profiles.
pub fn solve_bound_states_refining(
    pot: &EffectivePotential,
    n_states: usize,
    max_refinements: usize,
) -> Result<BoundStateSpectrum> {
    let mut current = pot.clone();
    for _ in 0..=max_refinements {
        match solve_bound_states(&current, n_states) {
            Err(Error::GridTooCoarse { .. }) => current = refine_potential(&current),
            other => return other,
        }
    }
    solve_bound_states(&current, n_states)
}

/// Ground-to-first-excited transition summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionReport {
    /// Transition frequency (E1 - E0)/h (Hz).
    pub f01: f64,
    /// Transition dipole moment e |<0|x|1>| (C·m).
    pub mu01: f64,
    /// True when f01 lies in the 1-10 GHz band.
    pub in_ghz_band: bool,
}

/// GHz observation band shared by the transition report and the
/// morphology-contrast scan.
pub const GHZ_BAND: (f64, f64) = (1e9, 10e9);

pub fn transition_report(spectrum: &BoundStateSpectrum) -> Result<TransitionReport> {
    if spectrum.n_bound < 2 {
        return Err(Error::NotEnoughBoundStates(spectrum.n_bound));
    }
    let f01 = (spectrum.energies[1] - spectrum.energies[0]) / PLANCK;
    let mu01 = ELEMENTARY_CHARGE * spectrum.position_element(0, 1).abs();
    Ok(TransitionReport {
        f01,
        mu01,
        in_ghz_band: f01 >= GHZ_BAND.0 && f01 <= GHZ_BAND.1,
    })
}

/// Options for the Si-vs-sapphire trapping contrast.
#[derive(Debug, Clone)]
pub struct ContrastOptions {
    /// Holding-field sweep values (V/m).
    pub f_perp: Vec<f64>,
    /// States computed per solve.
    pub n_states: usize,
    /// Minimum transition dipole for a pair to count as a trapped,
    /// dipole-active state (C·m). Filters accidental near-degeneracies of
    /// states localized in distant, unrelated traps, whose overlap dipole
    /// vanishes.
    pub min_dipole: f64,
    /// Maximum RMS spread for a state to count as confined (m). Filters
    /// quasi-free states extended across the whole profile, which form
    /// GHz-spaced pairs on any surface but are not trapped by features.
    pub max_spread: f64,
}

impl Default for ContrastOptions {
    fn default() -> Self {
        Self {
            f_perp: log_spaced(1e4, 1e6, 9),
            n_states: 20,
            min_dipole: crate::consts::E_ANGSTROM,
            max_spread: 500e-9,
        }
    }
}

/// Logarithmically spaced sweep values.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// One (profile, holding field) evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ContrastEntry {
    /// Index of the profile within its ensemble.
    pub profile_index: usize,
    /// Holding field (V/m).
    pub f_perp: f64,
    /// Bound states found.
    pub n_bound: usize,
    /// Global ground-transition frequency, when two bound states exist (Hz).
    pub f01: Option<f64>,
    /// Global ground-transition dipole (C·m).
    pub mu01: Option<f64>,
    /// True when some bound, dipole-active pair lies in the GHz band.
    pub in_band: bool,
}

/// Contrast summary over two profile ensembles.
#[derive(Debug, Clone)]
pub struct ContrastSummary {
    pub si_like: Vec<ContrastEntry>,
    pub sapphire_like: Vec<ContrastEntry>,
    /// Fraction of Si-like profiles with an in-band field value.
    pub si_seed_fraction: f64,
    /// Fraction of sapphire-like profiles with an in-band field value.
    pub sapphire_seed_fraction: f64,
    /// True when the Si-like ensemble reaches GHz-band trapped states at
    /// field values where the sapphire-like ensemble has none.
    pub contrast: bool,
    /// True when either ensemble is empty.
    pub no_samples: bool,
}

/// Evaluates one profile at one field: spectrum, global transition, and the
/// in-band scan over confined, dipole-active bound pairs.
pub fn evaluate_profile(
    profile: &SurfaceProfile,
    profile_index: usize,
    f_perp: f64,
    opts: &ContrastOptions,
) -> Result<ContrastEntry> {
    let pot = effective_potential(profile, f_perp)?;
    let spectrum = match solve_bound_states_refining(&pot, opts.n_states, 4) {
        Ok(s) => s,
        Err(Error::NoBoundState) => {
            return Ok(ContrastEntry {
                profile_index,
                f_perp,
                n_bound: 0,
                f01: None,
                mu01: None,
                in_band: false,
            })
        }
        Err(e) => return Err(e),
    };
    let (f01, mu01) = if spectrum.n_bound >= 2 {
        let report = transition_report(&spectrum)?;
        (Some(report.f01), Some(report.mu01))
    } else {
        (None, None)
    };
    Ok(ContrastEntry {
        profile_index,
        f_perp,
        n_bound: spectrum.n_bound,
        f01,
        mu01,
        in_band: has_observable_band_transition(&spectrum, opts),
    })
}

/// True when the spectrum contains an observable GHz-band transition of a
/// feature-trapped electron:
///   - the initial state is a confined local ground (no dipole-allowed
///     decay path to lower energy, so a cold electron actually rests there);
///   - the partner is bound, confined, and centered within the pair's
///     combined spread (same trap: inter-trap pairs couple only through
///     tunneling tails and are not trapped-state transitions);
///   - the transition lies in the GHz band with a dipole above threshold.
pub fn has_observable_band_transition(
    spectrum: &BoundStateSpectrum,
    opts: &ContrastOptions,
) -> bool {
    let n = spectrum.energies.len();
    let confined: Vec<bool> = (0..n)
        .map(|i| spectrum.spread(i) <= opts.max_spread)
        .collect();
    let centers: Vec<f64> = (0..n)
        .map(|i| {
            let psi = &spectrum.wavefunctions[i];
            let mut m = 0.0;
            for k in 0..psi.len() {
                let w = if k == 0 || k + 1 == psi.len() { 0.5 } else { 1.0 };
                m += w * psi[k] * psi[k] * spectrum.dx * spectrum.x(k);
            }
            m
        })
        .collect();
    let dipole = |i: usize, j: usize| -> f64 {
        ELEMENTARY_CHARGE * spectrum.position_element(i, j).abs()
    };
    for i in 0..spectrum.n_bound {
        if !confined[i] {
            continue;
        }
        // local ground: no dipole-coupled state below
        if (0..i).any(|k| dipole(k, i) >= opts.min_dipole) {
            continue;
        }
        for j in i + 1..spectrum.n_bound {
            if !confined[j] {
                continue;
            }
            let f = (spectrum.energies[j] - spectrum.energies[i]) / PLANCK;
            if f < GHZ_BAND.0 || f > GHZ_BAND.1 {
                continue;
            }
            let same_trap =
                (centers[i] - centers[j]).abs() <= spectrum.spread(i) + spectrum.spread(j);
            if same_trap && dipole(i, j) >= opts.min_dipole {
                return true;
            }
        }
    }
    false
}

/// Runs the trapping contrast between a Si-like and a sapphire-like profile
/// ensemble over a holding-field sweep.
pub fn morphology_contrast(
    si_like: &[SurfaceProfile],
    sapphire_like: &[SurfaceProfile],
    opts: &ContrastOptions,
) -> Result<ContrastSummary> {
    let run = |profiles: &[SurfaceProfile]| -> Result<Vec<ContrastEntry>> {
        let jobs: Vec<(usize, f64)> = profiles
            .iter()
            .enumerate()
            .flat_map(|(i, _)| opts.f_perp.iter().map(move |&f| (i, f)))
            .collect();
        let mut entries = jobs
            .par_iter()
            .map(|&(i, f)| evaluate_profile(&profiles[i], i, f, opts))
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by(|a, b| {
            a.profile_index
                .cmp(&b.profile_index)
                .then(a.f_perp.partial_cmp(&b.f_perp).unwrap())
        });
        Ok(entries)
    };
    let si_entries = run(si_like)?;
    let sapphire_entries = run(sapphire_like)?;

    let no_samples = si_like.is_empty() || sapphire_like.is_empty();
    let seed_fraction = |entries: &[ContrastEntry], count: usize| -> f64 {
        if count == 0 {
            return 0.0;
        }
        let mut hit = vec![false; count];
        for e in entries {
            if e.in_band {
                hit[e.profile_index] = true;
            }
        }
        hit.iter().filter(|&&h| h).count() as f64 / count as f64
    };
    let si_seed_fraction = seed_fraction(&si_entries, si_like.len());
    let sapphire_seed_fraction = seed_fraction(&sapphire_entries, sapphire_like.len());

    // field values where the Si ensemble reaches the band but sapphire never
    let si_fields: Vec<f64> = opts
        .f_perp
        .iter()
        .cloned()
        .filter(|&f| si_entries.iter().any(|e| e.f_perp == f && e.in_band))
        .collect();
    let contrast = !si_fields.is_empty()
        && si_fields
            .iter()
            .all(|&f| !sapphire_entries.iter().any(|e| e.f_perp == f && e.in_band));

    Ok(ContrastSummary {
        si_like: si_entries,
        sapphire_like: sapphire_entries,
        si_seed_fraction,
        sapphire_seed_fraction,
        contrast,
        no_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::{
        grow_film, synth_substrate, FilmGrowthParams, ProfileKind, SapphireParams, SiEtchParams,
        SubstrateKind, SynthWindow,
    };

    fn flat_profile(n: usize) -> SurfaceProfile {
        SurfaceProfile::new(0.0, 2e-9, vec![0.0; n], ProfileKind::Substrate, None).unwrap()
    }

    /// Harmonic potential with angular frequency omega on +-span.
    fn harmonic(omega: f64, span: f64, n: usize) -> EffectivePotential {
        let dx = 2.0 * span / (n - 1) as f64;
        let v = (0..n)
            .map(|i| {
                let x = -span + dx * i as f64;
                0.5 * ELECTRON_MASS * omega * omega * x * x
            })
            .collect();
        EffectivePotential {
            x0: -span,
            dx,
            v,
            holding_field: 1.0,
        }
    }

    #[test]
    fn flat_profile_gives_zero_potential_and_no_bound_state() {
        let profile = flat_profile(512);
        let pot = effective_potential(&profile, 1e5).unwrap();
        assert!(pot.v.iter().all(|&v| v == 0.0));
        assert!(matches!(
            solve_bound_states(&pot, 5),
            Err(Error::NoBoundState)
        ));
    }

    #[test]
    fn parabolic_valley_builds_harmonic_potential() {
        // h(x) = k x^2 / (2 e F) gives V = k x^2 / 2 exactly
        let k = 1e-3;
        let f = 2e5;
        let n = 301;
        let dx = 2e-9;
        let heights: Vec<f64> = (0..n)
            .map(|i| {
                let x = dx * (i as f64 - 150.0);
                0.5 * k * x * x / (ELEMENTARY_CHARGE * f)
            })
            .collect();
        let profile = SurfaceProfile::new(-150.0 * dx, dx, heights, ProfileKind::Substrate, None)
            .unwrap();
        let pot = effective_potential(&profile, f).unwrap();
        for i in 0..n {
            let x = pot.x(i);
            assert!((pot.v[i] - 0.5 * k * x * x).abs() < 1e-12 * pot.v[n - 1].max(1e-300));
        }
    }

    #[test]
    fn etched_valley_well_depth_is_e_f_times_depth() {
        // idealized single valley, 200 nm wide, 25 nm deep, F = 1e5 V/m
        let n = 1001;
        let dx = 2e-9;
        let heights: Vec<f64> = (0..n)
            .map(|i| {
                let x = dx * i as f64;
                if (x - 1e-6).abs() < 100e-9 {
                    -25e-9
                } else {
                    0.0
                }
            })
            .collect();
        let profile = SurfaceProfile::new(0.0, dx, heights, ProfileKind::Substrate, None).unwrap();
        let pot = effective_potential(&profile, 1e5).unwrap();
        let depth = pot.v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let expect = ELEMENTARY_CHARGE * 1e5 * 25e-9; // 2.5 meV
        assert!((depth - expect).abs() < 1e-12 * expect);
        assert!((expect / ELEMENTARY_CHARGE - 2.5e-3).abs() < 1e-15);
    }

    #[test]
    fn harmonic_level_spacing_matches_analytic() {
        let omega = 2.0 * std::f64::consts::PI * 5e9; // hbar omega = h x 5 GHz
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let pot = harmonic(omega, 8.0 * a, 1601);
        let spectrum = solve_bound_states(&pot, 6).unwrap();
        for w in spectrum.energies.windows(2) {
            let spacing = w[1] - w[0];
            let expect = HBAR * omega;
            assert!(
                (spacing - expect).abs() / expect < 1e-4,
                "spacing off by {:e}",
                (spacing - expect).abs() / expect
            );
        }
    }

    #[test]
    fn infinite_well_energies_scale_as_n_squared() {
        let n = 2001;
        let l = 4e-7;
        let dx = l / (n - 1) as f64;
        let pot = EffectivePotential {
            x0: 0.0,
            dx,
            v: vec![0.0; n],
            holding_field: 1.0,
        };
        let spectrum = solve_eigenpairs(&pot, 5).unwrap();
        let e1 = spectrum.energies[0];
        for (j, &e) in spectrum.energies.iter().enumerate() {
            let expect = ((j + 1) * (j + 1)) as f64;
            let ratio = e / e1;
            assert!(
                (ratio - expect).abs() / expect < 1e-4,
                "E_{}/E_1 = {ratio} vs {expect}",
                j + 1
            );
        }
    }

    #[test]
    fn harmonic_dipole_matrix_element() {
        let omega = 2.0 * std::f64::consts::PI * 5e9;
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let pot = harmonic(omega, 8.0 * a, 1601);
        let spectrum = solve_bound_states(&pot, 3).unwrap();
        let x01 = spectrum.position_element(0, 1).abs();
        let expect = (HBAR / (2.0 * ELECTRON_MASS * omega)).sqrt();
        assert!(
            (x01 - expect).abs() / expect < 1e-4,
            "x01 = {x01:e} vs {expect:e}"
        );
        let report = transition_report(&spectrum).unwrap();
        assert!((report.mu01 - ELEMENTARY_CHARGE * expect).abs() < 1e-4 * report.mu01);
        assert!((report.f01 - 5e9).abs() / 5e9 < 1e-4);
        assert!(report.in_ghz_band);
    }

    #[test]
    fn nodes_orthonormality_and_residual() {
        let omega = 2.0 * std::f64::consts::PI * 4e9;
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let pot = harmonic(omega, 9.0 * a, 1201);
        let spectrum = solve_bound_states(&pot, 8).unwrap();
        for n in 0..8 {
            assert_eq!(spectrum.node_count(n), n, "node count of state {n}");
        }
        for i in 0..8 {
            for j in 0..8 {
                let d = spectrum.inner(&spectrum.wavefunctions[i], &spectrum.wavefunctions[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (d - expect).abs() < 1e-8,
                    "<psi_{i}|psi_{j}> = {d}"
                );
            }
        }
        // matrix-level eigenpair residual, relative to the Hamiltonian scale
        let (diag, off) = hamiltonian(&pot);
        let scale = diag.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
            + 2.0 * off[0].abs();
        for (j, e) in spectrum.energies.iter().enumerate() {
            let psi = &spectrum.wavefunctions[j][1..pot.len() - 1];
            let mut acc = 0.0;
            let mut norm = 0.0;
            for i in 0..diag.len() {
                let mut r = (diag[i] - e) * psi[i];
                if i > 0 {
                    r += off[i - 1] * psi[i - 1];
                }
                if i + 1 < diag.len() {
                    r += off[i] * psi[i + 1];
                }
                acc += r * r;
                norm += psi[i] * psi[i];
            }
            let rel = (acc / norm).sqrt() / scale;
            assert!(rel <= 1e-8, "state {j}: residual {rel:e}");
        }
    }

    #[test]
    fn variational_bound_from_gaussian_trials() {
        let omega = 2.0 * std::f64::consts::PI * 3e9;
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let pot = harmonic(omega, 8.0 * a, 901);
        let spectrum = solve_bound_states(&pot, 1).unwrap();
        let (diag, off) = hamiltonian(&pot);
        for width_factor in [0.5, 0.8, 1.0, 1.3, 2.0] {
            let w = width_factor * a;
            let trial: Vec<f64> = (1..pot.len() - 1)
                .map(|i| {
                    let x = pot.x(i);
                    (-0.5 * (x / w) * (x / w)).exp()
                })
                .collect();
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..diag.len() {
                let mut h = diag[i] * trial[i];
                if i > 0 {
                    h += off[i - 1] * trial[i - 1];
                }
                if i + 1 < diag.len() {
                    h += off[i] * trial[i + 1];
                }
                num += trial[i] * h;
                den += trial[i] * trial[i];
            }
            let rayleigh = num / den;
            assert!(
                spectrum.energies[0] <= rayleigh + 1e-12 * rayleigh.abs(),
                "E0 exceeds Rayleigh quotient at width {width_factor}"
            );
        }
    }

    #[test]
    fn f01_scales_as_sqrt_holding_field() {
        // fixed parabolic valley profile; f01 ~ sqrt(F)
        let n = 1201;
        let dx = 1e-9;
        let span = dx * (n - 1) as f64 / 2.0;
        let curvature = 4e6; // h'' (1/m)
        let heights: Vec<f64> = (0..n)
            .map(|i| {
                let x = -span + dx * i as f64;
                0.5 * curvature * x * x
            })
            .collect();
        let profile =
            SurfaceProfile::new(-span, dx, heights, ProfileKind::Substrate, None).unwrap();
        let f_lo = 3e4;
        let f_hi = 3e5;
        let f01 = |f: f64| {
            let pot = effective_potential(&profile, f).unwrap();
            let s = solve_bound_states(&pot, 2).unwrap();
            (s.energies[1] - s.energies[0]) / PLANCK
        };
        let ratio = f01(f_hi) / f01(f_lo);
        let expect = (f_hi / f_lo).sqrt();
        assert!(
            (ratio - expect).abs() / expect < 0.02,
            "scaling ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn thomas_reiche_kuhn_partial_sum() {
        let omega = 2.0 * std::f64::consts::PI * 5e9;
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let pot = harmonic(omega, 9.0 * a, 1401);
        let spectrum = solve_bound_states(&pot, 12).unwrap();
        let mut sum = 0.0;
        for n in 1..spectrum.energies.len() {
            let de = spectrum.energies[n] - spectrum.energies[0];
            let x0n = spectrum.position_element(0, n);
            sum += 2.0 * ELECTRON_MASS * de * x0n * x0n / (HBAR * HBAR);
        }
        assert!(sum <= 1.0 + 1e-6, "TRK partial sum {sum}");
        assert!(sum > 0.99, "TRK partial sum suspiciously small: {sum}");
    }

    #[test]
    fn distant_double_well_splitting_collapses() {
        // two identical parabolic wells far apart: tunnel splitting far
        // below the single-well level spacing
        let omega = 2.0 * std::f64::consts::PI * 5e9;
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let sep = 14.0 * a;
        let span = sep + 8.0 * a;
        let n = 3001;
        let dx = 2.0 * span / (n - 1) as f64;
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let x = -span + dx * i as f64;
                let d1 = x - 0.5 * sep;
                let d2 = x + 0.5 * sep;
                0.5 * ELECTRON_MASS * omega * omega * (d1 * d1).min(d2 * d2)
            })
            .collect();
        let pot = EffectivePotential {
            x0: -span,
            dx,
            v,
            holding_field: 1.0,
        };
        let spectrum = solve_bound_states(&pot, 4).unwrap();
        let splitting = spectrum.energies[1] - spectrum.energies[0];
        let single_well_spacing = HBAR * omega;
        assert!(
            splitting < 1e-3 * single_well_spacing,
            "splitting {:e} vs spacing {:e}",
            splitting,
            single_well_spacing
        );
    }

    #[test]
    fn coarse_grid_is_detected() {
        let omega = 2.0 * std::f64::consts::PI * 40e9; // tight state
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        // spacing of a/3 badly under-resolves the ground state
        let n = 201;
        let pot = harmonic(omega, a * (n - 1) as f64 / 6.0, n);
        assert!(matches!(
            solve_bound_states(&pot, 2),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn single_bound_state_rejected_by_transition_report() {
        // parabolic well capped at 1.0 hbar omega: only the ground state
        // sits below the escape threshold
        let omega = 2.0 * std::f64::consts::PI * 5e9;
        let a = (HBAR / (ELECTRON_MASS * omega)).sqrt();
        let span = 10.0 * a;
        let n = 1501;
        let dx = 2.0 * span / (n - 1) as f64;
        let cap = HBAR * omega;
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let x = -span + dx * i as f64;
                (0.5 * ELECTRON_MASS * omega * omega * x * x).min(cap)
            })
            .collect();
        let pot = EffectivePotential {
            x0: -span,
            dx,
            v,
            holding_field: 1.0,
        };
        let spectrum = solve_bound_states(&pot, 6).unwrap();
        assert_eq!(spectrum.n_bound, 1);
        assert!(matches!(
            transition_report(&spectrum),
            Err(Error::NotEnoughBoundStates(1))
        ));
    }

    fn si_combined(seed: u64) -> SurfaceProfile {
        let sub = synth_substrate(
            SubstrateKind::SiEtched,
            &SynthWindow::default(),
            &SiEtchParams::default(),
            &SapphireParams::default(),
            seed,
        )
        .unwrap();
        grow_film(&sub, &FilmGrowthParams::default(), seed ^ 0xF11A).unwrap()
    }

    fn sapphire_combined(seed: u64) -> SurfaceProfile {
        let sub = synth_substrate(
            SubstrateKind::SapphireSmooth,
            &SynthWindow::default(),
            &SiEtchParams::default(),
            &SapphireParams::default(),
            seed,
        )
        .unwrap();
        grow_film(&sub, &FilmGrowthParams::default(), seed ^ 0xF11A).unwrap()
    }

    /// One idealized etched valley (200 nm floor, 25 nm deep, 15 nm walls)
    /// centered in a flat substrate.
    fn single_valley_profile() -> SurfaceProfile {
        let n = 1001;
        let dx = 2e-9;
        let center = dx * (n - 1) as f64 / 2.0;
        let (floor_half, wall) = (100e-9, 15e-9);
        let depth = 25e-9;
        let heights: Vec<f64> = (0..n)
            .map(|i| {
                let r = (dx * i as f64 - center).abs();
                if r <= floor_half {
                    -depth
                } else if r <= floor_half + wall {
                    -depth * (1.0 - (r - floor_half) / wall)
                } else {
                    0.0
                }
            })
            .collect();
        SurfaceProfile::new(0.0, dx, heights, ProfileKind::Substrate, None).unwrap()
    }

    #[test]
    fn si_valley_with_film_reaches_ghz_band_in_field_sweep() {
        let profile = grow_film(
            &single_valley_profile(),
            &FilmGrowthParams::default(),
            3,
        )
        .unwrap();
        let mut found = false;
        for f in log_spaced(1e4, 1e6, 9) {
            let pot = effective_potential(&profile, f).unwrap();
            let Ok(spectrum) = solve_bound_states_refining(&pot, 20, 4) else {
                continue;
            };
            if spectrum.n_bound < 2 {
                continue;
            }
            let report = transition_report(&spectrum).unwrap();
            if report.in_ghz_band {
                found = true;
                // dipole within one order of magnitude of 30 eA
                let mu_ea = crate::consts::dipole_to_e_angstrom(report.mu01);
                assert!(
                    (3.0..=300.0).contains(&mu_ea),
                    "mu01 = {mu_ea:.1} eA at F = {f:.2e}"
                );
                break;
            }
        }
        assert!(found, "no GHz-band transition over the field sweep");
    }

    #[test]
    fn identical_ensembles_give_zero_contrast() {
        let profiles = vec![si_combined(1)];
        let opts = ContrastOptions {
            f_perp: log_spaced(1e4, 1e6, 5),
            ..ContrastOptions::default()
        };
        let summary = morphology_contrast(&profiles, &profiles, &opts).unwrap();
        assert!(!summary.contrast);
        assert_eq!(summary.si_seed_fraction, summary.sapphire_seed_fraction);
    }

    #[test]
    fn contrast_smoke_over_small_ensemble() {
        let si: Vec<SurfaceProfile> = (0..3).map(si_combined).collect();
        let sapphire: Vec<SurfaceProfile> = (0..3).map(sapphire_combined).collect();
        let opts = ContrastOptions {
            f_perp: log_spaced(1e4, 1e6, 5),
            ..ContrastOptions::default()
        };
        let summary = morphology_contrast(&si, &sapphire, &opts).unwrap();
        assert!(!summary.no_samples);
        assert!(summary.si_seed_fraction > 0.0, "no Si seed reached the band");
    }

    #[test]
    fn empty_ensemble_flags_no_samples() {
        let sapphire = vec![sapphire_combined(0)];
        let summary =
            morphology_contrast(&[], &sapphire, &ContrastOptions::default()).unwrap();
        assert!(summary.no_samples);
        assert!(!summary.contrast);
    }
}
