//! Per-length capacitances, quasi-TEM characteristic impedance, zero-point
//! voltage, and the electron-resonator coupling ratio; drives the
//! trench-depth sweep.

use rayon::prelude::*;

use crate::consts::{HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::fieldsolver::{
    field_energy, sample_surface_line, solve_laplace, trench_average_ex, PotentialField,
    RegionTag, SolveOptions,
};
use crate::geometry::{rasterize, CrossSectionGeometry, GridSpec, Mode, ModeDrive, PermittivityGrid};

/// Capacitance per unit length from the stored-energy method:
/// C = 2W / V^2 with W the field energy per unit length and V the drive
/// magnitude.
pub fn capacitance_per_length(grid: &PermittivityGrid, field: &PotentialField) -> f64 {
    let v = field.drive.magnitude();
    2.0 * field_energy(grid, field) / (v * v)
}

/// Quasi-TEM characteristic impedance from the dielectric and vacuum
/// per-length capacitances: Z = 1 / (c sqrt(C C0)), using L = 1/(c^2 C0).
pub fn characteristic_impedance(c: f64, c0: f64) -> Result<f64> {
    if !(c0 > 0.0) || c < c0 {
        return Err(Error::InvalidCapacitance { c, c0 });
    }
    Ok(1.0 / (SPEED_OF_LIGHT * (c * c0).sqrt()))
}

/// Inputs for the coupling-ratio estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingInputs {
    /// Electric dipole moment of the trapped-state transition (C·m).
    pub mu: f64,
    /// Resonance angular frequency (rad/s).
    pub omega: f64,
    /// Resonator linewidth (rad/s).
    pub kappa: f64,
    /// Trench-averaged lateral field per volt (1/m).
    pub etilde: f64,
    /// Mode characteristic impedance (Ohm).
    pub z_r: f64,
}

/// Ratio of coupling strength to resonance frequency:
/// g/omega = mu * Etilde * sqrt(2 Z_r / (pi hbar)).
pub fn coupling_ratio(inputs: &CouplingInputs) -> f64 {
    inputs.mu * inputs.etilde * (2.0 * inputs.z_r / (std::f64::consts::PI * HBAR)).sqrt()
}

/// Anti-node voltage of zero-point fluctuations,
/// V_ZPF = omega * sqrt(2 hbar Z_r / pi).
pub fn vzpf(omega: f64, z_r: f64) -> f64 {
    omega * (2.0 * HBAR * z_r / std::f64::consts::PI).sqrt()
}

/// One point of the trench-depth sweep: both trench regions of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub mode: Mode,
    /// Trench depth (m).
    pub trench_depth: f64,
    /// Trench-averaged |E_x| per volt, middle trench (1/m).
    pub etilde_middle: f64,
    /// Trench-averaged |E_x| per volt, side trenches (1/m).
    pub etilde_side: f64,
    /// Per-length capacitance with dielectrics (F/m).
    pub c: f64,
    /// Per-length vacuum capacitance (F/m).
    pub c0: f64,
    /// Characteristic impedance (Ohm).
    pub z_r: f64,
    /// g/omega normalized to the sweep maximum, middle trench.
    pub g_norm_middle: f64,
    /// g/omega normalized to the sweep maximum, side trenches.
    pub g_norm_side: f64,
}

/// Sweep controls for [`depth_sweep`].
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Trench depths (m), positive and sorted ascending.
    pub depths: Vec<f64>,
    pub modes: Vec<Mode>,
    pub grid: GridSpec,
    pub solve: SolveOptions,
    /// Field sampling offset above the exposed surface (m).
    pub sample_height: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            depths: vec![50e-9, 100e-9, 200e-9, 400e-9, 700e-9, 1000e-9],
            modes: vec![Mode::Common, Mode::Differential],
            grid: GridSpec::default(),
            solve: SolveOptions::default(),
            sample_height: 5e-9,
        }
    }
}

/// Solves one (geometry, mode) point: dielectric and vacuum solves, field
/// sampling, capacitances, and impedance. The normalized couplings are
/// filled in by the sweep.
pub fn solve_mode(
    geom: &CrossSectionGeometry,
    mode: Mode,
    grid_spec: &GridSpec,
    solve: &SolveOptions,
    sample_height: f64,
) -> Result<ModeSolution> {
    let grid = rasterize(geom, grid_spec)?;
    let drive = ModeDrive::for_mode(mode);
    let field = solve_laplace(&grid, &drive, solve)?;
    let vacuum = grid.vacuum_clone();
    let field0 = solve_laplace(&vacuum, &drive, solve)?;

    let c = capacitance_per_length(&grid, &field);
    let c0 = capacitance_per_length(&vacuum, &field0);
    let z_r = characteristic_impedance(c, c0)?;

    let sample = sample_surface_line(geom, &grid, &field, sample_height)?;
    let etilde_middle = trench_average_ex(&sample, RegionTag::MiddleTrench)?;
    let etilde_side = trench_average_ex(&sample, RegionTag::SideTrench)?;

    Ok(ModeSolution {
        mode,
        trench_depth: geom.trench_depth,
        etilde_middle,
        etilde_side,
        c,
        c0,
        z_r,
        g_norm_middle: 0.0,
        g_norm_side: 0.0,
    })
}

/// Runs the trench-depth sweep over all (depth, mode) pairs in parallel and
/// normalizes g/omega to the sweep maximum. Results are sorted by
/// (depth, mode).
pub fn depth_sweep(base: &CrossSectionGeometry, cfg: &SweepConfig) -> Result<Vec<ModeSolution>> {
    if cfg.depths.is_empty() || cfg.modes.is_empty() {
        return Err(Error::InvalidInput(
            "depth sweep needs at least one depth and one mode".into(),
        ));
    }
    if cfg.depths.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidInput("trench depths must be positive".into()));
    }
    if cfg.depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "trench depths must be strictly ascending".into(),
        ));
    }

    let points: Vec<(f64, Mode)> = cfg
        .depths
        .iter()
        .flat_map(|&t| cfg.modes.iter().map(move |&m| (t, m)))
        .collect();

    let mut solutions = points
        .par_iter()
        .map(|&(t, mode)| {
            let geom = base.clone().with_trench_depth(t);
            solve_mode(&geom, mode, &cfg.grid, &cfg.solve, cfg.sample_height).map_err(|e| {
                Error::SweepPoint {
                    t_m: t,
                    mode: mode.as_str(),
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // normalize the coupling factor Etilde * sqrt(2 Z_r / (pi hbar)) over the
    // whole sweep; the dipole moment is common to every point and cancels
    let factor = |etilde: f64, z_r: f64| etilde * (2.0 * z_r / (std::f64::consts::PI * HBAR)).sqrt();
    let max = solutions
        .iter()
        .flat_map(|s| [factor(s.etilde_middle, s.z_r), factor(s.etilde_side, s.z_r)])
        .fold(0.0f64, f64::max);
    for s in &mut solutions {
        s.g_norm_middle = factor(s.etilde_middle, s.z_r) / max;
        s.g_norm_side = factor(s.etilde_side, s.z_r) / max;
    }

    solutions.sort_by(|a, b| {
        a.trench_depth
            .partial_cmp(&b.trench_depth)
            .unwrap()
            .then(a.mode.cmp(&b.mode))
    });
    Ok(solutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::{E_ANGSTROM, EPSILON_0};
    use crate::geometry::NodeLabel;

    #[test]
    fn parallel_plate_capacitance_matches_analytic() {
        // top plate 1 V, bottom grounded, open sides: C = eps0 eps_r Lx / d
        let (lx, d, eps_r) = (2e-6, 1e-6, 3.0);
        let nx = 21;
        let ny = 41;
        let xs: Vec<f64> = (0..nx).map(|i| lx * i as f64 / (nx - 1) as f64).collect();
        let ys: Vec<f64> = (0..ny).map(|j| d * j as f64 / (ny - 1) as f64).collect();
        let mut labels = vec![NodeLabel::Free; nx * ny];
        for i in 0..nx {
            labels[i] = NodeLabel::Ground;
            labels[(ny - 1) * nx + i] = NodeLabel::TraceLeft;
        }
        let grid = PermittivityGrid {
            xs,
            ys,
            eps: vec![eps_r; (nx - 1) * (ny - 1)],
            labels,
        };
        let field = solve_laplace(
            &grid,
            &ModeDrive::common(),
            &SolveOptions {
                tol: 1e-10,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let c = capacitance_per_length(&grid, &field);
        let expect = EPSILON_0 * eps_r * lx / d;
        assert!(
            (c - expect).abs() / expect < 1e-2,
            "C = {c:.6e} vs {expect:.6e}"
        );
    }

    #[test]
    fn vacuum_limit_impedance() {
        let c0 = 1e-10;
        let z = characteristic_impedance(c0, c0).unwrap();
        assert!((z - 1.0 / (SPEED_OF_LIGHT * c0)).abs() < 1e-12 * z);
    }

    #[test]
    fn dielectric_below_vacuum_is_rejected() {
        assert!(matches!(
            characteristic_impedance(0.9e-10, 1e-10),
            Err(Error::InvalidCapacitance { .. })
        ));
    }

    #[test]
    fn coupling_zero_dipole_and_sqrt_scaling() {
        let base = CouplingInputs {
            mu: 30.0 * E_ANGSTROM,
            omega: 2.0 * std::f64::consts::PI * 4.9251e9,
            kappa: 2.0 * std::f64::consts::PI * 154.2e3,
            etilde: 4e5,
            z_r: 75.0,
        };
        assert_eq!(coupling_ratio(&CouplingInputs { mu: 0.0, ..base }), 0.0);
        let doubled = coupling_ratio(&CouplingInputs {
            z_r: 2.0 * base.z_r,
            ..base
        });
        let ratio = doubled / coupling_ratio(&base);
        assert!((ratio - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn vzpf_limits_and_reference_value() {
        let omega = 2.0 * std::f64::consts::PI * 4.9251e9;
        assert_eq!(vzpf(omega, 0.0), 0.0);
        // hand evaluation of omega*sqrt(2 hbar Z / pi) at Z = 50 Ohm:
        // 2*1.054571817e-34*50/pi = 3.3568268...e-33, sqrt = 5.793813...e-17,
        // times omega = 3.0945316...e10 -> 1.7929082...e-6 V
        let v = vzpf(omega, 50.0);
        assert!((v - 1.7929082e-6).abs() < 1e-12, "vzpf = {v:.8e}");
    }

    #[test]
    fn coupling_matches_vzpf_formulation() {
        let inputs = CouplingInputs {
            mu: 12.0 * E_ANGSTROM,
            omega: 2.0 * std::f64::consts::PI * 5.1e9,
            kappa: 1e6,
            etilde: 3.3e5,
            z_r: 62.0,
        };
        let direct = coupling_ratio(&inputs);
        let via_vzpf = inputs.mu * inputs.etilde * vzpf(inputs.omega, inputs.z_r)
            / (HBAR * inputs.omega);
        assert!((direct - via_vzpf).abs() <= 1e-15 * direct.abs().max(via_vzpf.abs()));
    }

    #[test]
    fn film_strictly_increases_capacitance() {
        let spec = GridSpec::default();
        let opts = SolveOptions::default();
        let bare = CrossSectionGeometry::si_default().with_trench_depth(75e-9);
        let coated = bare.clone().with_film_thickness(10e-9);
        let s_bare = solve_mode(&bare, Mode::Differential, &spec, &opts, 5e-9).unwrap();
        let s_coated = solve_mode(&coated, Mode::Differential, &spec, &opts, 5e-9).unwrap();
        assert!(
            s_coated.c > s_bare.c,
            "film did not increase C: {:.6e} vs {:.6e}",
            s_coated.c,
            s_bare.c
        );
        // vacuum capacitance unaffected by the dielectric stack
        assert!((s_coated.c0 - s_bare.c0).abs() < 1e-3 * s_bare.c0);
    }

    #[test]
    fn short_depth_sweep_shows_paper_trends() {
        let base = CrossSectionGeometry::si_default();
        let cfg = SweepConfig {
            depths: vec![75e-9, 300e-9, 900e-9],
            ..SweepConfig::default()
        };
        let sols = depth_sweep(&base, &cfg).unwrap();
        assert_eq!(sols.len(), 6);
        for mode in [Mode::Common, Mode::Differential] {
            let per_mode: Vec<&ModeSolution> =
                sols.iter().filter(|s| s.mode == mode).collect();
            for w in per_mode.windows(2) {
                assert!(
                    w[1].etilde_middle < w[0].etilde_middle,
                    "{mode} middle Etilde not decreasing"
                );
                assert!(
                    w[1].etilde_side < w[0].etilde_side,
                    "{mode} side Etilde not decreasing"
                );
                assert!(w[1].z_r > w[0].z_r, "{mode} Z_r not increasing");
                assert!(w[1].c < w[0].c, "{mode} C not decreasing");
            }
        }
        // the argmax of normalized g/omega is DM, middle trench, smallest t
        let top = sols
            .iter()
            .find(|s| s.g_norm_middle == 1.0 || s.g_norm_side == 1.0)
            .expect("one point attains the maximum");
        assert_eq!(top.mode, Mode::Differential);
        assert_eq!(top.trench_depth, 75e-9);
        assert!(top.g_norm_middle == 1.0 && top.g_norm_side < 1.0);
        // CM middle-trench field is far below DM at every depth; the ratio
        // at t = 75 nm is pinned as a regression guard
        for t in [75e-9, 300e-9, 900e-9] {
            let cm = sols
                .iter()
                .find(|s| s.mode == Mode::Common && s.trench_depth == t)
                .unwrap();
            let dm = sols
                .iter()
                .find(|s| s.mode == Mode::Differential && s.trench_depth == t)
                .unwrap();
            assert!(cm.etilde_middle < 0.25 * dm.etilde_middle);
         }
        let cm75 = sols
            .iter()
            .find(|s| s.mode == Mode::Common && s.trench_depth == 75e-9)
            .unwrap();
        let dm75 = sols
            .iter()
            .find(|s| s.mode == Mode::Differential && s.trench_depth == 75e-9)
            .unwrap();
        let ratio = cm75.etilde_middle / dm75.etilde_middle;
        assert!(
            ratio > 0.0 && ratio < 0.12,
            "CM/DM middle-trench ratio drifted: {ratio:.4}"
        );
    }

    #[test]
    fn single_point_sweep_normalizes_to_one() {
        let base = CrossSectionGeometry::si_default();
        let cfg = SweepConfig {
            depths: vec![100e-9],
            modes: vec![Mode::Differential],
            ..SweepConfig::default()
        };
        let sols = depth_sweep(&base, &cfg).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].g_norm_middle, 1.0);
        assert!(sols[0].g_norm_side < 1.0);
    }

    #[test]
    fn unsorted_depths_rejected() {
        let base = CrossSectionGeometry::si_default();
        let cfg = SweepConfig {
            depths: vec![300e-9, 75e-9],
            ..SweepConfig::default()
        };
        assert!(matches!(
            depth_sweep(&base, &cfg),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn units_audit_e_angstrom_round_trip() {
        // representing mu in eA and converting back to SI must not move the
        // coupling ratio
        let mu_ea = 30.0;
        let inputs = CouplingInputs {
            mu: crate::consts::dipole_from_e_angstrom(mu_ea),
            omega: 2.0 * std::f64::consts::PI * 4.9251e9,
            kappa: 2.0 * std::f64::consts::PI * 154.2e3,
            etilde: 4e5,
            z_r: 75.0,
        };
        let direct = coupling_ratio(&inputs);
        let round_trip = coupling_ratio(&CouplingInputs {
            mu: crate::consts::dipole_from_e_angstrom(crate::consts::dipole_to_e_angstrom(
                inputs.mu,
            )),
            ..inputs
        });
        assert!((direct - round_trip).abs() <= 1e-15 * direct.abs());
    }
}
