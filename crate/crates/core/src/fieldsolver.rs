//! 2D electrostatic boundary-value solves on a permittivity grid and
//! extraction of the lateral field profile just above the exposed surface.

use crate::error::{Error, Result};
use crate::geometry::{CrossSectionGeometry, ModeDrive, PermittivityGrid};
use crate::linsys;
use crate::util::{interval_index, trapezoid};

/// Iterative-solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target, in (0, 1e-3].
    pub tol: f64,
    /// Iteration cap.
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 1_000_000,
        }
    }
}

/// Solved electrostatic potential on a grid's nodes.
#[derive(Debug, Clone)]
pub struct PotentialField {
    /// Potential per node (V), row-major nx*ny; Dirichlet values exact.
    pub phi: Vec<f64>,
    /// True relative residual |b - Ax|/|b| of the converged solve.
    pub residual: f64,
    /// CG iterations used.
    pub iterations: usize,
    /// Drive that produced this solve.
    pub drive: ModeDrive,
    nx: usize,
    ny: usize,
}

impl PotentialField {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.phi[j * self.nx + i]
    }

    fn check_grid(&self, grid: &PermittivityGrid) {
        assert!(
            self.nx == grid.nx() && self.ny == grid.ny(),
            "potential field does not belong to this grid"
        );
    }
}

/// Solves div(eps grad phi) = 0 with the drive's electrode voltages.
pub fn solve_laplace(
    grid: &PermittivityGrid,
    drive: &ModeDrive,
    opts: &SolveOptions,
) -> Result<PotentialField> {
    if !(opts.tol > 0.0 && opts.tol <= 1e-3) {
        return Err(Error::InvalidSolverConfig(format!(
            "tol must lie in (0, 1e-3], got {:e}",
            opts.tol
        )));
    }
    let system = linsys::assemble(grid, drive);
    let (x, iterations, residual) = system.solve_pcg(opts.tol, opts.max_iterations)?;

    let mut phi = vec![0.0; grid.labels.len()];
    for (node, &label) in grid.labels.iter().enumerate() {
        phi[node] = match drive.voltage_of(label) {
            Some(v) => v,
            None => x[system.node_to_eq[node] as usize],
        };
    }
    Ok(PotentialField {
        phi,
        residual,
        iterations,
        drive: *drive,
        nx: grid.nx(),
        ny: grid.ny(),
    })
}

/// Nodal electric-field components E = -grad phi.
#[derive(Debug, Clone)]
pub struct FieldVectors {
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
}

/// Central differences on the nonuniform grid (one-sided at box edges).
pub fn electric_field(grid: &PermittivityGrid, field: &PotentialField) -> FieldVectors {
    field.check_grid(grid);
    let nx = grid.nx();
    let ny = grid.ny();
    let xs = &grid.xs;
    let ys = &grid.ys;
    let phi = &field.phi;
    let mut ex = vec![0.0; nx * ny];
    let mut ey = vec![0.0; nx * ny];

    let deriv = |f_m: f64, f_0: f64, f_p: f64, h_m: f64, h_p: f64| -> f64 {
        (h_m * h_m * f_p - h_p * h_p * f_m + (h_p * h_p - h_m * h_m) * f_0)
            / (h_m * h_p * (h_m + h_p))
    };

    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let dphidx = if i == 0 {
                (phi[k + 1] - phi[k]) / (xs[1] - xs[0])
            } else if i == nx - 1 {
                (phi[k] - phi[k - 1]) / (xs[nx - 1] - xs[nx - 2])
            } else {
                deriv(
                    phi[k - 1],
                    phi[k],
                    phi[k + 1],
                    xs[i] - xs[i - 1],
                    xs[i + 1] - xs[i],
                )
            };
            let dphidy = if j == 0 {
                (phi[k + nx] - phi[k]) / (ys[1] - ys[0])
            } else if j == ny - 1 {
                (phi[k] - phi[k - nx]) / (ys[ny - 1] - ys[ny - 2])
            } else {
                deriv(
                    phi[k - nx],
                    phi[k],
                    phi[k + nx],
                    ys[j] - ys[j - 1],
                    ys[j + 1] - ys[j],
                )
            };
            ex[k] = -dphidx;
            ey[k] = -dphidy;
        }
    }
    FieldVectors { ex, ey }
}

/// Bilinear interpolation of a nodal scalar at (x, y).
fn bilinear(grid: &PermittivityGrid, vals: &[f64], x: f64, y: f64) -> f64 {
    let i = interval_index(&grid.xs, x);
    let j = interval_index(&grid.ys, y);
    let nx = grid.nx();
    let x0 = grid.xs[i];
    let x1 = grid.xs[i + 1];
    let y0 = grid.ys[j];
    let y1 = grid.ys[j + 1];
    let tx = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
    let ty = ((y - y0) / (y1 - y0)).clamp(0.0, 1.0);
    let f00 = vals[j * nx + i];
    let f10 = vals[j * nx + i + 1];
    let f01 = vals[(j + 1) * nx + i];
    let f11 = vals[(j + 1) * nx + i + 1];
    f00 * (1.0 - tx) * (1.0 - ty) + f10 * tx * (1.0 - ty) + f01 * (1.0 - tx) * ty + f11 * tx * ty
}

/// Surface-region classification of a lateral position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    MiddleTrench,
    SideTrench,
    Metal,
    Other,
}

impl RegionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::MiddleTrench => "middle_trench",
            RegionTag::SideTrench => "side_trench",
            RegionTag::Metal => "metal",
            RegionTag::Other => "other",
        }
    }
}

impl std::fmt::Display for RegionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classify a lateral position against the electrode layout.
pub fn region_of(geom: &CrossSectionGeometry, x: f64) -> RegionTag {
    let b = geom.x_breaks();
    let ax = x.abs();
    if ax < b.mid_gap_half {
        RegionTag::MiddleTrench
    } else if ax <= b.trace_outer {
        RegionTag::Metal
    } else if ax < b.ground_inner {
        RegionTag::SideTrench
    } else if ax <= b.half_width {
        RegionTag::Metal
    } else {
        RegionTag::Other
    }
}

/// |E_x| sampled along the exposed surface at a fixed offset above it.
#[derive(Debug, Clone)]
pub struct FieldLineSample {
    /// Lateral sample positions (m).
    pub x: Vec<f64>,
    /// |E_x| at each sample (V/m).
    pub ex_abs: Vec<f64>,
    /// Vertical offset above the local exposed surface (m).
    pub sample_height: f64,
    /// Region classification per sample.
    pub region_tags: Vec<RegionTag>,
}

/// Samples |E_x| at `height` above the piecewise exposed surface (metal tops
/// and trench floors / film tops), at the grid's interior x nodes.
pub fn sample_surface_line(
    geom: &CrossSectionGeometry,
    grid: &PermittivityGrid,
    field: &PotentialField,
    height: f64,
) -> Result<FieldLineSample> {
    field.check_grid(grid);
    if height <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "sample height must be positive, got {height:e}"
        )));
    }
    let vectors = electric_field(grid, field);
    let nx = grid.nx();
    let mut x = Vec::with_capacity(nx - 2);
    let mut ex_abs = Vec::with_capacity(nx - 2);
    let mut region_tags = Vec::with_capacity(nx - 2);
    for i in 1..nx - 1 {
        let xi = grid.xs[i];
        let ys = geom.surface_y(xi) + height;
        let j = interval_index(&grid.ys, ys);
        let local_dy = grid.ys[j + 1] - grid.ys[j];
        if height < local_dy {
            return Err(Error::HeightUnresolvable {
                height_m: height,
                local_dy_m: local_dy,
            });
        }
        x.push(xi);
        ex_abs.push(bilinear(grid, &vectors.ex, xi, ys).abs());
        region_tags.push(region_of(geom, xi));
    }
    Ok(FieldLineSample {
        x,
        ex_abs,
        sample_height: height,
        region_tags,
    })
}

/// Trench-width-averaged |E_x| per volt of drive:
/// (1/w) * integral of |E_x| dx over the tagged region, divided by 1 V.
/// Disjoint runs of the same tag (the two side trenches) are combined.
pub fn trench_average_ex(sample: &FieldLineSample, region: RegionTag) -> Result<f64> {
    let mut integral = 0.0;
    let mut width = 0.0;
    let mut count = 0usize;
    let n = sample.x.len();
    let mut k = 0usize;
    while k < n {
        if sample.region_tags[k] != region {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && sample.region_tags[k] == region {
            k += 1;
        }
        let xs = &sample.x[start..k];
        let vs = &sample.ex_abs[start..k];
        count += xs.len();
        if xs.len() >= 2 {
            integral += trapezoid(xs, vs);
            width += xs[xs.len() - 1] - xs[0];
        }
    }
    if count < 8 {
        return Err(Error::EmptyRegion {
            region: region.as_str(),
            samples: count,
            required: 8,
        });
    }
    Ok(integral / width / 1.0)
}

/// Electrostatic field energy per unit length, W = 1/2 eps0 int eps |E|^2 dA
/// (J/m), from cell-centered gradients.
pub fn field_energy(grid: &PermittivityGrid, field: &PotentialField) -> f64 {
    field.check_grid(grid);
    let nx = grid.nx();
    let phi = &field.phi;
    let mut w = 0.0;
    for cj in 0..grid.ny() - 1 {
        let hy = grid.ys[cj + 1] - grid.ys[cj];
        for ci in 0..nx - 1 {
            let hx = grid.xs[ci + 1] - grid.xs[ci];
            let p00 = phi[cj * nx + ci];
            let p10 = phi[cj * nx + ci + 1];
            let p01 = phi[(cj + 1) * nx + ci];
            let p11 = phi[(cj + 1) * nx + ci + 1];
            let ex = -0.5 * ((p10 - p00) + (p11 - p01)) / hx;
            let ey = -0.5 * ((p01 - p00) + (p11 - p10)) / hy;
            w += grid.cell_eps(ci, cj) * (ex * ex + ey * ey) * hx * hy;
        }
    }
    0.5 * crate::consts::EPSILON_0 * w
}

/// Largest violation of the discrete maximum principle (V): how far the
/// solved potential escapes the range of the imposed electrode voltages.
pub fn max_principle_violation(
    grid: &PermittivityGrid,
    field: &PotentialField,
) -> f64 {
    field.check_grid(grid);
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for &label in &grid.labels {
        if let Some(v) = field.drive.voltage_of(label) {
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
    }
    let mut violation: f64 = 0.0;
    for &p in &field.phi {
        violation = violation.max(vmin - p).max(p - vmax);
    }
    violation.max(0.0)
}
