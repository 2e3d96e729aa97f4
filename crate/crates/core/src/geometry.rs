//! Parametric cross-section of the coplanar stripline device and its
//! rasterization onto a rectilinear permittivity grid.
//!
//! The cross-section (x horizontal, y vertical) is symmetric about x = 0:
//! ground plane | side gap | left trace | middle gap | right trace |
//! side gap | ground plane. Electrodes of finite thickness sit on the
//! substrate top (y = 0); gaps between electrodes are etched down to the
//! trench floor at y = -t, optionally coated by a Ne film.

use crate::error::{Error, Result};

/// Substrate material of the device wafer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substrate {
    Si,
    Sapphire,
}

/// Relative permittivities of the material stack. Literature values,
/// kept in configuration rather than hard-coded at use sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Materials {
    /// Silicon (dimensionless).
    pub eps_si: f64,
    /// c-plane sapphire, isotropic average (dimensionless).
    pub eps_sapphire: f64,
    /// Solid neon (dimensionless).
    pub eps_ne: f64,
}

impl Default for Materials {
    fn default() -> Self {
        Self {
            eps_si: 11.7,
            eps_sapphire: 10.0,
            eps_ne: 1.244,
        }
    }
}

/// Cross-section geometry of the device. All lengths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionGeometry {
    /// Width of each resonator trace (m).
    pub trace_width: f64,
    /// Gap between the two resonator traces (m).
    pub trace_gap_middle: f64,
    /// Gap between each trace and the adjacent ground plane (m).
    pub trace_gap_side: f64,
    /// Metal film thickness (m).
    pub metal_thickness: f64,
    /// Over-etch depth into the substrate between electrodes (m); 0 allowed.
    pub trench_depth: f64,
    /// Substrate material.
    pub substrate: Substrate,
    /// Ne film thickness on the exposed trench floor (m); 0 excludes the film.
    pub film_thickness: f64,
    /// Full width of the simulation box (m).
    pub domain_width: f64,
    /// Full height of the simulation box (m), split evenly above and below y = 0.
    pub domain_height: f64,
    /// Material permittivities.
    pub materials: Materials,
}

impl CrossSectionGeometry {
    /// Default Si device: 1 um traces with a tight 0.5 um coupling gap
    /// between them, 5 um gaps to the ground planes, 140 nm Nb. The grounded
    /// box sits over 50 trace widths away. The planform reproduces the
    /// measured coupling scale (g ~ 2 MHz at 30 eA and ~5 GHz) for the
    /// shallow-trench device.
    pub fn si_default() -> Self {
        Self {
            trace_width: 1e-6,
            trace_gap_middle: 0.5e-6,
            trace_gap_side: 5e-6,
            metal_thickness: 140e-9,
            trench_depth: 75e-9,
            substrate: Substrate::Si,
            film_thickness: 0.0,
            domain_width: 120e-6,
            domain_height: 120e-6,
            materials: Materials::default(),
        }
    }

    /// Default sapphire device: 200 nm Nb, no trench (the etch does not
    /// attack sapphire).
    pub fn sapphire_default() -> Self {
        Self {
            metal_thickness: 200e-9,
            trench_depth: 0.0,
            substrate: Substrate::Sapphire,
            ..Self::si_default()
        }
    }

    pub fn with_trench_depth(mut self, t: f64) -> Self {
        self.trench_depth = t;
        self
    }

    pub fn with_film_thickness(mut self, f: f64) -> Self {
        self.film_thickness = f;
        self
    }

    /// Substrate relative permittivity.
    pub fn eps_substrate(&self) -> f64 {
        match self.substrate {
            Substrate::Si => self.materials.eps_si,
            Substrate::Sapphire => self.materials.eps_sapphire,
        }
    }

    /// Checks all geometric invariants, returning `self` on success.
    pub fn validated(self) -> Result<Self> {
        let g = &self;
        let nonneg = [
            ("trace_width", g.trace_width),
            ("trace_gap_middle", g.trace_gap_middle),
            ("trace_gap_side", g.trace_gap_side),
            ("metal_thickness", g.metal_thickness),
            ("trench_depth", g.trench_depth),
            ("film_thickness", g.film_thickness),
            ("domain_width", g.domain_width),
            ("domain_height", g.domain_height),
        ];
        for (name, v) in nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be finite and non-negative, got {v:e}"
                )));
            }
        }
        for (name, v) in [
            ("trace_width", g.trace_width),
            ("trace_gap_side", g.trace_gap_side),
            ("metal_thickness", g.metal_thickness),
            ("domain_width", g.domain_width),
            ("domain_height", g.domain_height),
        ] {
            if v == 0.0 {
                return Err(Error::InvalidGeometry(format!("{name} must be positive")));
            }
        }
        let occupied = 2.0 * (g.trace_width + g.trace_gap_side) + g.trace_gap_middle;
        if g.domain_width <= occupied {
            return Err(Error::InvalidGeometry(format!(
                "domain_width {:.3e} m does not fit the electrode layout ({:.3e} m) with margin",
                g.domain_width, occupied
            )));
        }
        let vertical = g.trench_depth + g.film_thickness + g.metal_thickness;
        if g.domain_height <= 4.0 * vertical {
            return Err(Error::InvalidGeometry(format!(
                "domain_height {:.3e} m too small for the vertical stack ({:.3e} m)",
                g.domain_height, vertical
            )));
        }
        Ok(self)
    }

    /// Named x coordinates of the layout (right half; the left half mirrors).
    pub fn x_breaks(&self) -> XBreaks {
        let mid_gap_half = 0.5 * self.trace_gap_middle;
        let trace_outer = mid_gap_half + self.trace_width;
        let ground_inner = trace_outer + self.trace_gap_side;
        XBreaks {
            mid_gap_half,
            trace_outer,
            ground_inner,
            half_width: 0.5 * self.domain_width,
        }
    }

    /// Exposed-surface height at horizontal position `x`: metal top over
    /// electrodes and ground planes, film top (or trench floor) in gaps.
    pub fn surface_y(&self, x: f64) -> f64 {
        let b = self.x_breaks();
        let ax = x.abs();
        let in_gap = ax < b.mid_gap_half || (ax > b.trace_outer && ax < b.ground_inner);
        if in_gap {
            -self.trench_depth + self.film_thickness
        } else {
            self.metal_thickness
        }
    }
}

/// Key x coordinates of the symmetric layout (all >= 0).
#[derive(Debug, Clone, Copy)]
pub struct XBreaks {
    /// Half of the middle gap: inner trace edge.
    pub mid_gap_half: f64,
    /// Outer trace edge.
    pub trace_outer: f64,
    /// Inner ground-plane edge.
    pub ground_inner: f64,
    /// Domain half-width.
    pub half_width: f64,
}

/// Resonator drive mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Common,
    Differential,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Common => "CM",
            Mode::Differential => "DM",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CM" => Ok(Mode::Common),
            "DM" => Ok(Mode::Differential),
            other => Err(Error::InvalidInput(format!(
                "unknown mode `{other}` (expected CM or DM)"
            ))),
        }
    }
}

/// Electrode voltages applied to the trace and ground groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDrive {
    pub mode: Mode,
    /// Left trace voltage (V).
    pub v_left: f64,
    /// Right trace voltage (V).
    pub v_right: f64,
    /// Ground voltage (V).
    pub v_ground: f64,
}

impl ModeDrive {
    /// Both traces at +1 V.
    pub fn common() -> Self {
        Self {
            mode: Mode::Common,
            v_left: 1.0,
            v_right: 1.0,
            v_ground: 0.0,
        }
    }

    /// Traces at +1 V and -1 V.
    pub fn differential() -> Self {
        Self {
            mode: Mode::Differential,
            v_left: 1.0,
            v_right: -1.0,
            v_ground: 0.0,
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Common => Self::common(),
            Mode::Differential => Self::differential(),
        }
    }

    /// Drive magnitude (V); 1 V for both standard drives.
    pub fn magnitude(&self) -> f64 {
        self.v_left.abs().max(self.v_right.abs()).max(self.v_ground.abs())
    }

    /// Voltage imposed on a node label, if it is an electrode.
    pub fn voltage_of(&self, label: NodeLabel) -> Option<f64> {
        match label {
            NodeLabel::Free => None,
            NodeLabel::TraceLeft => Some(self.v_left),
            NodeLabel::TraceRight => Some(self.v_right),
            NodeLabel::Ground => Some(self.v_ground),
        }
    }
}

/// Per-node electrode label. `Free` nodes carry unknowns; the rest are
/// Dirichlet nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeLabel {
    Free,
    TraceLeft,
    TraceRight,
    Ground,
}

/// Mesh resolution parameters for rasterization. Spacings grade
/// geometrically from the fine values at material interfaces and
/// electrode edges up to the far-field ceilings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Vertical spacing at material interfaces (m); must be <= 2.5 nm so the
    /// 5 nm sampling band is resolved.
    pub fine_dy: f64,
    /// Horizontal spacing at electrode edges (m).
    pub fine_dx: f64,
    /// Geometric grading ratio (> 1).
    pub growth: f64,
    /// Horizontal spacing ceiling (m).
    pub max_dx: f64,
    /// Vertical spacing ceiling (m).
    pub max_dy: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            fine_dy: 2.0e-9,
            fine_dx: 25.0e-9,
            growth: 1.25,
            max_dx: 2.0e-6,
            max_dy: 2.0e-6,
        }
    }
}

impl GridSpec {
    /// All spacings divided by `factor` (grading ratio unchanged).
    pub fn refined(&self, factor: f64) -> Self {
        Self {
            fine_dy: self.fine_dy / factor,
            fine_dx: self.fine_dx / factor,
            growth: self.growth,
            max_dx: self.max_dx / factor,
            max_dy: self.max_dy / factor,
        }
    }
}

/// Rasterized cross-section: rectilinear node grid, cell-centered relative
/// permittivity, and per-node electrode labels.
#[derive(Debug, Clone)]
pub struct PermittivityGrid {
    /// Node x coordinates, strictly increasing (len nx).
    pub xs: Vec<f64>,
    /// Node y coordinates, strictly increasing (len ny).
    pub ys: Vec<f64>,
    /// Relative permittivity per cell, row-major (nx-1)*(ny-1).
    pub eps: Vec<f64>,
    /// Electrode label per node, row-major nx*ny.
    pub labels: Vec<NodeLabel>,
}

impl PermittivityGrid {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    #[inline]
    pub fn cell_index(&self, ci: usize, cj: usize) -> usize {
        cj * (self.nx() - 1) + ci
    }

    #[inline]
    pub fn cell_eps(&self, ci: usize, cj: usize) -> f64 {
        self.eps[self.cell_index(ci, cj)]
    }

    #[inline]
    pub fn label(&self, i: usize, j: usize) -> NodeLabel {
        self.labels[self.node_index(i, j)]
    }

    /// Same grid with every cell set to vacuum; labels unchanged.
    pub fn vacuum_clone(&self) -> Self {
        Self {
            xs: self.xs.clone(),
            ys: self.ys.clone(),
            eps: vec![1.0; self.eps.len()],
            labels: self.labels.clone(),
        }
    }

    /// Distinct permittivity values present on the grid.
    pub fn material_set(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = Vec::new();
        for &e in &self.eps {
            if !vals.iter().any(|&v| v == e) {
                vals.push(e);
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Count of electrode (Dirichlet) nodes.
    pub fn electrode_node_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != NodeLabel::Free).count()
    }
}

// ---------------------------------------------------------------------------
// Graded 1D meshing
// ---------------------------------------------------------------------------

/// Step ladder filling a segment of length `len`: spacings grow geometrically
/// from `ha` at the left end and `hb` at the right end, capped at `hmax`,
/// then uniformly rescaled so the steps sum exactly to `len`.
fn segment_steps(len: f64, ha: f64, hb: f64, growth: f64, hmax: f64) -> Vec<f64> {
    debug_assert!(len > 0.0 && ha > 0.0 && hb > 0.0 && growth > 1.0 && hmax > 0.0);
    let mut left: Vec<f64> = Vec::new();
    let mut right: Vec<f64> = Vec::new();
    let mut sa = ha.min(hmax);
    let mut sb = hb.min(hmax);
    let mut total = 0.0;
    while total < len {
        if sa <= sb {
            left.push(sa);
            total += sa;
            sa = (sa * growth).min(hmax);
        } else {
            right.push(sb);
            total += sb;
            sb = (sb * growth).min(hmax);
        }
    }
    let scale = len / total;
    let mut steps: Vec<f64> = Vec::with_capacity(left.len() + right.len());
    steps.extend(left.iter().map(|s| s * scale));
    steps.extend(right.iter().rev().map(|s| s * scale));
    steps
}

/// Node coordinates covering sorted breakpoints `points` (coordinate, local
/// spacing); every breakpoint is a node. `seg_max[k]` caps the spacing
/// inside segment k.
fn build_axis(points: &[(f64, f64)], seg_max: &[f64], growth: f64) -> Vec<f64> {
    debug_assert!(points.len() >= 2);
    debug_assert_eq!(seg_max.len(), points.len() - 1);
    let mut nodes = vec![points[0].0];
    for k in 0..points.len() - 1 {
        let (a, ha) = points[k];
        let (b, hb) = points[k + 1];
        let steps = segment_steps(b - a, ha, hb, growth, seg_max[k]);
        let mut x = a;
        for (idx, s) in steps.iter().enumerate() {
            // land exactly on the breakpoint at the end of the segment
            x = if idx + 1 == steps.len() { b } else { x + s };
            nodes.push(x);
        }
    }
    nodes
}

/// Deduplicate breakpoints closer than `tol`, keeping the finer spacing.
fn dedupe_points(mut pts: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last_mut() {
            Some(last) if (p.0 - last.0).abs() <= tol => {
                last.1 = last.1.min(p.1);
            }
            _ => out.push(p),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

/// Rasterizes the cross-section onto a graded rectilinear grid: assigns cell
/// permittivities from the layer stack, masks electrode nodes, and grounds
/// the outer box boundary.
pub fn rasterize(geom: &CrossSectionGeometry, spec: &GridSpec) -> Result<PermittivityGrid> {
    geom.clone().validated()?;
    if spec.growth <= 1.0 || !spec.growth.is_finite() {
        return Err(Error::InvalidSolverConfig(format!(
            "grid growth ratio must exceed 1, got {}",
            spec.growth
        )));
    }
    if spec.fine_dy > 2.5e-9 {
        return Err(Error::ResolutionTooCoarse(format!(
            "fine_dy = {:.3e} m exceeds 2.5 nm; the 5 nm sampling band would be unresolved",
            spec.fine_dy
        )));
    }
    // every geometric feature must span at least 4 cells
    let mut features = vec![
        ("metal_thickness", geom.metal_thickness, spec.fine_dy),
        ("trace_width", geom.trace_width, spec.fine_dx),
    ];
    if geom.trench_depth > 0.0 {
        features.push(("trench_depth", geom.trench_depth, spec.fine_dy));
    }
    if geom.film_thickness > 0.0 {
        features.push(("film_thickness", geom.film_thickness, spec.fine_dy));
    }
    if geom.trace_gap_middle > 0.0 {
        features.push(("trace_gap_middle", geom.trace_gap_middle, spec.fine_dx));
    }
    features.push(("trace_gap_side", geom.trace_gap_side, spec.fine_dx));
    for (name, len, fine) in features {
        if fine > len / 4.0 {
            return Err(Error::ResolutionTooCoarse(format!(
                "{name} = {len:.3e} m spans fewer than 4 cells at spacing {fine:.3e} m"
            )));
        }
    }

    let b = geom.x_breaks();
    let t = geom.trench_depth;
    let f = geom.film_thickness;
    let m = geom.metal_thickness;
    let y_bot = -0.5 * geom.domain_height;
    let y_top = 0.5 * geom.domain_height;

    // x axis: build the right half from the centerline, then mirror so the
    // grid is exactly symmetric under x -> -x.
    let tol_x = 1e-9 * geom.domain_width;
    let half_pts = dedupe_points(
        vec![
            (0.0, (b.mid_gap_half / 8.0).max(spec.fine_dx).min(spec.max_dx)),
            (b.mid_gap_half, spec.fine_dx),
            (b.trace_outer, spec.fine_dx),
            (b.ground_inner, spec.fine_dx),
            (b.half_width, spec.max_dx),
        ],
        tol_x,
    );
    let mut seg_max_x = Vec::new();
    for k in 0..half_pts.len() - 1 {
        let len = half_pts[k + 1].0 - half_pts[k].0;
        // keep gaps and traces reasonably sampled even when max_dx is large
        let inside_layout = half_pts[k + 1].0 <= b.ground_inner + tol_x;
        let cap = if inside_layout { len / 8.0 } else { f64::INFINITY };
        seg_max_x.push(spec.max_dx.min(cap.max(4.0 * spec.fine_dx)));
    }
    let half_xs = build_axis(&half_pts, &seg_max_x, spec.growth);
    let mut xs: Vec<f64> = half_xs.iter().skip(1).rev().map(|&x| -x).collect();
    xs.extend(half_xs.iter());

    // y axis
    let tol_y = 1e-9 * geom.domain_height;
    let mut y_pts = vec![
        (y_bot, spec.max_dy),
        (-t, spec.fine_dy),
        (0.0, spec.fine_dy),
        (m, spec.fine_dy),
        (y_top, spec.max_dy),
    ];
    if f > 0.0 {
        y_pts.push((-t + f, spec.fine_dy));
    }
    let y_pts = dedupe_points(y_pts, tol_y);
    let mut seg_max_y = Vec::new();
    for k in 0..y_pts.len() - 1 {
        let len = y_pts[k + 1].0 - y_pts[k].0;
        let inside_stack = y_pts[k].0 >= -t - tol_y && y_pts[k + 1].0 <= m + tol_y;
        let cap = if inside_stack { len / 4.0 } else { f64::INFINITY };
        seg_max_y.push(spec.max_dy.min(cap.max(2.0 * spec.fine_dy)));
    }
    let ys = build_axis(&y_pts, &seg_max_y, spec.growth);

    let nx = xs.len();
    let ny = ys.len();

    // cell permittivities from cell centers; material interfaces lie exactly
    // on gridlines, so centers never straddle an interface
    let eps_sub = geom.eps_substrate();
    let eps_ne = geom.materials.eps_ne;
    let in_gap = |ax: f64| -> bool {
        ax < b.mid_gap_half || (ax > b.trace_outer && ax < b.ground_inner)
    };
    let mut eps = vec![1.0; (nx - 1) * (ny - 1)];
    for cj in 0..ny - 1 {
        let yc = 0.5 * (ys[cj] + ys[cj + 1]);
        for ci in 0..nx - 1 {
            let xc = 0.5 * (xs[ci] + xs[ci + 1]);
            let ax = xc.abs();
            let e = if in_gap(ax) {
                if yc < -t {
                    eps_sub
                } else if f > 0.0 && yc < -t + f {
                    eps_ne
                } else {
                    1.0
                }
            } else if yc < 0.0 {
                eps_sub
            } else {
                1.0 // metal interior or vacuum above; metal cells never couple
            };
            eps[cj * (nx - 1) + ci] = e;
        }
    }

    // node labels: electrode rectangles, then the outer box boundary
    let snap = tol_x.max(tol_y);
    let mut labels = vec![NodeLabel::Free; nx * ny];
    for (j, &y) in ys.iter().enumerate() {
        let in_metal_band = y >= -snap && y <= m + snap;
        for (i, &x) in xs.iter().enumerate() {
            let idx = j * nx + i;
            if in_metal_band {
                let ax = x.abs();
                if ax >= b.mid_gap_half - snap && ax <= b.trace_outer + snap {
                    labels[idx] = if x < 0.0 {
                        NodeLabel::TraceLeft
                    } else if x > 0.0 {
                        NodeLabel::TraceRight
                    } else {
                        // merged-strip case (zero middle gap): centerline node
                        NodeLabel::TraceLeft
                    };
                } else if ax >= b.ground_inner - snap {
                    labels[idx] = NodeLabel::Ground;
                }
            }
            if i == 0 || i == nx - 1 || j == 0 || j == ny - 1 {
                labels[idx] = NodeLabel::Ground;
            }
        }
    }

    Ok(PermittivityGrid { xs, ys, eps, labels })
}
