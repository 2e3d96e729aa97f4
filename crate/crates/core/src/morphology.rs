//! Surface-profile synthesis and analysis: etched-Si and smooth-sapphire
//! substrates, log-normal polycrystalline film growth, combined film-top
//! surfaces, and roughness statistics.

use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::util::trapezoid_uniform;

/// Minimum number of samples in a valid profile.
pub const MIN_PROFILE_SAMPLES: usize = 64;

/// What a profile's heights describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Substrate,
    FilmTop,
    Combined,
}

/// 1D surface height profile on a uniform lateral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceProfile {
    /// First sample position (m).
    pub x0: f64,
    /// Uniform sample spacing (m).
    pub dx: f64,
    /// Heights (m).
    pub heights: Vec<f64>,
    pub kind: ProfileKind,
    /// RNG seed for synthetic profiles; None for loaded data.
    pub seed: Option<u64>,
}

impl SurfaceProfile {
    pub fn new(
        x0: f64,
        dx: f64,
        heights: Vec<f64>,
        kind: ProfileKind,
        seed: Option<u64>,
    ) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidInput(format!(
                "profile spacing must be positive, got {dx:e}"
            )));
        }
        if heights.len() < MIN_PROFILE_SAMPLES {
            return Err(Error::TooFewSamples {
                found: heights.len(),
                required: MIN_PROFILE_SAMPLES,
            });
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidInput("profile contains non-finite heights".into()));
        }
        Ok(Self {
            x0,
            dx,
            heights,
            kind,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    /// Position of sample `i` (m).
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    /// Full position array (m).
    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Profile length (m).
    pub fn span(&self) -> f64 {
        self.dx * (self.len() - 1) as f64
    }

    /// Root-mean-square roughness about the mean (m).
    pub fn rq(&self) -> f64 {
        let n = self.len() as f64;
        let mean = self.heights.iter().sum::<f64>() / n;
        (self.heights.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / n).sqrt()
    }
}

/// Roughness summary of one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessStats {
    /// RMS roughness about the mean (m).
    pub rq: f64,
    /// Mean height (m).
    pub mean_height: f64,
    /// Histogram bin edges (m), len bins + 1.
    pub bin_edges: Vec<f64>,
    /// Histogram counts, len bins; sums to the sample count.
    pub counts: Vec<u64>,
}

/// Computes Rq, mean height, and a height histogram with `bins` bins.
pub fn roughness_stats(profile: &SurfaceProfile, bins: usize) -> RoughnessStats {
    let bins = bins.max(1);
    let n = profile.len() as f64;
    let mean = profile.heights.iter().sum::<f64>() / n;
    let rq = profile.rq();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &h in &profile.heights {
        lo = lo.min(h);
        hi = hi.max(h);
    }
    if hi <= lo {
        // constant profile: one occupied bin of token width
        let w = lo.abs().max(1e-15) * 1e-9;
        lo -= 0.5 * w;
        hi += 0.5 * w;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &h in &profile.heights {
        let k = (((h - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let bin_edges = (0..=bins).map(|k| lo + width * k as f64).collect();
    RoughnessStats {
        rq,
        mean_height: mean,
        bin_edges,
        counts,
    }
}

/// Synthetic substrate family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstrateKind {
    SiEtched,
    SapphireSmooth,
}

/// Etched-Si generator parameters: a jittered train of flat-floored valleys
/// separated by narrow ridges, with sparse spikes on the ridges. Calibrated
/// so the default yields Rq near 9.5 nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiEtchParams {
    /// Valley floor width (m).
    pub valley_width: f64,
    /// Valley depth below the ridge plane (m).
    pub valley_depth: f64,
    /// Sloped wall width on each side of a valley (m).
    pub wall_width: f64,
    /// Ridge width between valleys (m).
    pub ridge_width: f64,
    /// Fractional uniform jitter on floor width and depth.
    pub jitter: f64,
    /// Spike base width (m).
    pub spike_width: f64,
    /// Spike height above the ridge plane (m).
    pub spike_height: f64,
    /// Probability that a ridge carries a spike.
    pub spike_probability: f64,
}

impl Default for SiEtchParams {
    fn default() -> Self {
        Self {
            valley_width: 200e-9,
            valley_depth: 25e-9,
            wall_width: 15e-9,
            ridge_width: 35e-9,
            jitter: 0.2,
            spike_width: 10e-9,
            spike_height: 20e-9,
            spike_probability: 0.35,
        }
    }
}

/// Smooth-sapphire generator parameters: band-limited Gaussian roughness
/// rescaled to the target Rq.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SapphireParams {
    /// Target RMS roughness (m).
    pub target_rq: f64,
    /// Gaussian smoothing scale (m).
    pub correlation_length: f64,
}

impl Default for SapphireParams {
    fn default() -> Self {
        Self {
            target_rq: 0.4e-9,
            correlation_length: 30e-9,
        }
    }
}

/// Sampling window for substrate synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthWindow {
    /// Profile length (m).
    pub length: f64,
    /// Sample spacing (m).
    pub dx: f64,
}

impl Default for SynthWindow {
    fn default() -> Self {
        Self {
            length: 4e-6,
            dx: 2e-9,
        }
    }
}

/// Generates a synthetic substrate profile. Deterministic in `seed`.
pub fn synth_substrate(
    kind: SubstrateKind,
    window: &SynthWindow,
    si: &SiEtchParams,
    sapphire: &SapphireParams,
    seed: u64,
) -> Result<SurfaceProfile> {
    let n = (window.length / window.dx).round() as usize + 1;
    if n < MIN_PROFILE_SAMPLES {
        return Err(Error::DomainTooShort(format!(
            "window of {n} samples is below the minimum of {MIN_PROFILE_SAMPLES}"
        )));
    }
    match kind {
        SubstrateKind::SiEtched => {
            let min_len = 10.0 * (si.valley_width + 2.0 * si.wall_width);
            if window.length < min_len {
                return Err(Error::DomainTooShort(format!(
                    "length {:.3e} m is below 10 valley widths ({:.3e} m)",
                    window.length, min_len
                )));
            }
            Ok(synth_si_etched(n, window.dx, si, seed))
        }
        SubstrateKind::SapphireSmooth => {
            let min_len = 10.0 * sapphire.correlation_length;
            if window.length < min_len {
                return Err(Error::DomainTooShort(format!(
                    "length {:.3e} m is below 10 correlation lengths ({:.3e} m)",
                    window.length, min_len
                )));
            }
            Ok(synth_sapphire(n, window.dx, sapphire, seed))
        }
    }
}

fn synth_si_etched(n: usize, dx: f64, p: &SiEtchParams, seed: u64) -> SurfaceProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = dx * (n - 1) as f64;
    let jit = |rng: &mut ChaCha8Rng, v: f64, j: f64| v * (1.0 + j * rng.random_range(-1.0..1.0));

    // piecewise-linear skeleton: ridge, wall down, floor, wall up, ...
    let mut xs: Vec<f64> = vec![0.0];
    let mut hs: Vec<f64> = vec![0.0];
    let mut spikes: Vec<f64> = Vec::new(); // spike center positions
    let mut x = jit(&mut rng, 0.5 * p.ridge_width, 1.0); // random phase
    xs.push(x);
    hs.push(0.0);
    while x < length {
        let depth = jit(&mut rng, p.valley_depth, p.jitter);
        let floor = jit(&mut rng, p.valley_width, p.jitter);
        let ridge = jit(&mut rng, p.ridge_width, 0.3);
        // wall down
        x += p.wall_width;
        xs.push(x);
        hs.push(-depth);
        // floor
        x += floor;
        xs.push(x);
        hs.push(-depth);
        // wall up
        x += p.wall_width;
        xs.push(x);
        hs.push(0.0);
        // ridge, possibly spiked
        if rng.random::<f64>() < p.spike_probability && ridge > p.spike_width {
            spikes.push(x + 0.5 * ridge);
        }
        x += ridge;
        xs.push(x);
        hs.push(0.0);
    }

    let mut heights = vec![0.0; n];
    let mut seg = 0usize;
    for (i, h) in heights.iter_mut().enumerate() {
        let xi = dx * i as f64;
        while seg + 1 < xs.len() - 1 && xs[seg + 1] <= xi {
            seg += 1;
        }
        let (xa, xb) = (xs[seg], xs[seg + 1]);
        let t = if xb > xa { (xi - xa) / (xb - xa) } else { 0.0 };
        *h = hs[seg] + t * (hs[seg + 1] - hs[seg]);
    }
    for &c in &spikes {
        let half = 0.5 * p.spike_width;
        let i_lo = (((c - half) / dx).floor().max(0.0)) as usize;
        let i_hi = (((c + half) / dx).ceil() as usize).min(n - 1);
        for (i, h) in heights.iter_mut().enumerate().take(i_hi + 1).skip(i_lo) {
            let u = 1.0 - (dx * i as f64 - c).abs() / half;
            if u > 0.0 {
                *h += p.spike_height * u;
            }
        }
    }

    SurfaceProfile {
        x0: 0.0,
        dx,
        heights,
        kind: ProfileKind::Substrate,
        seed: Some(seed),
    }
}

fn synth_sapphire(n: usize, dx: f64, p: &SapphireParams, seed: u64) -> SurfaceProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white: Vec<f64> = standard_normal_vec(&mut rng, n);
    let mut heights = smooth_unit_variance(&white, p.correlation_length / dx);
    // rescale to the target Rq exactly
    let n_f = n as f64;
    let mean = heights.iter().sum::<f64>() / n_f;
    let rq = (heights.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / n_f).sqrt();
    let scale = p.target_rq / rq;
    for h in &mut heights {
        *h = (*h - mean) * scale;
    }
    SurfaceProfile {
        x0: 0.0,
        dx,
        heights,
        kind: ProfileKind::Substrate,
        seed: Some(seed),
    }
}

fn standard_normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| normal.sample(rng)).collect()
}

/// Convolves white noise with a kernel, renormalizing per point so the
/// output variance is exactly 1 everywhere, including near the edges where
/// the kernel is truncated.
fn convolve_unit_variance(white: &[f64], kernel: &[f64], radius: isize) -> Vec<f64> {
    let n = white.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut norm2 = 0.0;
        for (k, &w) in kernel.iter().enumerate() {
            let j = i as isize + k as isize - radius;
            if j >= 0 && (j as usize) < n {
                acc += w * white[j as usize];
                norm2 += w * w;
            }
        }
        *o = acc / norm2.sqrt();
    }
    out
}

/// Gaussian-kernel smoothing to correlation scale `sigma_samples`.
fn smooth_unit_variance(white: &[f64], sigma_samples: f64) -> Vec<f64> {
    if sigma_samples <= 0.0 {
        return white.to_vec();
    }
    let radius = (3.0 * sigma_samples).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 / sigma_samples).powi(2)).exp())
        .collect();
    convolve_unit_variance(white, &kernel, radius)
}

/// Thickness fluctuations of a conserved-flux polycrystalline film live at
/// the grain scale: deficits at one grain are filled by neighbor growth, so
/// the field carries no weight at wavelengths beyond a few grains.
const FILM_UNIFORMITY_FACTOR: f64 = 4.0;

/// Grain-scale band-limited field: difference of two area-normalized
/// Gaussians (zero total weight), correlated at `sigma_samples` and
/// suppressed beyond `FILM_UNIFORMITY_FACTOR` times that scale.
fn grain_band_unit_variance(white: &[f64], sigma_samples: f64) -> Vec<f64> {
    if sigma_samples <= 0.0 {
        return white.to_vec();
    }
    let s1 = sigma_samples;
    let s2 = FILM_UNIFORMITY_FACTOR * sigma_samples;
    let radius = (3.0 * s2).ceil() as isize;
    let g1: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 / s1).powi(2)).exp())
        .collect();
    let g2: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 / s2).powi(2)).exp())
        .collect();
    let (a1, a2) = (g1.iter().sum::<f64>(), g2.iter().sum::<f64>());
    let kernel: Vec<f64> = g1
        .iter()
        .zip(&g2)
        .map(|(k1, k2)| k1 / a1 - k2 / a2)
        .collect();
    convolve_unit_variance(white, &kernel, radius)
}

/// Film-growth parameters: pointwise log-normal thickness with a Gaussian
/// spatial correlation kernel. The distribution family is fixed log-normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmGrowthParams {
    /// Mean film thickness (m).
    pub mean_thickness: f64,
    /// Pointwise thickness standard deviation (m).
    pub std_thickness: f64,
    /// Gaussian correlation scale of the thickness field (m), grain scale.
    pub correlation_length: f64,
}

impl Default for FilmGrowthParams {
    fn default() -> Self {
        Self {
            mean_thickness: 10e-9,
            std_thickness: 10f64.sqrt() * 1e-9,
            correlation_length: 10e-9,
        }
    }
}

impl FilmGrowthParams {
    fn validate(&self) -> Result<()> {
        if !(self.mean_thickness > 0.0) || !(self.std_thickness >= 0.0)
            || !(self.correlation_length > 0.0)
        {
            return Err(Error::InvalidInput(
                "film mean, std, and correlation length must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Underlying normal parameters (mu_ln, sigma_ln) satisfying
    /// exp(mu + sigma^2/2) = mean and the log-normal variance identity.
    pub fn log_normal_params(&self) -> (f64, f64) {
        let m = self.mean_thickness;
        let s = self.std_thickness;
        let sigma2 = (1.0 + (s * s) / (m * m)).ln();
        let mu = m.ln() - 0.5 * sigma2;
        (mu, sigma2.sqrt())
    }
}

/// Samples the correlated log-normal thickness field on `n` points.
fn sample_thickness(params: &FilmGrowthParams, n: usize, dx: f64, seed: u64) -> Vec<f64> {
    let (mu, sigma) = params.log_normal_params();
    if sigma == 0.0 {
        return vec![params.mean_thickness; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white = standard_normal_vec(&mut rng, n);
    let field = grain_band_unit_variance(&white, params.correlation_length / dx);
    field.iter().map(|g| (mu + sigma * g).exp()).collect()
}

/// Grows a conformal film on a substrate: combined surface
/// h(x) = h_substrate(x) + thickness(x). Deterministic in `seed`.
pub fn grow_film(
    substrate: &SurfaceProfile,
    params: &FilmGrowthParams,
    seed: u64,
) -> Result<SurfaceProfile> {
    params.validate()?;
    let tau = sample_thickness(params, substrate.len(), substrate.dx, seed);
    let heights = substrate
        .heights
        .iter()
        .zip(&tau)
        .map(|(h, t)| h + t)
        .collect();
    Ok(SurfaceProfile {
        x0: substrate.x0,
        dx: substrate.dx,
        heights,
        kind: ProfileKind::Combined,
        seed: Some(seed),
    })
}

/// Film top over an ideal flat substrate (the bare thickness field).
pub fn film_top_profile(
    params: &FilmGrowthParams,
    window: &SynthWindow,
    seed: u64,
) -> Result<SurfaceProfile> {
    params.validate()?;
    let n = (window.length / window.dx).round() as usize + 1;
    if n < MIN_PROFILE_SAMPLES {
        return Err(Error::DomainTooShort(format!(
            "window of {n} samples is below the minimum of {MIN_PROFILE_SAMPLES}"
        )));
    }
    let heights = sample_thickness(params, n, window.dx, seed);
    Ok(SurfaceProfile {
        x0: 0.0,
        dx: window.dx,
        heights,
        kind: ProfileKind::FilmTop,
        seed: Some(seed),
    })
}

// ---------------------------------------------------------------------------
// Profile files: CSV with header `x_m,h_m`
// ---------------------------------------------------------------------------

/// Writes a profile as `x_m,h_m` CSV. Values round-trip exactly.
pub fn save_profile_csv(profile: &SurfaceProfile, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "x_m,h_m")?;
        for i in 0..profile.len() {
            writeln!(w, "{:e},{:e}", profile.x(i), profile.heights[i])?;
        }
        w.flush()
    };
    write().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Default spacing assumed for single-column height files.
pub const SINGLE_COLUMN_DX: f64 = 2e-9;

/// Loads a profile from CSV. Accepts two-column `x_<unit>,h_<unit>` files or
/// single-column `h_<unit>` files (uniform spacing [`SINGLE_COLUMN_DX`]
/// assumed). Units: m, mm, um, nm. Heights are normalized to meters; rows
/// with non-finite values are rejected.
pub fn load_profile_csv(path: &Path) -> Result<SurfaceProfile> {
    load_profile_csv_spaced(path, SINGLE_COLUMN_DX)
}

/// As [`load_profile_csv`], with an explicit spacing for single-column data.
pub fn load_profile_csv_spaced(path: &Path, single_column_dx: f64) -> Result<SurfaceProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

    let (mut x_scale, mut h_scale) = (1.0, 1.0);
    let mut two_column = true;
    let mut data_start: Vec<(usize, &str)> = Vec::new();

    let (first_no, first) = lines.next().ok_or_else(|| Error::ParseError {
        path: path_str.clone(),
        line: 1,
        msg: "empty file".into(),
    })?;
    let is_header = first.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        || first.contains("_");
    if is_header {
        let cols: Vec<&str> = first.split(',').map(str::trim).collect();
        match cols.as_slice() {
            [x_name, h_name] => {
                x_scale = unit_scale(x_name, &path_str, first_no + 1)?;
                h_scale = unit_scale(h_name, &path_str, first_no + 1)?;
            }
            [h_name] => {
                two_column = false;
                h_scale = unit_scale(h_name, &path_str, first_no + 1)?;
            }
            _ => {
                return Err(Error::ParseError {
                    path: path_str,
                    line: first_no + 1,
                    msg: format!("expected 1 or 2 columns, found {}", cols.len()),
                })
            }
        }
    } else {
        two_column = first.contains(',');
        data_start.push((first_no, first));
    }

    let mut xs: Vec<f64> = Vec::new();
    let mut hs: Vec<f64> = Vec::new();
    for (line_no, line) in data_start.into_iter().chain(lines) {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::ParseError {
                path: path_str.clone(),
                line: line_no + 1,
                msg: format!("not a number: `{s}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::ParseError {
                    path: path_str.clone(),
                    line: line_no + 1,
                    msg: "non-finite value".into(),
                });
            }
            Ok(v)
        };
        match (two_column, cols.as_slice()) {
            (true, [x, h]) => {
                xs.push(parse(x)? * x_scale);
                hs.push(parse(h)? * h_scale);
            }
            (false, [h]) => hs.push(parse(h)? * h_scale),
            _ => {
                return Err(Error::ParseError {
                    path: path_str,
                    line: line_no + 1,
                    msg: "inconsistent column count".into(),
                })
            }
        }
    }

    if hs.len() < MIN_PROFILE_SAMPLES {
        return Err(Error::TooFewSamples {
            found: hs.len(),
            required: MIN_PROFILE_SAMPLES,
        });
    }

    let (x0, dx) = if two_column {
        let dx0 = xs[1] - xs[0];
        if !(dx0 > 0.0) {
            return Err(Error::ParseError {
                path: path_str,
                line: 2,
                msg: "x must be strictly increasing".into(),
            });
        }
        for (k, w) in xs.windows(2).enumerate() {
            let d = w[1] - w[0];
            if (d - dx0).abs() > 1e-6 * dx0 {
                return Err(Error::ParseError {
                    path: path_str,
                    line: k + 3,
                    msg: format!("non-uniform spacing: {d:e} vs {dx0:e}"),
                });
            }
        }
        (xs[0], dx0)
    } else {
        (0.0, single_column_dx)
    };

    SurfaceProfile::new(x0, dx, hs, ProfileKind::Substrate, None)
}

fn unit_scale(name: &str, path: &str, line: usize) -> Result<f64> {
    let unit = name.rsplit('_').next().unwrap_or("");
    match unit {
        "m" => Ok(1.0),
        "mm" => Ok(1e-3),
        "um" => Ok(1e-6),
        "nm" => Ok(1e-9),
        other => Err(Error::ParseError {
            path: path.to_string(),
            line,
            msg: format!("unknown unit suffix `{other}` in column `{name}`"),
        }),
    }
}

/// Writes a histogram as `bin_left_m,bin_right_m,count` CSV.
pub fn save_histogram_csv(stats: &RoughnessStats, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "bin_left_m,bin_right_m,count")?;
        for (k, &c) in stats.counts.iter().enumerate() {
            writeln!(w, "{:e},{:e},{}", stats.bin_edges[k], stats.bin_edges[k + 1], c)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Mean film thickness recovered from a combined profile minus its substrate;
/// used for growth sanity checks.
pub fn mean_thickness(combined: &SurfaceProfile, substrate: &SurfaceProfile) -> f64 {
    let n = combined.len().min(substrate.len());
    let sum: f64 = combined.heights[..n]
        .iter()
        .zip(&substrate.heights[..n])
        .map(|(c, s)| c - s)
        .sum();
    sum / n as f64
}

/// Integral of a profile's height over its span (m^2); exposed for tests.
pub fn height_integral(profile: &SurfaceProfile) -> f64 {
    trapezoid_uniform(&profile.heights, profile.dx)
}
