//! Random obstacle fields.
//!
//! An obstacle field is a Poisson point process of centers in a periodic
//! strip, dressed with a radial pinning profile: the indicator of the union
//! of discs of radius `r0 + (r1 - r0)/2`, mollified by the standard bump
//! kernel scaled to radius `(r1 - r0)/2`, multiplied by the strength `f`,
//! and capped at `f` where discs overlap. Consequences used throughout:
//! `phi = f` within distance `r0` of any center (exactly), `phi = 0` beyond
//! distance `r1` of every center (exactly), and `phi` is smooth and radially
//! decreasing in between.
//!
//! The band `[y_min, y_max]` is generated lazily in horizontal strips of
//! height `8/sqrt(rho)`. Each strip draws from its own seeded substream, so
//! the center set is a pure function of `(params, y_min, width)` regardless
//! of the order or batching of band extensions.
//!
//! Center x-coordinates are quantized to the lattice `width * 2^-32`, which
//! makes the periodic wrap `x ± width` exact in f64 whenever `width` is a
//! dyadic rational (see [`crate::numeric::dyadic_window`]); statistically
//! the quantization is far below any observable scale.

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, adaptive_simpson_rel, MonotoneCubic};
use crate::rng;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex, OnceLock};

/// Number of radial knots in the tabulated single-obstacle profile.
const PROFILE_KNOTS: usize = 2048;

/// Parameters of the random obstacle field.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ObstacleParams {
    /// Mean number of centers per unit area (> 0).
    pub rho: f64,
    /// Full-strength core radius (> 0).
    pub r0: f64,
    /// Outer support radius (> r0).
    pub r1: f64,
    /// Pinning strength (>= 0).
    pub f: f64,
    /// Master seed of the field.
    pub seed: u64,
}

impl ObstacleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParam(format!("rho must be > 0, got {}", self.rho)));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::InvalidParam(format!("r0 must be > 0, got {}", self.r0)));
        }
        if !(self.r1 > self.r0 && self.r1.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "r1 must exceed r0 ({}), got {}",
                self.r0, self.r1
            )));
        }
        if !(self.f >= 0.0 && self.f.is_finite()) {
            return Err(Error::InvalidParam(format!("f must be >= 0, got {}", self.f)));
        }
        Ok(())
    }

    /// Height of one lazily generated strip.
    pub fn strip_height(&self) -> f64 {
        8.0 / self.rho.sqrt()
    }
}

/// Periodic-in-x strip domain; `[y_min, y_max]` is the generated band.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Domain {
    pub width: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub periodic_x: bool,
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidParam(format!("width must be > 0, got {}", self.width)));
        }
        if !(self.y_max >= self.y_min) || !self.y_min.is_finite() || !self.y_max.is_finite() {
            return Err(Error::InvalidParam(format!(
                "band [{}, {}] is not a valid interval",
                self.y_min, self.y_max
            )));
        }
        Ok(())
    }
}

/// Standard bump kernel, unnormalized: exp(-1/(1-s^2)) on |s| < 1.
fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Tabulated radial profile of one isolated obstacle: the convolution of the
/// unit-mass bump mollifier (radius `eps = (r1 - r0)/2`) with the indicator
/// of the disc of radius `r0 + eps`, as a function of the distance `d` from
/// the center. Equals 1 for `d <= r0`, 0 for `d >= r1`, and is interpolated
/// monotonically on 2048 uniform knots in between.
#[derive(Debug)]
pub struct ObstacleProfile {
    r0: f64,
    r1: f64,
    inv_step: f64,
    y: Vec<f64>,
    m: Vec<f64>,
    max_slope: f64,
}

impl ObstacleProfile {
    pub fn build(r0: f64, r1: f64) -> Self {
        let eps = 0.5 * (r1 - r0);
        let disc_r = r0 + eps;
        // Unit 2D mass, to relative tolerance 1e-8 by adaptive quadrature.
        let mass = 2.0
            * std::f64::consts::PI
            * adaptive_simpson_rel(&|t: f64| t * bump(t), 0.0, 1.0, 1e-8);
        let c1 = 1.0 / mass;

        // Angular half-measure of the circle of radius s around a point at
        // distance d from the origin that lies inside the disc of radius
        // disc_r: the convolution reduces to a 1D integral over s.
        let theta_star = |d: f64, s: f64| -> f64 {
            if s <= 0.0 || d <= 0.0 {
                return if d < disc_r { std::f64::consts::PI } else { 0.0 };
            }
            let c = (d * d + s * s - disc_r * disc_r) / (2.0 * d * s);
            c.clamp(-1.0, 1.0).acos()
        };

        let step = (r1 - r0) / (PROFILE_KNOTS - 1) as f64;
        let mut xs = Vec::with_capacity(PROFILE_KNOTS);
        let mut ys = Vec::with_capacity(PROFILE_KNOTS);
        for k in 0..PROFILE_KNOTS {
            let d = if k == PROFILE_KNOTS - 1 { r1 } else { r0 + step * k as f64 };
            let v = if k == 0 {
                1.0 // mollifier support contained in the disc
            } else if k == PROFILE_KNOTS - 1 {
                0.0 // supports disjoint
            } else {
                let integrand = |t: f64| 2.0 * theta_star(d, eps * t) * c1 * bump(t) * t;
                // The integrand vanishes identically below t_lo (circle too
                // small to reach the disc) and kinks at t_full (circle fully
                // inside, theta* capped at pi). Integrating between those
                // points keeps the quadrature probes on the support; blind
                // sampling of [0, 1] can miss a support pinned near t = 1.
                let t_lo = ((d - disc_r) / eps).clamp(0.0, 1.0);
                let t_full = ((disc_r - d) / eps).clamp(0.0, 1.0);
                let mut cuts = vec![t_lo, 1.0];
                if t_full > t_lo && t_full < 1.0 {
                    cuts.insert(1, t_full);
                }
                let raw: f64 = cuts
                    .windows(2)
                    .map(|p| adaptive_simpson(&integrand, p[0], p[1], 1e-11, 32))
                    .sum();
                raw.clamp(0.0, 1.0)
            };
            xs.push(d);
            ys.push(v);
        }
        // Quadrature noise must not break monotonicity of the table.
        for k in 1..PROFILE_KNOTS {
            if ys[k] > ys[k - 1] {
                ys[k] = ys[k - 1];
            }
        }
        let cubic = MonotoneCubic::new(xs, ys.clone());
        let max_slope = cubic.max_abs_slope(16);
        let m = cubic.slopes().to_vec();
        ObstacleProfile { r0, r1, inv_step: 1.0 / step, y: ys, m, max_slope }
    }

    /// Profile value at distance `d` from an isolated center.
    #[inline]
    pub fn eval(&self, d: f64) -> f64 {
        if d <= self.r0 {
            return 1.0;
        }
        if d >= self.r1 {
            return 0.0;
        }
        let u = (d - self.r0) * self.inv_step;
        let i = (u as usize).min(self.y.len() - 2);
        let t = u - i as f64;
        let h = 1.0 / self.inv_step;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    /// Lipschitz constant of the radial profile (from the dense table).
    pub fn max_abs_slope(&self) -> f64 {
        self.max_slope
    }
}

/// Profiles depend only on (r0, r1); cache them process-wide since sweeps
/// construct thousands of fields with identical geometry.
type ProfileCache = Mutex<HashMap<(u64, u64), Arc<ObstacleProfile>>>;

fn profile_for(r0: f64, r1: f64) -> Arc<ObstacleProfile> {
    static CACHE: OnceLock<ProfileCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (r0.to_bits(), r1.to_bits());
    if let Some(p) = cache.lock().unwrap().get(&key) {
        return Arc::clone(p);
    }
    let built = Arc::new(ObstacleProfile::build(r0, r1));
    cache.lock().unwrap().entry(key).or_insert(built).clone()
}

/// Uniform-cell spatial index over the band. Cell sides are >= r1 whenever
/// geometry permits, so a radius-r1 query touches a bounded neighborhood.
#[derive(Debug, Clone)]
struct CellGrid {
    nx: usize,
    cell_w: f64,
    cell_h: f64,
    col_span: isize,
    row_span: isize,
    rows: Vec<GridRow>,
}

/// One row of cells in CSR form: items of cell c are
/// `items[starts[c]..starts[c+1]]`.
#[derive(Debug, Clone)]
struct GridRow {
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl CellGrid {
    fn new(width: f64, r1: f64, strip_h: f64) -> Self {
        let nx = ((width / r1).floor() as usize).max(1);
        let cell_w = width / nx as f64;
        let rows_per_strip = ((strip_h / r1).floor() as usize).max(1);
        let cell_h = strip_h / rows_per_strip as f64;
        CellGrid {
            nx,
            cell_w,
            cell_h,
            col_span: (r1 / cell_w).ceil() as isize,
            row_span: (r1 / cell_h).ceil() as isize,
            rows: Vec::new(),
        }
    }

    /// Appends the rows of one strip; `centers[first..]` are its centers.
    fn push_strip(&mut self, centers: &[[f64; 2]], first: usize, y_lo: f64, rows_per_strip: usize) {
        let mut buckets: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); self.nx]; rows_per_strip];
        for (off, c) in centers[first..].iter().enumerate() {
            let r = (((c[1] - y_lo) / self.cell_h) as usize).min(rows_per_strip - 1);
            let col = ((c[0] / self.cell_w) as usize).min(self.nx - 1);
            buckets[r][col].push((first + off) as u32);
        }
        for row in buckets {
            let mut starts = Vec::with_capacity(self.nx + 1);
            let mut items = Vec::new();
            starts.push(0u32);
            for cell in row {
                items.extend_from_slice(&cell);
                starts.push(items.len() as u32);
            }
            self.rows.push(GridRow { starts, items });
        }
    }

    #[inline]
    fn cell_of(&self, x: f64, y: f64, y_min: f64) -> (isize, isize) {
        let col = ((x / self.cell_w) as isize).min(self.nx as isize - 1).max(0);
        let row = ((y - y_min) / self.cell_h).floor() as isize;
        (col, row)
    }

    #[inline]
    fn cell_items(&self, col: isize, row: isize) -> &[u32] {
        let c = col.rem_euclid(self.nx as isize) as usize;
        let grow = &self.rows[row as usize];
        &grow.items[grow.starts[c] as usize..grow.starts[c + 1] as usize]
    }
}

/// A random obstacle field over a periodic strip.
#[derive(Debug, Clone)]
pub struct ObstacleField {
    params: ObstacleParams,
    domain: Domain,
    centers: Vec<[f64; 2]>,
    grid: CellGrid,
    profile: Arc<ObstacleProfile>,
    strips: i64,
    strip_h: f64,
    rows_per_strip: usize,
    x_quantum: f64,
    synthetic: bool,
}

impl ObstacleField {
    /// Generates the band `[y_min, y_top]` (rounded up to whole strips).
    pub fn generate(params: ObstacleParams, width: f64, y_min: f64, y_top: f64) -> Result<Self> {
        params.validate()?;
        let domain = Domain { width, y_min, y_max: y_min, periodic_x: true };
        domain.validate()?;
        if y_top < y_min {
            return Err(Error::InvalidParam(format!(
                "requested band top {y_top} below y_min {y_min}"
            )));
        }
        let strip_h = params.strip_height();
        let rows_per_strip = ((strip_h / params.r1).floor() as usize).max(1);
        let mut field = ObstacleField {
            grid: CellGrid::new(width, params.r1, strip_h),
            params,
            domain,
            centers: Vec::new(),
            profile: profile_for(params.r0, params.r1),
            strips: 0,
            strip_h,
            rows_per_strip,
            x_quantum: width * f64::powi(2.0, -32),
            synthetic: false,
        };
        field.extend_band(y_top)?;
        Ok(field)
    }

    /// Builds a field from an explicit center list (synthetic layouts for
    /// tests and worked examples). The band is `[y_min, y_max]` rounded up
    /// to whole strips; extending it further draws Poisson strips as usual.
    pub fn from_centers(
        params: ObstacleParams,
        width: f64,
        y_min: f64,
        y_max: f64,
        centers: Vec<[f64; 2]>,
    ) -> Result<Self> {
        params.validate()?;
        let strip_h = params.strip_height();
        let strips = (((y_max - y_min) / strip_h).ceil() as i64).max(1);
        let domain =
            Domain { width, y_min, y_max: y_min + strips as f64 * strip_h, periodic_x: true };
        domain.validate()?;
        for c in &centers {
            if !(0.0..width).contains(&c[0]) || c[1] < y_min || c[1] > domain.y_max {
                return Err(Error::InvalidParam(format!(
                    "center ({}, {}) outside domain",
                    c[0], c[1]
                )));
            }
        }
        let mut field = ObstacleField {
            grid: CellGrid::new(width, params.r1, strip_h),
            params,
            domain,
            centers: Vec::new(),
            profile: profile_for(params.r0, params.r1),
            strips,
            strip_h,
            rows_per_strip: ((strip_h / params.r1).floor() as usize).max(1),
            x_quantum: width * f64::powi(2.0, -32),
            synthetic: true,
        };
        // Order centers strip by strip so the grid rows stay contiguous.
        for s in 0..strips {
            let lo = y_min + s as f64 * strip_h;
            let hi = lo + strip_h;
            let first = field.centers.len();
            for c in &centers {
                let in_strip = if s == strips - 1 { c[1] >= lo } else { c[1] >= lo && c[1] < hi };
                if in_strip {
                    field.centers.push(*c);
                }
            }
            let taken = std::mem::take(&mut field.centers);
            field.grid.push_strip(&taken, first, lo, field.rows_per_strip);
            field.centers = taken;
        }
        Ok(field)
    }

    pub fn params(&self) -> &ObstacleParams {
        &self.params
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn centers(&self) -> &[[f64; 2]] {
        &self.centers
    }

    pub fn profile(&self) -> &ObstacleProfile {
        &self.profile
    }

    /// Extends the generated band upward to cover `y_top` (whole strips).
    /// Already-generated strips are never touched, so extending in several
    /// calls or one call yields the identical field.
    pub fn extend_band(&mut self, y_top: f64) -> Result<()> {
        if !y_top.is_finite() {
            return Err(Error::InvalidParam("band top must be finite".into()));
        }
        while self.domain.y_min + self.strips as f64 * self.strip_h < y_top {
            self.generate_strip(self.strips);
            self.strips += 1;
            self.domain.y_max = self.domain.y_min + self.strips as f64 * self.strip_h;
        }
        Ok(())
    }

    fn generate_strip(&mut self, strip: i64) {
        let mut rng = rng::strip_rng(self.params.seed, strip);
        let y_lo = self.domain.y_min + strip as f64 * self.strip_h;
        let lambda = self.params.rho * self.domain.width * self.strip_h;
        let n = Poisson::new(lambda).expect("lambda > 0").sample(&mut rng) as usize;
        let first = self.centers.len();
        for _ in 0..n {
            // x on the dyadic lattice (exact periodic shifts), y continuous.
            let j: u32 = rng.gen();
            let x = j as f64 * self.x_quantum;
            let y = y_lo + rng.gen::<f64>() * self.strip_h;
            self.centers.push([x, y]);
        }
        let taken = std::mem::take(&mut self.centers);
        self.grid.push_strip(&taken, first, y_lo, self.rows_per_strip);
        self.centers = taken;
    }

    /// Wraps x into the canonical window `[0, width)`.
    #[inline]
    pub fn wrap_x(&self, x: f64) -> f64 {
        if !self.domain.periodic_x {
            return x;
        }
        let w = self.domain.width;
        if (0.0..w).contains(&x) {
            return x;
        }
        let wrapped = x - w * (x / w).floor();
        if wrapped >= w || wrapped < 0.0 {
            0.0
        } else {
            wrapped
        }
    }

    /// Periodic distance squared between a query point and a center.
    #[inline]
    fn dist2(&self, x: f64, y: f64, c: &[f64; 2]) -> f64 {
        let mut dx = (x - c[0]).abs();
        if self.domain.periodic_x {
            let alt = self.domain.width - dx;
            if alt < dx {
                dx = alt;
            }
        }
        let dy = y - c[1];
        dx * dx + dy * dy
    }

    /// Pinning strength at `(x, y)`; errors when the band does not cover the
    /// full r1-neighborhood of the query height.
    pub fn phi(&self, x: f64, y: f64) -> Result<f64> {
        let lo = self.domain.y_min + self.params.r1;
        let hi = self.domain.y_max - self.params.r1;
        if y < lo || y > hi {
            return Err(Error::OutOfBand { y, lo, hi });
        }
        Ok(self.phi_hot(x, y))
    }

    /// Band top required so `phi` is exact for queries up to height `y`.
    pub fn band_required(&self, y: f64) -> f64 {
        y + self.params.r1
    }

    /// Unchecked evaluation; callers must have generated the band past
    /// `y + r1` (the simulator and certificate builders guarantee this).
    #[inline]
    pub(crate) fn phi_hot(&self, x: f64, y: f64) -> f64 {
        if self.params.f == 0.0 || self.grid.rows.is_empty() {
            return 0.0;
        }
        let x = self.wrap_x(x);
        let (col, row) = self.grid.cell_of(x, y, self.domain.y_min);
        let r1sq = self.params.r1 * self.params.r1;
        let r0sq = self.params.r0 * self.params.r0;
        let mut sum = 0.0;
        let row_lo = (row - self.grid.row_span).max(0);
        let row_hi = (row + self.grid.row_span).min(self.grid.rows.len() as isize - 1);
        let all_cols = 2 * self.grid.col_span + 1 >= self.grid.nx as isize;
        let mut r = row_lo;
        while r <= row_hi {
            if all_cols {
                let grow = &self.grid.rows[r as usize];
                if self.scan_items(&grow.items, x, y, r0sq, r1sq, &mut sum) {
                    return self.params.f;
                }
            } else {
                let mut dc = -self.grid.col_span;
                while dc <= self.grid.col_span {
                    let items = self.grid.cell_items(col + dc, r);
                    if self.scan_items(items, x, y, r0sq, r1sq, &mut sum) {
                        return self.params.f;
                    }
                    dc += 1;
                }
            }
            r += 1;
        }
        self.params.f * sum.min(1.0)
    }

    /// Accumulates profile contributions; true once the cap is reached.
    #[inline]
    fn scan_items(
        &self,
        items: &[u32],
        x: f64,
        y: f64,
        r0sq: f64,
        r1sq: f64,
        sum: &mut f64,
    ) -> bool {
        for &i in items {
            let d2 = self.dist2(x, y, &self.centers[i as usize]);
            if d2 <= r0sq {
                return true; // on a plateau: phi = f exactly
            }
            if d2 < r1sq {
                *sum += self.profile.eval(d2.sqrt());
                if *sum >= 1.0 {
                    return true;
                }
            }
        }
        false
    }

    /// Sample mean of the nearest-neighbor distance over all centers
    /// (periodic metric in x). `None` with fewer than two centers.
    pub fn nearest_obstacle_stats(&self) -> Option<NearestStats> {
        if self.centers.len() < 2 {
            return None;
        }
        let min_cell = self.grid.cell_w.min(self.grid.cell_h);
        let n_rows = self.grid.rows.len() as isize;
        let half_cols = (self.grid.nx as isize + 1) / 2;
        let mut total = 0.0;
        for (i, c) in self.centers.iter().enumerate() {
            let (col, row) = self.grid.cell_of(self.wrap_x(c[0]), c[1], self.domain.y_min);
            let mut best = f64::INFINITY;
            let visit = |cc: isize, rr: isize, best: &mut f64| {
                if rr < 0 || rr >= n_rows {
                    return;
                }
                for &j in self.grid.cell_items(cc, rr) {
                    if j as usize != i {
                        let d2 = self.dist2(c[0], c[1], &self.centers[j as usize]);
                        if d2 < *best {
                            *best = d2;
                        }
                    }
                }
            };
            // Expanding square rings in the wrapped Chebyshev metric: after
            // finishing ring k every unvisited center is at least
            // k * min_cell away, which bounds the search.
            let mut ring = 0isize;
            loop {
                if ring == 0 {
                    visit(col, row, &mut best);
                } else {
                    let span = ring.min(half_cols);
                    for dc in -span..=span {
                        visit(col + dc, row - ring, &mut best);
                        visit(col + dc, row + ring, &mut best);
                    }
                    if ring <= half_cols {
                        for dr in -(ring - 1)..=(ring - 1) {
                            visit(col - ring, row + dr, &mut best);
                            visit(col + ring, row + dr, &mut best);
                        }
                    }
                }
                let cleared = ring as f64 * min_cell;
                if best.sqrt() <= cleared || ring > n_rows + half_cols + 2 {
                    break;
                }
                ring += 1;
            }
            total += best.sqrt();
        }
        Some(NearestStats { mean: total / self.centers.len() as f64, count: self.centers.len() })
    }

    /// Writes the field as JSON lines: one header record, then one record
    /// per center (strip order). The round trip through `load` is bit-exact.
    pub fn dump<W: Write>(&self, out: W) -> Result<()> {
        self.dump_tagged(out, None)
    }

    /// Like [`ObstacleField::dump`], with an experiment hash in the header.
    pub fn dump_tagged<W: Write>(&self, mut out: W, config_hash: Option<&str>) -> Result<()> {
        let header = FieldHeader {
            kind: "obstacle_field".into(),
            version: crate::VERSION.into(),
            config_hash: config_hash.map(String::from),
            params: self.params,
            domain: self.domain,
            synthetic: self.synthetic,
            n_centers: self.centers.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for c in &self.centers {
            serde_json::to_writer(&mut out, &CenterRecord { x: c[0], y: c[1] })?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Loads a field dumped by [`ObstacleField::dump`].
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header: FieldHeader = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Config("empty field file".into())),
        };
        if header.kind != "obstacle_field" {
            return Err(Error::Config(format!("unexpected record kind {}", header.kind)));
        }
        header.params.validate()?;
        header.domain.validate()?;
        let mut centers = Vec::with_capacity(header.n_centers);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CenterRecord = serde_json::from_str(&line)?;
            centers.push([rec.x, rec.y]);
        }
        if centers.len() != header.n_centers {
            return Err(Error::Config(format!(
                "center count mismatch: header {} vs body {}",
                header.n_centers,
                centers.len()
            )));
        }
        let params = header.params;
        let strip_h = params.strip_height();
        let strips = ((header.domain.y_max - header.domain.y_min) / strip_h).round() as i64;
        let rows_per_strip = ((strip_h / params.r1).floor() as usize).max(1);
        let mut grid = CellGrid::new(header.domain.width, params.r1, strip_h);
        let mut cursor = 0usize;
        for s in 0..strips {
            let lo = header.domain.y_min + s as f64 * strip_h;
            let hi = lo + strip_h;
            let first = cursor;
            while cursor < centers.len() && (s == strips - 1 || centers[cursor][1] < hi) {
                cursor += 1;
            }
            grid.push_strip(&centers[..cursor], first, lo, rows_per_strip);
        }
        Ok(ObstacleField {
            grid,
            params,
            domain: header.domain,
            centers,
            profile: profile_for(params.r0, params.r1),
            strips,
            strip_h,
            rows_per_strip,
            x_quantum: header.domain.width * f64::powi(2.0, -32),
            synthetic: header.synthetic,
        })
    }

    /// Returns a copy whose centers are translated by one full period in x
    /// and re-wrapped. On a dyadic window the copy is bit-identical to the
    /// original: the translation-equivariance contract of the periodic
    /// representation.
    pub fn translated_one_period(&self) -> Self {
        let w = self.domain.width;
        let centers = self
            .centers
            .iter()
            .map(|c| {
                let shifted = c[0] + w;
                [if shifted >= w { shifted - w } else { shifted }, c[1]]
            })
            .collect::<Vec<_>>();
        let mut copy = self.clone();
        copy.centers = centers;
        copy.rebuild_grid();
        copy
    }

    fn rebuild_grid(&mut self) {
        let mut grid = CellGrid::new(self.domain.width, self.params.r1, self.strip_h);
        let mut cursor = 0usize;
        for s in 0..self.strips {
            let lo = self.domain.y_min + s as f64 * self.strip_h;
            let hi = lo + self.strip_h;
            let first = cursor;
            while cursor < self.centers.len()
                && (s == self.strips - 1 || self.centers[cursor][1] < hi)
            {
                cursor += 1;
            }
            grid.push_strip(&self.centers[..cursor], first, lo, self.rows_per_strip);
        }
        self.grid = grid;
    }
}

/// Result of [`ObstacleField::nearest_obstacle_stats`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NearestStats {
    pub mean: f64,
    pub count: usize,
}

#[derive(Serialize, Deserialize)]
struct FieldHeader {
    kind: String,
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
    params: ObstacleParams,
    domain: Domain,
    synthetic: bool,
    n_centers: usize,
}

#[derive(Serialize, Deserialize)]
struct CenterRecord {
    x: f64,
    y: f64,
}
