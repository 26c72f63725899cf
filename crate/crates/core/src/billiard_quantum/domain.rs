use serde::Serialize;

use crate::classical::StadiumDomain;
use crate::error::{Error, Result};

/// Axis-aligned rectangle, mainly a test geometry with a closed-form
/// discrete spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Geometry {
    Stadium(StadiumDomain),
    Rectangle(Rectangle),
}

impl Geometry {
    pub fn bounding_box(&self) -> [f64; 4] {
        match self {
            Geometry::Stadium(s) => s.bounding_box(),
            Geometry::Rectangle(r) => [r.x0, r.x1, r.y0, r.y1],
        }
    }

    fn lattice_origin(&self) -> [f64; 2] {
        match self {
            Geometry::Stadium(_) => [0.0, 0.0],
            Geometry::Rectangle(r) => [r.x0, r.y0],
        }
    }

    pub fn strictly_contains(&self, p: [f64; 2]) -> bool {
        match self {
            Geometry::Stadium(s) => s.strictly_contains(p),
            Geometry::Rectangle(r) => p[0] > r.x0 && p[0] < r.x1 && p[1] > r.y0 && p[1] < r.y1,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Geometry::Stadium(s) => s.area(),
            Geometry::Rectangle(r) => (r.x1 - r.x0) * (r.y1 - r.y0),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Geometry::Stadium(s) => s.perimeter(),
            Geometry::Rectangle(r) => 2.0 * ((r.x1 - r.x0) + (r.y1 - r.y0)),
        }
    }

    /// Distance from an interior point to the boundary along a unit axis.
    fn axis_exit(&self, p: [f64; 2], dir: [f64; 2]) -> Option<f64> {
        match self {
            Geometry::Stadium(s) => s.exit(p, dir).map(|(t, _)| t),
            Geometry::Rectangle(r) => Some(match dir {
                [x, _] if x > 0.0 => r.x1 - p[0],
                [x, _] if x < 0.0 => p[0] - r.x0,
                [_, y] if y > 0.0 => r.y1 - p[1],
                _ => p[1] - r.y0,
            }),
        }
    }
}

/// Lattice points strictly inside the domain, numbered row by row.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    pub geometry: Geometry,
    pub h: f64,
    /// Lattice coordinates of grid point (0, 0) are origin + (i_min, j_min)·h.
    pub origin: [f64; 2],
    pub i_min: i64,
    pub j_min: i64,
    pub nx: usize,
    pub ny: usize,
    /// Equation number per grid point, or `None` outside.
    pub index: Vec<Option<usize>>,
    /// (ix, iy) grid coordinates of each unknown.
    pub cells: Vec<(usize, usize)>,
}

/// Boundary fractions below this are clamped to keep the diagonal finite.
const MIN_THETA: f64 = 1e-8;

impl DiscreteDomain {
    pub fn new(geometry: Geometry, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        let [bx0, bx1, by0, by1] = geometry.bounding_box();
        let origin = geometry.lattice_origin();
        let i_min = ((bx0 - origin[0]) / h).floor() as i64;
        let i_max = ((bx1 - origin[0]) / h).ceil() as i64;
        let j_min = ((by0 - origin[1]) / h).floor() as i64;
        let j_max = ((by1 - origin[1]) / h).ceil() as i64;
        let nx = (i_max - i_min + 1) as usize;
        let ny = (j_max - j_min + 1) as usize;
        let mut index = vec![None; nx * ny];
        let mut cells = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let p = [origin[0] + (i_min + ix as i64) as f64 * h, origin[1] + (j_min + iy as i64) as f64 * h];
                if geometry.strictly_contains(p) {
                    index[iy * nx + ix] = Some(cells.len());
                    cells.push((ix, iy));
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::Geometry(format!("no interior grid points at h = {h}")));
        }
        Ok(DiscreteDomain { geometry, h, origin, i_min, j_min, nx, ny, index, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn position(&self, k: usize) -> [f64; 2] {
        let (ix, iy) = self.cells[k];
        self.grid_point(ix, iy)
    }

    pub fn grid_point(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + (self.i_min + ix as i64) as f64 * self.h,
            self.origin[1] + (self.j_min + iy as i64) as f64 * self.h,
        ]
    }

    fn neighbour(&self, k: usize, dx: i64, dy: i64) -> Option<usize> {
        let (ix, iy) = self.cells[k];
        let (x, y) = (ix as i64 + dx, iy as i64 + dy);
        if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
            return None;
        }
        self.index[y as usize * self.nx + x as usize]
    }
}

/// −Δ_h in compressed sparse row form. Symmetric by construction.
#[derive(Debug, Clone)]
pub struct Laplacian {
    pub domain: DiscreteDomain,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Laplacian {
    /// Five-point stencil. A neighbour outside the domain is replaced by the
    /// linear extrapolation through the Dirichlet zero on the boundary: if
    /// the boundary cuts the link at fraction θ of the spacing, the diagonal
    /// gains 1/(θh²) in place of the 1/h² of an interior link. With θ = 1
    /// this is plain masking.
    pub fn new(domain: DiscreteDomain) -> Self {
        let n = domain.len();
        let h = domain.h;
        let inv = 1.0 / (h * h);
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(5 * n);
        let mut values = Vec::with_capacity(5 * n);
        row_ptr.push(0);
        for k in 0..n {
            let p = domain.position(k);
            let mut diag = 0.0;
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(5);
            for (dx, dy) in [(0i64, -1i64), (-1, 0), (1, 0), (0, 1)] {
                match domain.neighbour(k, dx, dy) {
                    Some(l) => {
                        diag += inv;
                        entries.push((l, -inv));
                    }
                    None => {
                        let dist = domain
                            .geometry
                            .axis_exit(p, [dx as f64, dy as f64])
                            .unwrap_or(h);
                        let theta = (dist / h).clamp(MIN_THETA, 1.0);
                        diag += inv / theta;
                    }
                }
            }
            entries.push((k, diag));
            entries.sort_by_key(|e| e.0);
            for (c, v) in entries {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Laplacian { domain, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    pub fn diagonal(&self, r: usize) -> f64 {
        (self.row_ptr[r]..self.row_ptr[r + 1])
            .find(|&k| self.col_idx[k] == r)
            .map(|k| self.values[k])
            .unwrap_or(0.0)
    }

    /// Largest |A_ij − A_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let back = (self.row_ptr[c]..self.row_ptr[c + 1])
                    .find(|&q| self.col_idx[q] == r)
                    .map(|q| self.values[q])
                    .unwrap_or(0.0);
                worst = worst.max((self.values[k] - back).abs());
            }
        }
        worst
    }
}

/// Minimum number of interior unknowns accepted by [`build_laplacian`].
pub const MIN_INTERIOR: usize = 1000;

pub fn build_laplacian(domain: &StadiumDomain, h: f64) -> Result<Laplacian> {
    build_laplacian_on(Geometry::Stadium(*domain), h)
}

pub fn build_laplacian_on(geometry: Geometry, h: f64) -> Result<Laplacian> {
    let d = DiscreteDomain::new(geometry, h)?;
    if d.len() < MIN_INTERIOR {
        return Err(Error::InvalidArgument(format!(
            "only {} interior points at h = {h}; need at least {MIN_INTERIOR}",
            d.len()
        )));
    }
    Ok(Laplacian::new(d))
}
