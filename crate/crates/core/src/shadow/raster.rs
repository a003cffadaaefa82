use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shadow::ConvexCellSystem;

/// Largest grid side tried before the raster oracle gives up.
pub const MAX_RESOLUTION: usize = 4096;

/// A binary image of the union of cells, one pixel of padding on each side.
#[derive(Clone, Debug)]
pub struct RasterGrid {
    pub width: usize,
    pub height: usize,
    pub origin: [f64; 2],
    pub pixel: f64,
    pub filled: Vec<bool>,
}

impl RasterGrid {
    fn at(&self, i: usize, j: usize) -> bool {
        self.filled[j * self.width + i]
    }

    /// Binary PGM (P5), foreground black, top row first.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for j in (0..self.height).rev() {
            out.extend((0..self.width).map(|i| if self.at(i, j) { 0u8 } else { 255u8 }));
        }
        out
    }

    fn components(&self, foreground: bool, eight: bool) -> (usize, usize) {
        let (w, h) = (self.width, self.height);
        let mut seen = vec![false; w * h];
        let mut count = 0;
        let mut bounded = 0;
        let mut queue = VecDeque::new();
        for start in 0..w * h {
            if seen[start] || self.filled[start] != foreground {
                continue;
            }
            count += 1;
            let mut touches_border = false;
            seen[start] = true;
            queue.push_back(start);
            while let Some(p) = queue.pop_front() {
                let (i, j) = ((p % w) as isize, (p / w) as isize);
                if i == 0 || j == 0 || i as usize == w - 1 || j as usize == h - 1 {
                    touches_border = true;
                }
                for (di, dj) in NEIGHBOURS {
                    if !eight && di != 0 && dj != 0 {
                        continue;
                    }
                    let (ni, nj) = (i + di, j + dj);
                    if ni < 0 || nj < 0 || ni as usize >= w || nj as usize >= h {
                        continue;
                    }
                    let q = nj as usize * w + ni as usize;
                    if !seen[q] && self.filled[q] == foreground {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
            if !touches_border {
                bounded += 1;
            }
        }
        (count, bounded)
    }
}

const NEIGHBOURS: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// Betti numbers of the rasterized union and the resolution they settled at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterResult {
    pub b0: usize,
    pub b1: usize,
    pub resolution: usize,
}

/// Convex hull in counter-clockwise order (monotone chain). Degenerate
/// inputs give one or two points.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // All points collinear and collapsed; keep the extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Whether the closed square `[x, x+h] x [y, y+h]` meets the closed convex
/// polygon `poly` (separating axis test).
fn square_meets(poly: &[[f64; 2]], x: f64, y: f64, h: f64) -> bool {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if hi[0] < x || lo[0] > x + h || hi[1] < y || lo[1] > y + h {
        return false;
    }
    let corners = [[x, y], [x + h, y], [x, y + h], [x + h, y + h]];
    let m = poly.len();
    let edges = if m == 2 { 1 } else if m > 2 { m } else { 0 };
    for e in 0..edges {
        let (a, b) = (poly[e], poly[(e + 1) % m]);
        let n = [b[1] - a[1], a[0] - b[0]];
        let proj = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1];
        let (pl, ph) = poly.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        let (sl, sh) = corners.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if sh < pl || sl > ph {
            return false;
        }
    }
    true
}

/// Conservative rasterization: a pixel is filled when its closed square
/// meets some cell.
pub fn rasterize(cells: &ConvexCellSystem, resolution: usize) -> Result<RasterGrid> {
    if cells.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: cells.dim() });
    }
    if cells.is_empty() {
        return Err(Error::Empty);
    }
    let coords = cells.coords();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in cells.cells() {
        for &v in c {
            let p = coords.point(v);
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let pixel = if extent > 0.0 { extent / resolution as f64 } else { 1.0 / resolution as f64 };
    let origin = [lo[0] - pixel, lo[1] - pixel];
    let width = ((hi[0] - lo[0]) / pixel).floor() as usize + 3;
    let height = ((hi[1] - lo[1]) / pixel).floor() as usize + 3;
    let mut filled = vec![false; width * height];
    let index = |v: f64, k: usize, limit: usize| (((v - origin[k]) / pixel).floor().max(0.0) as usize).min(limit - 1);
    for c in cells.cells() {
        let poly = convex_hull(c.iter().map(|&v| [coords.point(v)[0], coords.point(v)[1]]).collect());
        let (blo, bhi) = poly.iter().fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(mut l, mut h), p| {
            for k in 0..2 {
                l[k] = l[k].min(p[k]);
                h[k] = h[k].max(p[k]);
            }
            (l, h)
        });
        // One extra pixel on each side absorbs rounding in the index computation.
        let (i0, i1) = (index(blo[0], 0, width).saturating_sub(1), (index(bhi[0], 0, width) + 1).min(width - 1));
        let (j0, j1) = (index(blo[1], 1, height).saturating_sub(1), (index(bhi[1], 1, height) + 1).min(height - 1));
        for j in j0..=j1 {
            let y = origin[1] + j as f64 * pixel;
            for i in i0..=i1 {
                let cell = &mut filled[j * width + i];
                if !*cell && square_meets(&poly, origin[0] + i as f64 * pixel, y, pixel) {
                    *cell = true;
                }
            }
        }
    }
    Ok(RasterGrid { width, height, origin, pixel, filled })
}

fn betti_at(cells: &ConvexCellSystem, resolution: usize) -> Result<(usize, usize)> {
    let grid = rasterize(cells, resolution)?;
    let (b0, _) = grid.components(true, true);
    let (_, holes) = grid.components(false, false);
    Ok((b0, holes))
}

/// Betti numbers of the union of cells in the plane from a raster image,
/// doubling the resolution until two consecutive resolutions agree.
pub fn raster_betti_2d_detailed(cells: &ConvexCellSystem, resolution: usize) -> Result<RasterResult> {
    if resolution < 64 {
        return Err(Error::InvalidInput(format!("raster resolution must be at least 64, got {resolution}")));
    }
    if resolution > MAX_RESOLUTION {
        return Err(Error::InvalidInput(format!("raster resolution must be at most {MAX_RESOLUTION}")));
    }
    let mut res = resolution;
    let mut prev = betti_at(cells, res)?;
    loop {
        let next = res * 2;
        if next > MAX_RESOLUTION {
            return Err(Error::Inconclusive(format!(
                "Betti numbers did not settle by resolution {res} (last {prev:?})"
            )));
        }
        let cur = betti_at(cells, next)?;
        if cur == prev {
            return Ok(RasterResult { b0: cur.0, b1: cur.1, resolution: next });
        }
        prev = cur;
        res = next;
    }
}

pub fn raster_betti_2d(cells: &ConvexCellSystem, resolution: usize) -> Result<(usize, usize)> {
    raster_betti_2d_detailed(cells, resolution).map(|r| (r.b0, r.b1))
}
