//! PPM (P6) renders of a map, a plan's expansions and path, and simulated
//! trajectories. Each grid cell becomes a `scale`×`scale` block; the top image
//! row is the top of the map.

use std::fs;
use std::path::Path;

use crate::map::{Occupancy, OccupancyGrid, WorldPoint};
use crate::planners::PlanResult;
use crate::sim::SimTrace;
use crate::{Error, Result};

pub type Rgb = [u8; 3];

pub const FREE: Rgb = [255, 255, 255];
pub const OCCUPIED: Rgb = [0, 0, 0];
pub const UNKNOWN: Rgb = [128, 128, 128];
pub const EXPANDED: Rgb = [170, 200, 240];
pub const PATH: Rgb = [220, 30, 30];
pub const TRUE_TRAJECTORY: Rgb = [0, 150, 0];
pub const ESTIMATED_TRAJECTORY: Rgb = [240, 140, 0];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Raster {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Self {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = c;
        }
    }

    fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb) {
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.put(x, y, c);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    pub fn count(&self, c: Rgb) -> usize {
        self.pixels.iter().filter(|&&p| p == c).count()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::MalformedImage(m.to_string());
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated PPM header"));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("expected P6 with maxval 255"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
        let data = bytes.get(pos + 1..).ok_or_else(|| bad("missing raster"))?;
        if data.len() != width * height * 3 {
            return Err(bad("raster size mismatch"));
        }
        Ok(Self {
            width,
            height,
            pixels: data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        })
    }
}

fn to_pixel(grid: &OccupancyGrid, p: WorldPoint, scale: usize) -> (i64, i64) {
    let o = grid.origin();
    let (s, c) = o.theta.sin_cos();
    let dx = p.x - o.x;
    let dy = p.y - o.y;
    let lx = (c * dx + s * dy) / grid.resolution() * scale as f64;
    let ly = (-s * dx + c * dy) / grid.resolution() * scale as f64;
    let h = (grid.height() * scale) as f64;
    (lx.floor() as i64, (h - ly).floor() as i64)
}

/// Draws the map, expanded cells, the planned path and, if given, the true
/// and estimated trajectories.
pub fn render_raster(
    grid: &OccupancyGrid,
    result: Option<&PlanResult>,
    trace: Option<&SimTrace>,
    scale: usize,
) -> Raster {
    let scale = scale.max(1);
    let mut img = Raster::new(grid.width() * scale, grid.height() * scale, FREE);
    let fill_cell = |img: &mut Raster, col: usize, row: usize, c: Rgb| {
        let y0 = (grid.height() - 1 - row) * scale;
        let x0 = col * scale;
        for y in y0..y0 + scale {
            img.pixels[y * img.width + x0..y * img.width + x0 + scale].fill(c);
        }
    };
    for i in grid.indices() {
        let c = match grid.get(i).expect("in bounds") {
            Occupancy::Free => continue,
            Occupancy::Occupied => OCCUPIED,
            Occupancy::Unknown => UNKNOWN,
        };
        fill_cell(&mut img, i.col, i.row, c);
    }
    if let Some(plan) = result {
        for i in plan.expansion_order.iter().filter(|&&i| grid.contains(i)) {
            fill_cell(&mut img, i.col, i.row, EXPANDED);
        }
        for i in plan.path.iter().filter(|&&i| grid.contains(i)) {
            fill_cell(&mut img, i.col, i.row, PATH);
        }
    }
    if let Some(trace) = trace {
        let polyline = |img: &mut Raster, pts: Vec<WorldPoint>, c: Rgb| {
            let px: Vec<_> = pts.iter().map(|&p| to_pixel(grid, p, scale)).collect();
            for w in px.windows(2) {
                img.line(w[0], w[1], c);
            }
            if let [only] = px.as_slice() {
                img.put(only.0, only.1, c);
            }
        };
        polyline(
            &mut img,
            trace.records.iter().map(|r| r.truth.position()).collect(),
            TRUE_TRAJECTORY,
        );
        polyline(
            &mut img,
            trace
                .records
                .iter()
                .map(|r| r.estimate.position())
                .collect(),
            ESTIMATED_TRAJECTORY,
        );
    }
    img
}

pub fn render(
    grid: &OccupancyGrid,
    result: Option<&PlanResult>,
    trace: Option<&SimTrace>,
    out_path: impl AsRef<Path>,
    scale: usize,
) -> Result<()> {
    fs::write(out_path, render_raster(grid, result, trace, scale).to_ppm())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{GridIndex, MapOrigin};

    fn free(w: usize, h: usize) -> OccupancyGrid {
        OccupancyGrid::filled(w, h, 1.0, MapOrigin::default(), Occupancy::Free).unwrap()
    }

    fn one_cell_plan(i: GridIndex) -> PlanResult {
        PlanResult {
            path: vec![i],
            cost: 0.0,
            expanded: 1,
            expansion_order: vec![i],
            wall_time: 0.0,
        }
    }

    #[test]
    fn trivial_path_render() {
        let g = free(5, 5);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.ppm");
        render(
            &g,
            Some(&one_cell_plan(GridIndex::new(1, 3))),
            None,
            &out,
            10,
        )
        .unwrap();
        let img = Raster::from_ppm(&fs::read(&out).unwrap()).unwrap();
        assert_eq!((img.width, img.height), (50, 50));
        assert_eq!(img.count(PATH), 100);
        // row 3 from the bottom is image rows 10..20
        assert_eq!(img.get(15, 15), PATH);
        assert_eq!(img.count(FREE), 2400);
    }

    #[test]
    fn occupied_cell_is_black() {
        let mut g = free(3, 2);
        g.set(GridIndex::new(2, 0), Occupancy::Occupied).unwrap();
        g.set(GridIndex::new(0, 1), Occupancy::Unknown).unwrap();
        let img = render_raster(&g, None, None, 4);
        assert_eq!(img.count(OCCUPIED), 16);
        for y in 4..8 {
            for x in 8..12 {
                assert_eq!(img.get(x, y), OCCUPIED);
            }
        }
        assert_eq!(img.get(0, 0), UNKNOWN);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let g = free(2, 2);
        let r = render(&g, None, None, "/nonexistent-dir/x/y.ppm", 2);
        assert!(matches!(r, Err(Error::Io(_))));
    }

    #[test]
    fn ppm_round_trip() {
        let img = render_raster(
            &free(3, 3),
            Some(&one_cell_plan(GridIndex::new(0, 0))),
            None,
            3,
        );
        assert_eq!(Raster::from_ppm(&img.to_ppm()).unwrap(), img);
    }
}
