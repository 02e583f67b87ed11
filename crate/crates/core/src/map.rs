//! Occupancy-grid maps in the map-server format (YAML descriptor + PGM image).
//!
//! Grid row 0 is the bottom row of the map: the descriptor origin anchors the
//! lower-left corner of cell (0, 0), so image rows are flipped on load and save.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Error, Result};

pub const DEFAULT_OCCUPIED_THRESH: f64 = 0.65;
pub const DEFAULT_FREE_THRESH: f64 = 0.196;

/// Pixel values written by [`save_map`]; they classify back to the same
/// variant under the default thresholds.
const PIXEL_FREE: u8 = 254;
const PIXEL_OCCUPIED: u8 = 0;
const PIXEL_UNKNOWN: u8 = 205;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Occupancy {
    Free,
    Occupied,
    Unknown,
}

impl Occupancy {
    /// Classifies an occupancy probability. Occupied wins over Free when the
    /// thresholds coincide.
    pub fn classify(p: f64, thresholds: Thresholds) -> Self {
        if p >= thresholds.occupied {
            Occupancy::Occupied
        } else if p <= thresholds.free {
            Occupancy::Free
        } else {
            Occupancy::Unknown
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub occupied: f64,
    pub free: f64,
}

impl Thresholds {
    pub fn new(occupied: f64, free: f64) -> Result<Self> {
        if occupied < free {
            return Err(Error::InvalidThresholds { occupied, free });
        }
        Ok(Self { occupied, free })
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            occupied: DEFAULT_OCCUPIED_THRESH,
            free: DEFAULT_FREE_THRESH,
        }
    }
}

/// Cell address: `col` grows along the map x axis, `row` along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridIndex {
    pub col: usize,
    pub row: usize,
}

impl GridIndex {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &WorldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// World pose of the lower-left corner of cell (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MapOrigin {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: MapOrigin,
    cells: Vec<Occupancy>,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: MapOrigin,
        cells: Vec<Occupancy>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!("dimensions {width}x{height}")));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidGrid(format!("resolution {resolution}")));
        }
        if cells.len() != width * height {
            return Err(Error::InvalidGrid(format!(
                "{} cells for a {width}x{height} grid",
                cells.len()
            )));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            cells,
        })
    }

    /// A grid with every cell set to `fill`.
    pub fn filled(
        width: usize,
        height: usize,
        resolution: f64,
        origin: MapOrigin,
        fill: Occupancy,
    ) -> Result<Self> {
        Self::new(
            width,
            height,
            resolution,
            origin,
            vec![fill; width * height],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> MapOrigin {
        self.origin
    }

    pub fn cells(&self) -> &[Occupancy] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: GridIndex) -> bool {
        i.col < self.width && i.row < self.height
    }

    /// Row-major linear offset of an in-bounds index.
    pub fn linear(&self, i: GridIndex) -> usize {
        i.row * self.width + i.col
    }

    pub fn index_of(&self, linear: usize) -> GridIndex {
        GridIndex::new(linear % self.width, linear / self.width)
    }

    pub fn get(&self, i: GridIndex) -> Option<Occupancy> {
        self.contains(i).then(|| self.cells[self.linear(i)])
    }

    /// Out-of-bounds indices are not free.
    pub fn is_free(&self, i: GridIndex) -> bool {
        self.get(i) == Some(Occupancy::Free)
    }

    pub fn set(&mut self, i: GridIndex, occ: Occupancy) -> Result<()> {
        if !self.contains(i) {
            return Err(Error::OutOfBounds);
        }
        let k = self.linear(i);
        self.cells[k] = occ;
        Ok(())
    }

    pub fn indices(&self) -> impl Iterator<Item = GridIndex> + '_ {
        (0..self.cells.len()).map(|k| self.index_of(k))
    }

    pub fn count(&self, occ: Occupancy) -> usize {
        self.cells.iter().filter(|&&c| c == occ).count()
    }

    pub fn world_to_grid(&self, p: WorldPoint) -> Result<GridIndex> {
        let (s, c) = self.origin.theta.sin_cos();
        let dx = p.x - self.origin.x;
        let dy = p.y - self.origin.y;
        // rotate by -theta into the map frame
        let lx = c * dx + s * dy;
        let ly = -s * dx + c * dy;
        let col = (lx / self.resolution).floor();
        let row = (ly / self.resolution).floor();
        if !(col >= 0.0 && row >= 0.0 && col < self.width as f64 && row < self.height as f64) {
            return Err(Error::OutOfBounds);
        }
        Ok(GridIndex::new(col as usize, row as usize))
    }

    /// Center of cell `i` in world coordinates.
    pub fn grid_to_world(&self, i: GridIndex) -> Result<WorldPoint> {
        if !self.contains(i) {
            return Err(Error::OutOfBounds);
        }
        let lx = (i.col as f64 + 0.5) * self.resolution;
        let ly = (i.row as f64 + 0.5) * self.resolution;
        let (s, c) = self.origin.theta.sin_cos();
        Ok(WorldPoint::new(
            self.origin.x + c * lx - s * ly,
            self.origin.y + s * lx + c * ly,
        ))
    }

    /// Marks every cell whose center lies within `radius` meters of an
    /// Occupied cell center as Occupied. Unknown cells are not sources.
    pub fn inflate(&self, radius: f64) -> OccupancyGrid {
        let reach = radius / self.resolution;
        if !(reach > 0.0) {
            return self.clone();
        }
        let limit = reach * reach + 1e-9;
        let span = (reach + 1e-9).floor() as isize;
        let stencil: Vec<(isize, isize)> = (-span..=span)
            .flat_map(|dr| (-span..=span).map(move |dc| (dc, dr)))
            .filter(|&(dc, dr)| ((dc * dc + dr * dr) as f64) <= limit)
            .collect();

        let mut out = self.clone();
        let (w, h) = (self.width as isize, self.height as isize);
        for src in self
            .indices()
            .filter(|&i| self.get(i) == Some(Occupancy::Occupied))
        {
            for &(dc, dr) in &stencil {
                let c = src.col as isize + dc;
                let r = src.row as isize + dr;
                if c >= 0 && r >= 0 && c < w && r < h {
                    out.cells[(r * w + c) as usize] = Occupancy::Occupied;
                }
            }
        }
        out
    }
}

#[derive(Debug, Deserialize)]
struct RawDescriptor {
    image: Option<String>,
    resolution: Option<f64>,
    origin: Option<Vec<f64>>,
    negate: Option<i64>,
    occupied_thresh: Option<f64>,
    free_thresh: Option<f64>,
}

/// Parsed map descriptor with defaults applied and the image path resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDescriptor {
    pub image: PathBuf,
    pub resolution: f64,
    pub origin: MapOrigin,
    pub negate: bool,
    pub thresholds: Thresholds,
}

impl MapDescriptor {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawDescriptor =
            serde_yaml::from_str(text).map_err(|e| Error::MalformedDescriptor(e.to_string()))?;
        let missing =
            |key: &str| Error::MalformedDescriptor(format!("missing required key `{key}`"));

        let image = raw.image.ok_or_else(|| missing("image"))?;
        let resolution = raw.resolution.ok_or_else(|| missing("resolution"))?;
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::MalformedDescriptor(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        let origin = match raw.origin.ok_or_else(|| missing("origin"))?.as_slice() {
            &[x, y, theta] => MapOrigin { x, y, theta },
            other => {
                return Err(Error::MalformedDescriptor(format!(
                    "origin must have 3 elements, got {}",
                    other.len()
                )))
            }
        };
        let negate = match raw.negate.unwrap_or(0) {
            0 => false,
            1 => true,
            n => {
                return Err(Error::MalformedDescriptor(format!(
                    "negate must be 0 or 1, got {n}"
                )))
            }
        };
        let thresholds = Thresholds::new(
            raw.occupied_thresh.unwrap_or(DEFAULT_OCCUPIED_THRESH),
            raw.free_thresh.unwrap_or(DEFAULT_FREE_THRESH),
        )?;
        let image = PathBuf::from(image);
        let image = if image.is_absolute() {
            image
        } else {
            base_dir.join(image)
        };
        Ok(Self {
            image,
            resolution,
            origin,
            negate,
            thresholds,
        })
    }
}

/// Grayscale image as stored in a PGM file; row 0 is the top row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Decodes a binary (P5) or ASCII (P2) PGM with maxval 255.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let bad = |msg: &str| Error::MalformedImage(msg.to_string());
    let mut pos = 0usize;

    // Reads one whitespace-delimited header token, skipping `#` comments.
    let token = |pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
            *pos += 1;
        }
        if start == *pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };

    let magic = token(&mut pos)?;
    if magic != "P5" && magic != "P2" {
        return Err(Error::MalformedImage(format!("bad magic `{magic}`")));
    }
    let number = |pos: &mut usize, what: &str| -> Result<usize> {
        token(pos)?
            .parse::<usize>()
            .map_err(|_| Error::MalformedImage(format!("bad {what}")))
    };
    let width = number(&mut pos, "width")?;
    let height = number(&mut pos, "height")?;
    let maxval = number(&mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    if maxval != 255 {
        return Err(Error::MalformedImage(format!(
            "maxval must be 255, got {maxval}"
        )));
    }
    let n = width * height;

    let pixels = if magic == "P5" {
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(bad("missing raster"));
        }
        pos += 1;
        let raster = &bytes[pos..];
        if raster.len() != n {
            return Err(Error::MalformedImage(format!(
                "expected {n} pixels, found {}",
                raster.len()
            )));
        }
        raster.to_vec()
    } else {
        let text = std::str::from_utf8(&bytes[pos..]).map_err(|_| bad("non-ASCII raster"))?;
        let values = text
            .split_ascii_whitespace()
            .map(|t| match t.parse::<u16>() {
                Ok(v) if v <= 255 => Ok(v as u8),
                _ => Err(Error::MalformedImage(format!("bad pixel value `{t}`"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        if values.len() != n {
            return Err(Error::MalformedImage(format!(
                "expected {n} pixels, found {}",
                values.len()
            )));
        }
        values
    };
    Ok(GrayImage {
        width,
        height,
        pixels,
    })
}

/// Builds a grid from an image and descriptor, flipping rows so that the
/// bottom image row becomes grid row 0.
pub fn grid_from_image(image: &GrayImage, desc: &MapDescriptor) -> Result<OccupancyGrid> {
    let mut cells = Vec::with_capacity(image.width * image.height);
    for row in 0..image.height {
        let img_row = image.height - 1 - row;
        for col in 0..image.width {
            let px = image.pixels[img_row * image.width + col] as f64;
            let p = if desc.negate {
                px / 255.0
            } else {
                (255.0 - px) / 255.0
            };
            cells.push(Occupancy::classify(p, desc.thresholds));
        }
    }
    OccupancyGrid::new(
        image.width,
        image.height,
        desc.resolution,
        desc.origin,
        cells,
    )
}

pub fn load_map(descriptor_path: impl AsRef<Path>) -> Result<OccupancyGrid> {
    let path = descriptor_path.as_ref();
    let text = read_existing(path)?;
    let text = String::from_utf8(text)
        .map_err(|_| Error::MalformedDescriptor("descriptor is not UTF-8".into()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let desc = MapDescriptor::parse(&text, base)?;
    let image = parse_pgm(&read_existing(&desc.image)?)?;
    grid_from_image(&image, &desc)
}

fn read_existing(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

/// Encodes the grid as a P5 image, top row first.
pub fn encode_pgm(grid: &OccupancyGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    for img_row in 0..grid.height {
        let row = grid.height - 1 - img_row;
        out.extend(
            (0..grid.width).map(|col| match grid.cells[row * grid.width + col] {
                Occupancy::Free => PIXEL_FREE,
                Occupancy::Occupied => PIXEL_OCCUPIED,
                Occupancy::Unknown => PIXEL_UNKNOWN,
            }),
        );
    }
    out
}

/// Writes `<stem>.yaml` and `<stem>.pgm` into `dir` and returns the
/// descriptor path. Loading the result reproduces every cell classification.
pub fn save_map(grid: &OccupancyGrid, dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let image_name = format!("{stem}.pgm");
    fs::write(dir.join(&image_name), encode_pgm(grid))?;
    let o = grid.origin;
    let descriptor = format!(
        "image: {image_name}\nresolution: {}\norigin: [{}, {}, {}]\nnegate: 0\noccupied_thresh: {}\nfree_thresh: {}\n",
        fmt_float(grid.resolution),
        fmt_float(o.x),
        fmt_float(o.y),
        fmt_float(o.theta),
        DEFAULT_OCCUPIED_THRESH,
        DEFAULT_FREE_THRESH,
    );
    let path = dir.join(format!("{stem}.yaml"));
    fs::write(&path, descriptor)?;
    Ok(path)
}

// YAML reads `1` as an integer; keep floats recognizable.
fn fmt_float(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, bytes).unwrap();
        p
    }

    fn p5(w: usize, h: usize, px: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n{w} {h}\n255\n").into_bytes();
        v.extend_from_slice(px);
        v
    }

    fn plain(w: usize, h: usize, res: f64, origin: MapOrigin) -> OccupancyGrid {
        OccupancyGrid::filled(w, h, res, origin, Occupancy::Free).unwrap()
    }

    #[test]
    fn loads_all_free_p5() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.pgm", &p5(3, 2, &[254; 6]));
        let d = write(
            dir.path(),
            "m.yaml",
            b"image: m.pgm\nresolution: 0.1\norigin: [1.0, 2.0, 0.0]\nnegate: 0\nfree_thresh: 0.196\n",
        );
        let g = load_map(&d).unwrap();
        assert_eq!((g.width(), g.height()), (3, 2));
        assert_eq!(g.count(Occupancy::Free), 6);
        assert_eq!(g.resolution(), 0.1);
        assert_eq!(
            g.origin(),
            MapOrigin {
                x: 1.0,
                y: 2.0,
                theta: 0.0
            }
        );
    }

    #[test]
    fn black_pixel_is_occupied() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.pgm", &p5(1, 1, &[0]));
        let d = write(
            dir.path(),
            "m.yaml",
            b"image: m.pgm\nresolution: 1.0\norigin: [0, 0, 0]\nnegate: 0\noccupied_thresh: 0.65\n",
        );
        assert_eq!(load_map(&d).unwrap().cells(), &[Occupancy::Occupied]);
    }

    #[test]
    fn negate_inverts_probability() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.pgm", &p5(2, 1, &[0, 255]));
        let d = write(
            dir.path(),
            "m.yaml",
            b"image: m.pgm\nresolution: 1.0\norigin: [0, 0, 0]\nnegate: 1\n",
        );
        assert_eq!(
            load_map(&d).unwrap().cells(),
            &[Occupancy::Free, Occupancy::Occupied]
        );
    }

    #[test]
    fn image_rows_are_flipped() {
        let dir = tempfile::tempdir().unwrap();
        // top image row black, bottom white
        write(
            dir.path(),
            "m.pgm",
            b"P2\n# comment\n2 2\n255\n0 0\n254 254\n",
        );
        let d = write(
            dir.path(),
            "m.yaml",
            b"image: m.pgm\nresolution: 1.0\norigin: [0, 0, 0]\n",
        );
        let g = load_map(&d).unwrap();
        assert_eq!(g.get(GridIndex::new(0, 0)), Some(Occupancy::Free));
        assert_eq!(g.get(GridIndex::new(1, 1)), Some(Occupancy::Occupied));
    }

    #[test]
    fn intermediate_pixel_is_unknown() {
        let t = Thresholds::default();
        assert_eq!(
            Occupancy::classify((255.0 - 205.0) / 255.0, t),
            Occupancy::Unknown
        );
        assert_eq!(Occupancy::classify(0.196, t), Occupancy::Free);
        assert_eq!(Occupancy::classify(0.65, t), Occupancy::Occupied);
    }

    #[test]
    fn descriptor_errors() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.pgm", &p5(1, 1, &[0]));
        let no_res = write(dir.path(), "a.yaml", b"image: m.pgm\norigin: [0, 0, 0]\n");
        match load_map(&no_res) {
            Err(Error::MalformedDescriptor(msg)) => assert!(msg.contains("resolution")),
            other => panic!("unexpected {other:?}"),
        }
        let thresh = write(
            dir.path(),
            "b.yaml",
            b"image: m.pgm\nresolution: 1\norigin: [0, 0, 0]\noccupied_thresh: 0.1\nfree_thresh: 0.2\n",
        );
        assert!(matches!(
            load_map(&thresh),
            Err(Error::InvalidThresholds { .. })
        ));
        let missing_img = write(
            dir.path(),
            "c.yaml",
            b"image: nope.pgm\nresolution: 1\norigin: [0, 0, 0]\n",
        );
        assert!(matches!(load_map(&missing_img), Err(Error::MissingFile(_))));
        assert!(matches!(
            load_map(dir.path().join("none.yaml")),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn image_errors() {
        assert!(matches!(
            parse_pgm(b"P6\n1 1\n255\n\0\0\0"),
            Err(Error::MalformedImage(_))
        ));
        assert!(matches!(
            parse_pgm(&p5(2, 2, &[0, 0, 0])),
            Err(Error::MalformedImage(_))
        ));
        assert!(matches!(
            parse_pgm(b"P2\n2 1\n255\n0\n"),
            Err(Error::MalformedImage(_))
        ));
        assert!(matches!(
            parse_pgm(b"P2\n1 1\n255\n300\n"),
            Err(Error::MalformedImage(_))
        ));
        assert!(matches!(
            parse_pgm(b"P5\n1 1\n65535\n\0\0"),
            Err(Error::MalformedImage(_))
        ));
    }

    #[test]
    fn save_then_load_preserves_cells() {
        let mut g = plain(
            4,
            3,
            0.05,
            MapOrigin {
                x: -1.0,
                y: 0.5,
                theta: 0.0,
            },
        );
        g.set(GridIndex::new(1, 0), Occupancy::Occupied).unwrap();
        g.set(GridIndex::new(3, 2), Occupancy::Unknown).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let d = save_map(&g, dir.path(), "dump").unwrap();
        assert_eq!(load_map(d).unwrap(), g);
    }

    #[test]
    fn inflate_radius_zero_is_identity() {
        let mut g = plain(5, 5, 1.0, MapOrigin::default());
        g.set(GridIndex::new(2, 2), Occupancy::Occupied).unwrap();
        g.set(GridIndex::new(0, 4), Occupancy::Unknown).unwrap();
        assert_eq!(g.inflate(0.0), g);
    }

    #[test]
    fn inflate_one_cell_marks_cardinals_only() {
        let mut g = plain(5, 5, 0.5, MapOrigin::default());
        g.set(GridIndex::new(2, 2), Occupancy::Occupied).unwrap();
        let out = g.inflate(0.5);
        // brute force over all cells
        for i in out.indices() {
            let d2 = (i.col as f64 - 2.0).powi(2) + (i.row as f64 - 2.0).powi(2);
            let expect = if d2 <= 1.0 {
                Occupancy::Occupied
            } else {
                Occupancy::Free
            };
            assert_eq!(out.get(i), Some(expect), "{i:?}");
        }
        assert_eq!(out.count(Occupancy::Occupied), 5);
    }

    #[test]
    fn inflate_all_free_stays_free() {
        let g = plain(6, 4, 0.1, MapOrigin::default());
        assert_eq!(g.inflate(0.35), g);
    }

    #[test]
    fn inflate_leaves_distant_unknown() {
        let mut g = plain(5, 1, 1.0, MapOrigin::default());
        g.set(GridIndex::new(0, 0), Occupancy::Occupied).unwrap();
        g.set(GridIndex::new(1, 0), Occupancy::Unknown).unwrap();
        g.set(GridIndex::new(4, 0), Occupancy::Unknown).unwrap();
        let out = g.inflate(1.0);
        assert_eq!(out.get(GridIndex::new(1, 0)), Some(Occupancy::Occupied));
        assert_eq!(out.get(GridIndex::new(4, 0)), Some(Occupancy::Unknown));
    }

    #[test]
    fn world_to_grid_examples() {
        let g = plain(10, 10, 0.5, MapOrigin::default());
        assert_eq!(
            g.world_to_grid(WorldPoint::new(1.0, 1.0)).unwrap(),
            GridIndex::new(2, 2)
        );
        assert!(matches!(
            g.world_to_grid(WorldPoint::new(-0.1, 0.0)),
            Err(Error::OutOfBounds)
        ));
        assert!(matches!(
            g.world_to_grid(WorldPoint::new(5.0, 0.0)),
            Err(Error::OutOfBounds)
        ));
        let g = plain(
            3,
            3,
            1.0,
            MapOrigin {
                x: -1.0,
                y: -1.0,
                theta: 0.0,
            },
        );
        assert_eq!(
            g.world_to_grid(WorldPoint::new(0.0, 0.0)).unwrap(),
            GridIndex::new(1, 1)
        );
    }

    #[test]
    fn grid_to_world_examples() {
        let g = plain(3, 3, 1.0, MapOrigin::default());
        assert_eq!(
            g.grid_to_world(GridIndex::new(0, 0)).unwrap(),
            WorldPoint::new(0.5, 0.5)
        );
        assert!(matches!(
            g.grid_to_world(GridIndex::new(3, 0)),
            Err(Error::OutOfBounds)
        ));
        let g = plain(
            3,
            3,
            0.5,
            MapOrigin {
                x: 2.0,
                y: 3.0,
                theta: 0.0,
            },
        );
        assert_eq!(
            g.grid_to_world(GridIndex::new(0, 0)).unwrap(),
            WorldPoint::new(2.25, 3.25)
        );
    }

    #[test]
    fn rotated_origin_transforms() {
        let g = plain(
            4,
            4,
            1.0,
            MapOrigin {
                x: 0.0,
                y: 0.0,
                theta: std::f64::consts::FRAC_PI_2,
            },
        );
        // map x axis points along world +y
        let c = g.grid_to_world(GridIndex::new(1, 0)).unwrap();
        assert!((c.x + 0.5).abs() < 1e-12 && (c.y - 1.5).abs() < 1e-12);
        assert_eq!(g.world_to_grid(c).unwrap(), GridIndex::new(1, 0));
    }

    #[test]
    fn grid_rejects_bad_shape() {
        assert!(
            OccupancyGrid::new(2, 2, 1.0, MapOrigin::default(), vec![Occupancy::Free; 3]).is_err()
        );
        assert!(OccupancyGrid::filled(0, 2, 1.0, MapOrigin::default(), Occupancy::Free).is_err());
        assert!(OccupancyGrid::filled(2, 2, 0.0, MapOrigin::default(), Occupancy::Free).is_err());
    }
}
