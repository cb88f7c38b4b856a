use serde::{Deserialize, Serialize};

use super::BrickworkError;
use crate::simcore::Octant;

pub const LAYOUT_FORMAT_VERSION: u32 = 1;

/// Grid coordinate. Columns `x` run from 1 to `4m + 1`, rows `y` from 1 to `n`.
/// Column 0 stands for the one-time pad on a quantum input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub const fn new(x: usize, y: usize) -> Self {
        Coord { x, y }
    }

    /// Column-major position, the order measurements happen in.
    pub fn order_key(&self, rows: usize) -> usize {
        self.x * rows + (self.y - 1)
    }
}

impl std::fmt::Display for Coord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// One tile of a layer: a two-row brick or a lone half-brick row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tile {
    Brick { top: usize },
    Half { row: usize },
}

/// Rows paired by bricks in `layer` (1-based): odd layers start at row 1, even at row 2.
pub fn layer_pairs(rows: usize, layer: usize) -> Vec<(usize, usize)> {
    let first = if layer % 2 == 1 { 1 } else { 2 };
    (first..rows).step_by(2).map(|y| (y, y + 1)).collect()
}

/// Bricks and half-bricks of `layer`, top to bottom.
pub fn layer_tiles(rows: usize, layer: usize) -> Vec<Tile> {
    let pairs = layer_pairs(rows, layer);
    let mut tiles = Vec::new();
    let mut y = 1;
    while y <= rows {
        if pairs.iter().any(|&(a, _)| a == y) {
            tiles.push(Tile::Brick { top: y });
            y += 2;
        } else {
            tiles.push(Tile::Half { row: y });
            y += 1;
        }
    }
    tiles
}

/// The layer whose vertical rungs sit in column `x`, if any: layer ℓ has rungs
/// in columns 4ℓ−1 and 4ℓ+1.
fn rung_layer(x: usize, layers: usize) -> Option<usize> {
    if x >= 3 && (x + 1) % 4 == 0 {
        Some((x + 1) / 4).filter(|&l| l <= layers)
    } else if x >= 5 && (x - 1) % 4 == 0 {
        Some((x - 1) / 4).filter(|&l| l <= layers)
    } else {
        None
    }
}

/// Vertical CZ edges within column `x`, as row pairs.
pub fn vertical_pairs(rows: usize, layers: usize, x: usize) -> Vec<(usize, usize)> {
    rung_layer(x, layers).map(|l| layer_pairs(rows, l)).unwrap_or_default()
}

/// Rows joined to `y` by a vertical edge in column `x`.
pub fn vertical_neighbours(rows: usize, layers: usize, x: usize, y: usize) -> Vec<usize> {
    vertical_pairs(rows, layers, x)
        .into_iter()
        .filter_map(|(a, b)| if a == y { Some(b) } else if b == y { Some(a) } else { None })
        .collect()
}

/// `(bricks, half_bricks, qubits)` for an `n`-row, `m`-layer brickwork state.
pub fn brick_census(rows: usize, layers: usize) -> Result<(u64, u64, u64), BrickworkError> {
    if rows < 2 || layers < 1 {
        return Err(BrickworkError::InvalidShape { rows, layers });
    }
    let (mut bricks, mut halves) = (0u64, 0u64);
    for l in 1..=layers.min(2) {
        let count = ((layers - l) / 2 + 1) as u64;
        let pairs = layer_pairs(rows, l).len() as u64;
        bricks += count * pairs;
        halves += count * (rows as u64 - 2 * pairs);
    }
    Ok((bricks, halves, (4 * layers as u64 + 1) * rows as u64))
}

/// The compiled program: target angles φ for every measured qubit of an
/// `n × (4m+1)` brickwork state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickworkLayout {
    rows: usize,
    layers: usize,
    /// `phi[x - 1][y - 1]` for the measured columns `1..=4m`.
    phi: Vec<Vec<Octant>>,
}

impl BrickworkLayout {
    /// All-zero angles: every tile implements the identity.
    pub fn identity(rows: usize, layers: usize) -> Result<Self, BrickworkError> {
        if rows < 2 || layers < 1 {
            return Err(BrickworkError::InvalidShape { rows, layers });
        }
        Ok(BrickworkLayout { rows, layers, phi: vec![vec![Octant::ZERO; rows]; 4 * layers] })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn columns(&self) -> usize {
        4 * self.layers + 1
    }

    pub fn num_qubits(&self) -> usize {
        self.columns() * self.rows
    }

    pub fn measured_qubits(&self) -> usize {
        4 * self.layers * self.rows
    }

    pub fn census(&self) -> (u64, u64, u64) {
        brick_census(self.rows, self.layers).expect("shape checked at construction")
    }

    fn check(&self, c: Coord) -> Result<(), BrickworkError> {
        if c.x == 0 || c.x > 4 * self.layers || c.y == 0 || c.y > self.rows {
            Err(BrickworkError::OutOfGrid(c))
        } else {
            Ok(())
        }
    }

    pub fn phi(&self, c: Coord) -> Octant {
        self.phi[c.x - 1][c.y - 1]
    }

    pub fn set_phi(&mut self, c: Coord, angle: Octant) -> Result<(), BrickworkError> {
        self.check(c)?;
        self.phi[c.x - 1][c.y - 1] = angle;
        Ok(())
    }

    pub fn tiles(&self, layer: usize) -> Vec<Tile> {
        layer_tiles(self.rows, layer)
    }

    /// Writes four angles across the measured columns of `layer` in `row`.
    pub fn set_row_pattern(&mut self, layer: usize, row: usize, angles: [Octant; 4]) -> Result<(), BrickworkError> {
        if layer == 0 || layer > self.layers {
            return Err(BrickworkError::OutOfGrid(Coord::new(4 * layer, row)));
        }
        for (i, a) in angles.into_iter().enumerate() {
            self.set_phi(Coord::new(4 * layer - 3 + i, row), a)?;
        }
        Ok(())
    }

    pub fn row_pattern(&self, layer: usize, row: usize) -> [Octant; 4] {
        std::array::from_fn(|i| self.phi(Coord::new(4 * layer - 3 + i, row)))
    }

    /// Measured coordinates in column-major order.
    pub fn measurement_order(&self) -> impl Iterator<Item = Coord> + '_ {
        (1..=4 * self.layers).flat_map(move |x| (1..=self.rows).map(move |y| Coord::new(x, y)))
    }

    /// Coordinates whose outcomes flip the sign of the angle at `c`.
    pub fn x_dep(&self, c: Coord) -> Vec<Coord> {
        vec![Coord::new(c.x - 1, c.y)]
    }

    /// Coordinates whose outcomes add π to the angle at `c`.
    pub fn z_dep(&self, c: Coord) -> Vec<Coord> {
        let mut deps = Vec::new();
        if c.x >= 2 {
            deps.push(Coord::new(c.x - 2, c.y));
            for y in vertical_neighbours(self.rows, self.layers, c.x, c.y) {
                deps.push(Coord::new(c.x - 1, y));
            }
        }
        deps.sort();
        deps
    }

    /// Every CZ edge of the brickwork graph.
    pub fn edges(&self) -> Vec<(Coord, Coord)> {
        let mut edges = Vec::new();
        for x in 1..=self.columns() {
            for (a, b) in vertical_pairs(self.rows, self.layers, x) {
                edges.push((Coord::new(x, a), Coord::new(x, b)));
            }
            if x < self.columns() {
                for y in 1..=self.rows {
                    edges.push((Coord::new(x, y), Coord::new(x + 1, y)));
                }
            }
        }
        edges
    }

    pub fn to_document(&self) -> LayoutDocument {
        let coords: Vec<Coord> = (1..=self.columns())
            .flat_map(|x| (1..=self.rows).map(move |y| Coord::new(x, y)))
            .collect();
        LayoutDocument {
            format_version: LAYOUT_FORMAT_VERSION,
            rows: self.rows,
            layers: self.layers,
            phi: self.phi.iter().map(|col| col.iter().map(|o| o.index()).collect()).collect(),
            dependencies: coords
                .into_iter()
                .map(|c| DependencyEntry { x: c.x, y: c.y, x_dep: self.x_dep(c), z_dep: self.z_dep(c) })
                .collect(),
        }
    }

    pub fn from_document(doc: &LayoutDocument) -> Result<Self, BrickworkError> {
        if doc.format_version != LAYOUT_FORMAT_VERSION {
            return Err(BrickworkError::Format(format!("unsupported format_version {}", doc.format_version)));
        }
        let mut layout = BrickworkLayout::identity(doc.rows, doc.layers)?;
        if doc.phi.len() != 4 * doc.layers || doc.phi.iter().any(|c| c.len() != doc.rows) {
            return Err(BrickworkError::Format("phi grid has the wrong shape".into()));
        }
        for (x, col) in doc.phi.iter().enumerate() {
            for (y, &k) in col.iter().enumerate() {
                let o = Octant::try_from(k).map_err(BrickworkError::Format)?;
                layout.set_phi(Coord::new(x + 1, y + 1), o)?;
            }
        }
        // Dependencies are derived from the geometry; a document that disagrees is corrupt.
        if !doc.dependencies.is_empty() && doc.dependencies != layout.to_document().dependencies {
            return Err(BrickworkError::Format("dependency lists do not match the brickwork geometry".into()));
        }
        Ok(layout)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("layout serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, BrickworkError> {
        let doc: LayoutDocument = serde_json::from_str(s).map_err(|e| BrickworkError::Format(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Serialized form of a layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub format_version: u32,
    pub rows: usize,
    pub layers: usize,
    /// Octant integers, one inner list per measured column.
    pub phi: Vec<Vec<u8>>,
    #[serde(default)]
    pub dependencies: Vec<DependencyEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyEntry {
    pub x: usize,
    pub y: usize,
    pub x_dep: Vec<Coord>,
    pub z_dep: Vec<Coord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn census_examples() {
        assert_eq!(brick_census(35, 612).unwrap(), (10_404, 612, 85_715));
        assert_eq!(brick_census(2, 1).unwrap(), (1, 0, 10));
        assert_eq!(brick_census(3, 14).unwrap(), (14, 14, 171));
        assert_eq!(brick_census(4, 3).unwrap(), (2 + 1 + 2, 2, 52));
        assert!(brick_census(1, 3).is_err());
    }

    #[test]
    fn single_brick_has_ten_edges() {
        let l = BrickworkLayout::identity(2, 1).unwrap();
        let edges = l.edges();
        assert_eq!(l.num_qubits(), 10);
        assert_eq!(edges.len(), 10);
        assert!(edges.contains(&(Coord::new(3, 1), Coord::new(3, 2))));
        assert!(edges.contains(&(Coord::new(5, 1), Coord::new(5, 2))));
    }

    #[test]
    fn tiles_follow_the_interleave() {
        assert_eq!(layer_tiles(3, 1), vec![Tile::Brick { top: 1 }, Tile::Half { row: 3 }]);
        assert_eq!(layer_tiles(3, 2), vec![Tile::Half { row: 1 }, Tile::Brick { top: 2 }]);
        assert_eq!(
            layer_tiles(4, 2),
            vec![Tile::Half { row: 1 }, Tile::Brick { top: 2 }, Tile::Half { row: 4 }]
        );
    }

    #[test]
    fn layout_document_roundtrip() {
        let mut l = BrickworkLayout::identity(3, 2).unwrap();
        l.set_row_pattern(2, 3, [Octant::new(1), Octant::new(2), Octant::new(3), Octant::new(4)]).unwrap();
        let json = l.to_json();
        assert!(json.contains("\"format_version\": 1"));
        assert_eq!(BrickworkLayout::from_json(&json).unwrap(), l);

        let mut doc = l.to_document();
        doc.dependencies[5].z_dep.clear();
        assert!(BrickworkLayout::from_document(&doc).is_err());
        doc.format_version = 9;
        assert!(BrickworkLayout::from_document(&doc).is_err());
    }

    proptest! {
        #[test]
        fn census_identity(n in 2usize..60, m in 1usize..200) {
            let (bricks, halves, qubits) = brick_census(n, m).unwrap();
            // Each brick holds 8 measured qubits, each half-brick 4, plus the output column.
            prop_assert_eq!(qubits, 8 * bricks + 4 * halves + n as u64);
            if n % 2 == 1 {
                prop_assert_eq!(bricks, (n as u64 / 2) * m as u64);
                prop_assert_eq!(halves, m as u64);
            } else {
                prop_assert_eq!(halves, 2 * (m as u64 / 2));
            }
        }

        #[test]
        fn dependencies_precede(n in 2usize..7, m in 1usize..5) {
            let l = BrickworkLayout::identity(n, m).unwrap();
            for x in 1..=l.columns() {
                for y in 1..=n {
                    let c = Coord::new(x, y);
                    for d in l.x_dep(c).into_iter().chain(l.z_dep(c)) {
                        prop_assert!(d.order_key(n) < c.order_key(n));
                        prop_assert!(d.x < x && d.y >= 1 && d.y <= n);
                    }
                }
            }
        }
    }
}
