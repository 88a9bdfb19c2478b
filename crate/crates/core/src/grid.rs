//! Transverse projection of sampled vector fields on a uniform grid.
//!
//! The projected field is `V + ∇ψ` where `ψ` is the Newtonian potential of
//! `∇·V`, evaluated by direct summation over every node pair.

use std::f64::consts::PI;
use std::io::{Read, Write};

use crate::asymptotics::SweepTable;
use crate::{Error, Exec, Result, Vec3};

/// Smallest node count per axis supported by the difference stencils.
pub const MIN_NODES: usize = 5;
/// Boundary magnitude above this fraction of the field maximum triggers a
/// leakage warning.
pub const LEAKAGE_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: Vec3,
}

impl GridSpec {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: Vec3) -> Result<Self> {
        for axis in 0..3 {
            if dims[axis] < MIN_NODES {
                return Err(Error::GridTooSmall {
                    axis,
                    nodes: dims[axis],
                });
            }
            if !(spacing[axis] > 0.0 && spacing[axis].is_finite()) {
                return Err(Error::invalid(
                    "grid.spacing",
                    format!("must be positive, got {}", spacing[axis]),
                ));
            }
        }
        if !origin.is_finite() {
            return Err(Error::invalid("grid.origin", "not finite"));
        }
        Ok(GridSpec {
            dims,
            spacing,
            origin,
        })
    }

    /// Cube of `n³` nodes with spacing `h`, centred on the origin.
    pub fn centered_cube(n: usize, h: f64) -> Result<Self> {
        let half = 0.5 * h * (n as f64 - 1.0);
        GridSpec::new([n; 3], [h; 3], Vec3::new(-half, -half, -half))
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let rest = idx / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], k]
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.coords(idx);
        self.origin
            + Vec3::new(
                i as f64 * self.spacing[0],
                j as f64 * self.spacing[1],
                k as f64 * self.spacing[2],
            )
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let c = self.coords(idx);
        (0..3).any(|a| c[a] == 0 || c[a] + 1 == self.dims[a])
    }

    fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.dims[1] * self.dims[2],
            1 => self.dims[2],
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    pub grid: GridSpec,
    pub data: Vec<f64>,
}

impl ScalarField3 {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum over nodes at least `margin` cells away from every face.
    pub fn max_abs_inner(&self, margin: usize) -> f64 {
        let d = self.grid.dims;
        (0..self.data.len())
            .filter(|&idx| {
                let c = self.grid.coords(idx);
                (0..3).all(|a| c[a] >= margin && c[a] + margin < d[a])
            })
            .fold(0.0, |m, idx| m.max(self.data[idx].abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub grid: GridSpec,
    pub data: Vec<Vec3>,
}

impl VectorField3 {
    pub fn new(grid: GridSpec, data: Vec<Vec3>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::DegenerateInput(format!(
                "grid has {} nodes but {} values were supplied",
                grid.len(),
                data.len()
            )));
        }
        Ok(VectorField3 { grid, data })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec3) -> Vec3) -> Self {
        let data = (0..grid.len()).map(|idx| f(grid.position(idx))).collect();
        VectorField3 { grid, data }
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn boundary_max_norm(&self) -> f64 {
        (0..self.data.len())
            .filter(|&idx| self.grid.is_boundary(idx))
            .fold(0.0, |m, idx| m.max(self.data[idx].norm()))
    }

    /// Largest node-wise `|self - other|`.
    pub fn max_diff(&self, other: &VectorField3) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((*a - *b).norm()))
    }

    fn zip_with(&self, other: &VectorField3, f: impl Fn(Vec3, Vec3) -> Vec3) -> VectorField3 {
        VectorField3 {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Rows `i,j,k,Vx,Vy,Vz` in node order.
    pub fn to_table(&self) -> SweepTable {
        let rows = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let [i, j, k] = self.grid.coords(idx);
                vec![i as f64, j as f64, k as f64, v.x, v.y, v.z]
            })
            .collect();
        SweepTable {
            headers: FIELD_COLUMNS.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.to_table().write_csv(out)
    }

    /// Reads `i,j,k,Vx,Vy,Vz` rows; every node must appear exactly once.
    pub fn read_csv<R: Read>(grid: GridSpec, input: R) -> Result<Self> {
        let table = SweepTable::read_csv(input)?;
        let pos: Vec<usize> = FIELD_COLUMNS
            .iter()
            .map(|c| {
                table
                    .headers
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| Error::MissingColumn(c.to_string()))
            })
            .collect::<Result<_>>()?;
        if table.rows.len() < grid.len() {
            return Err(Error::TooFewRows {
                found: table.rows.len(),
                needed: grid.len(),
            });
        }
        if table.rows.len() > grid.len() {
            return Err(Error::Parse(format!(
                "{} rows for a grid of {} nodes",
                table.rows.len(),
                grid.len()
            )));
        }
        let mut data = vec![Vec3::ZERO; grid.len()];
        let mut seen = vec![false; grid.len()];
        for (row, cells) in table.rows.iter().enumerate() {
            let mut ijk = [0usize; 3];
            for a in 0..3 {
                let v = cells[pos[a]];
                if v < 0.0 || v.fract() != 0.0 || v >= grid.dims[a] as f64 {
                    return Err(Error::Parse(format!(
                        "row {}: index {} = {v} outside the {} grid nodes",
                        row + 2,
                        FIELD_COLUMNS[a],
                        grid.dims[a]
                    )));
                }
                ijk[a] = v as usize;
            }
            let idx = grid.index(ijk[0], ijk[1], ijk[2]);
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Parse(format!(
                    "row {}: node {ijk:?} appears twice",
                    row + 2
                )));
            }
            data[idx] = Vec3::new(cells[pos[3]], cells[pos[4]], cells[pos[5]]);
        }
        Ok(VectorField3 { grid, data })
    }
}

pub const FIELD_COLUMNS: [&str; 6] = ["i", "j", "k", "Vx", "Vy", "Vz"];

/// Derivative along one grid line: fourth-order central in the deep
/// interior, second-order central next to the faces, second-order one-sided
/// on the faces.
fn line_derivative(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    if i == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
    } else if i == 1 || i == n - 2 {
        (f(i + 1) - f(i - 1)) / (2.0 * h)
    } else {
        (8.0 * (f(i + 1) - f(i - 1)) - (f(i + 2) - f(i - 2))) / (12.0 * h)
    }
}

fn partial(grid: &GridSpec, values: impl Fn(usize) -> f64, idx: usize, axis: usize) -> f64 {
    let c = grid.coords(idx)[axis];
    let s = grid.stride(axis);
    let base = idx - c * s;
    line_derivative(
        |m| values(base + m * s),
        c,
        grid.dims[axis],
        grid.spacing[axis],
    )
}

pub fn divergence(field: &VectorField3) -> ScalarField3 {
    let g = field.grid;
    let data = (0..g.len())
        .map(|idx| {
            (0..3)
                .map(|a| partial(&g, |m| field.data[m][a], idx, a))
                .sum()
        })
        .collect();
    ScalarField3 { grid: g, data }
}

pub fn gradient(field: &ScalarField3) -> VectorField3 {
    let g = field.grid;
    let data = (0..g.len())
        .map(|idx| Vec3::from_array([0, 1, 2].map(|a| partial(&g, |m| field.data[m], idx, a))))
        .collect();
    VectorField3 { grid: g, data }
}

/// `∫ 1/|x| d³x` over a box of edge lengths `h` centred on the origin.
///
/// Sum over the six pyramids joining the centre to each face.
pub fn self_cell_integral(h: [f64; 3]) -> f64 {
    // ∫₀ᵃ∫₀ᵇ (x² + y² + d²)^(-1/2) dy dx
    fn quarter(a: f64, b: f64, d: f64) -> f64 {
        let rho = (a * a + b * b + d * d).sqrt();
        a * (b / (a * a + d * d).sqrt()).asinh() + b * (a / (b * b + d * d).sqrt()).asinh()
            - d * (a * b / (d * rho)).atan()
    }
    let half = h.map(|v| 0.5 * v);
    (0..3)
        .map(|axis| {
            let d = half[axis];
            let p = half[(axis + 1) % 3];
            let q = half[(axis + 2) % 3];
            // two opposite faces, four quadrants each, weight d/2
            2.0 * (d / 2.0) * 4.0 * quarter(p, q, d)
        })
        .sum()
}

/// Newtonian potential `ψ(r) = Σ' s(r') h³ / (4π|r - r'|)` with the
/// self-cell term integrated exactly over the cell.
pub fn newtonian_potential(source: &ScalarField3, exec: Exec) -> ScalarField3 {
    let g = source.grid;
    let [nx, ny, nz] = g.dims;
    let [hx, hy, hz] = g.spacing;
    let vol = g.cell_volume();
    let mut kernel = vec![0.0; g.len()];
    for (idx, w) in kernel.iter_mut().enumerate() {
        let [i, j, k] = g.coords(idx);
        let r = Vec3::new(i as f64 * hx, j as f64 * hy, k as f64 * hz).norm();
        *w = if idx == 0 {
            self_cell_integral(g.spacing) / (4.0 * PI)
        } else {
            vol / (4.0 * PI * r)
        };
    }
    let data = exec.map_range(g.len(), |idx| {
        let [i, j, k] = g.coords(idx);
        let mut acc = 0.0;
        for ip in 0..nx {
            let di = i.abs_diff(ip);
            for jp in 0..ny {
                let dj = j.abs_diff(jp);
                let src = &source.data[(ip * ny + jp) * nz..][..nz];
                let ker = &kernel[(di * ny + dj) * nz..][..nz];
                for (kp, s) in src.iter().enumerate() {
                    acc += s * ker[k.abs_diff(kp)];
                }
            }
        }
        acc
    });
    ScalarField3 { grid: g, data }
}

/// Boundary magnitude of the input relative to its maximum, when it exceeds
/// [`LEAKAGE_FRACTION`]. The free-space kernel then misses the field's
/// continuation outside the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLeakage {
    pub ratio: f64,
}

impl std::fmt::Display for BoundaryLeakage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "boundary leakage: field on the grid faces reaches {:.3e} of its maximum",
            self.ratio
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub field: VectorField3,
    /// `max |∇·V|` of the input.
    pub divergence_in: f64,
    /// `max |∇·V_T|` of the output.
    pub divergence_out: f64,
    pub leakage: Option<BoundaryLeakage>,
}

impl Projection {
    pub fn reduction_factor(&self) -> f64 {
        self.divergence_in / self.divergence_out
    }
}

pub fn proper_projection(field: &VectorField3, exec: Exec) -> Projection {
    let div = divergence(field);
    let psi = newtonian_potential(&div, exec);
    let out = field.zip_with(&gradient(&psi), |v, g| v + g);
    let max = field.max_norm();
    let boundary = field.boundary_max_norm();
    let leakage = (max > 0.0 && boundary > LEAKAGE_FRACTION * max).then(|| BoundaryLeakage {
        ratio: boundary / max,
    });
    Projection {
        divergence_in: div.max_abs(),
        divergence_out: divergence(&out).max_abs(),
        field: out,
        leakage,
    }
}

/// Removes at each node the component along the unit vector from `source`.
pub fn simplified_projection_field(field: &VectorField3, source: Vec3) -> Result<VectorField3> {
    let g = field.grid;
    let data = field
        .data
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let n = (g.position(idx) - source)
                .normalized()
                .ok_or(Error::NodeOnSource { index: idx })?;
            Ok(v.reject(n))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField3 { grid: g, data })
}

/// Proper minus simplified projection.
pub fn discrepancy_field(field: &VectorField3, source: Vec3, exec: Exec) -> Result<VectorField3> {
    let simplified = simplified_projection_field(field, source)?;
    Ok(proper_projection(field, exec)
        .field
        .zip_with(&simplified, |p, s| p - s))
}

/// Smooth bump `(1 - ρ²/R²)⁴` supported in `ρ < R`, and its gradient.
pub fn bump(p: Vec3, radius: f64) -> (f64, Vec3) {
    let s = 1.0 - p.norm_squared() / (radius * radius);
    if s <= 0.0 {
        return (0.0, Vec3::ZERO);
    }
    (s.powi(4), p * (-8.0 * s.powi(3) / (radius * radius)))
}
