//! P1 finite elements on an interval or a structured triangulation of a
//! square, with homogeneous Dirichlet conditions.
//!
//! Coefficient vectors hold interior degrees of freedom only; boundary
//! values are zero and are injected wherever a nodal field is needed.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{solve_spd, SolveMethod, SparseSym, DEFAULT_CG_TOL};

/// A point in one or two space dimensions (`y = 0` in 1D).
pub type Point = [f64; 2];

#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    xa: f64,
    xb: f64,
    cells_per_side: usize,
    nodes: Vec<Point>,
    // flattened connectivity, `dim + 1` nodes per cell
    conn: Vec<usize>,
    boundary: Vec<bool>,
}

impl Mesh {
    /// Uniform mesh of `(xa, xb)` with `m` cells.
    pub fn interval(xa: f64, xb: f64, m: usize) -> Result<Self> {
        check_extent(xa, xb, m)?;
        let h = (xb - xa) / m as f64;
        let nodes = (0..=m).map(|i| [xa + i as f64 * h, 0.0]).collect();
        let conn = (0..m).flat_map(|c| [c, c + 1]).collect();
        let mut boundary = vec![false; m + 1];
        boundary[0] = true;
        boundary[m] = true;
        Ok(Self { dim: 1, xa, xb, cells_per_side: m, nodes, conn, boundary })
    }

    /// `(xa, xb)^2` split into `m x m` squares, each cut along its SW-NE
    /// diagonal into two counter-clockwise right triangles.
    pub fn square(xa: f64, xb: f64, m: usize) -> Result<Self> {
        check_extent(xa, xb, m)?;
        let h = (xb - xa) / m as f64;
        let side = m + 1;
        let mut nodes = Vec::with_capacity(side * side);
        let mut boundary = Vec::with_capacity(side * side);
        for j in 0..side {
            for i in 0..side {
                nodes.push([xa + i as f64 * h, xa + j as f64 * h]);
                boundary.push(i == 0 || j == 0 || i == m || j == m);
            }
        }
        let mut conn = Vec::with_capacity(6 * m * m);
        for j in 0..m {
            for i in 0..m {
                let sw = i + j * side;
                let se = sw + 1;
                let nw = sw + side;
                let ne = nw + 1;
                conn.extend_from_slice(&[sw, se, ne, sw, ne, nw]);
            }
        }
        Ok(Self { dim: 2, xa, xb, cells_per_side: m, nodes, conn, boundary })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.xa, self.xb)
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn h(&self) -> f64 {
        (self.xb - self.xa) / self.cells_per_side as f64
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.conn.len() / (self.dim + 1)
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.conn[c * k..(c + 1) * k]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    /// `|Omega|`.
    pub fn measure(&self) -> f64 {
        (self.xb - self.xa).powi(self.dim as i32)
    }

    /// One `node x y` line per node.
    pub fn write_nodes<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(out, "{i} {:e} {:e}", p[0], p[1])?;
        }
        Ok(())
    }
}

fn check_extent(xa: f64, xb: f64, m: usize) -> Result<()> {
    if m == 0 || !(xb > xa) || !xa.is_finite() || !xb.is_finite() {
        return Err(Error::Domain(format!("invalid mesh: ({xa}, {xb}) with {m} cells")));
    }
    Ok(())
}

/// Reference-element quadrature: barycentric points and weights summing to 1.
struct RefRule {
    bary: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl RefRule {
    /// 3-point Gauss-Legendre on the unit interval (exact to degree 5).
    fn interval() -> Self {
        let r = 0.5 * (0.6f64).sqrt();
        let pts = [0.5 - r, 0.5, 0.5 + r];
        Self {
            bary: pts.iter().map(|&x| [1.0 - x, x, 0.0]).collect(),
            weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
        }
    }

    /// Symmetric 6-point rule on the triangle (exact to degree 4).
    fn triangle() -> Self {
        let a = 0.445_948_490_915_964_9;
        let wa = 0.223_381_589_678_011_5;
        let b = 0.091_576_213_509_770_74;
        let wb = 0.109_951_743_655_321_9;
        let bary = vec![
            [a, a, 1.0 - 2.0 * a],
            [a, 1.0 - 2.0 * a, a],
            [1.0 - 2.0 * a, a, a],
            [b, b, 1.0 - 2.0 * b],
            [b, 1.0 - 2.0 * b, b],
            [1.0 - 2.0 * b, b, b],
        ];
        Self { bary, weights: vec![wa, wa, wa, wb, wb, wb] }
    }
}

/// P1 space with interior degrees of freedom, assembled mass and stiffness.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Mesh,
    node_to_dof: Vec<Option<usize>>,
    dof_to_node: Vec<usize>,
    cell_measure: Vec<f64>,
    cell_grads: Vec<[[f64; 2]; 3]>,
    // per cell, storage slot of each local (a, b) pair in the shared pattern
    cell_slots: Vec<[Option<usize>; 9]>,
    qp_bary: Vec<[f64; 3]>,
    qp_weights: Vec<f64>,
    ref_mass: [[f64; 3]; 3],
    ref_triple: [[[f64; 3]; 3]; 3],
    mass: SparseSym,
    stiffness: SparseSym,
}

impl FeSpace {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let rule = if mesh.dim == 1 { RefRule::interval() } else { RefRule::triangle() };
        let k = mesh.dim + 1;

        let mut node_to_dof = vec![None; mesh.nodes.len()];
        let mut dof_to_node = Vec::new();
        for (i, slot) in node_to_dof.iter_mut().enumerate() {
            if !mesh.boundary[i] {
                *slot = Some(dof_to_node.len());
                dof_to_node.push(i);
            }
        }

        let mut cell_measure = Vec::with_capacity(mesh.n_cells());
        let mut cell_grads = Vec::with_capacity(mesh.n_cells());
        for c in 0..mesh.n_cells() {
            let (meas, grads) = cell_geometry(&mesh, c);
            if !(meas > 0.0) {
                return Err(Error::DegenerateCell { cell: c, measure: meas });
            }
            cell_measure.push(meas);
            cell_grads.push(grads);
        }

        let mut ref_mass = [[0.0; 3]; 3];
        let mut ref_triple = [[[0.0; 3]; 3]; 3];
        for (l, w) in rule.bary.iter().zip(&rule.weights) {
            for a in 0..k {
                for b in 0..k {
                    ref_mass[a][b] += w * l[a] * l[b];
                    for c in 0..k {
                        ref_triple[a][b][c] += w * l[a] * l[b] * l[c];
                    }
                }
            }
        }

        let n_dof = dof_to_node.len();
        let mut mass_t = Vec::new();
        let mut stiff_t = Vec::new();
        for c in 0..mesh.n_cells() {
            let cell = mesh.cell(c);
            for a in 0..k {
                let Some(i) = node_to_dof[cell[a]] else { continue };
                for b in 0..k {
                    let Some(j) = node_to_dof[cell[b]] else { continue };
                    let g = &cell_grads[c];
                    mass_t.push((i, j, cell_measure[c] * ref_mass[a][b]));
                    stiff_t.push((
                        i,
                        j,
                        cell_measure[c] * (g[a][0] * g[b][0] + g[a][1] * g[b][1]),
                    ));
                }
            }
        }
        let mass = SparseSym::from_triplets(n_dof, &mass_t)?;
        let stiffness = SparseSym::from_triplets(n_dof, &stiff_t)?;
        debug_assert!(mass.same_pattern(&stiffness));

        let cell_slots = (0..mesh.n_cells())
            .map(|c| {
                let cell = mesh.cell(c);
                let mut slots = [None; 9];
                for a in 0..k {
                    for b in 0..k {
                        if let (Some(i), Some(j)) = (node_to_dof[cell[a]], node_to_dof[cell[b]]) {
                            slots[3 * a + b] = mass.slot(i, j);
                        }
                    }
                }
                slots
            })
            .collect();

        Ok(Self {
            mesh,
            node_to_dof,
            dof_to_node,
            cell_measure,
            cell_grads,
            cell_slots,
            qp_bary: rule.bary,
            qp_weights: rule.weights,
            ref_mass,
            ref_triple,
            mass,
            stiffness,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn n_dof(&self) -> usize {
        self.dof_to_node.len()
    }

    pub fn dof_node(&self, dof: usize) -> usize {
        self.dof_to_node[dof]
    }

    pub fn node_dof(&self, node: usize) -> Option<usize> {
        self.node_to_dof[node]
    }

    /// Interior mass matrix `M_h`.
    pub fn mass(&self) -> &SparseSym {
        &self.mass
    }

    /// Interior stiffness matrix `K_h`.
    pub fn stiffness(&self) -> &SparseSym {
        &self.stiffness
    }

    /// Direct solves in 1D, Jacobi-CG in 2D.
    pub fn solve_method(&self) -> SolveMethod {
        if self.mesh.dim == 1 {
            SolveMethod::BandedCholesky
        } else {
            SolveMethod::Cg { tol: DEFAULT_CG_TOL }
        }
    }

    fn nodes_per_cell(&self) -> usize {
        self.mesh.dim + 1
    }

    /// Mass matrix over all nodes, boundary included.
    pub fn full_mass(&self) -> Result<SparseSym> {
        self.assemble_full(|c, a, b| self.cell_measure[c] * self.ref_mass[a][b])
    }

    /// Stiffness matrix over all nodes, boundary included.
    pub fn full_stiffness(&self) -> Result<SparseSym> {
        self.assemble_full(|c, a, b| {
            let g = &self.cell_grads[c];
            self.cell_measure[c] * (g[a][0] * g[b][0] + g[a][1] * g[b][1])
        })
    }

    fn assemble_full(&self, entry: impl Fn(usize, usize, usize) -> f64) -> Result<SparseSym> {
        let k = self.nodes_per_cell();
        let mut t = Vec::with_capacity(self.mesh.n_cells() * k * k);
        for c in 0..self.mesh.n_cells() {
            let cell = self.mesh.cell(c);
            for a in 0..k {
                for b in 0..k {
                    t.push((cell[a], cell[b], entry(c, a, b)));
                }
            }
        }
        SparseSym::from_triplets(self.mesh.nodes.len(), &t)
    }

    /// Nodal values over all nodes from interior coefficients.
    pub fn extend(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.mesh.nodes.len()];
        for (dof, &node) in self.dof_to_node.iter().enumerate() {
            full[node] = coeffs[dof];
        }
        full
    }

    /// Matrix `B(w)_ij = int w_h phi_j phi_i` for interior coefficients `w`.
    pub fn bilinear_mass(&self, w: &[f64]) -> SparseSym {
        let k = self.nodes_per_cell();
        let wf = self.extend(w);
        let mut out = self.mass.zeros_like();
        let vals = out.values_mut();
        for c in 0..self.mesh.n_cells() {
            let cell = self.mesh.cell(c);
            let slots = &self.cell_slots[c];
            for a in 0..k {
                for b in 0..k {
                    let Some(s) = slots[3 * a + b] else { continue };
                    let mut acc = 0.0;
                    for (e, &node) in cell.iter().enumerate() {
                        acc += wf[node] * self.ref_triple[a][b][e];
                    }
                    vals[s] += self.cell_measure[c] * acc;
                }
            }
        }
        out
    }

    /// `int (1 - 2k w_h) phi_j phi_i`.
    pub fn weighted_mass(&self, w: &[f64], k: f64) -> SparseSym {
        if k == 0.0 {
            return self.mass.clone();
        }
        let b = self.bilinear_mass(w);
        SparseSym::linear_combination(&[(1.0, &self.mass), (-2.0 * k, &b)])
            .expect("assembled on the shared pattern")
    }

    /// Vector `int d_h^2 phi_i`.
    pub fn quadratic_load(&self, d: &[f64]) -> Vec<f64> {
        let k = self.nodes_per_cell();
        let df = self.extend(d);
        let mut out = vec![0.0; self.n_dof()];
        for c in 0..self.mesh.n_cells() {
            let cell = self.mesh.cell(c);
            for a in 0..k {
                let Some(i) = self.node_to_dof[cell[a]] else { continue };
                let mut acc = 0.0;
                for b in 0..k {
                    for e in 0..k {
                        acc += df[cell[b]] * df[cell[e]] * self.ref_triple[a][b][e];
                    }
                }
                out[i] += self.cell_measure[c] * acc;
            }
        }
        out
    }

    /// Quadrature points of cell `c` with their physical weights.
    fn cell_quadrature(&self, c: usize) -> impl Iterator<Item = (Point, f64, &[f64; 3])> + '_ {
        let cell = self.mesh.cell(c);
        let meas = self.cell_measure[c];
        self.qp_bary.iter().zip(&self.qp_weights).map(move |(l, w)| {
            let mut p = [0.0; 2];
            for (a, &node) in cell.iter().enumerate() {
                p[0] += l[a] * self.mesh.nodes[node][0];
                p[1] += l[a] * self.mesh.nodes[node][1];
            }
            (p, w * meas, l)
        })
    }

    /// Load vector `int g phi_i`.
    pub fn load<G: Fn(&Point) -> f64>(&self, g: G) -> Vec<f64> {
        let k = self.nodes_per_cell();
        let mut out = vec![0.0; self.n_dof()];
        for c in 0..self.mesh.n_cells() {
            let cell = self.mesh.cell(c);
            for (p, w, l) in self.cell_quadrature(c) {
                let gv = g(&p) * w;
                for a in 0..k {
                    if let Some(i) = self.node_to_dof[cell[a]] {
                        out[i] += gv * l[a];
                    }
                }
            }
        }
        out
    }

    /// L2 projection onto the interior space.
    pub fn l2_project<G: Fn(&Point) -> f64>(&self, g: G) -> Result<Vec<f64>> {
        let rhs = self.load(g);
        solve_spd(&self.mass, &rhs, self.solve_method())
    }

    /// Nodal interpolant at interior nodes.
    pub fn interpolate<G: Fn(&Point) -> f64>(&self, g: G) -> Vec<f64> {
        self.dof_to_node.iter().map(|&n| g(&self.mesh.nodes[n])).collect()
    }

    /// `sqrt(int (c_h - g)^2)` using the element quadrature rule.
    pub fn l2_distance<G: Fn(&Point) -> f64>(&self, coeffs: &[f64], g: G) -> f64 {
        let full = self.extend(coeffs);
        let mut s = 0.0;
        for c in 0..self.mesh.n_cells() {
            let cell = self.mesh.cell(c);
            for (p, w, l) in self.cell_quadrature(c) {
                let uh: f64 = cell.iter().enumerate().map(|(a, &n)| l[a] * full[n]).sum();
                s += w * (uh - g(&p)).powi(2);
            }
        }
        s.sqrt()
    }

    /// Smallest value of `1 - 2 k w_h` over the domain (attained at a vertex).
    pub fn min_nonlinear_coefficient(&self, w: &[f64], k: f64) -> f64 {
        let wmax = w.iter().copied().fold(0.0f64, f64::max);
        1.0 - 2.0 * k * wmax
    }
}

fn cell_geometry(mesh: &Mesh, c: usize) -> (f64, [[f64; 2]; 3]) {
    let cell = mesh.cell(c);
    let p = |i: usize| mesh.nodes[cell[i]];
    if mesh.dim == 1 {
        let h = p(1)[0] - p(0)[0];
        (h, [[-1.0 / h, 0.0], [1.0 / h, 0.0], [0.0, 0.0]])
    } else {
        let (p0, p1, p2) = (p(0), p(1), p(2));
        let j11 = p1[0] - p0[0];
        let j12 = p2[0] - p0[0];
        let j21 = p1[1] - p0[1];
        let j22 = p2[1] - p0[1];
        let det = j11 * j22 - j12 * j21;
        // rows of J^-T applied to reference gradients (-1,-1), (1,0), (0,1)
        let g1 = [j22 / det, -j12 / det];
        let g2 = [-j21 / det, j11 / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        (0.5 * det, [g0, g1, g2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_counts_and_boundary() {
        let m = Mesh::interval(0.0, 1.0, 4).unwrap();
        assert_eq!(m.nodes().len(), 5);
        assert!(m.is_boundary(0) && m.is_boundary(4) && !m.is_boundary(2));
        let s = Mesh::square(-1.0, 1.0, 3).unwrap();
        assert_eq!(s.nodes().len(), 16);
        assert_eq!(s.n_cells(), 18);
        assert_eq!((0..16).filter(|&i| s.is_boundary(i)).count(), 12);
        assert!(Mesh::interval(1.0, 1.0, 3).is_err());
        assert!(Mesh::square(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn one_d_stencils_match_hand_integration() {
        let space = FeSpace::new(Mesh::interval(0.0, 1.0, 4).unwrap()).unwrap();
        let h = 0.25;
        let (k, m) = (space.stiffness(), space.mass());
        for i in 0..3 {
            assert!((k.get(i, i) - 2.0 / h).abs() < 1e-14);
            assert!((m.get(i, i) - 4.0 * h / 6.0).abs() < 1e-14);
            if i + 1 < 3 {
                assert!((k.get(i, i + 1) + 1.0 / h).abs() < 1e-14);
                assert!((m.get(i, i + 1) - h / 6.0).abs() < 1e-14);
            }
        }
        assert_eq!(k.get(0, 2), 0.0);
    }

    #[test]
    fn triangle_rule_is_degree_four_exact() {
        let rule = RefRule::triangle();
        // int over the reference triangle of x^a y^b = a! b! / (a+b+2)!, weights sum to 1 = 2 |T|
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let q: f64 = rule
                    .bary
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum::<f64>()
                    * 0.5;
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((q - exact).abs() < 1e-15, "x^{a} y^{b}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn constants_are_in_the_stiffness_kernel() {
        let space = FeSpace::new(Mesh::square(0.0, 2.0, 5).unwrap()).unwrap();
        let k = space.full_stiffness().unwrap();
        let y = k.matvec(&vec![1.0; space.mesh().nodes().len()]).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn full_mass_sums_to_domain_measure() {
        for space in [
            FeSpace::new(Mesh::interval(-1.0, 1.0, 7).unwrap()).unwrap(),
            FeSpace::new(Mesh::square(-1.0, 1.0, 6).unwrap()).unwrap(),
        ] {
            let m = space.full_mass().unwrap();
            let total: f64 = m.values().iter().sum();
            assert!((total - space.mesh().measure()).abs() < 1e-13);
        }
    }

    #[test]
    fn weighted_mass_special_cases() {
        let space = FeSpace::new(Mesh::square(0.0, 1.0, 4).unwrap()).unwrap();
        let n = space.n_dof();
        let w: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(&space.weighted_mass(&w, 0.0), space.mass());
        // constant field (with zero boundary it is only constant in the interior,
        // so use the interval where every interior cell sees interior nodes only)
        let line = FeSpace::new(Mesh::interval(0.0, 1.0, 8).unwrap()).unwrap();
        let c = vec![0.3; line.n_dof()];
        let b = line.bilinear_mass(&c);
        for i in 1..line.n_dof() - 1 {
            for j in i.saturating_sub(1)..=i + 1 {
                assert!((b.get(i, j) - 0.3 * line.mass().get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_element_cubic_integral() {
        // one interior node at x = h on (0, 2h): entry int (1 - 2k w) phi^2 with w = phi
        let h = 0.5;
        let space = FeSpace::new(Mesh::interval(0.0, 2.0 * h, 2).unwrap()).unwrap();
        let k = 0.5;
        let a = space.weighted_mass(&[1.0], k);
        // int phi^2 = 2h/3, int phi^3 = 2h/4
        let want = 2.0 * h / 3.0 - 2.0 * k * 2.0 * h / 4.0;
        assert!((a.get(0, 0) - want).abs() < 1e-15);
    }

    #[test]
    fn quadratic_load_of_zero_and_one() {
        let space = FeSpace::new(Mesh::square(0.0, 1.0, 4).unwrap()).unwrap();
        assert!(space.quadratic_load(&vec![0.0; space.n_dof()]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn projection_of_zero_and_of_discrete_functions() {
        let space = FeSpace::new(Mesh::interval(-1.0, 1.0, 16).unwrap()).unwrap();
        assert!(space.l2_project(|_| 0.0).unwrap().iter().all(|v| *v == 0.0));
        // hat-function combination: interpolate a piecewise linear function
        let tent = |p: &Point| 1.0 - p[0].abs();
        let c = space.l2_project(tent).unwrap();
        let nodal = space.interpolate(tent);
        for (a, b) in c.iter().zip(&nodal) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_coefficient_guard() {
        let space = FeSpace::new(Mesh::interval(0.0, 1.0, 4).unwrap()).unwrap();
        assert_eq!(space.min_nonlinear_coefficient(&[0.0, 2.0, 1.0], 0.25), 0.0);
        assert_eq!(space.min_nonlinear_coefficient(&[-3.0, -1.0, -1.0], 0.25), 1.0);
    }
}
