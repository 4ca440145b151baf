/// Boundary classification of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeTag {
    /// x = ±1, homogeneous Dirichlet.
    Dirichlet,
    /// y = ±1 away from the Dirichlet columns, natural boundary.
    Neumann,
    Interior,
}

/// Uniform triangulation of (−1,1)² with N subdivisions per direction.
///
/// Node (i, j) sits at (−1 + 2i/N, −1 + 2j/N) with index `j(N+1) + i`.
/// Square (i, j) is split along its lower-left to upper-right diagonal into
/// triangles `2(jN+i)` = (ll, lr, ur) and `2(jN+i)+1` = (ll, ur, ul), both
/// counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredMesh {
    n: usize,
    triangles: Vec<[usize; 3]>,
    tags: Vec<NodeTag>,
    free_index: Vec<Option<usize>>,
    free_nodes: Vec<usize>,
}

impl StructuredMesh {
    /// Panics if `n < 2`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "mesh needs at least 2 subdivisions, got {n}");
        let np = n + 1;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let ll = j * np + i;
                let lr = ll + 1;
                let ul = ll + np;
                let ur = ul + 1;
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }
        let mut tags = Vec::with_capacity(np * np);
        let mut free_index = Vec::with_capacity(np * np);
        let mut free_nodes = Vec::new();
        for j in 0..np {
            for i in 0..np {
                let tag = if i == 0 || i == n {
                    NodeTag::Dirichlet
                } else if j == 0 || j == n {
                    NodeTag::Neumann
                } else {
                    NodeTag::Interior
                };
                tags.push(tag);
                if tag == NodeTag::Dirichlet {
                    free_index.push(None);
                } else {
                    free_index.push(Some(free_nodes.len()));
                    free_nodes.push(j * np + i);
                }
            }
        }
        Self {
            n,
            triangles,
            tags,
            free_index,
            free_nodes,
        }
    }

    /// Subdivisions per direction.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn num_nodes(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn num_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_free(&self) -> usize {
        self.free_nodes.len()
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    /// Grid position (i, j) of a node.
    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        (node % (self.n + 1), node / (self.n + 1))
    }

    pub fn node_coords(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.node_ij(node);
        [self.coord(i), self.coord(j)]
    }

    /// Grid line coordinate −1 + 2k/N.
    pub fn coord(&self, k: usize) -> f64 {
        -1.0 + 2.0 * k as f64 / self.n as f64
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.node_coords(a), self.node_coords(b), self.node_coords(c)]
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let v = self.vertices(t);
        [
            (v[0][0] + v[1][0] + v[2][0]) / 3.0,
            (v[0][1] + v[1][1] + v[2][1]) / 3.0,
        ]
    }

    /// All triangles have area 2/N².
    pub fn cell_area(&self) -> f64 {
        2.0 / (self.n * self.n) as f64
    }

    pub fn tag(&self, node: usize) -> NodeTag {
        self.tags[node]
    }

    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.tags[node] == NodeTag::Dirichlet
    }

    /// Free (non-Dirichlet) nodes in increasing order.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free_nodes
    }

    pub fn free_index(&self, node: usize) -> Option<usize> {
        self.free_index[node]
    }

    /// Cell index of triangle `half` (0 lower, 1 upper) of square (i, j).
    pub fn cell_index(&self, i: usize, j: usize, half: usize) -> usize {
        2 * (j * self.n + i) + half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_area(v: [[f64; 2]; 3]) -> f64 {
        0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
    }

    #[test]
    fn counts_n2() {
        let m = StructuredMesh::new(2);
        assert_eq!(m.num_nodes(), 9);
        assert_eq!(m.num_cells(), 8);
        let dir = (0..9).filter(|&v| m.is_dirichlet(v)).count();
        assert_eq!(dir, 6);
        assert_eq!(m.num_free(), 3);
    }

    #[test]
    fn counts_n32_and_n64() {
        let m = StructuredMesh::new(32);
        assert_eq!((m.num_nodes(), m.num_cells()), (1089, 2048));
        let m = StructuredMesh::new(64);
        assert_eq!((m.num_nodes(), m.num_cells()), (4225, 8192));
    }

    #[test]
    fn areas_positive_equal_and_sum_to_four() {
        let m = StructuredMesh::new(7);
        let mut total = 0.0;
        for t in 0..m.num_cells() {
            let a = signed_area(m.vertices(t));
            assert!((a - m.cell_area()).abs() < 1e-15);
            total += a;
        }
        assert!((total - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_exactly_on_vertical_edges() {
        let m = StructuredMesh::new(5);
        for v in 0..m.num_nodes() {
            let [x, y] = m.node_coords(v);
            assert_eq!(m.is_dirichlet(v), x == -1.0 || x == 1.0);
            if !m.is_dirichlet(v) && (y == -1.0 || y == 1.0) {
                assert_eq!(m.tag(v), NodeTag::Neumann);
            }
        }
    }
}
