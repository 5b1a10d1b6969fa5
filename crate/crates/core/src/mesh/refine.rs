use std::collections::HashMap;

use super::Mesh;

/// Where a side of a refined mesh comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideOrigin {
    /// Unchanged side of the coarse mesh.
    Same(usize),
    /// Half of a bisected coarse side.
    SubSide(usize),
    /// New side in the interior of a coarse triangle.
    Interior(usize),
}

/// A refined mesh together with the maps needed for prolongation.
#[derive(Debug, Clone)]
pub struct RefinedMesh {
    pub mesh: Mesh,
    /// Coarse triangle containing each fine triangle.
    pub parent: Vec<usize>,
    /// Origin of each fine side.
    pub side_origin: Vec<SideOrigin>,
}

/// Newest-vertex bisection of all marked triangles plus the closure needed
/// for conformity.
pub fn refine_nvb(mesh: &Mesh, marked: &[usize]) -> RefinedMesh {
    let mut edge_marked = vec![false; mesh.n_sides()];
    for &t in marked {
        edge_marked[mesh.triangle_sides(t)[0]] = true;
    }
    refine_marked_edges(mesh, edge_marked)
}

/// Bisects every triangle twice, producing four children per triangle.
pub fn uniform_refine(mesh: &Mesh) -> RefinedMesh {
    refine_marked_edges(mesh, vec![true; mesh.n_sides()])
}

fn refine_marked_edges(mesh: &Mesh, mut edge_marked: Vec<bool>) -> RefinedMesh {
    // closure: a triangle with any marked side must have its refinement edge marked
    loop {
        let mut changed = false;
        for t in 0..mesh.n_triangles() {
            let s = mesh.triangle_sides(t);
            if !edge_marked[s[0]] && (edge_marked[s[1]] || edge_marked[s[2]]) {
                edge_marked[s[0]] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut midpoint: HashMap<[usize; 2], usize> = HashMap::new();
    let mut midpoint_of: HashMap<usize, usize> = HashMap::new();
    for (s, side) in mesh.sides().iter().enumerate() {
        if edge_marked[s] {
            let [a, b] = side.vertices;
            let (pa, pb) = (vertices[a], vertices[b]);
            midpoint.insert(side.vertices, vertices.len());
            midpoint_of.insert(vertices.len(), s);
            vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        }
    }

    let mut triangles = Vec::with_capacity(mesh.n_triangles() * 2);
    let mut generation = Vec::with_capacity(mesh.n_triangles() * 2);
    let mut parent = Vec::with_capacity(mesh.n_triangles() * 2);
    for t in 0..mesh.n_triangles() {
        bisect(
            mesh.triangles()[t],
            mesh.generation(t),
            &midpoint,
            &mut |tri, gen| {
                triangles.push(tri);
                generation.push(gen);
                parent.push(t);
            },
        );
    }

    let fine = Mesh::from_parts(vertices, triangles, generation)
        .expect("bisection of a conforming mesh stays conforming");

    let coarse_side: HashMap<[usize; 2], usize> = mesh
        .sides()
        .iter()
        .enumerate()
        .map(|(s, side)| (side.vertices, s))
        .collect();
    let side_origin = fine
        .sides()
        .iter()
        .map(|side| {
            if let Some(&s) = coarse_side.get(&side.vertices) {
                return SideOrigin::Same(s);
            }
            let [a, b] = side.vertices;
            for (m, o) in [(a, b), (b, a)] {
                if let Some(&s) = midpoint_of.get(&m) {
                    if mesh.sides()[s].vertices.contains(&o) {
                        return SideOrigin::SubSide(s);
                    }
                }
            }
            SideOrigin::Interior(parent[side.plus.0])
        })
        .collect();

    RefinedMesh { mesh: fine, parent, side_origin }
}

/// Recursively bisects `tri = (v0, v1, v2)` while its refinement edge
/// `(v1, v2)` carries a midpoint.
fn bisect(
    tri: [usize; 3],
    gen: u32,
    midpoint: &HashMap<[usize; 2], usize>,
    emit: &mut impl FnMut([usize; 3], u32),
) {
    let [v0, v1, v2] = tri;
    match midpoint.get(&[v1.min(v2), v1.max(v2)]) {
        None => emit(tri, gen),
        Some(&m) => {
            bisect([m, v0, v1], gen + 1, midpoint, emit);
            bisect([m, v2, v0], gen + 1, midpoint, emit);
        }
    }
}
