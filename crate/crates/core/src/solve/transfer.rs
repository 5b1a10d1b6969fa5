use crate::femspaces::geometry::dist;
use crate::femspaces::projection::l2_project_cell;
use crate::femspaces::quadrature::{EdgeRule, TriangleRule};
use crate::hho::{HhoFunction, HhoSpace, Problem};
use crate::mesh::refine::{RefinedMesh, SideOrigin};

/// Transfers `v` from `coarse` to the space `fine` on a refinement of its
/// mesh: cell polynomials and interior sides of coarse cells are projected
/// from the parent cell polynomial, halves of coarse sides from the coarse
/// side polynomial. Boundary blocks receive the boundary data of `problem`.
pub fn prolongate(
    coarse: &HhoSpace,
    fine: &HhoSpace,
    refined: &RefinedMesh,
    v: &HhoFunction,
    problem: &Problem,
) -> HhoFunction {
    let k = coarse.degree().max(fine.degree());
    let rule = TriangleRule::new(2 * k).expect("supported degree");
    let erule = EdgeRule::new(2 * k).expect("supported degree");
    let cm = coarse.mesh();
    let fm = fine.mesh();
    let cell_value = |t: usize, x: [f64; 2]| -> f64 {
        let r = cm.geometry(t).to_reference(x);
        coarse.cell_basis.values(r).iter().zip(v.cell(t)).map(|(a, b)| a * b).sum()
    };
    let side_value = |s: usize, x: [f64; 2]| -> f64 {
        let side = &cm.sides()[s];
        let a = cm.vertices()[side.vertices[0]];
        let b = cm.vertices()[side.vertices[1]];
        let t = dist(a, x) / dist(a, b);
        coarse.edge_basis.values(t).iter().zip(v.side(s)).map(|(p, c)| p * c).sum()
    };
    let mut out = fine.zero_function();
    for t in 0..fm.n_triangles() {
        let p = refined.parent[t];
        let c = l2_project_cell(|x| cell_value(p, x), &fm.geometry(t), &fine.cell_basis, &rule);
        out.cell_mut(t).copy_from_slice(&c);
    }
    for (s, origin) in refined.side_origin.iter().enumerate() {
        let c = match *origin {
            SideOrigin::Same(cs) if coarse.degree() == fine.degree() => v.side(cs).to_vec(),
            SideOrigin::Same(cs) | SideOrigin::SubSide(cs) => {
                fine.project_on_side(s, |x| side_value(cs, x), &erule)
            }
            SideOrigin::Interior(p) => fine.project_on_side(s, |x| cell_value(p, x), &erule),
        };
        out.side_mut(s).copy_from_slice(&c);
    }
    fine.apply_boundary_data(&mut out, problem.dirichlet.as_deref().map(|f| f as _));
    out
}
