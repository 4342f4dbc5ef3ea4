//! Degree-of-freedom functionals: generation, closed-form rows over the
//! monomial basis, and direct evaluation on arbitrary fields.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::elements::bubble::BubbleBasis;
use crate::elements::catalog::{catalog, Component, FamilyId, ShapeSpaceSpec};
use crate::error::{Error, Result};
use crate::mesh::{LocalEntity, Slot};
use crate::operators::{FieldShape, PolyField};
use crate::polytensor::{int, moment, Axis, EntityKind, EntityPoly, EntityRef, Rational, TensorPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DofKind {
    PointEval,
    EdgeMoment,
    FaceMoment,
    CellMoment,
    CoupledCellMoment,
}

impl DofKind {
    fn for_entity(kind: EntityKind) -> DofKind {
        match kind {
            EntityKind::Vertex => DofKind::PointEval,
            EntityKind::Edge(_) => DofKind::EdgeMoment,
            EntityKind::Face(_) => DofKind::FaceMoment,
            EntityKind::Cell => DofKind::CellMoment,
        }
    }
}

/// A DOF of a cell, with its entity given relative to the cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalDof {
    pub entity: LocalEntity,
    pub component: Component,
    /// Physical derivative multi-index applied before evaluation or integration.
    pub deriv: [u8; 3],
    /// Weight exponents in entity-normalized coordinates, one per free axis.
    pub weight: Vec<usize>,
    pub kind: DofKind,
}

impl LocalDof {
    fn sort_key(&self) -> (usize, usize, usize, [u8; 3], Vec<usize>) {
        let kind = self.entity.kind();
        (kind.dimension(), self.entity.position(), self.component.order(), self.deriv, self.weight.clone())
    }

    /// Attaches the DOF to the concrete sub-entity of a mesh cell.
    pub fn on(&self, entity: EntityRef) -> DofFunctional {
        DofFunctional {
            entity,
            component: self.component,
            deriv: self.deriv,
            weight: self.weight.clone(),
            kind: self.kind,
        }
    }
}

/// A DOF attached to a concrete mesh entity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DofFunctional {
    pub entity: EntityRef,
    pub component: Component,
    pub deriv: [u8; 3],
    pub weight: Vec<usize>,
    pub kind: DofKind,
}

impl DofFunctional {
    pub fn key(&self) -> DofKey {
        DofKey {
            entity_kind: self.entity.kind,
            entity_id: self.entity.id,
            component: self.component,
            deriv: self.deriv,
            weight: self.weight.clone(),
            kind: self.kind,
        }
    }
}

/// Identity of a global DOF: equal keys are one unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DofKey {
    pub entity_kind: EntityKind,
    pub entity_id: usize,
    pub component: Component,
    pub deriv: [u8; 3],
    pub weight: Vec<usize>,
    pub kind: DofKind,
}

impl fmt::Display for DofKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: String = Axis::ALL
            .iter()
            .flat_map(|a| std::iter::repeat_n(a.letter(), self.deriv[a.index()] as usize))
            .collect();
        write!(
            f,
            "{}#{} {:?} comp={} d=[{}] w={:?}",
            self.entity_kind.tag(),
            self.entity_id,
            self.kind,
            self.component,
            d,
            self.weight
        )
    }
}

fn weight_tuples(caps: &[i64]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &cap in caps {
        if cap < 0 {
            return Vec::new();
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=cap as usize).map(move |w| {
                    let mut v = prefix.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    out
}

/// The ordered DOF list of a family on one cell.
///
/// `bubbles` is the number of coupled diagonal moments (zero for families without them).
pub fn local_dofs(family: FamilyId, bubbles: usize) -> Vec<LocalDof> {
    let cat = catalog(family);
    let symmetric = matches!(
        cat.space.kind,
        crate::elements::catalog::FieldKind::Matrix(crate::elements::catalog::Structure::Symmetric)
    );
    let mut dofs = Vec::new();
    for g in &cat.groups {
        for cg in g.concrete(symmetric) {
            let weights = weight_tuples(&cg.caps);
            if weights.is_empty() {
                continue;
            }
            for local in LocalEntity::all() {
                let free: Vec<Axis> = Axis::ALL.into_iter().filter(|a| local.slots[a.index()] == Slot::Free).collect();
                if free != cg.free {
                    continue;
                }
                let kind = DofKind::for_entity(local.kind());
                for deriv in &cg.derivs {
                    for w in &weights {
                        dofs.push(LocalDof {
                            entity: *local,
                            component: cg.component,
                            deriv: *deriv,
                            weight: w.clone(),
                            kind,
                        });
                    }
                }
            }
        }
    }
    if cat.coupled_bubbles {
        let cell = *LocalEntity::all().last().expect("cell entry");
        for i in 0..bubbles {
            dofs.push(LocalDof {
                entity: cell,
                component: Component::Coupled(i),
                deriv: [0; 3],
                weight: Vec::new(),
                kind: DofKind::CoupledCellMoment,
            });
        }
    }
    dofs.sort_by_key(LocalDof::sort_key);
    dofs
}

/// Value of `d^deriv (t^e)` in one direction: evaluated at an endpoint or
/// integrated against `t^w` over `[0,h]`, all in normalized coordinates.
fn factor(e: usize, deriv: u8, slot: Slot, weight: usize, h: &Rational) -> Rational {
    let d = deriv as usize;
    if e < d {
        return Rational::zero();
    }
    let mut coef = Rational::one();
    for i in 0..d {
        coef *= int((e - i) as i64);
        coef /= h;
    }
    let m = e - d;
    match slot {
        Slot::Lo => {
            if m == 0 {
                coef
            } else {
                Rational::zero()
            }
        }
        Slot::Hi => coef,
        Slot::Free => coef * h / int((m + weight + 1) as i64),
    }
}

/// The DOF applied to every independent basis monomial of `space`, as `(coordinate, value)`.
pub fn dof_row(
    dof: &LocalDof,
    space: &ShapeSpaceSpec,
    extent: &[Rational; 3],
    bubbles: Option<&BubbleBasis>,
) -> Vec<(usize, Rational)> {
    let offsets = space.offsets();
    let mut row: Vec<(usize, Rational)> = Vec::new();
    if let Component::Coupled(i) = dof.component {
        let triple = &bubbles.expect("coupled DOFs need the bubble basis").triples[i];
        let vol = &extent[0] * &extent[1] * &extent[2];
        // traceless zz feeds back into xx and yy, so columns repeat
        let mut merged = std::collections::BTreeMap::new();
        for (slot, axis) in Axis::ALL.iter().enumerate() {
            let comp = Component::Matrix(*axis, *axis);
            for (ic, sign) in space.expand(comp) {
                let grid = space.grid(space.independent[ic]);
                for (flat, e) in grid.exponents().enumerate() {
                    let mut v = Rational::zero();
                    for (f, c) in triple[slot].terms() {
                        let den = (e[0] + f[0] + 1) * (e[1] + f[1] + 1) * (e[2] + f[2] + 1);
                        v += c / int(den as i64);
                    }
                    *merged.entry(offsets[ic] + flat).or_insert_with(Rational::zero) += v * &vol * int(sign);
                }
            }
        }
        return merged.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }
    let mut wi = dof.weight.iter();
    let weights: [usize; 3] = std::array::from_fn(|a| {
        if dof.entity.slots[a] == Slot::Free {
            *wi.next().expect("one weight per free axis")
        } else {
            0
        }
    });
    for (ic, sign) in space.expand(dof.component) {
        let grid = space.grid(space.independent[ic]);
        let per_axis: Vec<Vec<Rational>> = (0..3)
            .map(|a| {
                (0..=grid.cap(Axis::from_index(a)).max(0) as usize)
                    .map(|e| factor(e, dof.deriv[a], dof.entity.slots[a], weights[a], &extent[a]))
                    .collect()
            })
            .collect();
        for (flat, e) in grid.exponents().enumerate() {
            let v = &per_axis[0][e[0]] * &per_axis[1][e[1]] * &per_axis[2][e[2]];
            if !v.is_zero() {
                row.push((offsets[ic] + flat, v * int(sign)));
            }
        }
    }
    row
}

/// The polynomial of one component of a field.
pub fn select_component(field: &PolyField, c: Component) -> Result<&TensorPoly> {
    match (field.shape(), c) {
        (FieldShape::Scalar, Component::Scalar) => field.as_scalar(),
        (FieldShape::Vector, Component::Vector(a)) => Ok(field.v(a)),
        (FieldShape::Matrix, Component::Matrix(i, j)) => Ok(field.m(i, j)),
        (shape, c) => Err(Error::KindMismatch(format!("component {c} does not exist on a {shape:?} field"))),
    }
}

/// Evaluates a DOF on a field living on the DOF's cell, directly through
/// traces and moments.
pub fn apply_dof(dof: &DofFunctional, field: &PolyField, bubbles: Option<&BubbleBasis>) -> Result<Rational> {
    if let Component::Coupled(i) = dof.component {
        if field.shape() != FieldShape::Matrix {
            return Err(Error::KindMismatch("coupled moments act on matrix fields".into()));
        }
        let basis = bubbles.ok_or_else(|| Error::KindMismatch("coupled moment without bubble basis".into()))?;
        let triple = &basis.triples[i];
        let one = EntityPoly::monomial(Axis::ALL.to_vec(), &[0, 0, 0]);
        let mut total = Rational::zero();
        for (slot, a) in Axis::ALL.iter().enumerate() {
            let tau = field.m(*a, *a);
            let xi = triple[slot].clone().with_frame(tau.frame().clone());
            total += moment(&tau.mul(&xi), &one, &dof.entity)?;
        }
        return Ok(total);
    }
    let p = select_component(field, dof.component)?.derivative(dof.deriv);
    match dof.kind {
        DofKind::PointEval => Ok(p.evaluate(&dof.entity.lo)),
        _ => {
            let w = EntityPoly::monomial(dof.entity.kind.free_axes(), &dof.weight);
            moment(&p, &w, &dof.entity)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::catalog::FamilyKind;
    use crate::mesh::CuboidMesh;
    use crate::polytensor::{rat, Frame};
    use std::sync::Arc;

    fn fam(kind: FamilyKind, k: i64) -> FamilyId {
        FamilyId::new(kind, k).unwrap()
    }

    #[test]
    fn u_three_has_only_vertex_dofs() {
        let dofs = local_dofs(fam(FamilyKind::U, 3), 0);
        assert_eq!(dofs.len(), 64);
        assert!(dofs.iter().all(|d| d.kind == DofKind::PointEval));
        // the 8 derivative variants at the first vertex come first
        assert!(dofs[..8].iter().all(|d| d.entity == dofs[0].entity));
    }

    #[test]
    fn sigma_three_xx_block() {
        let dofs = local_dofs(fam(FamilyKind::Sigma, 3), 0);
        let xx: Vec<&LocalDof> = dofs.iter().filter(|d| d.component == Component::Matrix(Axis::X, Axis::X)).collect();
        assert_eq!(xx.len(), 32);
        assert!(xx.iter().all(|d| d.entity.kind() == EntityKind::Edge(Axis::X)));
        let derivs: std::collections::BTreeSet<[u8; 3]> = xx.iter().map(|d| d.deriv).collect();
        assert_eq!(derivs.len(), 4);
    }

    #[test]
    fn sigma_xx_never_on_yz_faces() {
        for k in 3..6 {
            for d in local_dofs(fam(FamilyKind::Sigma, k), 0) {
                if d.component == Component::Matrix(Axis::X, Axis::X) {
                    let kind = d.entity.kind();
                    assert!(kind != EntityKind::Face(Axis::X));
                    assert!(matches!(kind, EntityKind::Edge(Axis::X) | EntityKind::Face(_) | EntityKind::Cell));
                }
            }
        }
    }

    #[test]
    fn u_face_pattern_matches_planar_bfs() {
        // on the face z = 0 the tangential data is u, u_x, u_y, u_xy at the corners
        let dofs = local_dofs(fam(FamilyKind::U, 3), 0);
        let corner = LocalEntity { slots: [Slot::Lo, Slot::Lo, Slot::Lo] };
        let tangential: Vec<[u8; 3]> =
            dofs.iter().filter(|d| d.entity == corner && d.deriv[2] == 0).map(|d| d.deriv).collect();
        assert_eq!(tangential, vec![[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]]);
    }

    #[test]
    fn cyclic_symmetry_of_dof_descriptors() {
        // rotating x -> y -> z -> x maps the descriptor multiset onto itself
        for (kind, k) in [(FamilyKind::U, 4), (FamilyKind::Sigma, 4), (FamilyKind::Q, 4), (FamilyKind::X, 3), (FamilyKind::Gamma, 3), (FamilyKind::Z, 3)] {
            let dofs = local_dofs(fam(kind, k), 0);
            let describe = |d: &LocalDof, rot: usize| {
                let r = |a: Axis| Axis::from_index((a.index() + rot) % 3);
                let mut slots = [Slot::Lo; 3];
                let mut deriv = [0u8; 3];
                for a in Axis::ALL {
                    slots[r(a).index()] = d.entity.slots[a.index()];
                    deriv[r(a).index()] = d.deriv[a.index()];
                }
                let comp = match d.component {
                    Component::Vector(a) => Component::Vector(r(a)),
                    Component::Matrix(i, j) => {
                        let (i, j) = (r(i), r(j));
                        Component::Matrix(i.min(j), i.max(j))
                    }
                    c => c,
                };
                // weights follow their axes
                let free: Vec<Axis> = Axis::ALL.into_iter().filter(|a| d.entity.slots[a.index()] == Slot::Free).collect();
                let mut w: Vec<(Axis, usize)> = free.iter().map(|&a| r(a)).zip(d.weight.iter().copied()).collect();
                w.sort();
                (slots, deriv, comp, w)
            };
            let mut a: Vec<_> = dofs.iter().map(|d| describe(d, 0)).collect();
            let mut b: Vec<_> = dofs.iter().map(|d| describe(d, 1)).collect();
            a.sort_by(|x, y| format!("{x:?}").cmp(&format!("{y:?}")));
            b.sort_by(|x, y| format!("{x:?}").cmp(&format!("{y:?}")));
            assert_eq!(a, b, "{kind:?}");
        }
    }

    #[test]
    fn apply_dof_examples() {
        let mesh = CuboidMesh::unit_cell();
        let frame = Arc::new(Frame::reference());
        let vertex = mesh.cell_entities(0)[0].clone();
        let f = DofFunctional {
            entity: vertex,
            component: Component::Scalar,
            deriv: [0, 1, 1],
            weight: vec![],
            kind: DofKind::PointEval,
        };
        let u = PolyField::scalar(TensorPoly::monomial([0, 1, 1], int(1), frame.clone()));
        assert_eq!(apply_dof(&f, &u, None).unwrap(), int(1));

        let edge = mesh.cell_entities(0)[8].clone();
        assert_eq!(edge.kind, EntityKind::Edge(Axis::X));
        let mut s = PolyField::zero(FieldShape::Matrix, frame.clone());
        s.set_m(Axis::X, Axis::X, TensorPoly::monomial([1, 0, 0], int(1), frame));
        let g = DofFunctional {
            entity: edge,
            component: Component::Matrix(Axis::X, Axis::X),
            deriv: [0; 3],
            weight: vec![0],
            kind: DofKind::EdgeMoment,
        };
        assert_eq!(apply_dof(&g, &s, None).unwrap(), rat(1, 2));
        assert!(matches!(apply_dof(&g, &u, None), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn closed_form_rows_match_direct_evaluation() {
        // independent oracle: apply every DOF through traces and moments on a stretched cell
        let mesh = CuboidMesh::new(
            vec![rat(1, 2), rat(7, 4)],
            vec![int(-1), rat(-1, 3)],
            vec![int(2), rat(5, 2)],
        )
        .unwrap();
        let frame = mesh.cell_frame(0);
        let extent = mesh.cell_extent(0);
        let ents = mesh.cell_entities(0);
        for (kind, k) in [(FamilyKind::U, 4), (FamilyKind::Sigma, 4), (FamilyKind::Xi, 4), (FamilyKind::X, 3), (FamilyKind::Gamma, 3), (FamilyKind::XiRed, 3)] {
            let family = fam(kind, k);
            let space = catalog(family).space;
            let bubbles = crate::elements::bubble::bubble_basis_div_t(k).ok();
            let dofs = local_dofs(family, bubbles.as_ref().map(|b| b.triples.len()).unwrap_or(0));
            let basis = crate::elements::local::basis_fields(&space, frame.clone());
            for dof in dofs.iter().step_by(3) {
                let row = dof_row(dof, &space, &extent, bubbles.as_ref());
                let dense: std::collections::HashMap<usize, Rational> = row.into_iter().collect();
                let functional = dof.on(ents[dof.entity.position()].clone());
                for (j, b) in basis.iter().enumerate().step_by(5) {
                    let direct = apply_dof(&functional, b, bubbles.as_ref()).unwrap();
                    assert_eq!(dense.get(&j).cloned().unwrap_or_else(Rational::zero), direct, "{kind:?} {dof:?} basis {j}");
                }
            }
        }
    }
}
