//! Structured axis-aligned cuboid meshes of a box.
//!
//! Entities of each dimension are numbered by direction tag first
//! (`e_x, e_y, e_z`; `F_yz, F_xz, F_xy`) and then lexicographically by the
//! grid index of their minimal corner, z fastest.

use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytensor::{Axis, EntityKind, EntityRef, Frame, Rational};

/// Entity counts `(V, E, F, T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EntityCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub cells: usize,
}

impl EntityCounts {
    pub fn euler(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64 - self.cells as i64
    }
}

/// Position of a cell sub-entity along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Lo,
    Hi,
    Free,
}

/// A sub-entity of a cell, described by one slot per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalEntity {
    pub slots: [Slot; 3],
}

impl LocalEntity {
    pub fn kind(&self) -> EntityKind {
        let free: Vec<Axis> = Axis::ALL.into_iter().filter(|a| self.slots[a.index()] == Slot::Free).collect();
        EntityKind::from_free_axes(&free)
    }

    /// The 27 sub-entities of a cell in mesh order: dimension, direction tag, then corner offset lexicographic.
    pub fn all() -> &'static [LocalEntity] {
        static ALL: std::sync::OnceLock<Vec<LocalEntity>> = std::sync::OnceLock::new();
        ALL.get_or_init(|| {
            let mut v = Vec::with_capacity(27);
            for s0 in [Slot::Lo, Slot::Hi, Slot::Free] {
                for s1 in [Slot::Lo, Slot::Hi, Slot::Free] {
                    for s2 in [Slot::Lo, Slot::Hi, Slot::Free] {
                        v.push(LocalEntity { slots: [s0, s1, s2] });
                    }
                }
            }
            v.sort_by_key(|e| {
                let kind = e.kind();
                let offsets: Vec<u8> = e.slots.iter().map(|s| u8::from(*s == Slot::Hi)).collect();
                (kind.dimension(), kind, offsets)
            });
            v
        })
    }

    pub fn position(&self) -> usize {
        LocalEntity::all().iter().position(|e| e == self).expect("every slot triple is listed")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuboidMesh {
    breakpoints: [Vec<Rational>; 3],
}

impl CuboidMesh {
    /// Mesh with the given per-axis breakpoints (strictly increasing, at least two each).
    pub fn new(bx: Vec<Rational>, by: Vec<Rational>, bz: Vec<Rational>) -> Result<Self> {
        let breakpoints = [bx, by, bz];
        for (axis, b) in Axis::ALL.iter().zip(&breakpoints) {
            if b.len() < 2 {
                return Err(Error::BadBreakpoints(format!("axis {axis} has {} values", b.len())));
            }
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::BadBreakpoints(format!("axis {axis} is not strictly increasing")));
            }
        }
        Ok(CuboidMesh { breakpoints })
    }

    /// The unit box split into `n[0] x n[1] x n[2]` equal cells.
    pub fn unit_box(n: [usize; 3]) -> Result<Self> {
        let axis = |m: usize| -> Vec<Rational> { (0..=m).map(|i| Rational::new(i.into(), m.max(1).into())).collect() };
        if n.contains(&0) {
            return Err(Error::BadBreakpoints("cell counts must be positive".into()));
        }
        CuboidMesh::new(axis(n[0]), axis(n[1]), axis(n[2]))
    }

    pub fn unit_cell() -> Self {
        CuboidMesh::unit_box([1, 1, 1]).expect("valid")
    }

    pub fn breakpoints(&self, axis: Axis) -> &[Rational] {
        &self.breakpoints[axis.index()]
    }

    /// Cells per axis.
    pub fn shape(&self) -> [usize; 3] {
        std::array::from_fn(|a| self.breakpoints[a].len() - 1)
    }

    pub fn lower_corner(&self) -> [Rational; 3] {
        std::array::from_fn(|a| self.breakpoints[a][0].clone())
    }

    /// Grid extents of entities of `kind`: free axes count cells, fixed axes count breakpoints.
    fn grid(&self, kind: EntityKind) -> [usize; 3] {
        let n = self.shape();
        let free = kind.free_axes();
        std::array::from_fn(|a| if free.contains(&Axis::from_index(a)) { n[a] } else { n[a] + 1 })
    }

    fn kinds_of_dim(dim: usize) -> Vec<EntityKind> {
        match dim {
            0 => vec![EntityKind::Vertex],
            1 => Axis::ALL.iter().map(|&a| EntityKind::Edge(a)).collect(),
            2 => Axis::ALL.iter().map(|&a| EntityKind::Face(a)).collect(),
            _ => vec![EntityKind::Cell],
        }
    }

    fn block_len(&self, kind: EntityKind) -> usize {
        self.grid(kind).iter().product()
    }

    /// Offset of the `kind` block within the numbering of its dimension.
    fn block_start(&self, kind: EntityKind) -> usize {
        CuboidMesh::kinds_of_dim(kind.dimension())
            .into_iter()
            .take_while(|k| *k != kind)
            .map(|k| self.block_len(k))
            .sum()
    }

    pub fn num_entities(&self, dim: usize) -> usize {
        CuboidMesh::kinds_of_dim(dim).into_iter().map(|k| self.block_len(k)).sum()
    }

    pub fn counts(&self) -> EntityCounts {
        EntityCounts {
            vertices: self.num_entities(0),
            edges: self.num_entities(1),
            faces: self.num_entities(2),
            cells: self.num_entities(3),
        }
    }

    pub fn num_cells(&self) -> usize {
        self.num_entities(3)
    }

    /// Global number of the entity of `kind` whose minimal corner sits at grid index `g`.
    pub fn entity_id(&self, kind: EntityKind, g: [usize; 3]) -> usize {
        let d = self.grid(kind);
        self.block_start(kind) + (g[0] * d[1] + g[1]) * d[2] + g[2]
    }

    pub fn entity(&self, kind: EntityKind, g: [usize; 3]) -> EntityRef {
        let free = kind.free_axes();
        let lo: [Rational; 3] = std::array::from_fn(|a| self.breakpoints[a][g[a]].clone());
        let hi: [Rational; 3] = std::array::from_fn(|a| {
            let step = usize::from(free.contains(&Axis::from_index(a)));
            self.breakpoints[a][g[a] + step].clone()
        });
        EntityRef::new(kind, self.entity_id(kind, g), lo, hi).expect("grid entities are well formed")
    }

    /// Entity of dimension `dim` with global number `id`.
    pub fn entity_by_id(&self, dim: usize, mut id: usize) -> EntityRef {
        for kind in CuboidMesh::kinds_of_dim(dim) {
            let len = self.block_len(kind);
            if id < len {
                let d = self.grid(kind);
                let g = [id / (d[1] * d[2]), (id / d[2]) % d[1], id % d[2]];
                return self.entity(kind, g);
            }
            id -= len;
        }
        panic!("entity number out of range")
    }

    pub fn cell_index(&self, c: usize) -> [usize; 3] {
        let n = self.shape();
        [c / (n[1] * n[2]), (c / n[2]) % n[1], c % n[2]]
    }

    pub fn cell_id(&self, g: [usize; 3]) -> usize {
        self.entity_id(EntityKind::Cell, g)
    }

    pub fn cell(&self, c: usize) -> EntityRef {
        self.entity(EntityKind::Cell, self.cell_index(c))
    }

    pub fn cell_frame(&self, c: usize) -> Arc<Frame> {
        Arc::new(self.cell(c).frame())
    }

    pub fn cell_extent(&self, c: usize) -> [Rational; 3] {
        let g = self.cell_index(c);
        std::array::from_fn(|a| &self.breakpoints[a][g[a] + 1] - &self.breakpoints[a][g[a]])
    }

    /// A sub-entity of cell `c` as a global entity.
    pub fn sub_entity(&self, c: usize, local: &LocalEntity) -> EntityRef {
        let g = self.cell_index(c);
        let corner: [usize; 3] = std::array::from_fn(|a| g[a] + usize::from(local.slots[a] == Slot::Hi));
        self.entity(local.kind(), corner)
    }

    /// The 27 sub-entities of cell `c`, in local order.
    pub fn cell_entities(&self, c: usize) -> Vec<EntityRef> {
        LocalEntity::all().iter().map(|l| self.sub_entity(c, l)).collect()
    }

    /// Cells adjacent to a face: `(lower side, upper side)`; `None` on the boundary.
    pub fn face_cells(&self, face_id: usize) -> (Option<usize>, Option<usize>) {
        let face = self.entity_by_id(2, face_id);
        let EntityKind::Face(normal) = face.kind else { unreachable!() };
        let n = normal.index();
        let idx = self.breakpoints[n].iter().position(|b| *b == face.lo[n]).expect("face on a breakpoint");
        let mut g: [usize; 3] = std::array::from_fn(|a| {
            self.breakpoints[a].iter().position(|b| *b == face.lo[a]).expect("corner on grid")
        });
        let below = (idx > 0).then(|| {
            g[n] = idx - 1;
            self.cell_id(g)
        });
        let above = (idx < self.shape()[n]).then(|| {
            g[n] = idx;
            self.cell_id(g)
        });
        (below, above)
    }

    /// Numbers of the faces shared by two cells.
    pub fn interior_faces(&self) -> Vec<usize> {
        (0..self.num_entities(2))
            .filter(|&f| matches!(self.face_cells(f), (Some(_), Some(_))))
            .collect()
    }

    /// Number of cells containing the entity.
    pub fn incident_cells(&self, entity: &EntityRef) -> usize {
        let free = entity.kind.free_axes();
        let n = self.shape();
        let mut count = 1;
        for axis in Axis::ALL {
            if free.contains(&axis) {
                continue;
            }
            let a = axis.index();
            let idx = self.breakpoints[a].iter().position(|b| *b == entity.lo[a]).expect("on grid");
            count *= usize::from(idx > 0) + usize::from(idx < n[a]);
        }
        count
    }

    /// Box volume; handy for sanity checks.
    pub fn volume(&self) -> Rational {
        (0..3).fold(Rational::one(), |acc, a| {
            acc * (self.breakpoints[a].last().unwrap() - &self.breakpoints[a][0])
        })
    }

    pub fn describe(&self) -> String {
        let n = self.shape();
        format!("{}x{}x{}", n[0], n[1], n[2])
    }
}

/// `V - E + F - T`.
pub fn euler_characteristic(mesh: &CuboidMesh) -> i64 {
    mesh.counts().euler()
}

impl Default for CuboidMesh {
    fn default() -> Self {
        CuboidMesh::unit_cell()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytensor::{int, rat};
    use proptest::prelude::*;

    fn formula(n: [usize; 3]) -> (usize, usize, usize, usize) {
        let [x, y, z] = n;
        let v = (x + 1) * (y + 1) * (z + 1);
        let e = x * (y + 1) * (z + 1) + (x + 1) * y * (z + 1) + (x + 1) * (y + 1) * z;
        let f = (x + 1) * y * z + x * (y + 1) * z + x * y * (z + 1);
        (v, e, f, x * y * z)
    }

    #[test]
    fn counts_match_examples() {
        let c = CuboidMesh::unit_cell().counts();
        assert_eq!((c.vertices, c.edges, c.faces, c.cells), (8, 12, 6, 1));
        let c = CuboidMesh::unit_box([2, 2, 2]).unwrap().counts();
        assert_eq!((c.vertices, c.edges, c.faces, c.cells), (27, 54, 36, 8));
        let c = CuboidMesh::unit_box([2, 1, 1]).unwrap().counts();
        assert_eq!((c.vertices, c.edges, c.faces, c.cells), (12, 20, 11, 2));
    }

    #[test]
    fn euler_examples() {
        for n in [[1, 1, 1], [2, 2, 2], [3, 2, 1]] {
            assert_eq!(euler_characteristic(&CuboidMesh::unit_box(n).unwrap()), 1);
        }
    }

    #[test]
    fn rejects_bad_breakpoints() {
        let ok = vec![int(0), int(1)];
        assert!(CuboidMesh::new(vec![int(0), int(2), int(1)], ok.clone(), ok.clone()).is_err());
        assert!(CuboidMesh::new(vec![int(0)], ok.clone(), ok.clone()).is_err());
        assert!(CuboidMesh::new(vec![int(0), int(0)], ok.clone(), ok).is_err());
    }

    #[test]
    fn nonuniform_breakpoints_keep_geometry() {
        let m = CuboidMesh::new(vec![int(0), rat(1, 3), int(1)], vec![int(-1), int(2)], vec![int(0), rat(1, 2)]).unwrap();
        assert_eq!(m.cell_extent(1), [rat(2, 3), int(3), rat(1, 2)]);
        assert_eq!(m.volume(), rat(3, 2));
    }

    #[test]
    fn local_entity_order() {
        let all = LocalEntity::all();
        assert_eq!(all.len(), 27);
        let dims: Vec<usize> = all.iter().map(|e| e.kind().dimension()).collect();
        assert_eq!(&dims[..8], &[0; 8]);
        assert_eq!(&dims[8..20], &[1; 12]);
        assert_eq!(&dims[20..26], &[2; 6]);
        assert_eq!(dims[26], 3);
        assert_eq!(all[8].kind(), EntityKind::Edge(Axis::X));
        assert_eq!(all[20].kind(), EntityKind::Face(Axis::X));
    }

    #[test]
    fn cell_entities_follow_global_order() {
        let m = CuboidMesh::unit_box([2, 3, 2]).unwrap();
        for c in 0..m.num_cells() {
            let ents = m.cell_entities(c);
            for w in ents.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if a.kind.dimension() == b.kind.dimension() {
                    assert!(a.id < b.id, "local order must follow global numbering");
                }
            }
        }
    }

    #[test]
    fn incidence_bounds() {
        let m = CuboidMesh::unit_box([3, 2, 2]).unwrap();
        for f in 0..m.num_entities(2) {
            let (lo, hi) = m.face_cells(f);
            let face = m.entity_by_id(2, f);
            assert_eq!(usize::from(lo.is_some()) + usize::from(hi.is_some()), m.incident_cells(&face));
        }
        for e in 0..m.num_entities(1) {
            assert!(m.incident_cells(&m.entity_by_id(1, e)) <= 4);
        }
        for v in 0..m.num_entities(0) {
            assert!(m.incident_cells(&m.entity_by_id(0, v)) <= 8);
        }
        // each interior face has exactly two cells, and those cells list it
        for f in m.interior_faces() {
            let (Some(a), Some(b)) = m.face_cells(f) else { unreachable!() };
            assert!(m.cell_entities(a).iter().any(|e| e.kind.dimension() == 2 && e.id == f));
            assert!(m.cell_entities(b).iter().any(|e| e.kind.dimension() == 2 && e.id == f));
        }
    }

    proptest! {
        #[test]
        fn counts_and_euler(nx in 1usize..5, ny in 1usize..5, nz in 1usize..5) {
            let m = CuboidMesh::unit_box([nx, ny, nz]).unwrap();
            let c = m.counts();
            prop_assert_eq!((c.vertices, c.edges, c.faces, c.cells), formula([nx, ny, nz]));
            prop_assert_eq!(c.euler(), 1);
        }

        #[test]
        fn entity_ids_round_trip(nx in 1usize..4, ny in 1usize..4, nz in 1usize..4, dim in 0usize..4) {
            let m = CuboidMesh::unit_box([nx, ny, nz]).unwrap();
            for id in 0..m.num_entities(dim) {
                prop_assert_eq!(m.entity_by_id(dim, id).id, id);
            }
        }
    }
}
