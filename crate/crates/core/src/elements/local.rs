//! Local elements: the DOF matrix over the independent monomial basis, its
//! inverse, and conversion between fields and coordinates.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::Serialize;

use crate::elements::bubble::{bubble_basis_div_t, BubbleBasis};
use crate::elements::catalog::{catalog, Component, FamilyId, FieldKind, ShapeSpaceSpec, Structure};
use crate::elements::dofs::{dof_row, local_dofs, LocalDof};
use crate::error::{Error, Result};
use crate::linalg::{exact_rank, invert_blockwise, Arithmetic, SparseMatrix};
use crate::operators::{FieldShape, PolyField};
use crate::polytensor::{int, Frame, Rational, TensorPoly};

fn field_shape(kind: FieldKind) -> FieldShape {
    match kind {
        FieldKind::Scalar => FieldShape::Scalar,
        FieldKind::Vector => FieldShape::Vector,
        FieldKind::Matrix(_) => FieldShape::Matrix,
    }
}

/// Stored entries an independent component writes to, with sign.
fn targets(space: &ShapeSpaceSpec, c: Component) -> Vec<(usize, i64)> {
    match c {
        Component::Scalar => vec![(0, 1)],
        Component::Vector(a) => vec![(a.index(), 1)],
        Component::Matrix(i, j) => {
            let mut t = vec![(3 * i.index() + j.index(), 1)];
            match space.kind {
                FieldKind::Matrix(Structure::Symmetric) if i != j => t.push((3 * j.index() + i.index(), 1)),
                FieldKind::Matrix(Structure::Traceless) if i == j => t.push((8, -1)),
                _ => {}
            }
            t
        }
        Component::Coupled(_) => Vec::new(),
    }
}

/// Field with the given independent coordinates.
pub fn field_from_coords(space: &ShapeSpaceSpec, coords: &[Rational], frame: Arc<Frame>) -> PolyField {
    let shape = field_shape(space.kind);
    let mut entries: Vec<Vec<Rational>> = space.grids.iter().map(|g| vec![Rational::zero(); g.dim()]).collect();
    for (ic, off) in space.independent.iter().zip(space.offsets()) {
        let dim = space.grid(*ic).dim();
        for (slot, sign) in targets(space, *ic) {
            for (i, v) in coords[off..off + dim].iter().enumerate() {
                if sign > 0 {
                    entries[slot][i] += v;
                } else {
                    entries[slot][i] -= v;
                }
            }
        }
    }
    let mut field = PolyField::zero(shape, frame.clone());
    for (slot, (grid, coeffs)) in space.grids.iter().zip(entries).enumerate() {
        field.comps_mut()[slot] = TensorPoly::from_coeffs(*grid, coeffs, frame.clone());
    }
    field
}

/// The independent basis fields, one per coordinate.
pub fn basis_fields(space: &ShapeSpaceSpec, frame: Arc<Frame>) -> Vec<PolyField> {
    let n = space.dim();
    (0..n)
        .map(|j| {
            let mut e = vec![Rational::zero(); n];
            e[j] = int(1);
            field_from_coords(space, &e, frame.clone())
        })
        .collect()
}

/// Independent coordinates of a field, or an error if it is not in the shape space.
pub fn coords_of(space: &ShapeSpaceSpec, field: &PolyField) -> Result<Vec<Rational>> {
    let name = space.family.to_string();
    if field.shape() != field_shape(space.kind) {
        return Err(Error::KindMismatch(format!("{name} expects a {:?} field", field_shape(space.kind))));
    }
    let fits = field.comps().iter().zip(&space.grids).all(|(p, g)| p.fits_within(*g));
    if !fits {
        return Err(Error::NotInShapeSpace(format!("{name}: degree grid exceeded")));
    }
    match space.kind {
        FieldKind::Matrix(Structure::Symmetric) if !field.is_symmetric() => {
            return Err(Error::NotInShapeSpace(format!("{name}: not symmetric")));
        }
        FieldKind::Matrix(Structure::Traceless) if !field.trace()?.is_zero() => {
            return Err(Error::NotInShapeSpace(format!("{name}: not traceless")));
        }
        _ => {}
    }
    let mut coords = Vec::with_capacity(space.dim());
    for ic in &space.independent {
        let (slot, _) = targets(space, *ic)[0];
        let grid = space.grid(*ic);
        let p = &field.comps()[slot];
        coords.extend(grid.exponents().map(|e| p.coeff(e)));
    }
    Ok(coords)
}

/// A family's element on a cell of given extents.
#[derive(Debug)]
pub struct LocalElement {
    pub family: FamilyId,
    pub space: ShapeSpaceSpec,
    pub extent: [Rational; 3],
    pub dofs: Vec<LocalDof>,
    pub bubbles: Option<Arc<BubbleBasis>>,
    /// Rows: DOFs; columns: independent coordinates.
    pub matrix: SparseMatrix,
    /// Maps DOF values to coordinates.
    pub inverse: SparseMatrix,
}

fn bubble_cache(k: i64) -> Result<Arc<BubbleBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Arc<BubbleBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().expect("bubble cache").get(&k) {
        return Ok(b.clone());
    }
    let b = Arc::new(bubble_basis_div_t(k)?);
    cache.lock().expect("bubble cache").insert(k, b.clone());
    Ok(b)
}

fn bubbles_for(family: FamilyId) -> Result<Option<Arc<BubbleBasis>>> {
    if catalog(family).coupled_bubbles {
        Ok(Some(bubble_cache(family.k)?))
    } else {
        Ok(None)
    }
}

/// DOFs of a family together with their matrix over the independent basis.
pub struct DofSystem {
    pub dofs: Vec<LocalDof>,
    pub space: ShapeSpaceSpec,
    pub bubbles: Option<Arc<BubbleBasis>>,
    pub matrix: SparseMatrix,
}

/// Square DOF matrix of a family on a cell of the given extents.
pub fn local_dof_matrix_on(family: FamilyId, extent: &[Rational; 3]) -> Result<DofSystem> {
    let family = FamilyId::new(family.kind, family.k)?;
    let space = catalog(family).space;
    let bubbles = bubbles_for(family)?;
    let dofs = local_dofs(family, bubbles.as_ref().map_or(0, |b| b.triples.len()));
    let rows = dofs.iter().map(|d| dof_row(d, &space, extent, bubbles.as_deref())).collect();
    Ok(DofSystem { matrix: SparseMatrix::from_rows(space.dim(), rows), dofs, space, bubbles })
}

/// DOF matrix on the reference cell.
pub fn local_dof_matrix(family: FamilyId) -> Result<SparseMatrix> {
    Ok(local_dof_matrix_on(family, &unit_extent())?.matrix)
}

fn unit_extent() -> [Rational; 3] {
    [int(1), int(1), int(1)]
}

impl LocalElement {
    pub fn build(family: FamilyId, extent: &[Rational; 3]) -> Result<Self> {
        let DofSystem { dofs, space, bubbles, matrix } = local_dof_matrix_on(family, extent)?;
        let inverse = invert_blockwise(&matrix).map_err(|rank| Error::SingularLocalMatrix {
            family: family.to_string(),
            rank,
            dim: space.dim(),
        })?;
        Ok(LocalElement { family, space, extent: extent.clone(), dofs, bubbles, matrix, inverse })
    }

    /// Cached element for the family on cells of these extents.
    pub fn cached(family: FamilyId, extent: &[Rational; 3]) -> Result<Arc<LocalElement>> {
        type Cache = Mutex<HashMap<(FamilyId, [Rational; 3]), Arc<LocalElement>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (family, extent.clone());
        if let Some(e) = cache.lock().expect("element cache").get(&key) {
            return Ok(e.clone());
        }
        let e = Arc::new(LocalElement::build(family, extent)?);
        cache.lock().expect("element cache").insert(key, e.clone());
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The unique shape-space field with the given local DOF values.
    pub fn reconstruct(&self, dof_values: &[Rational], frame: Arc<Frame>) -> PolyField {
        let coords = self.inverse.matvec(dof_values);
        field_from_coords(&self.space, &coords, frame)
    }

    /// Local DOF values of a shape-space field.
    pub fn dof_values(&self, field: &PolyField) -> Result<Vec<Rational>> {
        Ok(self.matrix.matvec(&coords_of(&self.space, field)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnisolvenceReport {
    pub family: String,
    pub k: i64,
    pub dofs: usize,
    pub dim: usize,
    pub square: bool,
    pub rank: usize,
    pub nonsingular: bool,
}

/// Exact rank test of the reference DOF matrix.
pub fn check_unisolvence(family: FamilyId) -> Result<UnisolvenceReport> {
    let m = local_dof_matrix(family)?;
    let rank = exact_rank(&m, Arithmetic::Rational);
    let square = m.nrows() == m.ncols();
    Ok(UnisolvenceReport {
        family: family.kind.name().into(),
        k: family.k,
        dofs: m.nrows(),
        dim: m.ncols(),
        square,
        rank,
        nonsingular: square && rank == m.ncols(),
    })
}

/// Local space dimension as the sum of independent component grids.
pub fn independent_dim(space: &ShapeSpaceSpec) -> usize {
    space.independent.iter().map(|c| space.grid(*c).dim()).sum()
}
