//! Global spaces on a mesh: DOF identification by entity keys, operator
//! matrices assembled write-once, and face jump sampling.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::elements::catalog::{Component, FamilyId, FamilyKind};
use crate::elements::dofs::{select_component, DofKey};
use crate::elements::local::{coords_of, field_from_coords, LocalElement};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::mesh::CuboidMesh;
use crate::operators::{curl_curl_t, curl_rows, div_rows, gradgrad, sym_grad, PolyField};
use crate::polytensor::{int, rat, Axis, EntityRef, Frame, Rational};
use crate::random::small_ints;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    GradGrad,
    Curl,
    Div,
    SymGrad,
    CurlCurlT,
}

impl Operator {
    pub const ALL: [Operator; 5] = [Operator::GradGrad, Operator::Curl, Operator::Div, Operator::SymGrad, Operator::CurlCurlT];

    pub fn name(self) -> &'static str {
        match self {
            Operator::GradGrad => "gradgrad",
            Operator::Curl => "curl",
            Operator::Div => "div",
            Operator::SymGrad => "symgrad",
            Operator::CurlCurlT => "curlcurlt",
        }
    }

    /// Row-wise curl and div on matrix fields.
    pub fn apply(self, field: &PolyField) -> Result<PolyField> {
        match self {
            Operator::GradGrad => gradgrad(field),
            Operator::Curl => curl_rows(field),
            Operator::Div => div_rows(field),
            Operator::SymGrad => sym_grad(field),
            Operator::CurlCurlT => curl_curl_t(field),
        }
    }

    /// Whether `src --op--> dst` is an edge of one of the four complexes.
    pub fn connects(self, src: FamilyKind, dst: FamilyKind) -> bool {
        use FamilyKind::*;
        matches!(
            (src, self, dst),
            (U, Operator::GradGrad, Sigma | SigmaRed)
                | (Sigma, Operator::Curl, Xi)
                | (SigmaRed, Operator::Curl, XiRed)
                | (Xi, Operator::Div, Q)
                | (XiRed, Operator::Div, QRed)
                | (X, Operator::SymGrad, Phi)
                | (Phi, Operator::CurlCurlT, Gamma | GammaRed)
                | (Gamma, Operator::Div, Z)
                | (GammaRed, Operator::Div, ZRed)
        )
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Operator::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown operator '{s}' (expected gradgrad, curl, div, symgrad or curlcurlt)")))
    }
}

/// A family assembled on a mesh.
#[derive(Debug, Clone)]
pub struct GlobalSpace {
    pub family: FamilyId,
    pub mesh: Arc<CuboidMesh>,
    pub keys: Vec<DofKey>,
    index: HashMap<DofKey, usize>,
    /// Local-to-global map of every cell.
    pub cell_dofs: Vec<Vec<usize>>,
    pub elements: Vec<Arc<LocalElement>>,
    cells_per_dof: Vec<usize>,
}

impl GlobalSpace {
    pub fn ndofs(&self) -> usize {
        self.keys.len()
    }

    pub fn index_of(&self, key: &DofKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Number of cells that carry global DOF `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.cells_per_dof[i]
    }

    pub fn local_values(&self, values: &[Rational], cell: usize) -> Vec<Rational> {
        self.cell_dofs[cell].iter().map(|&g| values[g].clone()).collect()
    }
}

/// Numbers the DOFs of all cells; equal keys share one index.
pub fn assemble_space(family: FamilyId, mesh: &CuboidMesh) -> Result<GlobalSpace> {
    let family = FamilyId::new(family.kind, family.k)?;
    let mesh = Arc::new(mesh.clone());
    let mut elements = Vec::with_capacity(mesh.num_cells());
    let mut cell_keys = Vec::with_capacity(mesh.num_cells());
    for c in 0..mesh.num_cells() {
        let el = LocalElement::cached(family, &mesh.cell_extent(c))?;
        let ents = mesh.cell_entities(c);
        cell_keys.push(el.dofs.iter().map(|d| d.on(ents[d.entity.position()].clone()).key()).collect::<Vec<_>>());
        elements.push(el);
    }
    let mut sorted: Vec<DofKey> = cell_keys.iter().flatten().cloned().collect();
    sorted.sort();
    sorted.dedup();
    let index: HashMap<DofKey, usize> = sorted.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let cell_dofs: Vec<Vec<usize>> = cell_keys.iter().map(|ks| ks.iter().map(|k| index[k]).collect()).collect();
    let mut cells_per_dof = vec![0; sorted.len()];
    for map in &cell_dofs {
        for &g in map {
            cells_per_dof[g] += 1;
        }
    }
    Ok(GlobalSpace { family, mesh, keys: sorted, index, cell_dofs, elements, cells_per_dof })
}

/// The shape-space field of one cell for a global coefficient vector.
pub fn reconstruct_local(space: &GlobalSpace, values: &[Rational], cell: usize) -> PolyField {
    space.elements[cell].reconstruct(&space.local_values(values, cell), space.mesh.cell_frame(cell))
}

type LocalOpKey = (FamilyId, Operator, FamilyId, [Rational; 3]);

/// Coordinates of `op` applied to each independent basis field of `src`,
/// expressed in the independent basis of `dst` on a cell of the given extents.
pub fn coordinate_operator(src: FamilyId, op: Operator, dst: FamilyId, extent: &[Rational; 3]) -> Result<SparseMatrix> {
    let es = LocalElement::cached(src, extent)?;
    let ed = LocalElement::cached(dst, extent)?;
    let frame = Arc::new(Frame::new([int(0), int(0), int(0)], extent.clone()));
    let mut triplets = Vec::new();
    for j in 0..es.dim() {
        let mut e = vec![Rational::zero(); es.dim()];
        e[j] = int(1);
        let image = op.apply(&field_from_coords(&es.space, &e, frame.clone()))?;
        let coords = coords_of(&ed.space, &image).map_err(|err| Error::OperatorImageNotContained {
            op: op.name().into(),
            src: src.to_string(),
            dst: dst.to_string(),
            detail: err.to_string(),
        })?;
        triplets.extend(coords.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, j, v)));
    }
    Ok(SparseMatrix::from_triplets(ed.dim(), es.dim(), triplets))
}

/// Local operator in DOF coordinates: rows are dst DOFs, columns src DOFs.
pub fn local_operator(src: FamilyId, op: Operator, dst: FamilyId, extent: &[Rational; 3]) -> Result<Arc<SparseMatrix>> {
    static CACHE: OnceLock<Mutex<HashMap<LocalOpKey, Arc<SparseMatrix>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (src, op, dst, extent.clone());
    if let Some(m) = cache.lock().expect("operator cache").get(&key) {
        return Ok(m.clone());
    }
    let c = coordinate_operator(src, op, dst, extent)?;
    let es = LocalElement::cached(src, extent)?;
    let ed = LocalElement::cached(dst, extent)?;
    let m = Arc::new(ed.matrix.mul(&c).mul(&es.inverse));
    cache.lock().expect("operator cache").insert(key, m.clone());
    Ok(m)
}

/// Global operator matrix. Every cell carrying a dst DOF must report the same
/// value for each src column, with cells outside the column's support counting
/// as zero; any disagreement is reported as a non-conforming image.
pub fn operator_matrix(src: &GlobalSpace, op: Operator, dst: &GlobalSpace) -> Result<SparseMatrix> {
    if !op.connects(src.family.kind, dst.family.kind) || src.family.k != dst.family.k {
        return Err(Error::KindMismatch(format!("{} is not an edge from {} to {}", op, src.family, dst.family)));
    }
    if src.mesh != dst.mesh {
        return Err(Error::KindMismatch("spaces live on different meshes".into()));
    }
    let mut entries: BTreeMap<(usize, usize), (Rational, usize)> = BTreeMap::new();
    for c in 0..src.mesh.num_cells() {
        let local = local_operator(src.family, op, dst.family, &src.mesh.cell_extent(c))?;
        for (r, j, v) in local.triplets() {
            let (row, col) = (dst.cell_dofs[c][r], src.cell_dofs[c][j]);
            let entry = entries.entry((row, col)).or_insert_with(|| (v.clone(), 0));
            if entry.0 != *v {
                return Err(Error::InconsistentSharedDof { key: format!("{} (column {col})", dst.keys[row]) });
            }
            entry.1 += 1;
        }
    }
    for (&(row, col), (_, seen)) in &entries {
        if *seen != dst.cells_per_dof[row] {
            return Err(Error::InconsistentSharedDof { key: format!("{} (column {col})", dst.keys[row]) });
        }
    }
    Ok(SparseMatrix::from_triplets(
        dst.ndofs(),
        src.ndofs(),
        entries.into_iter().map(|((r, c), (v, _))| (r, c, v)),
    ))
}

/// DOF values of a field given cellwise, written once per global DOF.
pub fn interpolate<F>(space: &GlobalSpace, field_on: F) -> Result<Vec<Rational>>
where
    F: Fn(usize, Arc<Frame>) -> Result<PolyField>,
{
    let mut out: Vec<Option<Rational>> = vec![None; space.ndofs()];
    for c in 0..space.mesh.num_cells() {
        let field = field_on(c, space.mesh.cell_frame(c))?;
        let local = space.elements[c].dof_values(&field)?;
        for (g, v) in space.cell_dofs[c].iter().zip(local) {
            match &out[*g] {
                Some(prev) if *prev != v => {
                    return Err(Error::InconsistentSharedDof { key: space.keys[*g].to_string() });
                }
                _ => out[*g] = Some(v),
            }
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every DOF belongs to a cell")).collect())
}

pub fn random_vector(space: &GlobalSpace, rng: &mut impl Rng) -> Vec<Rational> {
    small_ints(rng, space.ndofs())
}

/// A traced quantity: a component after a physical derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceSpec {
    pub component: Component,
    pub deriv: [u8; 3],
}

impl TraceSpec {
    pub fn value(component: Component) -> Self {
        TraceSpec { component, deriv: [0; 3] }
    }

    pub fn derivative(component: Component, axis: Axis) -> Self {
        let mut deriv = [0; 3];
        deriv[axis.index()] = 1;
        TraceSpec { component, deriv }
    }
}

/// Differences (upper cell minus lower cell) of a traced quantity at the
/// 4x4 interior grid `i/5` of an interior face.
pub fn face_jump(space: &GlobalSpace, values: &[Rational], face: usize, spec: TraceSpec) -> Result<Vec<Rational>> {
    let (Some(below), Some(above)) = space.mesh.face_cells(face) else {
        return Err(Error::BoundaryFace(face));
    };
    let lo = reconstruct_local(space, values, below);
    let hi = reconstruct_local(space, values, above);
    jump_between(&lo, &hi, &space.mesh.entity_by_id(2, face), spec)
}

/// Face jump between two already reconstructed neighbours.
pub fn jump_between(lo: &PolyField, hi: &PolyField, face: &EntityRef, spec: TraceSpec) -> Result<Vec<Rational>> {
    let p_lo = select_component(lo, spec.component)?.derivative(spec.deriv);
    let p_hi = select_component(hi, spec.component)?.derivative(spec.deriv);
    let mut out = Vec::with_capacity(16);
    for i in 1..=4 {
        for j in 1..=4 {
            let point = face.point(&[rat(i, 5), rat(j, 5)]);
            out.push(p_hi.evaluate(&point) - p_lo.evaluate(&point));
        }
    }
    Ok(out)
}
