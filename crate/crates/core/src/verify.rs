//! Verification engine: exactness ladders from exact ranks, dimension
//! audits, constructive div preimages, kernel identification and the
//! curl/sym-grad identity suite.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_space, coordinate_operator, interpolate, jump_between, operator_matrix, random_vector, reconstruct_local, GlobalSpace, Operator,
    TraceSpec,
};
use crate::elements::catalog::{catalog, Component, FamilyId, FamilyKind};
use crate::elements::local::{check_unisolvence, UnisolvenceReport};
use crate::error::{Error, Result};
use crate::linalg::{exact_rank, in_span, nullspace, Arithmetic, SparseMatrix};
use crate::mesh::{CuboidMesh, EntityCounts};
use crate::operators::{check_identity_curl_symgrad, div_rows, FieldShape, PolyField};
use crate::polytensor::{int, rat, Axis, EntityKind, Frame, Rational, TensorPoly};
use crate::random::{random_field, rng};

pub const THREADS_ENV: &str = "CUBOID_COMPLEX_THREADS";

/// Worker pool sized by `CUBOID_COMPLEX_THREADS` (default: all cores).
pub fn worker_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexKind {
    #[serde(rename = "gradgrad")]
    GradGrad,
    #[serde(rename = "gradgrad-reduced")]
    GradGradReduced,
    #[serde(rename = "elasticity")]
    Elasticity,
    #[serde(rename = "elasticity-reduced")]
    ElasticityReduced,
}

impl ComplexKind {
    pub const ALL: [ComplexKind; 4] =
        [ComplexKind::GradGrad, ComplexKind::GradGradReduced, ComplexKind::Elasticity, ComplexKind::ElasticityReduced];

    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::GradGrad => "gradgrad",
            ComplexKind::GradGradReduced => "gradgrad-reduced",
            ComplexKind::Elasticity => "elasticity",
            ComplexKind::ElasticityReduced => "elasticity-reduced",
        }
    }

    pub fn is_elasticity(self) -> bool {
        matches!(self, ComplexKind::Elasticity | ComplexKind::ElasticityReduced)
    }

    /// Dimension of the kernel of the first operator: linear functions or rigid motions.
    pub fn kappa(self) -> usize {
        if self.is_elasticity() {
            6
        } else {
            4
        }
    }

    pub fn min_order(self) -> i64 {
        if self.is_elasticity() {
            2
        } else {
            3
        }
    }

    pub fn family_kinds(self) -> [FamilyKind; 4] {
        use FamilyKind::*;
        match self {
            ComplexKind::GradGrad => [U, Sigma, Xi, Q],
            ComplexKind::GradGradReduced => [U, SigmaRed, XiRed, QRed],
            ComplexKind::Elasticity => [X, Phi, Gamma, Z],
            ComplexKind::ElasticityReduced => [X, Phi, GammaRed, ZRed],
        }
    }

    pub fn operators(self) -> [Operator; 3] {
        if self.is_elasticity() {
            [Operator::SymGrad, Operator::CurlCurlT, Operator::Div]
        } else {
            [Operator::GradGrad, Operator::Curl, Operator::Div]
        }
    }

    pub fn families(self, k: i64) -> Result<[FamilyId; 4]> {
        if k < self.min_order() {
            return Err(Error::InadmissibleOrder { family: self.name().into(), min: self.min_order(), k });
        }
        let kinds = self.family_kinds();
        Ok([
            FamilyId::new(kinds[0], k)?,
            FamilyId::new(kinds[1], k)?,
            FamilyId::new(kinds[2], k)?,
            FamilyId::new(kinds[3], k)?,
        ])
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ComplexKind::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            Error::Parse(format!("unknown complex '{s}' (expected gradgrad, gradgrad-reduced, elasticity or elasticity-reduced)"))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub complex: String,
    pub k: i64,
    pub mesh: String,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub nullities: Vec<usize>,
    pub composition_zero: Vec<bool>,
    /// `[nullity(D0) = kappa, nullity(D1) = rank(D0), nullity(D2) = rank(D1), rank(D2) = dim]`.
    pub exact: Vec<bool>,
    pub cohomology_dim: usize,
    pub surjective: bool,
    pub elapsed_ms: u128,
    pub arithmetic_mode: Arithmetic,
    pub seed: u64,
}

impl ExactnessReport {
    pub fn fully_exact(&self) -> bool {
        self.composition_zero.iter().all(|&b| b) && self.exact.iter().all(|&b| b)
    }
}

fn ladder(
    kind: ComplexKind,
    k: i64,
    mesh: String,
    dims: Vec<usize>,
    ops: &[SparseMatrix],
    mode: Arithmetic,
    seed: u64,
) -> ExactnessReport {
    let pool = worker_pool();
    let (ranks, composition_zero): (Vec<usize>, Vec<bool>) = pool.install(|| {
        rayon::join(
            || ops.par_iter().map(|m| exact_rank(m, mode)).collect(),
            || ops.par_windows(2).map(|w| w[1].mul(&w[0]).is_zero()).collect(),
        )
    });
    let nullities: Vec<usize> = ranks.iter().zip(&dims).map(|(r, d)| d - r).collect();
    let exact = vec![
        nullities[0] == kind.kappa(),
        nullities[1] == ranks[0],
        nullities[2] == ranks[1],
        ranks[2] == dims[3],
    ];
    ExactnessReport {
        complex: kind.name().into(),
        k,
        mesh,
        cohomology_dim: nullities[0],
        surjective: ranks[2] == dims[3],
        dims,
        ranks,
        nullities,
        composition_zero,
        exact,
        elapsed_ms: 0,
        arithmetic_mode: mode,
        seed,
    }
}

/// The four spaces and three operator matrices of a complex on a mesh.
pub struct AssembledComplex {
    pub kind: ComplexKind,
    pub k: i64,
    pub spaces: Vec<GlobalSpace>,
    pub ops: Vec<SparseMatrix>,
}

pub fn assemble_complex(kind: ComplexKind, k: i64, mesh: &CuboidMesh) -> Result<AssembledComplex> {
    let families = kind.families(k)?;
    let pool = worker_pool();
    pool.install(|| {
        let spaces = families.par_iter().map(|f| assemble_space(*f, mesh)).collect::<Result<Vec<_>>>()?;
        let ops = kind
            .operators()
            .par_iter()
            .enumerate()
            .map(|(i, op)| operator_matrix(&spaces[i], *op, &spaces[i + 1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(AssembledComplex { kind, k, spaces, ops })
    })
}

pub fn verify_complex(kind: ComplexKind, k: i64, mesh: &CuboidMesh, mode: Arithmetic, seed: u64) -> Result<ExactnessReport> {
    let started = Instant::now();
    let complex = assemble_complex(kind, k, mesh)?;
    let dims = complex.spaces.iter().map(GlobalSpace::ndofs).collect();
    let mut report = ladder(kind, k, mesh.describe(), dims, &complex.ops, mode, seed);
    report.elapsed_ms = started.elapsed().as_millis();
    Ok(report)
}

/// The polynomial complex on the reference cell, in monomial coordinates.
pub fn verify_local_complex(kind: ComplexKind, k: i64) -> Result<ExactnessReport> {
    if !matches!(kind, ComplexKind::GradGrad | ComplexKind::Elasticity) {
        return Err(Error::KindMismatch(format!("no local polynomial complex named {kind}")));
    }
    let started = Instant::now();
    let families = kind.families(k)?;
    let unit = [int(1), int(1), int(1)];
    let ops = kind
        .operators()
        .iter()
        .enumerate()
        .map(|(i, op)| coordinate_operator(families[i], *op, families[i + 1], &unit))
        .collect::<Result<Vec<_>>>()?;
    let dims = families.iter().map(|f| catalog(*f).space.dim()).collect();
    let mut report = ladder(kind, k, "reference".into(), dims, &ops, Arithmetic::Rational, 0);
    report.elapsed_ms = started.elapsed().as_millis();
    Ok(report)
}

/// Closed-form global dimension of a family on a mesh with the given counts.
pub fn dimension_formula(family: FamilyId, n: EntityCounts) -> i64 {
    let k = family.k;
    let (v, e, f, t) = (n.vertices as i64, n.edges as i64, n.faces as i64, n.cells as i64);
    let sigma = |k: i64| {
        4 * (k - 1) * e + 4 * (k - 1) * (k - 3) * f + 3 * (k - 1) * (k - 3).pow(2) * t
            + 6 * v
            + 4 * (k - 2) * e
            + (k - 3) * e
            + 2 * (k - 2) * (2 * k - 5) * f
            + 3 * (k - 2).pow(2) * (k - 3) * t
    };
    match family.kind {
        FamilyKind::U => 8 * v + 4 * (k - 3) * e + 2 * (k - 3).pow(2) * f + (k - 3).pow(3) * t,
        FamilyKind::Sigma => sigma(k),
        FamilyKind::Phi => sigma(k + 1),
        FamilyKind::Xi => {
            2 * v + 2 * (k - 2) * e + 2 * (k - 2).pow(2) * f + 2 * (k - 2).pow(3) * t
                + 4 * (k - 1) * e
                + 2 * (k - 1) * (k - 3) * f
                + 4 * (k - 1) * (k - 2) * f
                + 6 * (k - 1) * (k - 2) * (k - 3) * t
        }
        FamilyKind::Q => (k - 1) * e + 2 * (k - 1) * (k - 2) * f + 3 * (k - 1) * (k - 2).pow(2) * t,
        FamilyKind::SigmaRed => {
            (k - 1) * e + 2 * (k - 1).pow(2) * f + 3 * (k - 1).pow(3) * t
                + 6 * v
                + 4 * (k - 2) * e
                + (k - 3) * e
                + (k - 2).pow(2) * f
                + 2 * (k - 2) * (k - 3) * f
                + 3 * (k - 2).pow(2) * (k - 1) * t
        }
        FamilyKind::XiRed => {
            2 * v + 2 * (k - 2) * e + (k - 2).pow(2) * f + 2 * (k - 2).pow(2) * (k + 1) * t
                + 2 * (k - 1) * k * f
                + 6 * (k - 1).pow(2) * k * t
        }
        FamilyKind::QRed => 3 * (k - 1) * k * k * t,
        FamilyKind::X => {
            12 * v + (4 * (k - 1) + 4 * (k - 2)) * e + ((k - 2).pow(2) + 4 * (k - 1) * (k - 2)) * f
                + 3 * (k - 1) * (k - 2).pow(2) * t
        }
        FamilyKind::Gamma => {
            k * e + (2 * k * k + 2 * k * (k - 1)) * f + (3 * k * k * (k - 2) + 3 * k * (k - 1).pow(2)) * t
        }
        FamilyKind::GammaRed => k * e + (k * k + 2 * k * (k - 1)) * f + (3 * k.pow(3) + 3 * k * (k - 1).pow(2)) * t,
        FamilyKind::Z => k * k * f + 3 * (k - 1) * k * k * t,
        FamilyKind::ZRed => 3 * (k + 1) * k * k * t,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub family: String,
    pub k: i64,
    pub mesh: String,
    pub formula: i64,
    pub assembled: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

pub fn verify_dimensions(family: FamilyId, mesh: &CuboidMesh) -> Result<DimensionReport> {
    let space = assemble_space(family, mesh)?;
    let formula = dimension_formula(family, mesh.counts());
    Ok(DimensionReport {
        family: family.kind.name().into(),
        k: family.k,
        mesh: mesh.describe(),
        formula,
        assembled: space.ndofs(),
        matches: formula == space.ndofs() as i64,
    })
}

/// Every family at its two lowest orders.
pub fn unisolvence_sweep() -> Result<Vec<UnisolvenceReport>> {
    let pairs: Vec<FamilyId> = FamilyKind::ALL
        .iter()
        .flat_map(|&kind| [0, 1].map(|d| FamilyId { kind, k: kind.min_order() + d }))
        .collect();
    worker_pool().install(|| pairs.par_iter().map(|&f| check_unisolvence(f)).collect())
}

/// One row of the div preimage: entry `(row, col)` is the antiderivative of
/// `q_row` along `along`, continued across cells from the box minimum.
struct Antiderivative {
    row: Axis,
    col: Axis,
    along: Axis,
}

fn preimage_plan(elasticity: bool) -> [Antiderivative; 3] {
    if elasticity {
        Axis::ALL.map(|a| Antiderivative { row: a, col: a, along: a })
    } else {
        // tau_xy = int q_x dy, tau_yz = int q_y dz, tau_zx = int q_z dx
        Axis::ALL.map(|a| Antiderivative { row: a, col: a.next(), along: a.next() })
    }
}

fn div_preimage(target: &GlobalSpace, q_space: &GlobalSpace, q: &[Rational], elasticity: bool) -> Result<Vec<Rational>> {
    let mesh = &q_space.mesh;
    let plan = preimage_plan(elasticity);
    // cells in lexicographic order, so lower neighbours come first
    let mut built: Vec<PolyField> = Vec::with_capacity(mesh.num_cells());
    for c in 0..mesh.num_cells() {
        let frame = mesh.cell_frame(c);
        let qc = reconstruct_local(q_space, q, c);
        let mut tau = PolyField::zero(FieldShape::Matrix, frame.clone());
        let g = mesh.cell_index(c);
        for step in &plan {
            let mut entry = qc.v(step.row).antiderivative(step.along);
            let a = step.along.index();
            if g[a] > 0 {
                let mut below = g;
                below[a] -= 1;
                let carried = built[mesh.cell_id(below)].m(step.row, step.col).substitute(step.along, &int(1));
                entry = entry.add(&carried.with_frame(frame.clone()));
            }
            tau.set_m(step.row, step.col, entry);
        }
        built.push(tau);
    }
    interpolate(target, |c, _| Ok(built[c].clone()))
}

/// Preimage in Xi or XiRed under the row-wise div.
pub fn div_preimage_gradgrad(target: &GlobalSpace, q_space: &GlobalSpace, q: &[Rational]) -> Result<Vec<Rational>> {
    div_preimage(target, q_space, q, false)
}

/// Preimage in Gamma or GammaRed under the row-wise div.
pub fn div_preimage_elasticity(target: &GlobalSpace, q_space: &GlobalSpace, q: &[Rational]) -> Result<Vec<Rational>> {
    div_preimage(target, q_space, q, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreimageReport {
    pub complex: String,
    pub k: i64,
    pub mesh: String,
    pub trials: usize,
    /// Preimages that interpolated without a shared-DOF conflict.
    pub consistent: usize,
    /// Preimages whose cellwise divergence and matrix image both equal `q`.
    pub exact: usize,
    pub seed: u64,
}

impl PreimageReport {
    pub fn passed(&self) -> bool {
        self.consistent == self.trials && self.exact == self.trials
    }
}

/// Checks a preimage both cellwise and through the assembled div matrix.
pub fn preimage_is_exact(
    target: &GlobalSpace,
    q_space: &GlobalSpace,
    div: &SparseMatrix,
    tau: &[Rational],
    q: &[Rational],
) -> Result<bool> {
    for c in 0..q_space.mesh.num_cells() {
        let lhs = div_rows(&reconstruct_local(target, tau, c))?;
        if !lhs.sub(&reconstruct_local(q_space, q, c)).is_zero() {
            return Ok(false);
        }
    }
    Ok(div.matvec(tau) == q)
}

/// Round trips `trials` random right-hand sides through the div preimage.
pub fn preimage_trials(kind: ComplexKind, k: i64, mesh: &CuboidMesh, trials: usize, seed: u64) -> Result<PreimageReport> {
    let families = kind.families(k)?;
    let target = assemble_space(families[2], mesh)?;
    let q_space = assemble_space(families[3], mesh)?;
    let div = operator_matrix(&target, Operator::Div, &q_space)?;
    let mut rng = rng(seed);
    let mut report = PreimageReport {
        complex: kind.name().into(),
        k,
        mesh: mesh.describe(),
        trials,
        consistent: 0,
        exact: 0,
        seed,
    };
    for _ in 0..trials {
        let q = random_vector(&q_space, &mut rng);
        let tau = match div_preimage(&target, &q_space, &q, kind.is_elasticity()) {
            Ok(tau) => tau,
            Err(Error::InconsistentSharedDof { .. }) => continue,
            Err(e) => return Err(e),
        };
        report.consistent += 1;
        if preimage_is_exact(&target, &q_space, &div, &tau, &q)? {
            report.exact += 1;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub complex: String,
    pub k: i64,
    pub mesh: String,
    pub kappa: usize,
    pub nullity: usize,
    pub interpolant_rank: usize,
    /// Every interpolant is annihilated by the first operator.
    pub interpolants_in_kernel: bool,
    /// Every computed kernel vector lies in the span of the interpolants.
    pub kernel_in_span: bool,
}

impl KernelReport {
    pub fn matches(&self) -> bool {
        self.interpolants_in_kernel && self.kernel_in_span && self.nullity == self.kappa && self.interpolant_rank == self.kappa
    }
}

/// `1, x, y, z` as scalar fields, or the six rigid motions as vector fields.
pub fn kernel_fields(elasticity: bool, frame: Arc<Frame>) -> Vec<PolyField> {
    let mono = |e: [usize; 3]| TensorPoly::physical_monomial(e, frame.clone());
    let zero = || TensorPoly::zero(crate::polytensor::Degree3::EMPTY, frame.clone());
    if !elasticity {
        return [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|e| PolyField::scalar(mono(e))).into();
    }
    let (x, y, z) = (mono([1, 0, 0]), mono([0, 1, 0]), mono([0, 0, 1]));
    let one = mono([0, 0, 0]);
    vec![
        PolyField::vector([one.clone(), zero(), zero()]),
        PolyField::vector([zero(), one.clone(), zero()]),
        PolyField::vector([zero(), zero(), one]),
        // e_i cross x
        PolyField::vector([zero(), z.neg(), y.clone()]),
        PolyField::vector([z, zero(), x.neg()]),
        PolyField::vector([y.neg(), x, zero()]),
    ]
}

pub fn identify_kernel(kind: ComplexKind, k: i64, mesh: &CuboidMesh) -> Result<KernelReport> {
    let families = kind.families(k)?;
    let src = assemble_space(families[0], mesh)?;
    let dst = assemble_space(families[1], mesh)?;
    let d0 = operator_matrix(&src, kind.operators()[0], &dst)?;
    let count = kernel_fields(kind.is_elasticity(), Arc::new(Frame::reference())).len();
    let interpolants = (0..count)
        .map(|i| interpolate(&src, |_, frame| Ok(kernel_fields(kind.is_elasticity(), frame).swap_remove(i))))
        .collect::<Result<Vec<_>>>()?;
    let interpolants_in_kernel = interpolants.iter().all(|v| d0.matvec(v).iter().all(Zero::is_zero));
    let interpolant_rank = exact_rank(&SparseMatrix::from_dense(&interpolants, src.ndofs()), Arithmetic::Rational);
    let kernel = nullspace(d0.to_dense(), src.ndofs());
    let kernel_in_span = kernel.iter().all(|v| in_span(&interpolants, v));
    Ok(KernelReport {
        complex: kind.name().into(),
        k,
        mesh: mesh.describe(),
        kappa: kind.kappa(),
        nullity: kernel.len(),
        interpolant_rank,
        interpolants_in_kernel,
        kernel_in_span,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub k: i64,
    pub fields: usize,
    pub seed: u64,
    /// Fields with a nonzero residual in either identity.
    pub failures: usize,
}

/// Checks both curl/sym-grad identities on random members of the H1 vector
/// shape space, placed on a stretched and shifted cell.
pub fn identity_suite(k: i64, fields: usize, seed: u64) -> Result<IdentityReport> {
    let space = catalog(FamilyId::new(FamilyKind::X, k)?).space;
    let frame = Arc::new(Frame::new([rat(1, 2), int(-1), int(2)], [rat(1, 3), int(2), rat(3, 4)]));
    let mut rng = rng(seed);
    let mut failures = 0;
    for _ in 0..fields {
        let v = random_field(&mut rng, &space, frame.clone());
        let (a, b) = check_identity_curl_symgrad(&v)?;
        if !(a.is_zero() && b.is_zero()) {
            failures += 1;
        }
    }
    Ok(IdentityReport { k, fields, seed, failures })
}

/// A traced quantity required to be single-valued across faces with this normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JumpCheck {
    pub normal: Axis,
    pub trace: TraceSpec,
}

fn permutations() -> [[Axis; 3]; 6] {
    use Axis::*;
    [[X, Y, Z], [Y, Z, X], [Z, X, Y], [X, Z, Y], [Y, X, Z], [Z, Y, X]]
}

/// The continuity statements of a family; empty for the discontinuous ones.
pub fn conformity_checks(kind: FamilyKind) -> Vec<JumpCheck> {
    use Component::{Matrix, Scalar, Vector};
    use FamilyKind::*;
    let val = |normal, c| JumpCheck { normal, trace: TraceSpec::value(c) };
    let der = |normal, c, axis| JumpCheck { normal, trace: TraceSpec::derivative(c, axis) };
    let mut out = Vec::new();
    for [a, b, c] in permutations() {
        let (aa, ab) = (Matrix(a, a), Matrix(a, b));
        match kind {
            U => {
                for n in Axis::ALL {
                    out.push(val(n, Scalar));
                    out.extend(Axis::ALL.map(|d| der(n, Scalar, d)));
                }
            }
            Sigma | Phi => {
                for n in [b, c] {
                    out.extend([val(n, aa), der(n, aa, n)]);
                }
                out.extend(Axis::ALL.map(|n| val(n, ab)));
                out.push(der(c, ab, c));
            }
            Xi => {
                out.extend(Axis::ALL.map(|n| val(n, aa)));
                out.extend([val(b, ab), val(c, ab), der(b, ab, b)]);
            }
            Q => out.extend([val(b, Vector(a)), val(c, Vector(a))]),
            SigmaRed => {
                out.extend([val(b, aa), val(c, aa)]);
                out.extend(Axis::ALL.map(|n| val(n, ab)));
            }
            XiRed => out.extend([val(a, aa), val(b, ab)]),
            X => {
                for n in Axis::ALL {
                    out.extend([val(n, Vector(a)), der(n, Vector(a), b), der(n, Vector(a), c)]);
                }
            }
            Gamma => out.extend([val(a, aa), der(a, aa, a), val(b, ab), val(a, ab)]),
            GammaRed => out.extend([val(a, aa), val(b, ab), val(a, ab)]),
            Z => out.push(val(a, Vector(a))),
            QRed | ZRed => {}
        }
    }
    let mut unique = Vec::new();
    for check in out {
        if !unique.contains(&check) {
            unique.push(check);
        }
    }
    unique
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConformityReport {
    pub family: String,
    pub k: i64,
    pub mesh: String,
    pub fields: usize,
    pub checks: usize,
    pub faces_sampled: usize,
    /// `(field, face, check)` triples with a nonzero sampled jump.
    pub failures: usize,
    pub seed: u64,
}

/// Number of random fields for which `check` jumps somewhere on an interior face.
fn count_jumping_fields(space: &GlobalSpace, checks: &[JumpCheck], fields: usize, seed: u64) -> Result<(usize, usize, usize)> {
    let mut rng = rng(seed);
    let (mut failures, mut faces_sampled, mut jumping) = (0, 0, 0);
    for _ in 0..fields {
        let values = random_vector(space, &mut rng);
        let cells: Vec<PolyField> = (0..space.mesh.num_cells()).map(|c| reconstruct_local(space, &values, c)).collect();
        let mut any = false;
        for face in space.mesh.interior_faces() {
            let entity = space.mesh.entity_by_id(2, face);
            let EntityKind::Face(normal) = entity.kind else { unreachable!() };
            let (Some(lo), Some(hi)) = space.mesh.face_cells(face) else { unreachable!() };
            for check in checks.iter().filter(|c| c.normal == normal) {
                faces_sampled += 1;
                if jump_between(&cells[lo], &cells[hi], &entity, check.trace)?.iter().any(|v| !v.is_zero()) {
                    failures += 1;
                    any = true;
                }
            }
        }
        jumping += usize::from(any);
    }
    Ok((failures, faces_sampled, jumping))
}

/// Samples every continuity statement of a family on random global fields.
pub fn check_conformity(family: FamilyId, mesh: &CuboidMesh, fields: usize, seed: u64) -> Result<ConformityReport> {
    let space = assemble_space(family, mesh)?;
    let checks = conformity_checks(family.kind);
    let (failures, faces_sampled, _) = count_jumping_fields(&space, &checks, fields, seed)?;
    Ok(ConformityReport {
        family: family.kind.name().into(),
        k: family.k,
        mesh: mesh.describe(),
        fields,
        checks: checks.len(),
        faces_sampled,
        failures,
        seed,
    })
}

/// How many random fields jump in one quantity that the family does not keep continuous.
pub fn count_unconstrained_jumps(family: FamilyId, mesh: &CuboidMesh, check: JumpCheck, fields: usize, seed: u64) -> Result<usize> {
    let space = assemble_space(family, mesh)?;
    Ok(count_jumping_fields(&space, &[check], fields, seed)?.2)
}
