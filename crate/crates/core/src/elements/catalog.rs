//! Shape spaces and DOF patterns of every element family.
//!
//! Each family is described by representative DOF groups written in roles
//! `(a, b, c)`; the actual groups are obtained by mapping the roles onto the
//! axes through the identity, the three cyclic rotations, or all six
//! permutations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytensor::{Axis, Degree3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    U,
    Sigma,
    Xi,
    Q,
    SigmaRed,
    XiRed,
    QRed,
    X,
    Phi,
    Gamma,
    GammaRed,
    Z,
    ZRed,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 13] = [
        FamilyKind::U,
        FamilyKind::Sigma,
        FamilyKind::Xi,
        FamilyKind::Q,
        FamilyKind::SigmaRed,
        FamilyKind::XiRed,
        FamilyKind::QRed,
        FamilyKind::X,
        FamilyKind::Phi,
        FamilyKind::Gamma,
        FamilyKind::GammaRed,
        FamilyKind::Z,
        FamilyKind::ZRed,
    ];

    pub fn min_order(self) -> i64 {
        use FamilyKind::*;
        match self {
            U | Sigma | Xi | Q | SigmaRed | XiRed | QRed => 3,
            X | Phi | Gamma | GammaRed | Z | ZRed => 2,
        }
    }

    /// Command-line name.
    pub fn name(self) -> &'static str {
        use FamilyKind::*;
        match self {
            U => "u",
            Sigma => "sigma",
            Xi => "xi",
            Q => "q",
            SigmaRed => "sigma-red",
            XiRed => "xi-red",
            QRed => "q-red",
            X => "x",
            Phi => "phi",
            Gamma => "gamma",
            GammaRed => "gamma-red",
            Z => "z",
            ZRed => "z-red",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// An element family at a given order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyId {
    pub kind: FamilyKind,
    pub k: i64,
}

impl FamilyId {
    pub fn new(kind: FamilyKind, k: i64) -> Result<Self> {
        if k < kind.min_order() {
            return Err(Error::InadmissibleOrder { family: kind.name().into(), min: kind.min_order(), k });
        }
        Ok(FamilyId { kind, k })
    }

    /// The family whose catalog entry is actually used (`Phi(k)` is `Sigma(k+1)`).
    pub fn resolved(self) -> FamilyId {
        match self.kind {
            FamilyKind::Phi => FamilyId { kind: FamilyKind::Sigma, k: self.k + 1 },
            _ => self,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(k={})", self.kind, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Structure {
    None,
    Symmetric,
    /// `xx + yy + zz = 0`; `zz` is derived from `xx` and `yy`.
    Traceless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FieldKind {
    Scalar,
    Vector,
    Matrix(Structure),
}

/// Which entry of a field a DOF reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Component {
    Scalar,
    Vector(Axis),
    Matrix(Axis, Axis),
    /// Coupled diagonal moment against the given bubble basis element.
    Coupled(usize),
}

impl Component {
    /// Position in the canonical order `xx, yy, zz, xy, xz, yz, yx, zx, zy` (vectors `x, y, z`).
    pub fn order(self) -> usize {
        use Axis::*;
        match self {
            Component::Scalar => 0,
            Component::Vector(a) => a.index(),
            Component::Matrix(i, j) => match (i, j) {
                (X, X) => 0,
                (Y, Y) => 1,
                (Z, Z) => 2,
                (X, Y) => 3,
                (X, Z) => 4,
                (Y, Z) => 5,
                (Y, X) => 6,
                (Z, X) => 7,
                (Z, Y) => 8,
            },
            Component::Coupled(i) => 100 + i,
        }
    }

    pub fn name(self) -> String {
        match self {
            Component::Scalar => "u".into(),
            Component::Vector(a) => format!("{a}"),
            Component::Matrix(i, j) => format!("{i}{j}"),
            Component::Coupled(i) => format!("bubble{i}"),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Per-component degree grid and structure of a family's local space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeSpaceSpec {
    pub family: FamilyId,
    pub kind: FieldKind,
    /// One grid per stored entry: 1 (scalar), 3 (vector) or 9 (row-major matrix).
    pub grids: Vec<Degree3>,
    /// Components that carry independent coefficients, in coordinate order.
    pub independent: Vec<Component>,
}

impl ShapeSpaceSpec {
    pub fn grid(&self, c: Component) -> Degree3 {
        match c {
            Component::Scalar => self.grids[0],
            Component::Vector(a) => self.grids[a.index()],
            Component::Matrix(i, j) => self.grids[3 * i.index() + j.index()],
            Component::Coupled(_) => Degree3::EMPTY,
        }
    }

    pub fn dim(&self) -> usize {
        self.independent.iter().map(|&c| self.grid(c).dim()).sum()
    }

    /// Offset of each independent component in the coordinate vector.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.independent
            .iter()
            .map(|&c| {
                let o = acc;
                acc += self.grid(c).dim();
                o
            })
            .collect()
    }

    /// How a stored component is expressed in independent components: `(index, sign)`.
    pub fn expand(&self, c: Component) -> Vec<(usize, i64)> {
        let pos = |c: Component| self.independent.iter().position(|&d| d == c);
        match (self.kind, c) {
            (FieldKind::Matrix(Structure::Symmetric), Component::Matrix(i, j)) => {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                pos(Component::Matrix(a, b)).map(|p| vec![(p, 1)]).unwrap_or_default()
            }
            (FieldKind::Matrix(Structure::Traceless), Component::Matrix(Axis::Z, Axis::Z)) => {
                let xx = pos(Component::Matrix(Axis::X, Axis::X)).expect("xx independent");
                let yy = pos(Component::Matrix(Axis::Y, Axis::Y)).expect("yy independent");
                vec![(xx, -1), (yy, -1)]
            }
            _ => pos(c).map(|p| vec![(p, 1)]).unwrap_or_default(),
        }
    }
}

/// Role of an axis inside a representative DOF group.
pub type Role = usize;
pub const A: Role = 0;
pub const B: Role = 1;
pub const C: Role = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perms {
    Identity,
    Cyclic,
    All,
}

impl Perms {
    /// Role-to-axis maps.
    pub fn maps(self) -> Vec<[Axis; 3]> {
        use Axis::*;
        match self {
            Perms::Identity => vec![[X, Y, Z]],
            Perms::Cyclic => vec![[X, Y, Z], [Y, Z, X], [Z, X, Y]],
            Perms::All => vec![[X, Y, Z], [Y, Z, X], [Z, X, Y], [X, Z, Y], [Y, X, Z], [Z, Y, X]],
        }
    }
}

/// Component of a representative group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoleComponent {
    Scalar,
    Vector(Role),
    Matrix(Role, Role),
    /// Not affected by the role map.
    Fixed(Component),
}

/// A representative group of DOFs: one component, one entity shape, a list
/// of derivatives and a monomial weight space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofGroup {
    pub component: RoleComponent,
    /// Roles of the entity's free axes; `[]` vertex, `[a]` edge `e_a`, `[a, b]` face `F_ab`.
    pub free: Vec<Role>,
    /// Derivative multi-indices in roles.
    pub derivs: Vec<[u8; 3]>,
    /// Weight degree cap per free role; a negative cap empties the group.
    pub caps: Vec<i64>,
    pub perms: Perms,
}

/// A group after mapping roles to axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteGroup {
    pub component: Component,
    /// Free axes, ascending.
    pub free: Vec<Axis>,
    pub derivs: Vec<[u8; 3]>,
    /// Weight caps parallel to `free`.
    pub caps: Vec<i64>,
}

impl DofGroup {
    pub fn concrete(&self, symmetric: bool) -> Vec<ConcreteGroup> {
        self.perms
            .maps()
            .into_iter()
            .map(|map| {
                let component = match self.component {
                    RoleComponent::Scalar => Component::Scalar,
                    RoleComponent::Vector(r) => Component::Vector(map[r]),
                    RoleComponent::Matrix(r, s) => {
                        let (i, j) = (map[r], map[s]);
                        if symmetric && j < i {
                            Component::Matrix(j, i)
                        } else {
                            Component::Matrix(i, j)
                        }
                    }
                    RoleComponent::Fixed(c) => c,
                };
                let mut free: Vec<(Axis, i64)> =
                    self.free.iter().zip(&self.caps).map(|(&r, &cap)| (map[r], cap)).collect();
                free.sort();
                let derivs = self
                    .derivs
                    .iter()
                    .map(|d| {
                        let mut out = [0u8; 3];
                        for r in 0..3 {
                            out[map[r].index()] = d[r];
                        }
                        out
                    })
                    .collect();
                ConcreteGroup {
                    component,
                    free: free.iter().map(|(a, _)| *a).collect(),
                    derivs,
                    caps: free.iter().map(|(_, c)| *c).collect(),
                }
            })
            .collect()
    }
}

/// Everything the catalog knows about a family.
#[derive(Clone, Debug)]
pub struct FamilyCatalog {
    pub space: ShapeSpaceSpec,
    pub groups: Vec<DofGroup>,
    /// Whether the family carries coupled bubble moments on its diagonal.
    pub coupled_bubbles: bool,
}

/// Parses a derivative written in roles, e.g. `"bc"` is `d^2/(db dc)`.
fn d(spec: &str) -> [u8; 3] {
    let mut out = [0u8; 3];
    for ch in spec.chars() {
        out[(ch as u8 - b'a') as usize] += 1;
    }
    out
}

fn group(component: RoleComponent, free: &[Role], derivs: &[&str], caps: &[i64], perms: Perms) -> DofGroup {
    assert_eq!(free.len(), caps.len());
    DofGroup { component, free: free.to_vec(), derivs: derivs.iter().map(|s| d(s)).collect(), caps: caps.to_vec(), perms }
}

/// Grid of every entry obtained by permuting a representative given in roles.
fn fill_grids(grids: &mut [Degree3], rep: RoleComponent, caps: [i64; 3], perms: Perms, symmetric: bool) {
    for map in perms.maps() {
        let mut actual = [0i64; 3];
        for r in 0..3 {
            actual[map[r].index()] = caps[r];
        }
        let g = Degree3::from_caps(actual);
        match rep {
            RoleComponent::Scalar => grids[0] = g,
            RoleComponent::Vector(r) => grids[map[r].index()] = g,
            RoleComponent::Matrix(r, s) => {
                let (i, j) = (map[r].index(), map[s].index());
                grids[3 * i + j] = g;
                if symmetric {
                    grids[3 * j + i] = g;
                }
            }
            RoleComponent::Fixed(_) => unreachable!("grids are given by role"),
        }
    }
}

fn symmetric_components() -> Vec<Component> {
    use Axis::*;
    [(X, X), (Y, Y), (Z, Z), (X, Y), (X, Z), (Y, Z)].map(|(i, j)| Component::Matrix(i, j)).to_vec()
}

fn traceless_components() -> Vec<Component> {
    use Axis::*;
    [(X, X), (Y, Y), (X, Y), (X, Z), (Y, Z), (Y, X), (Z, X), (Z, Y)].map(|(i, j)| Component::Matrix(i, j)).to_vec()
}

fn vector_components() -> Vec<Component> {
    Axis::ALL.map(Component::Vector).to_vec()
}

/// Catalog entry of an admissible family.
pub fn catalog(family: FamilyId) -> FamilyCatalog {
    use FamilyKind::*;
    use Perms::{All, Cyclic, Identity};
    use RoleComponent::{Fixed, Matrix as M, Scalar as S, Vector as V};
    let orig = family;
    let family = family.resolved();
    let k = family.k;
    let mut grids = vec![Degree3::EMPTY; 9];
    let (kind, independent, groups, coupled) = match family.kind {
        U => {
            grids.truncate(1);
            grids[0] = Degree3::new(k, k, k);
            let groups = vec![
                group(S, &[], &["", "a", "b", "c", "ab", "ac", "bc", "abc"], &[], Identity),
                group(S, &[A], &["", "b", "c", "bc"], &[k - 4], Cyclic),
                group(S, &[B, C], &["", "a"], &[k - 4, k - 4], Cyclic),
                group(S, &[A, B, C], &[""], &[k - 4, k - 4, k - 4], Identity),
            ];
            (FieldKind::Scalar, vec![Component::Scalar], groups, false)
        }
        Sigma | SigmaRed => {
            fill_grids(&mut grids, M(A, A), [k - 2, k, k], Cyclic, true);
            fill_grids(&mut grids, M(A, B), [k - 1, k - 1, k], Cyclic, true);
            let mut groups = if family.kind == Sigma {
                vec![
                    group(M(A, A), &[A], &["", "b", "c", "bc"], &[k - 2], Cyclic),
                    group(M(A, A), &[A, B], &["", "c"], &[k - 2, k - 4], Cyclic),
                    group(M(A, A), &[A, C], &["", "b"], &[k - 2, k - 4], Cyclic),
                    group(M(A, A), &[A, B, C], &[""], &[k - 2, k - 4, k - 4], Cyclic),
                ]
            } else {
                vec![
                    group(M(A, A), &[A], &[""], &[k - 2], Cyclic),
                    group(M(A, A), &[A, B], &[""], &[k - 2, k - 2], Cyclic),
                    group(M(A, A), &[A, C], &[""], &[k - 2, k - 2], Cyclic),
                    group(M(A, A), &[A, B, C], &[""], &[k - 2, k - 2, k - 2], Cyclic),
                ]
            };
            groups.extend([
                group(M(A, B), &[], &["", "c"], &[], Cyclic),
                group(M(A, B), &[A], &["", "c"], &[k - 3], Cyclic),
                group(M(A, B), &[B], &["", "c"], &[k - 3], Cyclic),
                group(M(A, B), &[C], &[""], &[k - 4], Cyclic),
                group(M(A, B), &[A, C], &[""], &[k - 3, k - 4], Cyclic),
                group(M(A, B), &[B, C], &[""], &[k - 3, k - 4], Cyclic),
            ]);
            if family.kind == Sigma {
                groups.push(group(M(A, B), &[A, B], &["", "c"], &[k - 3, k - 3], Cyclic));
                groups.push(group(M(A, B), &[A, B, C], &[""], &[k - 3, k - 3, k - 4], Cyclic));
            } else {
                groups.push(group(M(A, B), &[A, B], &[""], &[k - 3, k - 3], Cyclic));
                groups.push(group(M(A, B), &[A, B, C], &[""], &[k - 3, k - 3, k - 2], Cyclic));
            }
            (FieldKind::Matrix(Structure::Symmetric), symmetric_components(), groups, false)
        }
        Xi | XiRed => {
            fill_grids(&mut grids, M(A, A), [k - 1, k - 1, k - 1], Cyclic, false);
            fill_grids(&mut grids, M(A, B), [k - 2, k, k - 1], All, false);
            let xx = Fixed(Component::Matrix(Axis::X, Axis::X));
            let yy = Fixed(Component::Matrix(Axis::Y, Axis::Y));
            let mut groups = Vec::new();
            for diag in [xx, yy] {
                groups.push(group(diag, &[], &[""], &[], Identity));
                groups.push(group(diag, &[A], &[""], &[k - 3], Cyclic));
            }
            if family.kind == Xi {
                for diag in [xx, yy] {
                    groups.push(group(diag, &[B, C], &[""], &[k - 3, k - 3], Cyclic));
                    groups.push(group(diag, &[A, B, C], &[""], &[k - 3, k - 3, k - 3], Identity));
                }
                groups.extend([
                    group(M(A, B), &[A], &["", "b"], &[k - 2], All),
                    group(M(A, B), &[A, B], &[""], &[k - 2, k - 4], All),
                    group(M(A, B), &[A, C], &["", "b"], &[k - 2, k - 3], All),
                    group(M(A, B), &[A, B, C], &[""], &[k - 2, k - 4, k - 3], All),
                ]);
            } else {
                groups.extend([
                    group(M(A, A), &[B, C], &[""], &[k - 3, k - 3], Cyclic),
                    group(M(A, B), &[A, C], &[""], &[k - 2, k - 1], All),
                    group(M(A, B), &[A, B, C], &[""], &[k - 2, k - 2, k - 1], All),
                ]);
            }
            (FieldKind::Matrix(Structure::Traceless), traceless_components(), groups, family.kind == XiRed)
        }
        Q | QRed => {
            grids.truncate(3);
            fill_grids(&mut grids, V(A), [k - 2, k - 1, k - 1], Cyclic, false);
            let groups = if family.kind == Q {
                vec![
                    group(V(A), &[A], &[""], &[k - 2], Cyclic),
                    group(V(A), &[A, B], &[""], &[k - 2, k - 3], Cyclic),
                    group(V(A), &[A, C], &[""], &[k - 2, k - 3], Cyclic),
                    group(V(A), &[A, B, C], &[""], &[k - 2, k - 3, k - 3], Cyclic),
                ]
            } else {
                vec![group(V(A), &[A, B, C], &[""], &[k - 2, k - 1, k - 1], Cyclic)]
            };
            (FieldKind::Vector, vector_components(), groups, false)
        }
        X => {
            grids.truncate(3);
            fill_grids(&mut grids, V(A), [k, k + 1, k + 1], Cyclic, false);
            let groups = vec![
                group(V(A), &[], &["", "b", "c", "bc"], &[], Cyclic),
                group(V(A), &[A], &["", "b", "c", "bc"], &[k - 2], Cyclic),
                group(V(A), &[B], &["", "c"], &[k - 3], Cyclic),
                group(V(A), &[C], &["", "b"], &[k - 3], Cyclic),
                group(V(A), &[B, C], &[""], &[k - 3, k - 3], Cyclic),
                group(V(A), &[A, B], &["", "c"], &[k - 2, k - 3], Cyclic),
                group(V(A), &[A, C], &["", "b"], &[k - 2, k - 3], Cyclic),
                group(V(A), &[A, B, C], &[""], &[k - 2, k - 3, k - 3], Cyclic),
            ];
            (FieldKind::Vector, vector_components(), groups, false)
        }
        Gamma | GammaRed => {
            fill_grids(&mut grids, M(A, A), [k + 1, k - 1, k - 1], Cyclic, true);
            fill_grids(&mut grids, M(A, B), [k, k, k - 1], Cyclic, true);
            let mut groups = if family.kind == Gamma {
                vec![
                    group(M(A, A), &[B, C], &["", "a"], &[k - 1, k - 1], Cyclic),
                    group(M(A, A), &[A, B, C], &[""], &[k - 3, k - 1, k - 1], Cyclic),
                ]
            } else {
                vec![
                    group(M(A, A), &[B, C], &[""], &[k - 1, k - 1], Cyclic),
                    group(M(A, A), &[A, B, C], &[""], &[k - 1, k - 1, k - 1], Cyclic),
                ]
            };
            groups.extend([
                group(M(A, B), &[C], &[""], &[k - 1], Cyclic),
                group(M(A, B), &[A, C], &[""], &[k - 2, k - 1], Cyclic),
                group(M(A, B), &[B, C], &[""], &[k - 2, k - 1], Cyclic),
                group(M(A, B), &[A, B, C], &[""], &[k - 2, k - 2, k - 1], Cyclic),
            ]);
            (FieldKind::Matrix(Structure::Symmetric), symmetric_components(), groups, false)
        }
        Z | ZRed => {
            grids.truncate(3);
            fill_grids(&mut grids, V(A), [k, k - 1, k - 1], Cyclic, false);
            let groups = if family.kind == Z {
                vec![
                    group(V(A), &[B, C], &[""], &[k - 1, k - 1], Cyclic),
                    group(V(A), &[A, B, C], &[""], &[k - 2, k - 1, k - 1], Cyclic),
                ]
            } else {
                vec![group(V(A), &[A, B, C], &[""], &[k, k - 1, k - 1], Cyclic)]
            };
            (FieldKind::Vector, vector_components(), groups, false)
        }
        Phi => unreachable!("resolved above"),
    };
    FamilyCatalog {
        space: ShapeSpaceSpec { family: orig, kind, grids, independent },
        groups,
        coupled_bubbles: coupled,
    }
}

/// The local shape space of an admissible family.
pub fn shape_space(family: FamilyId) -> Result<ShapeSpaceSpec> {
    let family = FamilyId::new(family.kind, family.k)?;
    Ok(catalog(family).space)
}
