//! Exact tensor-product polynomials `Q_{kx,ky,kz}` on axis-aligned cells.
//!
//! Every polynomial lives in the normalized coordinates of a [`Frame`]: the
//! owning cell is mapped affinely onto `[0,1]^3`, one axis at a time. Physical
//! derivatives and integrals pick up the exact `1/h` and `h` factors of that
//! diagonal map, so no quadrature is ever needed.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// `n / d` as a reduced rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(num, den);
        return Ok(if negative { -value } else { value });
    }
    let p: BigInt = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Coordinate axis of the cuboid mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The cyclic successor `x -> y -> z -> x`.
    pub fn next(self) -> Axis {
        Axis::from_index((self.index() + 1) % 3)
    }

    pub fn letter(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }

    /// The two axes other than `self`, in ascending order.
    pub fn others(self) -> [Axis; 2] {
        match self {
            Axis::X => [Axis::Y, Axis::Z],
            Axis::Y => [Axis::X, Axis::Z],
            Axis::Z => [Axis::X, Axis::Y],
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Per-axis degree caps of a `Q_{kx,ky,kz}` space.
///
/// A negative cap anywhere makes the space empty (dimension zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Degree3 {
    caps: [i64; 3],
}

impl Degree3 {
    pub const EMPTY: Degree3 = Degree3 { caps: [-1, -1, -1] };

    pub fn new(kx: i64, ky: i64, kz: i64) -> Self {
        let caps = [kx, ky, kz];
        if caps.iter().any(|&c| c < 0) {
            Self::EMPTY
        } else {
            Degree3 { caps }
        }
    }

    pub fn from_caps(caps: [i64; 3]) -> Self {
        Self::new(caps[0], caps[1], caps[2])
    }

    pub fn is_empty(&self) -> bool {
        self.caps[0] < 0
    }

    pub fn cap(&self, axis: Axis) -> i64 {
        self.caps[axis.index()]
    }

    pub fn caps(&self) -> [i64; 3] {
        self.caps
    }

    pub fn dim(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.caps.iter().map(|&c| (c + 1) as usize).product()
        }
    }

    fn strides(&self) -> [usize; 3] {
        let ky = (self.caps[1] + 1) as usize;
        let kz = (self.caps[2] + 1) as usize;
        [ky * kz, kz, 1]
    }

    /// Flat position of the monomial with exponents `e`.
    pub fn index(&self, e: [usize; 3]) -> usize {
        let s = self.strides();
        e[0] * s[0] + e[1] * s[1] + e[2] * s[2]
    }

    pub fn exponent(&self, mut flat: usize) -> [usize; 3] {
        let s = self.strides();
        let i = flat / s[0];
        flat %= s[0];
        [i, flat / s[1], flat % s[1]]
    }

    pub fn contains(&self, e: [usize; 3]) -> bool {
        !self.is_empty() && (0..3).all(|a| e[a] as i64 <= self.caps[a])
    }

    /// All exponent triples, in flat (lexicographic, z fastest) order.
    pub fn exponents(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.dim()).map(move |f| self.exponent(f))
    }

    /// Smallest space containing both.
    pub fn union(self, other: Degree3) -> Degree3 {
        if self.is_empty() {
            return other;
        }
        if other.is_empty() {
            return self;
        }
        Degree3::new(
            self.caps[0].max(other.caps[0]),
            self.caps[1].max(other.caps[1]),
            self.caps[2].max(other.caps[2]),
        )
    }

    pub fn shifted(self, axis: Axis, delta: i64) -> Degree3 {
        if self.is_empty() {
            return self;
        }
        let mut caps = self.caps;
        caps[axis.index()] += delta;
        Degree3::from_caps(caps)
    }
}

impl fmt::Display for Degree3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "Q_empty")
        } else {
            write!(f, "Q_{{{},{},{}}}", self.caps[0], self.caps[1], self.caps[2])
        }
    }
}

/// Affine placement of a cell: `x = origin + extent * xi` per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub origin: [Rational; 3],
    pub extent: [Rational; 3],
}

impl Frame {
    pub fn new(origin: [Rational; 3], extent: [Rational; 3]) -> Self {
        assert!(extent.iter().all(|h| h.is_positive()), "cell extents must be positive");
        Frame { origin, extent }
    }

    /// The reference cell `[0,1]^3`.
    pub fn reference() -> Self {
        Frame::new([int(0), int(0), int(0)], [int(1), int(1), int(1)])
    }

    pub fn to_local(&self, point: &[Rational; 3]) -> [Rational; 3] {
        std::array::from_fn(|a| (&point[a] - &self.origin[a]) / &self.extent[a])
    }

    pub fn to_physical(&self, xi: &[Rational; 3]) -> [Rational; 3] {
        std::array::from_fn(|a| &self.origin[a] + &self.extent[a] * &xi[a])
    }

    pub fn volume(&self) -> Rational {
        &self.extent[0] * &self.extent[1] * &self.extent[2]
    }
}

/// A trivariate polynomial in the normalized coordinates of its frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorPoly {
    degree: Degree3,
    coeffs: Vec<Rational>,
    frame: Arc<Frame>,
}

impl TensorPoly {
    pub fn zero(degree: Degree3, frame: Arc<Frame>) -> Self {
        TensorPoly { degree, coeffs: vec![Rational::zero(); degree.dim()], frame }
    }

    pub fn from_coeffs(degree: Degree3, coeffs: Vec<Rational>, frame: Arc<Frame>) -> Self {
        assert_eq!(coeffs.len(), degree.dim(), "coefficient count must match the degree grid");
        TensorPoly { degree, coeffs, frame }
    }

    /// `c * xi^e` in the smallest grid holding it.
    pub fn monomial(e: [usize; 3], c: Rational, frame: Arc<Frame>) -> Self {
        let degree = Degree3::new(e[0] as i64, e[1] as i64, e[2] as i64);
        let mut p = TensorPoly::zero(degree, frame);
        let idx = degree.index(e);
        p.coeffs[idx] = c;
        p
    }

    pub fn constant(c: Rational, frame: Arc<Frame>) -> Self {
        Self::monomial([0, 0, 0], c, frame)
    }

    /// The physical monomial `x^e0 y^e1 z^e2`, re-expressed in the frame's coordinates.
    pub fn physical_monomial(e: [usize; 3], frame: Arc<Frame>) -> Self {
        // x = o + h xi, expand each factor binomially
        let factors: Vec<Vec<Rational>> = (0..3)
            .map(|a| {
                let o = &frame.origin[a];
                let h = &frame.extent[a];
                (0..=e[a])
                    .map(|j| {
                        let binom = Rational::from_integer(num_integer::binomial(
                            BigInt::from(e[a]),
                            BigInt::from(j),
                        ));
                        binom * num_traits::pow(h.clone(), j) * num_traits::pow(o.clone(), e[a] - j)
                    })
                    .collect()
            })
            .collect();
        let degree = Degree3::new(e[0] as i64, e[1] as i64, e[2] as i64);
        let mut p = TensorPoly::zero(degree, frame);
        for ex in degree.exponents() {
            let idx = degree.index(ex);
            p.coeffs[idx] = &factors[0][ex[0]] * &factors[1][ex[1]] * &factors[2][ex[2]];
        }
        p
    }

    pub fn degree(&self) -> Degree3 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn coeff(&self, e: [usize; 3]) -> Rational {
        if self.degree.contains(e) {
            self.coeffs[self.degree.index(e)].clone()
        } else {
            Rational::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero terms as `(exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.degree.exponent(i), c))
    }

    /// True when every nonzero coefficient lies inside `degree`.
    pub fn fits_within(&self, degree: Degree3) -> bool {
        self.terms().all(|(e, _)| degree.contains(e))
    }

    /// Re-embeds into another grid; `None` if a nonzero term would be cut off.
    pub fn reshaped(&self, degree: Degree3) -> Option<TensorPoly> {
        if !self.fits_within(degree) {
            return None;
        }
        let mut out = TensorPoly::zero(degree, self.frame.clone());
        for (e, c) in self.terms() {
            out.coeffs[degree.index(e)] = c.clone();
        }
        Some(out)
    }

    /// Same polynomial, coefficients re-labelled as belonging to `frame`.
    pub fn with_frame(mut self, frame: Arc<Frame>) -> TensorPoly {
        self.frame = frame;
        self
    }

    pub fn evaluate_local(&self, xi: &[Rational; 3]) -> Rational {
        if self.degree.is_empty() {
            return Rational::zero();
        }
        let powers: Vec<Vec<Rational>> = (0..3)
            .map(|a| {
                let mut v = Vec::with_capacity((self.degree.caps[a] + 1) as usize);
                let mut acc = Rational::one();
                for _ in 0..=self.degree.caps[a] {
                    v.push(acc.clone());
                    acc *= &xi[a];
                }
                v
            })
            .collect();
        self.terms()
            .map(|(e, c)| c * &powers[0][e[0]] * &powers[1][e[1]] * &powers[2][e[2]])
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    /// Value at a physical point.
    pub fn evaluate(&self, point: &[Rational; 3]) -> Rational {
        self.evaluate_local(&self.frame.to_local(point))
    }

    /// Exact physical partial derivative along `axis`.
    pub fn differentiate(&self, axis: Axis) -> TensorPoly {
        let a = axis.index();
        let degree = self.degree.shifted(axis, -1);
        let mut out = TensorPoly::zero(degree, self.frame.clone());
        let scale = self.frame.extent[a].recip();
        for (e, c) in self.terms() {
            if e[a] == 0 {
                continue;
            }
            let mut f = e;
            f[a] -= 1;
            let idx = degree.index(f);
            out.coeffs[idx] = c * int(e[a] as i64) * &scale;
        }
        out
    }

    /// Applies `d^alpha` for a multi-index with entries in `{0,1,...}`.
    pub fn derivative(&self, alpha: [u8; 3]) -> TensorPoly {
        let mut p = self.clone();
        for axis in Axis::ALL {
            for _ in 0..alpha[axis.index()] {
                p = p.differentiate(axis);
            }
        }
        p
    }

    /// `int_{cell min}^{x_axis} p ds`, exact.
    pub fn antiderivative(&self, axis: Axis) -> TensorPoly {
        let a = axis.index();
        let degree = if self.degree.is_empty() {
            Degree3::new(0, 0, 0).shifted(axis, 1)
        } else {
            self.degree.shifted(axis, 1)
        };
        let mut out = TensorPoly::zero(degree, self.frame.clone());
        let h = &self.frame.extent[a];
        for (e, c) in self.terms() {
            let mut f = e;
            f[a] += 1;
            let idx = degree.index(f);
            out.coeffs[idx] = c * h / int(f[a] as i64);
        }
        out
    }

    /// Freezes the normalized coordinate of `axis` at `xi`; the result is constant along `axis`.
    pub fn substitute(&self, axis: Axis, xi: &Rational) -> TensorPoly {
        let a = axis.index();
        let degree = if self.degree.is_empty() {
            self.degree
        } else {
            let mut caps = self.degree.caps;
            caps[a] = 0;
            Degree3::from_caps(caps)
        };
        let mut out = TensorPoly::zero(degree, self.frame.clone());
        for (e, c) in self.terms() {
            let mut f = e;
            f[a] = 0;
            let idx = degree.index(f);
            out.coeffs[idx] += c * num_traits::pow(xi.clone(), e[a]);
        }
        out
    }

    pub fn scaled(&self, s: &Rational) -> TensorPoly {
        TensorPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            frame: self.frame.clone(),
        }
    }

    fn combine(&self, other: &TensorPoly, sign: i64) -> TensorPoly {
        debug_assert_eq!(*self.frame, *other.frame, "polynomials live on different cells");
        let degree = self.degree.union(other.degree);
        let mut out = TensorPoly::zero(degree, self.frame.clone());
        for (e, c) in self.terms() {
            out.coeffs[degree.index(e)] += c;
        }
        for (e, c) in other.terms() {
            if sign > 0 {
                out.coeffs[degree.index(e)] += c;
            } else {
                out.coeffs[degree.index(e)] -= c;
            }
        }
        out
    }

    pub fn add(&self, other: &TensorPoly) -> TensorPoly {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &TensorPoly) -> TensorPoly {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> TensorPoly {
        self.scaled(&int(-1))
    }

    /// Product of two polynomials on the same frame.
    pub fn mul(&self, other: &TensorPoly) -> TensorPoly {
        let (a, b) = (self.degree, other.degree);
        if a.is_empty() || b.is_empty() {
            return TensorPoly::zero(Degree3::EMPTY, self.frame.clone());
        }
        let degree = Degree3::new(a.caps[0] + b.caps[0], a.caps[1] + b.caps[1], a.caps[2] + b.caps[2]);
        let mut out = TensorPoly::zero(degree, self.frame.clone());
        for (e, c) in self.terms() {
            for (f, d) in other.terms() {
                out.coeffs[degree.index([e[0] + f[0], e[1] + f[1], e[2] + f[2]])] += c * d;
            }
        }
        out
    }
}

/// Topological kind of a mesh entity, with its direction tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Vertex,
    /// Edge parallel to the given axis (`e_x`, ...).
    Edge(Axis),
    /// Face normal to the given axis (`F_yz` is `Face(X)`).
    Face(Axis),
    Cell,
}

impl EntityKind {
    pub fn dimension(self) -> usize {
        match self {
            EntityKind::Vertex => 0,
            EntityKind::Edge(_) => 1,
            EntityKind::Face(_) => 2,
            EntityKind::Cell => 3,
        }
    }

    /// Axes along which the entity extends, ascending.
    pub fn free_axes(self) -> Vec<Axis> {
        match self {
            EntityKind::Vertex => vec![],
            EntityKind::Edge(a) => vec![a],
            EntityKind::Face(n) => n.others().to_vec(),
            EntityKind::Cell => Axis::ALL.to_vec(),
        }
    }

    /// The entity kind spanned by a set of free axes.
    pub fn from_free_axes(free: &[Axis]) -> EntityKind {
        match free.len() {
            0 => EntityKind::Vertex,
            1 => EntityKind::Edge(free[0]),
            2 => {
                let normal = Axis::ALL.into_iter().find(|a| !free.contains(a)).unwrap();
                EntityKind::Face(normal)
            }
            _ => EntityKind::Cell,
        }
    }

    pub fn tag(self) -> String {
        match self {
            EntityKind::Vertex => "v".into(),
            EntityKind::Edge(a) => format!("e_{a}"),
            EntityKind::Face(n) => {
                let [p, q] = n.others();
                format!("F_{p}{q}")
            }
            EntityKind::Cell => "T".into(),
        }
    }
}

/// A mesh entity with its global number and corner coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub id: usize,
    pub lo: [Rational; 3],
    pub hi: [Rational; 3],
}

impl EntityRef {
    pub fn new(kind: EntityKind, id: usize, lo: [Rational; 3], hi: [Rational; 3]) -> Result<Self> {
        let free = kind.free_axes();
        for a in Axis::ALL {
            let extends = lo[a.index()] != hi[a.index()];
            if extends != free.contains(&a) || lo[a.index()] > hi[a.index()] {
                return Err(Error::InvalidEntity(format!(
                    "{} extent does not match its direction tag",
                    kind.tag()
                )));
            }
        }
        Ok(EntityRef { kind, id, lo, hi })
    }

    /// Product of the extents along the free axes (1 for a vertex).
    pub fn measure(&self) -> Rational {
        self.kind
            .free_axes()
            .into_iter()
            .map(|a| &self.hi[a.index()] - &self.lo[a.index()])
            .fold(Rational::one(), |acc, h| acc * h)
    }

    /// The cell frame when this entity is a cell.
    pub fn frame(&self) -> Frame {
        Frame::new(self.lo.clone(), std::array::from_fn(|a| &self.hi[a] - &self.lo[a]))
    }

    /// Physical point at normalized entity coordinates `t` (one per free axis).
    pub fn point(&self, t: &[Rational]) -> [Rational; 3] {
        let free = self.kind.free_axes();
        let mut p = self.lo.clone();
        for (axis, ti) in free.iter().zip(t) {
            let a = axis.index();
            p[a] = &self.lo[a] + (&self.hi[a] - &self.lo[a]) * ti;
        }
        p
    }
}

/// A polynomial in the normalized coordinates of an entity's free axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityPoly {
    pub axes: Vec<Axis>,
    pub caps: Vec<usize>,
    pub coeffs: Vec<Rational>,
}

impl EntityPoly {
    fn index(&self, e: &[usize]) -> usize {
        e.iter().zip(&self.caps).fold(0, |acc, (&ei, &c)| acc * (c + 1) + ei)
    }

    fn exponent(&self, mut flat: usize) -> Vec<usize> {
        let mut e = vec![0; self.caps.len()];
        for i in (0..self.caps.len()).rev() {
            e[i] = flat % (self.caps[i] + 1);
            flat /= self.caps[i] + 1;
        }
        e
    }

    pub fn zero(axes: Vec<Axis>, caps: Vec<usize>) -> Self {
        let n = caps.iter().map(|c| c + 1).product();
        EntityPoly { axes, caps, coeffs: vec![Rational::zero(); n] }
    }

    /// `t^e` over the given axes.
    pub fn monomial(axes: Vec<Axis>, e: &[usize]) -> Self {
        let mut p = EntityPoly::zero(axes, e.to_vec());
        let idx = p.index(e);
        p.coeffs[idx] = Rational::one();
        p
    }

    /// Reads a 3D polynomial (constant along axes not in `axes`) as an entity polynomial.
    pub fn from_tensor(axes: Vec<Axis>, p: &TensorPoly) -> Self {
        let d = p.degree();
        let caps: Vec<usize> = axes.iter().map(|a| d.cap(*a).max(0) as usize).collect();
        let mut out = EntityPoly::zero(axes.clone(), caps);
        for (e, c) in p.terms() {
            let sub: Vec<usize> = axes.iter().map(|a| e[a.index()]).collect();
            let idx = out.index(&sub);
            out.coeffs[idx] += c;
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.exponent(i), c))
    }

    pub fn evaluate(&self, t: &[Rational]) -> Rational {
        self.terms()
            .map(|(e, c)| {
                e.iter()
                    .zip(t)
                    .fold(c.clone(), |acc, (&ei, ti)| acc * num_traits::pow(ti.clone(), ei))
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// `int_{[0,1]^d} self * other`, both in the same coordinates.
    pub fn integrate_product(&self, other: &EntityPoly) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in self.terms() {
            for (f, d) in other.terms() {
                let den: i64 = e.iter().zip(&f).map(|(&a, &b)| (a + b + 1) as i64).product();
                total += c * d / int(den);
            }
        }
        total
    }
}

/// Restriction of `p` to an entity of its cell, in entity-normalized coordinates.
pub fn trace(p: &TensorPoly, entity: &EntityRef) -> Result<EntityPoly> {
    let frame = p.frame();
    let free = entity.kind.free_axes();
    let mut frozen = p.clone();
    for axis in Axis::ALL {
        let a = axis.index();
        let lo = &frame.origin[a];
        let hi = &frame.origin[a] + &frame.extent[a];
        if free.contains(&axis) {
            if entity.lo[a] != *lo || entity.hi[a] != hi {
                return Err(Error::EntityNotOnCell(entity.kind.tag()));
            }
        } else {
            let xi = if entity.lo[a] == *lo {
                Rational::zero()
            } else if entity.lo[a] == hi {
                Rational::one()
            } else {
                return Err(Error::EntityNotOnCell(entity.kind.tag()));
            };
            frozen = frozen.substitute(axis, &xi);
        }
    }
    Ok(EntityPoly::from_tensor(free, &frozen))
}

/// `int_entity trace(p) * weight`, scaled by the entity's physical measure.
///
/// For a vertex this is the point value times the (constant) weight.
pub fn moment(p: &TensorPoly, weight: &EntityPoly, entity: &EntityRef) -> Result<Rational> {
    let t = trace(p, entity)?;
    if t.axes != weight.axes {
        return Err(Error::InvalidEntity(format!(
            "weight coordinates do not match {}",
            entity.kind.tag()
        )));
    }
    Ok(t.integrate_product(weight) * entity.measure())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> Arc<Frame> {
        Arc::new(Frame::reference())
    }

    fn unit_cell() -> EntityRef {
        EntityRef::new(EntityKind::Cell, 0, [int(0), int(0), int(0)], [int(1), int(1), int(1)]).unwrap()
    }

    fn poly(degree: Degree3, coeffs: &[i64], frame: Arc<Frame>) -> TensorPoly {
        TensorPoly::from_coeffs(degree, coeffs.iter().map(|&c| int(c)).collect(), frame)
    }

    fn arb_poly(max: i64) -> impl Strategy<Value = TensorPoly> {
        (0..=max, 0..=max, 0..=max)
            .prop_flat_map(|(a, b, c)| {
                let d = Degree3::new(a, b, c);
                (Just(d), proptest::collection::vec(-9i64..=9, d.dim()))
            })
            .prop_map(|(d, cs)| poly(d, &cs, unit()))
    }

    #[test]
    fn degree_dims() {
        assert_eq!(Degree3::new(3, 3, 3).dim(), 64);
        assert_eq!(Degree3::new(1, 3, 3).dim(), 32);
        assert_eq!(Degree3::new(2, -1, 3).dim(), 0);
        assert!(Degree3::new(2, -1, 3).is_empty());
        for k in 0..6 {
            assert_eq!(Degree3::new(k, k, k).dim(), ((k + 1) * (k + 1) * (k + 1)) as usize);
        }
    }

    #[test]
    fn derivative_monomial_rule() {
        // d/dx (x^2 y) = 2 x y
        let p = TensorPoly::monomial([2, 1, 0], int(1), unit());
        let d = p.differentiate(Axis::X);
        assert_eq!(d.coeff([1, 1, 0]), int(2));
        assert_eq!(d.terms().count(), 1);
        // d/dy 5 = 0 with the y cap dropped
        let c = TensorPoly::from_coeffs(Degree3::new(1, 1, 1), vec![int(5), int(0), int(0), int(0), int(0), int(0), int(0), int(0)], unit());
        let d = c.differentiate(Axis::Y);
        assert!(d.is_zero());
        assert_eq!(d.degree(), Degree3::new(1, 0, 1));
    }

    #[test]
    fn derivative_on_physical_cell_carries_chain_factor() {
        let h = rat(3, 7);
        let frame = Arc::new(Frame::new([rat(1, 2), int(-1), int(2)], [int(2), rat(1, 3), h.clone()]));
        // the physical polynomial x y z^2 on that cell
        let mut p = TensorPoly::physical_monomial([1, 1, 2], frame.clone());
        let dp = p.differentiate(Axis::Z);
        let expected = TensorPoly::physical_monomial([1, 1, 1], frame.clone()).scaled(&int(2));
        // chain-rule oracle: compare values at fixed rational points
        let pts: Vec<[Rational; 3]> = (0..10)
            .map(|i| [rat(i, 3), rat(2 * i - 5, 7), rat(i * i - 4, 11)])
            .collect();
        for pt in &pts {
            assert_eq!(dp.evaluate(pt), expected.evaluate(pt));
        }
        // in the reference variable: the z-coefficient picks up 1/h
        p = TensorPoly::monomial([1, 1, 2], int(1), frame.clone());
        assert_eq!(p.differentiate(Axis::Z).coeff([1, 1, 1]), int(2) / h);
    }

    #[test]
    fn antiderivative_examples() {
        let one = TensorPoly::constant(int(1), unit());
        let y = one.antiderivative(Axis::Y);
        assert_eq!(y, TensorPoly::monomial([0, 1, 0], int(1), unit()));
        let two_x = TensorPoly::monomial([1, 0, 0], int(2), unit());
        assert_eq!(two_x.antiderivative(Axis::X), TensorPoly::monomial([2, 0, 0], int(1), unit()));
    }

    #[test]
    fn trace_examples() {
        // x + y on e_x at y = 0, z = 0
        let mut p = TensorPoly::zero(Degree3::new(1, 1, 0), unit());
        p = p.add(&TensorPoly::monomial([1, 0, 0], int(1), unit()));
        p = p.add(&TensorPoly::monomial([0, 1, 0], int(1), unit()));
        let edge = EntityRef::new(EntityKind::Edge(Axis::X), 0, [int(0), int(0), int(0)], [int(1), int(0), int(0)]).unwrap();
        let t = trace(&p, &edge).unwrap();
        assert_eq!(t.axes, vec![Axis::X]);
        assert_eq!(t.evaluate(&[rat(1, 3)]), rat(1, 3));
        assert_eq!(t.terms().count(), 1);

        // xyz on F_xy at z = 1
        let xyz = TensorPoly::monomial([1, 1, 1], int(1), unit());
        let face = EntityRef::new(EntityKind::Face(Axis::Z), 0, [int(0), int(0), int(1)], [int(1), int(1), int(1)]).unwrap();
        let t = trace(&xyz, &face).unwrap();
        assert_eq!(t, EntityPoly::monomial(vec![Axis::X, Axis::Y], &[1, 1]));
    }

    #[test]
    fn trace_rejects_foreign_entity() {
        let p = TensorPoly::constant(int(1), unit());
        let face = EntityRef::new(EntityKind::Face(Axis::Z), 0, [int(0), int(0), int(2)], [int(1), int(1), int(2)]).unwrap();
        assert!(matches!(trace(&p, &face), Err(Error::EntityNotOnCell(_))));
        let bad = EntityRef::new(EntityKind::Edge(Axis::X), 0, [int(0), int(0), int(0)], [int(2), int(0), int(0)]).unwrap();
        assert!(trace(&p, &bad).is_err());
    }

    #[test]
    fn entity_extent_must_match_tag() {
        let r = EntityRef::new(EntityKind::Edge(Axis::X), 0, [int(0), int(0), int(0)], [int(1), int(1), int(0)]);
        assert!(r.is_err());
    }

    #[test]
    fn trace_agrees_with_point_evaluation_on_physical_face() {
        let frame = Arc::new(Frame::new([int(1), int(0), rat(1, 2)], [rat(1, 2), int(2), rat(3, 2)]));
        let d = Degree3::new(3, 3, 3);
        let coeffs: Vec<Rational> = (0..d.dim() as i64).map(|i| int((i * 7919) % 19 - 9)).collect();
        let p = TensorPoly::from_coeffs(d, coeffs, frame.clone());
        // F_yz at the far x side
        let face = EntityRef::new(
            EntityKind::Face(Axis::X),
            0,
            [rat(3, 2), int(0), rat(1, 2)],
            [rat(3, 2), int(2), int(2)],
        )
        .unwrap();
        let t = trace(&p, &face).unwrap();
        for i in 0..10 {
            let s = [rat(i, 9), rat((3 * i) % 10, 10)];
            assert_eq!(t.evaluate(&s), p.evaluate(&face.point(&s)));
        }
    }

    #[test]
    fn moment_examples() {
        let edge = EntityRef::new(EntityKind::Edge(Axis::X), 0, [int(0), int(0), int(0)], [int(1), int(0), int(0)]).unwrap();
        let one1 = EntityPoly::monomial(vec![Axis::X], &[0]);
        let x = TensorPoly::monomial([1, 0, 0], int(1), unit());
        assert_eq!(moment(&x, &one1, &edge).unwrap(), rat(1, 2));

        let face = EntityRef::new(EntityKind::Face(Axis::Z), 0, [int(0), int(0), int(0)], [int(1), int(1), int(0)]).unwrap();
        let xy = TensorPoly::monomial([1, 1, 0], int(1), unit());
        assert_eq!(moment(&xy, &EntityPoly::monomial(vec![Axis::X, Axis::Y], &[0, 0]), &face).unwrap(), rat(1, 4));

        // x^2 y against weight x on e_x at y = 1: int_0^1 t^3 dt
        let top = EntityRef::new(EntityKind::Edge(Axis::X), 0, [int(0), int(1), int(0)], [int(1), int(1), int(0)]).unwrap();
        let x2y = TensorPoly::monomial([2, 1, 0], int(1), unit());
        assert_eq!(moment(&x2y, &EntityPoly::monomial(vec![Axis::X], &[1]), &top).unwrap(), rat(1, 4));
    }

    #[test]
    fn moment_scales_with_measure() {
        let frame = Arc::new(Frame::new([int(0), int(0), int(0)], [int(3), int(1), int(1)]));
        let one = TensorPoly::constant(int(1), frame);
        let edge = EntityRef::new(EntityKind::Edge(Axis::X), 0, [int(0), int(0), int(0)], [int(3), int(0), int(0)]).unwrap();
        assert_eq!(moment(&one, &EntityPoly::monomial(vec![Axis::X], &[0]), &edge).unwrap(), int(3));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn physical_monomial_matches_direct_evaluation() {
        let frame = Arc::new(Frame::new([int(2), rat(-1, 3), int(5)], [rat(1, 2), int(3), rat(2, 5)]));
        let p = TensorPoly::physical_monomial([2, 1, 3], frame);
        let pt = [rat(7, 3), int(1), rat(21, 4)];
        let direct = &pt[0] * &pt[0] * &pt[1] * &pt[2] * &pt[2] * &pt[2];
        assert_eq!(p.evaluate(&pt), direct);
    }

    proptest! {
        #[test]
        fn mixed_partials_commute(p in arb_poly(4), a in 0usize..3, b in 0usize..3) {
            let (a, b) = (Axis::from_index(a), Axis::from_index(b));
            let ab = p.differentiate(a).differentiate(b);
            let ba = p.differentiate(b).differentiate(a);
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn antiderivative_round_trip(p in arb_poly(4), a in 0usize..3) {
            let axis = Axis::from_index(a);
            let back = p.antiderivative(axis).differentiate(axis);
            prop_assert_eq!(back.reshaped(p.degree()).unwrap(), p);
        }

        #[test]
        fn moment_is_bilinear(p in arb_poly(3), q in arb_poly(3), s in -5i64..=5, wi in 0usize..3, wj in 0usize..3) {
            let face = EntityRef::new(EntityKind::Face(Axis::Y), 0, [int(0), int(1), int(0)], [int(1), int(1), int(1)]).unwrap();
            let axes = vec![Axis::X, Axis::Z];
            let w1 = EntityPoly::monomial(axes.clone(), &[wi, wj]);
            let lhs = moment(&p.add(&q.scaled(&int(s))), &w1, &face).unwrap();
            let rhs = moment(&p, &w1, &face).unwrap() + int(s) * moment(&q, &w1, &face).unwrap();
            prop_assert_eq!(lhs, rhs);
            let w2 = EntityPoly::monomial(axes, &[wj, wi]);
            let mut w12 = EntityPoly::zero(vec![Axis::X, Axis::Z], vec![2, 2]);
            for (src, scale) in [(&w1, int(1)), (&w2, int(s))] {
                for (e, c) in src.terms() {
                    let idx = e[0] * 3 + e[1];
                    w12.coeffs[idx] += c * &scale;
                }
            }
            let lhs = moment(&p, &w12, &face).unwrap();
            let rhs = moment(&p, &w1, &face).unwrap() + int(s) * moment(&p, &w2, &face).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn trace_commutes_with_tangential_derivative(p in arb_poly(3)) {
            let face = EntityRef::new(EntityKind::Face(Axis::Z), 0, [int(0), int(0), int(1)], [int(1), int(1), int(1)]).unwrap();
            let cell = unit_cell();
            let _ = cell;
            let lhs = trace(&p.differentiate(Axis::X), &face).unwrap();
            let t = trace(&p, &face).unwrap();
            // differentiate the trace along its first coordinate
            let mut dt = EntityPoly::zero(t.axes.clone(), t.caps.clone());
            for (e, c) in t.terms() {
                if e[0] > 0 {
                    let idx = (e[0] - 1) * (t.caps[1] + 1) + e[1];
                    dt.coeffs[idx] += c * int(e[0] as i64);
                }
            }
            let pts = [[rat(1, 3), rat(2, 5)], [rat(0, 1), rat(1, 1)], [rat(7, 8), rat(1, 9)]];
            for s in pts {
                prop_assert_eq!(lhs.evaluate(&s), dt.evaluate(&s));
            }
        }
    }
}
