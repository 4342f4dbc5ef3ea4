//! Differential operators on single-cell polynomial fields.
//!
//! Matrices are stored as nine entries in row-major order; structure
//! (symmetry, tracelessness) is a property of the values, checked on demand.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polytensor::{rat, Axis, Degree3, Frame, Rational, TensorPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldShape {
    Scalar,
    Vector,
    Matrix,
}

impl FieldShape {
    pub fn entries(self) -> usize {
        match self {
            FieldShape::Scalar => 1,
            FieldShape::Vector => 3,
            FieldShape::Matrix => 9,
        }
    }
}

/// A scalar, vector or 3x3 matrix of polynomials on one cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyField {
    shape: FieldShape,
    comps: Vec<TensorPoly>,
}

fn mi(i: Axis, j: Axis) -> usize {
    3 * i.index() + j.index()
}

impl PolyField {
    pub fn zero(shape: FieldShape, frame: Arc<Frame>) -> Self {
        PolyField { shape, comps: vec![TensorPoly::zero(Degree3::EMPTY, frame); shape.entries()] }
    }

    pub fn scalar(p: TensorPoly) -> Self {
        PolyField { shape: FieldShape::Scalar, comps: vec![p] }
    }

    pub fn vector(v: [TensorPoly; 3]) -> Self {
        PolyField { shape: FieldShape::Vector, comps: v.into() }
    }

    /// Row-major entries.
    pub fn matrix(m: [TensorPoly; 9]) -> Self {
        PolyField { shape: FieldShape::Matrix, comps: m.into() }
    }

    pub fn shape(&self) -> FieldShape {
        self.shape
    }

    pub fn frame(&self) -> &Arc<Frame> {
        self.comps[0].frame()
    }

    pub fn comps(&self) -> &[TensorPoly] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [TensorPoly] {
        &mut self.comps
    }

    pub fn as_scalar(&self) -> Result<&TensorPoly> {
        self.expect(FieldShape::Scalar)?;
        Ok(&self.comps[0])
    }

    pub fn v(&self, i: Axis) -> &TensorPoly {
        debug_assert_eq!(self.shape, FieldShape::Vector);
        &self.comps[i.index()]
    }

    pub fn m(&self, i: Axis, j: Axis) -> &TensorPoly {
        debug_assert_eq!(self.shape, FieldShape::Matrix);
        &self.comps[mi(i, j)]
    }

    pub fn set_m(&mut self, i: Axis, j: Axis, p: TensorPoly) {
        self.comps[mi(i, j)] = p;
    }

    pub fn set_v(&mut self, i: Axis, p: TensorPoly) {
        self.comps[i.index()] = p;
    }

    fn expect(&self, shape: FieldShape) -> Result<()> {
        if self.shape == shape {
            Ok(())
        } else {
            Err(Error::KindMismatch(format!("expected a {shape:?} field, got {:?}", self.shape)))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(TensorPoly::is_zero)
    }

    pub fn add(&self, other: &PolyField) -> PolyField {
        assert_eq!(self.shape, other.shape);
        PolyField { shape: self.shape, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &PolyField) -> PolyField {
        assert_eq!(self.shape, other.shape);
        PolyField { shape: self.shape, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scaled(&self, s: &Rational) -> PolyField {
        PolyField { shape: self.shape, comps: self.comps.iter().map(|p| p.scaled(s)).collect() }
    }

    pub fn transpose(&self) -> Result<PolyField> {
        self.expect(FieldShape::Matrix)?;
        let mut out = self.clone();
        for i in Axis::ALL {
            for j in Axis::ALL {
                out.comps[mi(i, j)] = self.comps[mi(j, i)].clone();
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.shape == FieldShape::Matrix && self.transpose().map(|t| t.sub(self).is_zero()).unwrap_or(false)
    }

    pub fn trace(&self) -> Result<TensorPoly> {
        self.expect(FieldShape::Matrix)?;
        Ok(self.m(Axis::X, Axis::X).add(self.m(Axis::Y, Axis::Y)).add(self.m(Axis::Z, Axis::Z)))
    }

    /// Values of every component at a physical point.
    pub fn evaluate(&self, point: &[Rational; 3]) -> Vec<Rational> {
        self.comps.iter().map(|p| p.evaluate(point)).collect()
    }

    /// Same coefficients on another frame of identical extents.
    pub fn with_frame(self, frame: Arc<Frame>) -> PolyField {
        PolyField { shape: self.shape, comps: self.comps.into_iter().map(|p| p.with_frame(frame.clone())).collect() }
    }
}

pub fn grad(u: &PolyField) -> Result<PolyField> {
    let u = u.as_scalar()?;
    Ok(PolyField::vector(Axis::ALL.map(|a| u.differentiate(a))))
}

/// Hessian of a scalar field.
pub fn gradgrad(u: &PolyField) -> Result<PolyField> {
    let u = u.as_scalar()?;
    let first = Axis::ALL.map(|a| u.differentiate(a));
    let mut comps = Vec::with_capacity(9);
    for i in Axis::ALL {
        for j in Axis::ALL {
            comps.push(first[i.index()].differentiate(j));
        }
    }
    Ok(PolyField { shape: FieldShape::Matrix, comps })
}

fn curl_of(v: [&TensorPoly; 3]) -> [TensorPoly; 3] {
    let [vx, vy, vz] = v;
    [
        vz.differentiate(Axis::Y).sub(&vy.differentiate(Axis::Z)),
        vx.differentiate(Axis::Z).sub(&vz.differentiate(Axis::X)),
        vy.differentiate(Axis::X).sub(&vx.differentiate(Axis::Y)),
    ]
}

pub fn curl(v: &PolyField) -> Result<PolyField> {
    v.expect(FieldShape::Vector)?;
    Ok(PolyField::vector(curl_of([v.v(Axis::X), v.v(Axis::Y), v.v(Axis::Z)])))
}

pub fn div(v: &PolyField) -> Result<PolyField> {
    v.expect(FieldShape::Vector)?;
    let d = Axis::ALL.iter().fold(TensorPoly::zero(Degree3::EMPTY, v.frame().clone()), |acc, &a| {
        acc.add(&v.v(a).differentiate(a))
    });
    Ok(PolyField::scalar(d))
}

/// Row `i` of the result is the curl of row `i` of `s`.
pub fn curl_rows(s: &PolyField) -> Result<PolyField> {
    s.expect(FieldShape::Matrix)?;
    let mut comps = Vec::with_capacity(9);
    for i in Axis::ALL {
        comps.extend(curl_of([s.m(i, Axis::X), s.m(i, Axis::Y), s.m(i, Axis::Z)]));
    }
    Ok(PolyField { shape: FieldShape::Matrix, comps })
}

/// `curl^T s = (curl s^T)^T`, i.e. the curl applied to columns.
pub fn curl_t(s: &PolyField) -> Result<PolyField> {
    curl_rows(&s.transpose()?)?.transpose()
}

/// Row-wise divergence of a matrix field.
pub fn div_rows(t: &PolyField) -> Result<PolyField> {
    t.expect(FieldShape::Matrix)?;
    let frame = t.frame().clone();
    Ok(PolyField::vector(Axis::ALL.map(|i| {
        Axis::ALL
            .iter()
            .fold(TensorPoly::zero(Degree3::EMPTY, frame.clone()), |acc, &j| acc.add(&t.m(i, j).differentiate(j)))
    })))
}

pub fn sym_grad(v: &PolyField) -> Result<PolyField> {
    v.expect(FieldShape::Vector)?;
    let half = rat(1, 2);
    let mut comps = Vec::with_capacity(9);
    for i in Axis::ALL {
        for j in Axis::ALL {
            comps.push(v.v(i).differentiate(j).add(&v.v(j).differentiate(i)).scaled(&half));
        }
    }
    Ok(PolyField { shape: FieldShape::Matrix, comps })
}

/// `curl curl^T s`; symmetric whenever `s` is.
pub fn curl_curl_t(s: &PolyField) -> Result<PolyField> {
    curl_rows(&curl_t(s)?)
}

/// Gradient of a vector field as the matrix `(d_j v_i)`.
pub fn grad_vector(v: &PolyField) -> Result<PolyField> {
    v.expect(FieldShape::Vector)?;
    let mut comps = Vec::with_capacity(9);
    for i in Axis::ALL {
        for j in Axis::ALL {
            comps.push(v.v(i).differentiate(j));
        }
    }
    Ok(PolyField { shape: FieldShape::Matrix, comps })
}

/// Residuals of `curl sym grad v = 1/2 (grad curl v)^T` and
/// `curl^T sym grad v = 1/2 grad curl v`.
pub fn check_identity_curl_symgrad(v: &PolyField) -> Result<(PolyField, PolyField)> {
    let e = sym_grad(v)?;
    let gc = grad_vector(&curl(v)?)?.scaled(&rat(1, 2));
    let first = curl_rows(&e)?.sub(&gc.transpose()?);
    let second = curl_t(&e)?.sub(&gc);
    Ok((first, second))
}
