//! Traceless diagonal bubbles used by the coupled cell moments of the
//! reduced H(div) traceless element.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::nullspace;
use crate::polytensor::{int, Axis, Degree3, Frame, Rational, TensorPoly};

/// Basis of diagonal triples `(t_xx, t_yy, t_zz)` in `Q_{k-1}^3` with
/// `t_xx = 0` on both x-faces, `t_yy = 0` on both y-faces, `t_zz = 0` on both
/// z-faces and `t_xx + t_yy + t_zz = 0`, all on the reference cell.
#[derive(Clone, Debug)]
pub struct BubbleBasis {
    pub k: i64,
    pub triples: Vec<[TensorPoly; 3]>,
}

/// Expected size `2 (k-2)^2 (k+1)`.
pub fn bubble_count(k: i64) -> usize {
    (2 * (k - 2) * (k - 2) * (k + 1)) as usize
}

pub fn bubble_basis_div_t(k: i64) -> Result<BubbleBasis> {
    if k < 3 {
        return Err(Error::InadmissibleOrder { family: "bubble".into(), min: 3, k });
    }
    let deg = Degree3::new(k - 1, k - 1, k - 1);
    let n = deg.dim();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for axis in Axis::ALL {
        let a = axis.index();
        let block = a * n;
        // trace on the face where the axis coordinate is 0, then 1
        for end in [0usize, 1] {
            for e in deg.exponents().filter(|e| e[a] == 0) {
                let mut row = vec![Rational::zero(); 3 * n];
                for i in 0..=(k - 1) as usize {
                    if end == 0 && i > 0 {
                        break;
                    }
                    let mut f = e;
                    f[a] = i;
                    row[block + deg.index(f)] = Rational::one();
                }
                rows.push(row);
            }
        }
    }
    for flat in 0..n {
        let mut row = vec![Rational::zero(); 3 * n];
        for c in 0..3 {
            row[c * n + flat] = Rational::one();
        }
        rows.push(row);
    }
    let frame = Arc::new(Frame::reference());
    let triples = nullspace(rows, 3 * n)
        .into_iter()
        .map(|v| {
            std::array::from_fn(|c| TensorPoly::from_coeffs(deg, v[c * n..(c + 1) * n].to_vec(), frame.clone()))
        })
        .collect();
    Ok(BubbleBasis { k, triples })
}

/// Re-checks the defining constraints of one triple.
pub fn satisfies_bubble_constraints(triple: &[TensorPoly; 3]) -> bool {
    let sum = triple[0].add(&triple[1]).add(&triple[2]);
    if !sum.is_zero() {
        return false;
    }
    Axis::ALL.iter().all(|&a| {
        let p = &triple[a.index()];
        p.substitute(a, &int(0)).is_zero() && p.substitute(a, &int(1)).is_zero()
    })
}
