use num_traits::Zero;
use proptest::prelude::*;

use cuboid_complex::assembly::{assemble_space, interpolate, reconstruct_local, Operator};
use cuboid_complex::elements::{FamilyId, FamilyKind};
use cuboid_complex::linalg::Arithmetic;
use cuboid_complex::mesh::CuboidMesh;
use cuboid_complex::polytensor::{int, rat, Rational};
use cuboid_complex::random::rng;
use cuboid_complex::verify::{preimage_trials, verify_complex, ComplexKind};

/// Strictly increasing breakpoints from positive rational gaps.
fn axis(cells: usize) -> impl Strategy<Value = Vec<Rational>> {
    (-3i64..3, prop::collection::vec((1i64..6, 1i64..5), cells)).prop_map(|(start, gaps)| {
        let mut out = vec![int(start)];
        for (p, q) in gaps {
            let next = out.last().unwrap() + rat(p, q);
            out.push(next);
        }
        out
    })
}

fn two_cell_mesh() -> impl Strategy<Value = CuboidMesh> {
    (axis(2), axis(1), axis(1), 0usize..3).prop_map(|(a, b, c, rot)| {
        let mut axes = [a, b, c];
        axes.rotate_left(rot);
        let [x, y, z] = axes;
        CuboidMesh::new(x, y, z).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reconstructions_interpolate_back_to_the_same_vector(mesh in two_cell_mesh(), seed in any::<u64>()) {
        for (kind, k) in [(FamilyKind::U, 3), (FamilyKind::Sigma, 3), (FamilyKind::Gamma, 2), (FamilyKind::X, 2)] {
            let space = assemble_space(FamilyId::new(kind, k).unwrap(), &mesh).unwrap();
            let v = cuboid_complex::assembly::random_vector(&space, &mut rng(seed));
            let back = interpolate(&space, |c, _| Ok(reconstruct_local(&space, &v, c))).unwrap();
            prop_assert_eq!(back, v);
        }
    }

    #[test]
    fn exactness_does_not_depend_on_cell_shape(mesh in two_cell_mesh()) {
        for c in [ComplexKind::GradGrad, ComplexKind::ElasticityReduced] {
            let exact = verify_complex(c, c.min_order(), &mesh, Arithmetic::Rational, 0).unwrap();
            let float = verify_complex(c, c.min_order(), &mesh, Arithmetic::Float, 0).unwrap();
            prop_assert!(exact.fully_exact(), "{:?}", exact);
            prop_assert_eq!(exact.ranks, float.ranks);
        }
    }

    #[test]
    fn preimages_on_stretched_meshes(mesh in two_cell_mesh(), seed in any::<u64>()) {
        for c in ComplexKind::ALL {
            prop_assert!(preimage_trials(c, c.min_order(), &mesh, 2, seed).unwrap().passed());
        }
    }
}

#[test]
fn numbering_is_a_function_of_the_breakpoints() {
    let mesh = CuboidMesh::unit_box([2, 2, 1]).unwrap();
    let family = FamilyId::new(FamilyKind::XiRed, 3).unwrap();
    let a = assemble_space(family, &mesh).unwrap();
    let b = assemble_space(family, &mesh.clone()).unwrap();
    assert_eq!(a.keys, b.keys);
    assert_eq!(a.cell_dofs, b.cell_dofs);
}

#[test]
fn operator_matrices_are_reproducible() {
    let mesh = CuboidMesh::unit_box([2, 1, 1]).unwrap();
    let u = assemble_space(FamilyId::new(FamilyKind::U, 3).unwrap(), &mesh).unwrap();
    let s = assemble_space(FamilyId::new(FamilyKind::Sigma, 3).unwrap(), &mesh).unwrap();
    let m1 = cuboid_complex::assembly::operator_matrix(&u, Operator::GradGrad, &s).unwrap();
    let m2 = cuboid_complex::assembly::operator_matrix(&u, Operator::GradGrad, &s).unwrap();
    assert_eq!(m1, m2);
    assert!(m1.triplets().all(|(_, _, v)| !v.is_zero()));
}
