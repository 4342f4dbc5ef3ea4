//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use cuboid_complex::assembly::TraceSpec;
use cuboid_complex::elements::bubble::satisfies_bubble_constraints;
use cuboid_complex::elements::{bubble_basis_div_t, Component, FamilyId, FamilyKind};
use cuboid_complex::linalg::{exact_rank, Arithmetic, FLOAT_RANK_TOLERANCE};
use cuboid_complex::mesh::CuboidMesh;
use cuboid_complex::polytensor::{int, rat, Axis};
use cuboid_complex::verify::{
    assemble_complex, check_conformity, count_unconstrained_jumps, identify_kernel, identity_suite, preimage_trials,
    unisolvence_sweep, verify_complex, verify_dimensions, ComplexKind, JumpCheck,
};

const UNISOLVENCE_BUDGET: Duration = Duration::from_secs(60);
const PINNED_FLOAT_TOLERANCE: f64 = 1e-9;
const SEED: u64 = 2024;
const PREIMAGE_TRIALS: usize = 10;
const CONFORMITY_FIELDS: usize = 5;
const IDENTITY_FIELDS: usize = 50;

fn mesh(n: [usize; 3]) -> CuboidMesh {
    CuboidMesh::unit_box(n).unwrap()
}

fn ladder_meshes() -> Vec<CuboidMesh> {
    vec![mesh([1, 1, 1]), mesh([2, 1, 1]), mesh([2, 2, 2])]
}

fn audit_meshes() -> Vec<CuboidMesh> {
    vec![mesh([1, 1, 1]), mesh([2, 1, 1]), mesh([2, 2, 1]), mesh([2, 2, 2])]
}

fn stretched() -> CuboidMesh {
    CuboidMesh::new(vec![int(0), rat(1, 3), int(1)], vec![int(-1), rat(1, 2)], vec![int(0), rat(2, 7), rat(5, 4)]).unwrap()
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn failing(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", items.join(", "))
    }
}

fn unisolvency() -> Outcome {
    let started = Instant::now();
    let reports = unisolvence_sweep().unwrap();
    let elapsed = started.elapsed();
    let good = reports.iter().filter(|r| r.square && r.nonsingular).count();
    let bad: Vec<String> = reports.iter().filter(|r| !r.nonsingular).map(|r| format!("{}({})", r.family, r.k)).collect();
    outcome(
        good == 26 && reports.len() == 26 && elapsed < UNISOLVENCE_BUDGET,
        format!("{good}/{} nonsingular in {:.1} s (budget {} s){}", reports.len(), elapsed.as_secs_f64(), UNISOLVENCE_BUDGET.as_secs(), failing(&bad)),
    )
}

fn dimension_audit() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for m in audit_meshes() {
        for kind in FamilyKind::ALL {
            for k in [kind.min_order(), kind.min_order() + 1] {
                let r = verify_dimensions(FamilyId::new(kind, k).unwrap(), &m).unwrap();
                checked += 1;
                if !r.matches {
                    mismatches.push(format!("{} k={} {}: {} vs {}", r.family, k, r.mesh, r.formula, r.assembled));
                }
            }
        }
    }
    let cube = mesh([2, 2, 2]);
    let dim = |kind| verify_dimensions(FamilyId::new(kind, 3).unwrap(), &cube).unwrap().assembled as i64;
    let spot = [dim(FamilyKind::U), dim(FamilyKind::Sigma), dim(FamilyKind::Xi), dim(FamilyKind::Q)];
    let spot_ok = spot == [216, 882, 970, 300] && 4 - spot[0] + spot[1] - spot[2] + spot[3] == 0;
    // alternating sums equal the kernel dimension for every complex and mesh
    let mut sums_ok = true;
    for m in audit_meshes() {
        for c in ComplexKind::ALL {
            let d: Vec<i64> = c
                .families(c.min_order())
                .unwrap()
                .iter()
                .map(|f| verify_dimensions(*f, &m).unwrap().assembled as i64)
                .collect();
            sums_ok &= d[0] - d[1] + d[2] - d[3] == c.kappa() as i64;
        }
    }
    outcome(
        mismatches.is_empty() && spot_ok && sums_ok,
        format!("{checked} family/order/mesh triples, spot dims {spot:?}, alternating sums ok={sums_ok}{}", failing(&mismatches)),
    )
}

fn compositions() -> Outcome {
    let mut meshes = audit_meshes();
    meshes.push(stretched());
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in &meshes {
        for c in ComplexKind::ALL {
            let complex = assemble_complex(c, c.min_order(), m).unwrap();
            for (i, w) in complex.ops.windows(2).enumerate() {
                checked += 1;
                if !w[1].mul(&w[0]).is_zero() {
                    failures.push(format!("{c} {} D{}D{}", m.describe(), i + 1, i));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} products exactly zero{}", failing(&failures)))
}

fn exactness_ladders() -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for m in ladder_meshes() {
        for c in ComplexKind::ALL {
            let exact = verify_complex(c, c.min_order(), &m, Arithmetic::Rational, SEED).unwrap();
            let float = verify_complex(c, c.min_order(), &m, Arithmetic::Float, SEED).unwrap();
            let mut ok = exact.fully_exact() && exact.cohomology_dim == c.kappa() && float.ranks == exact.ranks;
            if m.num_cells() == 1 {
                let expected = if c.is_elasticity() { vec![138, 66, 36] } else { vec![60, 144, 54] };
                ok &= exact.ranks == expected;
            }
            if !ok {
                notes.push(format!("{c} {}: ranks {:?} float {:?}", exact.mesh, exact.ranks, float.ranks));
            }
            passed &= ok;
        }
    }
    outcome(passed, format!("4 complexes x 3 meshes exact, float ranks agree{}", failing(&notes)))
}

fn kernels() -> Outcome {
    let mut failures = Vec::new();
    for m in ladder_meshes() {
        for c in ComplexKind::ALL {
            let r = identify_kernel(c, c.min_order(), &m).unwrap();
            if !r.matches() {
                failures.push(format!("{r:?}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("kernel = interpolated P1 / rigid motions on 12 runs{}", failing(&failures)))
}

fn preimages() -> Outcome {
    let mut total = 0;
    let mut good = 0;
    for m in ladder_meshes() {
        for c in ComplexKind::ALL {
            let r = preimage_trials(c, c.min_order(), &m, PREIMAGE_TRIALS, SEED).unwrap();
            total += r.trials;
            good += usize::from(r.passed()) * r.trials;
        }
    }
    outcome(good == total, format!("{good}/{total} right-hand sides with exact, consistent preimages"))
}

fn conformity() -> Outcome {
    let cube = mesh([2, 2, 2]);
    let mut failures = Vec::new();
    let mut sampled = 0;
    for kind in FamilyKind::ALL {
        let r = check_conformity(FamilyId::new(kind, kind.min_order()).unwrap(), &cube, CONFORMITY_FIELDS, SEED).unwrap();
        sampled += r.faces_sampled;
        if r.failures > 0 {
            failures.push(format!("{}: {}", r.family, r.failures));
        }
    }
    let control = JumpCheck { normal: Axis::X, trace: TraceSpec::value(Component::Matrix(Axis::X, Axis::X)) };
    let jumping =
        count_unconstrained_jumps(FamilyId::new(FamilyKind::SigmaRed, 3).unwrap(), &cube, control, CONFORMITY_FIELDS, SEED).unwrap();
    outcome(
        failures.is_empty() && jumping > 0,
        format!("{sampled} face samples zero{}; reduced sigma_xx jumps across x-faces in {jumping}/{CONFORMITY_FIELDS} fields", failing(&failures)),
    )
}

fn bubbles() -> Outcome {
    let counts: Vec<usize> = [3, 4, 5].iter().map(|&k| bubble_basis_div_t(k).unwrap().triples.len()).collect();
    let constraints = [3, 4, 5].iter().all(|&k| bubble_basis_div_t(k).unwrap().triples.iter().all(satisfies_bubble_constraints));
    outcome(counts == [8, 40, 108] && constraints, format!("counts {counts:?}, constraints hold: {constraints}"))
}

fn identities() -> Outcome {
    let reports: Vec<_> = [2, 3].iter().map(|&k| identity_suite(k, IDENTITY_FIELDS, SEED).unwrap()).collect();
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    outcome(failures == 0, format!("{} fields at k=2,3, {failures} nonzero residuals", 2 * IDENTITY_FIELDS))
}

fn main() {
    assert_eq!(FLOAT_RANK_TOLERANCE, PINNED_FLOAT_TOLERANCE);
    // sanity: the float path really is independent of the exact one
    let probe = assemble_complex(ComplexKind::GradGrad, 3, &mesh([1, 1, 1])).unwrap();
    assert_eq!(exact_rank(&probe.ops[0], Arithmetic::Float), 60);

    let criteria: [Criterion; 9] = [
        ("unisolvency sweep", unisolvency),
        ("dimension audit", dimension_audit),
        ("complex property", compositions),
        ("exactness ladders", exactness_ladders),
        ("kernel identification", kernels),
        ("constructive surjectivity", preimages),
        ("conformity and jumps", conformity),
        ("bubble space", bubbles),
        ("identity suite", identities),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let r = check();
        all &= r.passed;
        println!(
            "[{}] {} {name}: {} ({:.1} s)",
            if r.passed { "PASS" } else { "FAIL" },
            i + 1,
            r.detail,
            started.elapsed().as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
