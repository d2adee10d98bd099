use super::*;
use crate::algebra::{rational, StructureConstants};
use crate::builtins;
use crate::geometry::{invariant_frame, structure_constants, GroupLaw, Splitting, Variant};

fn setup(name: &str) -> (GroupLaw, StructureConstants) {
    let g = builtins::group(name).unwrap();
    let s = Splitting::from_group(&g, Variant::Tilde);
    let c = structure_constants(&invariant_frame(&s, &g.identity).unwrap(), &g.identity).unwrap();
    (g, c)
}

const MODULES: [CoefficientModule; 6] = [
    CoefficientModule::Trivial,
    CoefficientModule::Adjoint,
    CoefficientModule::Coadjoint,
    CoefficientModule::Tensor { upper: 1, lower: 1 },
    CoefficientModule::Power(2),
    CoefficientModule::Power(3),
];

#[test]
fn known_betti_numbers() {
    let (_, h) = setup("heisenberg3");
    assert_eq!(
        betti_table(&ce_matrices(&h, CoefficientModule::Trivial, 3).unwrap()).unwrap(),
        vec![1, 2, 2, 1]
    );
    let (_, a) = setup("affine2");
    assert_eq!(
        betti_table(&ce_matrices(&a, CoefficientModule::Trivial, 2).unwrap()).unwrap(),
        vec![1, 1, 0]
    );
    let sl2 = builtins::sl2();
    assert_eq!(
        betti_table(&ce_matrices(&sl2, CoefficientModule::Coadjoint, 2).unwrap()).unwrap(),
        vec![0, 0, 0]
    );
    let (_, ab) = setup("abelian:2");
    let z = ce_matrices(&ab, CoefficientModule::Trivial, 2).unwrap();
    assert!(z.d.iter().all(QMatrix::is_zero));
    assert_eq!(betti_table(&z).unwrap(), vec![1, 2, 1]);
}

#[test]
fn horizontal_route_equals_oracle_matrices() {
    for name in ["abelian:2", "heisenberg3", "affine2"] {
        let (g, c) = setup(name);
        for module in MODULES {
            let ce = ce_matrices(&c, module, g.dim).unwrap();
            let il = ilhc_matrices(&g, module, g.dim, &g.identity).unwrap();
            assert_eq!(ce.d, il.d, "{name} {module}");
            assert_eq!(betti_table(&ce).unwrap(), betti_table(&il).unwrap());
        }
    }
}

#[test]
fn abelian_coadjoint_is_constant_forms() {
    let (g, _) = setup("abelian:2");
    let il = ilhc_matrices(&g, CoefficientModule::Coadjoint, 2, &g.identity).unwrap();
    assert_eq!(betti_table(&il).unwrap(), vec![2, 4, 2]);
}

#[test]
fn base_point_does_not_change_betti_numbers() {
    for (name, base) in [("heisenberg3", vec![2, -1, 3]), ("affine2", vec![3, -2])] {
        let (g, c) = setup(name);
        let b: Vec<_> = base.into_iter().map(rational).collect();
        let il = ilhc_matrices(&g, CoefficientModule::Coadjoint, g.dim, &b).unwrap();
        let ce = ce_matrices(&c, CoefficientModule::Coadjoint, g.dim).unwrap();
        assert_eq!(betti_table(&il).unwrap(), betti_table(&ce).unwrap(), "{name}");
    }
}

#[test]
fn hat_complex_is_trivial_copies() {
    let (g, c) = setup("heisenberg3");
    let hat = hat35_matrices(&g, CoefficientModule::Coadjoint, 3, &g.identity).unwrap();
    let oracle = trivial_copies(&c, 3, 3).unwrap();
    assert_eq!(betti_table(&hat).unwrap(), vec![3, 6, 6, 3]);
    assert_eq!(betti_table(&oracle).unwrap(), vec![3, 6, 6, 3]);
    let (g, c) = setup("affine2");
    let hat = hat35_matrices(&g, CoefficientModule::Coadjoint, 2, &g.identity).unwrap();
    assert_eq!(
        betti_table(&hat).unwrap(),
        betti_table(&trivial_copies(&c, 2, 2).unwrap()).unwrap()
    );
}

#[test]
fn biinvariant_subcomplex_matches_invariant_cochains() {
    for name in ["abelian:2", "heisenberg3", "affine2"] {
        let (g, c) = setup(name);
        for module in [
            CoefficientModule::Trivial,
            CoefficientModule::Coadjoint,
            CoefficientModule::Adjoint,
        ] {
            let route = biinv36_matrices(&g, module, g.dim, &g.identity).unwrap();
            let oracle = ce_invariant_matrices(&c, module, g.dim).unwrap();
            assert_eq!(route.dims(), oracle.dims(), "{name} {module}");
            assert_eq!(
                betti_table(&route).unwrap(),
                betti_table(&oracle).unwrap(),
                "{name} {module}"
            );
        }
    }
}

#[test]
fn double_complex_rows_match_tensor_powers() {
    for name in ["heisenberg3", "affine2"] {
        let (g, c) = setup(name);
        for m in 1..=3 {
            let row = ilhdc_row_matrices(&g, m, g.dim).unwrap();
            let oracle = ce_matrices(&c, CoefficientModule::Power(m - 1), g.dim).unwrap();
            assert_eq!(row.d, oracle.d, "{name} m={m}");
        }
        let first = ilhdc_row_matrices(&g, 1, g.dim).unwrap();
        let trivial = ce_matrices(&c, CoefficientModule::Trivial, g.dim).unwrap();
        assert_eq!(betti_table(&first).unwrap(), betti_table(&trivial).unwrap());
    }
}

#[test]
fn truncated_degrees_use_the_next_differential() {
    let (_, h) = setup("heisenberg3");
    let t = ce_matrices(&h, CoefficientModule::Trivial, 1).unwrap();
    assert_eq!(t.d.len(), 2);
    assert_eq!(betti_table(&t).unwrap(), vec![1, 2]);
}

#[test]
fn modules_are_representations() {
    let c = builtins::sl2();
    for module in MODULES {
        assert!(module.is_representation(&c), "{module}");
    }
    for text in ["trivial", "adjoint", "coadjoint", "tensor:1,1", "power:3"] {
        let m: CoefficientModule = text.parse().unwrap();
        assert_eq!(m.to_string(), text);
    }
    assert!("tensor:1".parse::<CoefficientModule>().is_err());
}

#[test]
fn jacobi_failure_is_an_error() {
    let bad = StructureConstants::from_brackets(
        3,
        &[(1, 2, 3, rational(1)), (2, 3, 2, rational(1)), (1, 3, 1, rational(1))],
    )
    .unwrap();
    assert!(matches!(
        ce_matrices(&bad, CoefficientModule::Trivial, 2),
        Err(CohomologyError::Algebra(_))
    ));
}
