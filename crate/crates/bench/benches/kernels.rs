use criterion::{black_box, criterion_group, criterion_main, Criterion};

use llg_core::builtins::group;
use llg_core::cohomology::{hat35_matrices, ilhc_matrices, CoefficientModule};
use llg_core::expr::identity::IdentityConfig;
use llg_core::forms::random::{random_form_on_t, random_nonlinear};
use llg_core::forms::{dhat, dtilde, SlotKind};
use llg_core::geometry::{Splitting, Variant};

fn rank(c: &mut Criterion) {
    let g = group("heisenberg3").unwrap();
    let complex = hat35_matrices(&g, CoefficientModule::Coadjoint, 3, &g.identity).unwrap();
    let widest = complex.d.iter().max_by_key(|m| m.rows() * m.cols()).unwrap().clone();
    c.bench_function("rank heisenberg3 hat35 coadjoint", |b| {
        b.iter(|| black_box(&widest).rank())
    });
}

fn assemble(c: &mut Criterion) {
    let g = group("affine2").unwrap();
    c.bench_function("ilhc affine2 adjoint", |b| {
        b.iter(|| ilhc_matrices(black_box(&g), CoefficientModule::Adjoint, 2, &g.identity).unwrap())
    });
}

fn differentials(c: &mut Criterion) {
    let g = group("heisenberg3").unwrap();
    let s = Splitting::from_group(&g, Variant::Tilde);
    let conn = s.connection().swapped();
    let f = random_form_on_t(3, 1, &[SlotKind::Vector], false, 11);
    c.bench_function("dhat heisenberg3 degree 1", |b| b.iter(|| dhat(&conn, black_box(&f))));
    let w = random_nonlinear(3, 2, 1, 11);
    c.bench_function("dtilde heisenberg3 two points degree 1", |b| {
        b.iter(|| dtilde(&s, black_box(&w)))
    });
}

fn identities(c: &mut Criterion) {
    let g = group("affine2").unwrap();
    let cfg = IdentityConfig::default();
    c.bench_function("group axioms affine2", |b| b.iter(|| g.verify_axioms(black_box(&cfg))));
}

criterion_group!(benches, rank, assemble, differentials, identities);
criterion_main!(benches);
