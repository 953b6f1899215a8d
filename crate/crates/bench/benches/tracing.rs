use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fluxvol::tracer::{return_to_section, return_to_uline};
use fluxvol::{FieldModel, Rhs, Section, TraceSpec, UlineSearch};
use fluxvol_bench::{standard_field, REGION_STARTS};

fn transit(c: &mut Criterion) {
    let field = standard_field();
    let x0 = field.section_to_chart([0.2, 0.0]);
    c.bench_function("toroidal transit", |b| {
        b.iter(|| {
            let spec = TraceSpec::new(&field, Rhs::B, black_box(x0));
            return_to_section(&spec, Section::ToroidalPlane, 1).unwrap()
        })
    });
}

fn uline_return(c: &mut Criterion) {
    let field = standard_field();
    let mut group = c.benchmark_group("u-line return along v");
    for (name, y) in REGION_STARTS {
        let x0 = field.section_to_chart([y, 0.0]);
        group.bench_function(name, |b| {
            b.iter(|| {
                let spec = TraceSpec::new(&field, Rhs::V, black_box(x0));
                return_to_uline(&spec, 1, UlineSearch::default()).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, transit, uline_return);
criterion_main!(benches);
