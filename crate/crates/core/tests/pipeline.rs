use ffgeom::gen::{from_csv, generate, to_csv, uniform, GeneratorSpec};
use ffgeom::kinematic::bisector_decomposition;
use ffgeom::stats::{bisector_energy, check_identities, distance_profile, triangle_counts};
use ffgeom::structure::{claim_t2_pipeline, rich_curves, rich_threshold};
use ffgeom::{Curve, FieldCtx, PointSet};

fn model(m: &str, p: u64, seed: u64) -> PointSet {
    generate(&GeneratorSpec::parse(m, p, seed).unwrap()).unwrap()
}

#[test]
fn rich_parallel_lines_are_found() {
    // 3 lines × 20 points: k = ⌈√480⌉ = 22 misses them, 2 × 25 does not
    let a = model("parallel_lines:2@50", 31, 3);
    let fam = rich_curves(&a, rich_threshold(a.len()));
    assert_eq!(rich_threshold(50), 20);
    assert_eq!(fam.len(), 2);
    assert!(fam.curves.iter().all(|c| matches!(c.curve, Curve::Line(_)) && c.count == 25 && c.exclusive == 25));
    assert!(fam.checks().all_pass());
}

#[test]
fn isotropic_line_is_degenerate() {
    for n in [2, 5, 13] {
        let a = model(&format!("isotropic_line@{n}"), 13, 1);
        assert_eq!(distance_profile(&a).unwrap().delta0, 0);
        assert_eq!(triangle_counts(&a).t_star, 0);
        assert_eq!(bisector_energy(&a).b_star, 0);
    }
}

#[test]
fn every_suite_passes_on_generated_sets() {
    let cases = [
        ("uniform@40", 13),
        ("line@13+uniform@8", 13),
        ("isotropic_line@6+uniform@14", 13),
        ("grid:4x4+uniform@6", 11),
        ("circle@10+uniform@10", 11),
        ("uniform@30", 7),
    ];
    for (i, (m, p)) in cases.iter().enumerate() {
        let a = model(m, *p, 40 + i as u64);
        let rep = check_identities(&a);
        assert!(rep.all_pass(), "{m}: {:?}", rep.failures());
        let rep = bisector_decomposition(&a).unwrap();
        assert!(rep.all_pass(), "{m}: {:?}", rep.failures());
        let t2 = claim_t2_pipeline(&a, None).unwrap();
        assert!(t2.report.all_pass(), "{m}: {:?}", t2.report.failures());
    }
}

#[test]
fn csv_round_trip_preserves_statistics() {
    let a = uniform(&FieldCtx::new(31).unwrap(), 60, 9).unwrap();
    let text = to_csv(&a);
    let b = from_csv(&text, "reloaded").unwrap();
    assert_eq!(to_csv(&b), text);
    assert_eq!(triangle_counts(&a).t_star, triangle_counts(&b).t_star);
    assert_eq!(bisector_energy(&a), bisector_energy(&b));
}
