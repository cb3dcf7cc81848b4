//! The shipped abelian ℓ-group corpus: certificates, harness and oracle agreement.

use std::path::PathBuf;

use depdec_core::linear::{graph_point, sample_sigma_points};
use depdec_core::linear::abl::holds_at;
use depdec_core::oracle::brute_dependence;
use depdec_core::{decide, harness_independence, parse_problem, render_equation, DependenceProblem, Rational, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<(String, DependenceProblem)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/abl");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dep"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p.file_stem().unwrap().to_string_lossy().into_owned(), parse_problem(&text).unwrap())
        })
        .collect()
}

#[test]
fn corpus_shape() {
    let c = corpus();
    assert_eq!(c.len(), 30);
    assert_eq!(c.iter().filter(|(_, p)| !p.sigma.is_empty()).count(), 5);
}

/// Regression values; each verdict also agrees with the bounded brute-force
/// search below.
#[test]
fn frozen_verdicts() {
    let expected: [(&str, Option<&str>); 30] = [
        ("01_positive_part", Some("0 <= y1")),
        ("02_opposites", Some("0 ^ (y1 + y2) ^ (-y1 + -y2) = 0")),
        ("03_max_min", Some("0 <= y1 + -y2")),
        ("04_identity", None),
        ("05_single_var", None),
        ("06_zero", Some("0 ^ y1 ^ -y1 = 0")),
        ("07_negative_part", Some("0 <= -y1")),
        ("08_absolute_value", Some("0 <= y1")),
        ("09_duplicate", Some("0 ^ (y1 + -y2) ^ (-y1 + y2) = 0")),
        ("10_double", Some("0 ^ (y1 + y1 + -y2) ^ (-y1 + -y1 + y2) = 0")),
        ("11_rotation", None),
        ("12_max_only", None),
        ("13_var_and_max", Some("0 <= -y1 + y2")),
        ("14_var_and_positive_part", Some("0 ^ y1 ^ (y1 + -y2) ^ (-y1 + y2) v 0 ^ -y1 ^ y2 ^ -y2 = 0")),
        ("15_both_parts", Some("0 ^ y1 ^ y2 ^ -y2 v 0 ^ y1 ^ -y1 ^ -y2 = 0")),
        ("16_positive_negative_parts", Some("0 ^ y1 ^ y2 ^ -y2 v 0 ^ y1 ^ -y1 ^ y2 = 0")),
        ("17_max_and_sum", Some("0 <= y1 + y1 + -y2")),
        ("18_linear_triple", Some("0 ^ (y1 + y2 + -y3) ^ (-y1 + -y2 + y3) = 0")),
        ("19_three_vars", None),
        ("20_max_min_free", Some("0 <= y1 + -y2")),
        ("21_shear", None),
        ("22_median", None),
        ("23_tripled_positive", None),
        ("24_clipped_pair", Some("0 ^ (y1 + -y2) ^ (-y1 + y2) v 0 ^ -y1 ^ (y1 + -y2) v 0 ^ (-y1 + y2) ^ y1 v 0 ^ y1 ^ -y1 = 0")),
        ("25_max_with_zero_and_var", Some("0 ^ y1 ^ (y1 + -y2) = 0")),
        ("26_sigma_equal", Some("0 ^ (y1 + -y2) ^ (-y1 + y2) = 0")),
        ("27_sigma_nonnegative", Some("0 <= y1")),
        ("28_sigma_ordered", Some("0 <= -y1 + y2")),
        ("29_sigma_collapse", None),
        ("30_sigma_halfplane", Some("0 <= y2")),
    ];
    let got: Vec<(String, Option<String>)> = corpus()
        .into_iter()
        .map(|(name, p)| (name, decide(&p).unwrap().witness().map(render_equation)))
        .collect();
    for ((name, w), (ename, ew)) in got.iter().zip(expected) {
        assert_eq!(name, ename);
        assert_eq!(w.as_deref(), ew, "{name}");
    }
}

#[test]
fn certificates_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, p) in corpus() {
        let v = decide(&p).unwrap();
        match &v {
            Verdict::Dependent { witness, .. } => {
                let gap = v.gap_point().expect("abelian witnesses carry a gap point");
                let ys: Vec<String> = (1..=p.n()).map(|i| format!("y{i}")).collect();
                let point = ys
                    .iter()
                    .zip(gap)
                    .map(|(y, q)| (y.clone(), q.parse::<Rational>().unwrap()))
                    .collect();
                assert!(!holds_at(witness, &point).unwrap(), "{name}: witness holds at the gap point");
                let xs = p.x_vars();
                for x in sample_sigma_points(&p.sigma, &xs, 1000, &mut rng).unwrap() {
                    let g = graph_point(&p.terms, &x).unwrap();
                    assert!(holds_at(witness, &g).unwrap(), "{name}: witness fails at a graph point");
                }
            }
            Verdict::Independent { .. } => {
                let report = harness_independence(&p, 500, 6, 11, None).unwrap();
                assert_eq!(report.checked, 500);
                assert!(report.passed(), "{name}: {:?}", report.violations);
            }
        }
    }
}

#[test]
fn engine_agrees_with_brute_force() {
    for (name, p) in corpus() {
        let engine = decide(&p).unwrap().is_dependent();
        let brute = brute_dependence(&p, 7).unwrap();
        if let Some(w) = &brute {
            assert!(engine, "{name}: brute force found {}", render_equation(w));
        }
        if !engine {
            assert!(brute.is_none());
        }
    }
}
