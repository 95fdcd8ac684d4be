use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use star_order_lab::cli::{run, CommandResult, EXIT_INPUT_ERROR, EXIT_NEGATIVE, EXIT_SUCCESS, EXIT_UNDECIDED, SCHEMA};
use star_order_lab::cone::{cone_member, separate, PolyhedralCone};
use star_order_lab::gns::GnsRepresentation;
use star_order_lab::moments::AtomicMeasure;
use star_order_lab::poly::{AnyPolynomial, Mode};
use star_order_lab::sos::{verify_certificate, AnyCertificate, DualWitness};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> CommandResult {
    let r = run(std::iter::once("star-order-lab").chain(args.iter().copied()));
    assert_eq!(r.payload["schema"], json!(SCHEMA), "{:?}", r.payload);
    r
}

fn error_kind(r: &CommandResult) -> &str {
    r.payload["error"]["kind"].as_str().unwrap_or("")
}

#[test]
fn sos_verify_exact_identity() {
    let r = cli(&[
        "sos",
        "verify",
        &fixture("pq.json"),
        &fixture("pq_cert.json"),
        "--exact",
    ]);
    assert_eq!(r.exit_code, EXIT_SUCCESS);
    assert_eq!(r.payload["valid"], json!(true));
    assert_eq!(r.payload["mode"], json!("exact"));
}

#[test]
fn sos_verify_wrong_target_is_negative() {
    let r = cli(&["sos", "verify", &fixture("xsq.json"), &fixture("pq_cert.json")]);
    assert_ne!(r.exit_code, EXIT_SUCCESS);
}

#[test]
fn sos_check_emits_reparseable_certificate() {
    let r = cli(&["sos", "check", &fixture("xsq.json")]);
    assert_eq!(r.exit_code, EXIT_SUCCESS, "{:?}", r.payload);
    let cert = AnyCertificate::from_json(&r.payload["certificate"]).unwrap();
    assert_eq!(cert.to_json(), r.payload["certificate"]);
    let target = AnyPolynomial::from_json(
        &serde_json::from_str(&std::fs::read_to_string(fixture("xsq.json")).unwrap()).unwrap(),
    )
    .unwrap()
    .to_float();
    assert!(verify_certificate(&target, &cert.to_float(), Mode::Float).unwrap());
}

#[test]
fn sos_check_on_positive_non_square_is_undecided() {
    let r = cli(&["sos", "check", &fixture("positive_non_square.json"), "--max-iter", "2000"]);
    assert_eq!(r.exit_code, EXIT_UNDECIDED, "{:?}", r.payload);
}

#[test]
fn sos_witness_round_trips() {
    let r = cli(&["sos", "witness", &fixture("positive_non_square.json")]);
    assert_eq!(r.exit_code, EXIT_SUCCESS);
    let w = DualWitness::from_json(&r.payload["witness"]).unwrap();
    assert_eq!(w.to_json(), r.payload["witness"]);
    assert!(w.value <= -1e-3);
}

#[test]
fn sos_witness_absent_for_square() {
    let r = cli(&["sos", "witness", &fixture("xsq.json")]);
    assert_eq!(r.exit_code, EXIT_NEGATIVE);
    assert_eq!(r.payload["status"], json!("not_found"));
}

#[test]
fn gns_build_two_atoms() {
    let r = cli(&["gns", "build", &fixture("two_atoms.json"), "--degree", "1"]);
    assert_eq!(r.exit_code, EXIT_SUCCESS);
    let rep = GnsRepresentation::from_json(&r.payload["representation"]).unwrap();
    assert_eq!(rep.quotient_dim, 2);
    assert_eq!(rep.to_json(), r.payload["representation"]);
}

#[test]
fn gns_quadrature_single_atom() {
    let r = cli(&["gns", "quadrature", &fixture("evaluation.json")]);
    assert_eq!(r.exit_code, EXIT_SUCCESS, "{:?}", r.payload);
    let m = AtomicMeasure::from_json(&r.payload["measure"]).unwrap();
    assert_eq!(m.to_json(), r.payload["measure"]);
    assert_eq!(m.len(), 1);
    let a = &m.atoms()[0];
    assert!((a.point[0] - 0.5).abs() < 1e-9 && (a.point[1] + 0.25).abs() < 1e-9);
    assert!((a.weight - 1.0).abs() < 1e-9);
}

#[test]
fn gns_check_reports_residuals() {
    let r = cli(&["gns", "check", &fixture("evaluation.json")]);
    assert_eq!(r.exit_code, EXIT_SUCCESS, "{:?}", r.payload);
    assert_eq!(r.payload["flat"], json!(true));
    let not_flat = cli(&["gns", "check", &fixture("two_atoms.json"), "--degree", "1"]);
    assert_eq!(not_flat.exit_code, EXIT_NEGATIVE);
}

#[test]
fn gns_build_rejects_non_psd() {
    let r = cli(&["gns", "build", &fixture("not_psd.json")]);
    assert_eq!(r.exit_code, EXIT_INPUT_ERROR);
    assert_eq!(error_kind(&r), "NotPositive");
}

#[test]
fn cone_examples() {
    let sep = cli(&["cone", "separate", &fixture("orthant2.json"), &fixture("vec_neg.json")]);
    assert_eq!(sep.exit_code, EXIT_SUCCESS);
    let omega: Vec<f64> = serde_json::from_value(sep.payload["functional"].clone()).unwrap();
    assert!(omega.iter().all(|w| *w >= 0.0) && -omega[0] < 0.0);

    assert_eq!(
        cli(&["cone", "member", &fixture("orthant2.json"), &fixture("vec_ones.json")]).exit_code,
        EXIT_SUCCESS
    );
    assert_eq!(
        cli(&["cone", "member", &fixture("orthant2.json"), &fixture("vec_neg.json")]).exit_code,
        EXIT_NEGATIVE
    );
    let is_member = cli(&["cone", "separate", &fixture("orthant2.json"), &fixture("vec_ones.json")]);
    assert_eq!(is_member.exit_code, EXIT_NEGATIVE);
    assert_eq!(is_member.payload["status"], json!("member"));

    let rays = cli(&["cone", "rays", &fixture("orthant2.json")]);
    assert_eq!(rays.payload["rays"], json!([[1.0, 0.0], [0.0, 1.0]]));
    let dec = cli(&["cone", "decompose", &fixture("orthant2.json"), &fixture("omega.json")]);
    assert_eq!(dec.exit_code, EXIT_SUCCESS);
    assert_eq!(dec.payload["terms"].as_array().unwrap().len(), 2);
}

#[test]
fn cone_dimension_mismatch_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v3.json");
    std::fs::write(&v, "[1, 2, 3]").unwrap();
    let r = cli(&["cone", "member", &fixture("orthant2.json"), v.to_str().unwrap()]);
    assert_eq!(r.exit_code, EXIT_INPUT_ERROR);
}

#[test]
fn random_cone_exit_codes_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let m = rng.gen_range(1..=4);
        let gens: Vec<Vec<f64>> = (0..rng.gen_range(1..=m + 2))
            .map(|_| {
                let mut g: Vec<f64> = (0..m).map(|_| f64::from(rng.gen_range(-2i32..=2))).collect();
                if g.iter().all(|x| *x == 0.0) {
                    g[0] = 1.0;
                }
                g
            })
            .collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let cone = PolyhedralCone::new(m, gens.clone()).unwrap();
        let cone_path = dir.path().join(format!("cone{case}.json"));
        let vec_path = dir.path().join(format!("vec{case}.json"));
        std::fs::write(&cone_path, json!({"dim": m, "generators": gens}).to_string()).unwrap();
        std::fs::write(&vec_path, json!(v).to_string()).unwrap();
        let (c, x) = (cone_path.to_str().unwrap(), vec_path.to_str().unwrap());

        let member = cone_member(&cone, &v).unwrap();
        let r = cli(&["cone", "member", c, x]);
        assert_eq!(r.exit_code, if member { EXIT_SUCCESS } else { EXIT_NEGATIVE });
        let s = cli(&["cone", "separate", c, x]);
        match separate(&cone, &v) {
            Ok(w) => {
                assert_eq!(s.exit_code, EXIT_SUCCESS);
                assert_eq!(s.payload["functional"], json!(w));
            }
            Err(e) => {
                assert_eq!(e.kind(), "IsMember");
                assert_eq!(s.exit_code, EXIT_NEGATIVE);
                assert_eq!(s.payload["status"], json!("member"));
            }
        }
    }
}

#[test]
fn riesz_examples() {
    let two = cli(&["riesz", "extremal", "--size", "2"]);
    assert_eq!(two.exit_code, EXIT_SUCCESS);
    assert_eq!(two.payload["functionals"], json!([[1.0, 0.0], [0.0, 1.0]]));
    let one = cli(&["riesz", "extremal", "--size", "1"]);
    assert_eq!(one.payload["functionals"], json!([[1.0]]));
    assert_eq!(cli(&["riesz", "extremal", "--size", "7"]).exit_code, EXIT_INPUT_ERROR);

    let rep = cli(&["riesz", "stdrep", &fixture("elements.json"), "--size", "3"]);
    assert_eq!(rep.exit_code, EXIT_SUCCESS);
    // Each value row lists one element's evaluations at the points of X.
    assert_eq!(rep.payload["values"], json!([[1.0, -2.0, 0.5], [0.0, 4.0, -1.0]]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cli(&["sos"]).exit_code, EXIT_INPUT_ERROR);
    assert_eq!(cli(&["frobnicate"]).exit_code, EXIT_INPUT_ERROR);
    assert_eq!(
        cli(&["sos", "check", "/nonexistent/file.json"]).exit_code,
        EXIT_INPUT_ERROR
    );
    let bad_tol = cli(&["gns", "check", &fixture("evaluation.json"), "--tol=-1"]);
    assert_eq!(bad_tol.exit_code, EXIT_INPUT_ERROR);
    assert_eq!(bad_tol.payload["error"]["field"], json!("--tol"));
}

fn binary(args: &[&str], tol_env: Option<&str>) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_star-order-lab"));
    cmd.args(args).env_remove("STAR_ORDER_TOL");
    if let Some(t) = tol_env {
        cmd.env("STAR_ORDER_TOL", t);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).unwrap())
}

#[test]
fn tolerance_flag_overrides_environment() {
    let f = fixture("evaluation.json");
    let (code, default) = binary(&["gns", "check", &f], None);
    assert_eq!(code, EXIT_SUCCESS);
    assert_eq!(default["tolerance"], json!(1e-7));
    let (_, env) = binary(&["gns", "check", &f], Some("1e-5"));
    assert_eq!(env["tolerance"], json!(1e-5));
    let (_, flag) = binary(&["gns", "check", &f, "--tol", "1e-3"], Some("1e-5"));
    assert_eq!(flag["tolerance"], json!(1e-3));
}

#[test]
fn binary_reports_errors_on_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_star-order-lab"))
        .args(["gns", "build", &fixture("not_psd.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT_ERROR));
    assert!(!out.stderr.is_empty());
    let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(payload["error"]["kind"], json!("NotPositive"));
}

fn json_noise() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::from),
        any::<i64>().prop_map(Value::from),
        (-1e6f64..1e6).prop_map(Value::from),
        "[a-z0-9/ ]{0,8}".prop_map(Value::from),
    ];
    let value = leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::from),
            prop::collection::vec(
                (
                    prop_oneof![
                        Just("arity".to_string()),
                        Just("terms".to_string()),
                        Just("exps".to_string()),
                        Just("re".to_string()),
                        Just("moments".to_string()),
                        Just("max_degree".to_string()),
                        Just("dim".to_string()),
                        Just("generators".to_string()),
                        Just("squares".to_string()),
                        "[a-z]{1,6}",
                    ],
                    inner
                ),
                0..4
            )
            .prop_map(|kv| Value::Object(kv.into_iter().collect())),
        ]
    });
    prop_oneof![value.prop_map(|v| v.to_string()), "[\\[\\]{}\",:0-9a-z .-]{0,40}",]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn malformed_input_never_crashes(text in json_noise(), which in 0usize..6) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("input.json");
        std::fs::write(&path, &text).unwrap();
        let p = path.to_str().unwrap();
        let orthant = fixture("orthant2.json");
        let args: Vec<&str> = match which {
            0 => vec!["sos", "check", p],
            1 => vec!["sos", "verify", p, p],
            2 => vec!["gns", "build", p],
            3 => vec!["gns", "quadrature", p],
            4 => vec!["cone", "member", &orthant, p],
            _ => vec!["riesz", "stdrep", p, "--size", "2"],
        };
        let r = cli(&args);
        prop_assert_ne!(error_kind(&r), "Internal");
        if r.exit_code != EXIT_SUCCESS {
            prop_assert!(r.exit_code == EXIT_INPUT_ERROR || r.exit_code == EXIT_NEGATIVE || r.exit_code == EXIT_UNDECIDED);
        }
    }
}
