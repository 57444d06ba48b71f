use std::path::{Path, PathBuf};
use std::process::Command;

use henselian::{parse_system, MultiPoly, RingContext, Scalar, SystemSpec};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_henselian")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn exit_codes_from_binary() {
    let sqrt6 = data("sqrt6.sys");
    let parabola = data("parabola.sys");
    assert_eq!(run(&["lift", sqrt6.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["lift", "/definitely/not/here.sys"]).0, 2);
    // base point 1 is not the origin
    let (code, _, err) = run(&["solve", sqrt6.to_str().unwrap(), "--y", "5"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("origin"));
    assert_eq!(run(&["sample", parabola.to_str().unwrap(), "--m", "1", "--level", "7"]).0, 4);
    assert_eq!(run(&["sample", parabola.to_str().unwrap(), "--m", "2", "--level", "1", "--avoid", "Y - X^2", "--budget", "20"]).0, 5);
    assert_eq!(run(&["sample", parabola.to_str().unwrap(), "--m", "2", "--level", "1", "--avoid", "Z"]).0, 2);
}

#[test]
fn parse_errors_name_the_location() {
    let dir = std::env::temp_dir().join(format!("henselian-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.sys");
    std::fs::write(&file, "ring zp p=5 cap=3\nvars X Y\npoly f = X^2 + Z\n").unwrap();
    let (code, _, err) = run(&["lift", file.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3, column 16"), "{err}");
    assert!(err.contains("undefined variable 'Z'"), "{err}");
    std::fs::write(&file, "ring zp p=4 cap=2\nvars X\npoly f = X\n").unwrap();
    let (code, _, err) = run(&["lift", file.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("non-prime"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn example_files_round_trip() {
    for name in ["sqrt6.sys", "node.sys", "parabola.sys"] {
        let spec = parse_system(&std::fs::read_to_string(data(name)).unwrap()).unwrap();
        assert_eq!(parse_system(&spec.to_string()).unwrap(), spec, "{name}");
    }
}

fn names(n: usize) -> Vec<String> {
    ["X", "Y", "Z"][..n].iter().map(|s| s.to_string()).collect()
}

fn arb_scalar(ctx: RingContext) -> impl Strategy<Value = Scalar> {
    let p = ctx.prime() as i64;
    match ctx.backend() {
        henselian::Backend::PAdic => (-50i64..50).prop_map(move |c| ctx.scalar(c)).boxed(),
        henselian::Backend::Series => proptest::collection::vec(0..p, 0..4)
            .prop_map(move |cs| Scalar::Series(henselian::FpPoly::from_coeffs(p as u64, cs.into_iter().map(|c| c as u64).collect())))
            .boxed(),
    }
}

fn arb_poly(ctx: RingContext, vars: Vec<String>) -> impl Strategy<Value = MultiPoly> {
    let n = vars.len();
    let term = (proptest::collection::vec(0u32..3, n), arb_scalar(ctx));
    proptest::collection::vec(term, 0..5).prop_map(move |terms| MultiPoly::from_terms(ctx, &vars, terms))
}

fn arb_spec() -> impl Strategy<Value = SystemSpec> {
    let ctxs = vec![
        RingContext::padic(5, 4).unwrap(),
        RingContext::padic(2, 3).unwrap(),
        RingContext::series(5, 3).unwrap(),
        RingContext::series(2, 4).unwrap(),
    ];
    (proptest::sample::select(ctxs), 1usize..=3).prop_flat_map(|(ctx, n)| {
        let vars = names(n);
        let point = proptest::option::of(proptest::collection::vec(arb_scalar(ctx), n));
        (proptest::collection::vec(arb_poly(ctx, vars.clone()), 1..=3), point, proptest::option::of(arb_poly(ctx, vars.clone())), 0usize..3).prop_map(move |(polys, point, avoid, role)| {
            let s = polys.len();
            let role = match role {
                0 if s == n => Some(henselian::Role::Square),
                1 if s < n => Some(henselian::Role::Implicit { r: n - s }),
                2 if n > 1 => Some(henselian::Role::Variety { dim: 1 }),
                _ => None,
            };
            SystemSpec {
                ring: ctx,
                vars: vars.clone(),
                polys: polys.into_iter().enumerate().map(|(i, p)| (format!("p{i}"), p)).collect(),
                point,
                role,
                avoid,
            }
        })
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(spec in arb_spec()) {
        let text = spec.to_string();
        let back = parse_system(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, spec);
    }
}
