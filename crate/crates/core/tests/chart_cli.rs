use std::path::PathBuf;
use std::process::Command;

use syntomic_core::chart::{
    compute, export_json, figure_specs, parse_json, render, ComputeRequest, FieldSpec, Format, ObjectKind,
};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn kn_chart(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kn-chart"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("kn-chart runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn golden_fixtures_match_byte_for_byte() {
    for spec in figure_specs() {
        let golden = std::fs::read_to_string(repo_root().join(format!("figures/{}.json", spec.name))).unwrap();
        let doc = compute(&spec.request).unwrap();
        assert_eq!(export_json(&doc), golden, "{}", spec.name);
        assert_eq!(parse_json(&golden).unwrap(), doc, "{} round trip", spec.name);
    }
}

#[test]
fn class_counts() {
    let count = |req: ComputeRequest| compute(&req).unwrap().entries.len();
    assert_eq!(count(ComputeRequest::new(ObjectKind::Tc, 2, 2)), 32);
    assert_eq!(count(ComputeRequest::new(ObjectKind::Tc, 3, 1)), 20);
    assert_eq!(count(ComputeRequest::new(ObjectKind::Thh, 2, 1).window(-40, -1)), 0);
}

#[test]
fn export_is_stable_across_runs() {
    let (c1, a, _) = kn_chart(&["export", "tc", "--p", "3", "--n", "1"]);
    let (c2, b, _) = kn_chart(&["export", "tc", "--p", "3", "--n", "1"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(a, std::fs::read_to_string(repo_root().join("figures/fig5.json")).unwrap());
}

#[test]
fn nygaard_axis_places_t_inverse_below_the_line() {
    let doc = parse_json(&std::fs::read_to_string(repo_root().join("figures/fig2.json")).unwrap()).unwrap();
    let e = doc.entries.iter().find(|e| e.label == "t⁻¹").unwrap();
    assert_eq!((e.stem, doc.y(e).unwrap()), (2, -1));
    let tikz = render(&doc, Format::Tikz, None).unwrap();
    assert!(tikz.contains("at (2,-1) {$t^{-1}$}"), "{tikz}");
}

#[test]
fn closed_field_chart_boxes_the_prime_field_classes() {
    let doc = compute(&ComputeRequest::new(ObjectKind::Tc, 2, 2).field(FieldSpec::AlgebraicallyClosed)).unwrap();
    let svg = render(&doc, Format::Svg, None).unwrap();
    assert_eq!(svg.matches("<rect").count(), 8);
    assert_eq!(svg.matches("<circle").count(), 24);
    let tikz = render(&doc, Format::Tikz, None).unwrap();
    assert_eq!(tikz.matches("[draw,").count(), 8);
    // A single-coefficient chart has nothing to distinguish.
    let plain = compute(&ComputeRequest::new(ObjectKind::Tc, 2, 2)).unwrap();
    assert_eq!(render(&plain, Format::Svg, None).unwrap().matches("<rect").count(), 0);
}

#[test]
fn overlapping_nodes_are_offset_not_dropped() {
    // TC(k(1)) at p = 5 has several generators in a single stem and weight.
    let doc = compute(&ComputeRequest::new(ObjectKind::K1Tc, 5, 1)).unwrap();
    let tikz = render(&doc, Format::Tikz, None).unwrap();
    assert_eq!(tikz.lines().filter(|l| l.starts_with("\\node")).count(), doc.entries.len());
    assert!(tikz.contains("yshift"));
    let svg = render(&doc, Format::Svg, None).unwrap();
    assert_eq!(svg.matches("<circle").count(), doc.entries.len());
    assert_eq!(render(&doc, Format::Svg, None).unwrap(), svg);
}

#[test]
fn render_reads_json_input() {
    let (code, out, _) = kn_chart(&["render", "--input", "figures/fig1.json", "--format", "svg"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("<circle").count(), 32);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["compute", "k1-k", "--p", "2", "--n", "1"][..],
        &["compute", "tc", "--p", "4"],
        &["compute", "tc", "--p", "2", "--n", "2", "--ideal", "(2,v1)"],
        &["compute", "tc", "--window", "5"],
        &["compute", "nonsense"],
        &["render", "--format", "png"],
        &["verify", "everything"],
    ] {
        let (code, _, err) = kn_chart(args);
        assert_eq!(code, 2, "{args:?}: {err}");
    }
}

#[test]
fn ideal_spellings_are_accepted() {
    let (code, out, _) = kn_chart(&["compute", "tc", "--p", "2", "--n", "2", "--ideal", "(2, v₁, v₂, v₃)"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# tc p=2 n=2 mod (2,v1,v2,v3): 32 classes"));
}

#[test]
fn verify_fails_on_a_corrupted_fixture() {
    let dir = std::env::temp_dir().join(format!("kn-chart-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(dir.join("transcription")).unwrap();
    let src = repo_root().join("figures");
    for spec in figure_specs() {
        let json = std::fs::read_to_string(src.join(format!("{}.json", spec.name))).unwrap();
        let json = if spec.name == "fig5" { json.replacen("\"stem\": 5,", "\"stem\": 6,", 1) } else { json };
        std::fs::write(dir.join(format!("{}.json", spec.name)), json).unwrap();
        let t = format!("transcription/{}.txt", spec.name);
        std::fs::copy(src.join(&t), dir.join(&t)).unwrap();
    }
    let (code, out, err) = kn_chart(&["verify", "figures", "--fixtures", dir.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, 1);
    assert!(out.contains("FAIL [figures] fig5"), "{out}");
    assert!(err.contains("first failure"));
}

#[test]
fn verify_figures_and_oracle_pass() {
    let (code, out, _) = kn_chart(&["verify", "figures", "--json"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 5);
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
    }
    let (code, _, _) = kn_chart(&["verify", "oracle"]);
    assert_eq!(code, 0);
}
