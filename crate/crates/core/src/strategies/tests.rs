use super::*;
use crate::lang::parse_str;
use crate::runtime::{run_test_at, Program};

fn project(text: &str) -> Project {
    Project::from_modules(vec![SourceModule::new("app.mini", text)]).unwrap()
}

fn options(ops: &[OperatorKind]) -> GenerationOptions {
    GenerationOptions {
        operators: ops.to_vec(),
        ..GenerationOptions::default()
    }
}

#[test]
fn normalize_splits_only_mutable_declarations() {
    let p = project("fn f() { var a = 1 + 2; var b = 7; print(a + b); }");
    let n = normalize(&p, &options(&[OperatorKind::BMA])).unwrap();
    assert_eq!(
        n.modules[0].text,
        "fn f() {\n  var a;\n  a = 1 + 2;\n  var b = 7;\n  print(a + b);\n}\n"
    );
    // Without the operator nothing is split.
    let n = normalize(&p, &options(&[OperatorKind::NI])).unwrap();
    assert!(n.modules[0].text.contains("var a = 1 + 2;"));
}

#[test]
fn normalize_keeps_excluded_modules_verbatim() {
    let text = "fn f()   { var a = 1 + 2; }";
    let p = Project::from_modules(vec![SourceModule::new("lib.mini", text)]).unwrap();
    let mut o = options(&[OperatorKind::BMA]);
    o.exclude.insert("lib.mini".into());
    let n = normalize(&p, &o).unwrap();
    assert_eq!(n.modules[0].text, text);
    let (_, records) = prepare(&p, &o).unwrap();
    assert!(records.is_empty());
}

fn fig6_program() -> String {
    let mut text = String::from("fn work() {\n  var a = 0;\n");
    for _ in 0..27 {
        text.push_str("  a = a + 1;\n");
    }
    text.push_str(
        "  var jobIntent;\n  jobIntent = newIntentTo(getExtra(newIntent(\"MAIN\"), \"k\"));\n}\n",
    );
    text
}

#[test]
fn fig6_shape_of_a_woven_intent_statement() {
    let p = project(&fig6_program());
    let o = options(&[
        OperatorKind::BMA,
        OperatorKind::NI,
        OperatorKind::IKI,
        OperatorKind::RAID,
    ]);
    let (n, records) = prepare(&p, &o).unwrap();
    assert_eq!(records.len(), 27 * 4 + 3);
    let ids: Vec<i64> = records
        .iter()
        .filter(|r| r.point.index == 27)
        .map(|r| r.muid.0)
        .collect();
    assert_eq!(ids, [27, 1027, 2027]);
    let woven = weave_schemata(&n, &records).unwrap();
    let text = &woven.modules[0].text;
    let expected = "  dispatch (MUID_STATIC) {
    // 0_NullIntentOperatorMutator
    case 27 {
      jobIntent = null;
    }
    // 1_RandomActionIntentDefinitionOperatorMutator
    case 1027 {
      jobIntent = newIntent(\"";
    assert!(text.contains(expected), "{text}");
    assert!(text.contains("    // 2_InvalidKeyIntentOperatorMutator\n    case 2027 {\n      jobIntent = newIntentTo(getExtra(newIntent(\"MAIN\"), \"__invalid_key__\"));"));
    assert!(text.contains("    default {\n      jobIntent = newIntentTo(getExtra(newIntent(\"MAIN\"), \"k\"));\n    }\n  }\n"));
    assert_eq!(woven.dispatch_index.len(), records.len());
    let woven_ast = parse_str(text).unwrap();
    for (muid, (m, arm)) in &woven.dispatch_index {
        assert_eq!(*m, 0);
        assert!(
            matches!(woven_ast.node(*arm), Some(NodeRef::Block(_))),
            "{muid}"
        );
    }
}

#[test]
fn points_without_records_stay_bare() {
    let p = project("fn f() { var a = 7; print(a); }");
    let (n, records) = prepare(&p, &GenerationOptions::default()).unwrap();
    assert!(records.is_empty());
    let woven = weave_schemata(&n, &records).unwrap();
    assert_eq!(woven.modules, n.modules);
    assert!(!woven.modules[0].text.contains("dispatch"));
}

#[test]
fn traditional_tree_differs_only_at_the_record() {
    let p = project("fn start() {\n  var i = newIntent(\"SEND\");\n  send(i);\n}\n");
    let (n, records) = prepare(&p, &options(&[OperatorKind::NI])).unwrap();
    assert_eq!(records.len(), 1);
    let tree = traditional_tree(&n, &records[0]);
    let before: Vec<&str> = n.modules[0].text.lines().collect();
    let after: Vec<&str> = tree[0].text.lines().collect();
    assert_eq!(before.len(), after.len());
    let changed: Vec<usize> = (0..before.len())
        .filter(|&i| before[i] != after[i])
        .collect();
    assert_eq!(changed, [records[0].line - 1]);
    assert_eq!(after[changed[0]].trim(), "i = null;");
}

#[test]
fn empty_record_set_materializes_only_the_original() {
    let dir = tempfile::tempdir().unwrap();
    let p = project("fn f() { }");
    let base = dir.path().join("traditional");
    let set = materialize_traditional(&p, &[], &base).unwrap();
    assert!(set.muids.is_empty());
    assert!(base.is_dir());
    assert!(base.join("-1/app.mini").is_file());
}

const APP: &str = "fn save() {
  print(\"saved\");
}
fn show(i) {
  print(getExtra(i, \"title\"));
}
fn other(i) {
  print(\"other\");
}
fn setup() {
  createWidget(\"save\");
  onClick(findViewById(\"save\"), \"save\");
  requestFocus(findViewById(\"save\"));
  var total = 2 * 3 + 1;
  var i = newIntentTo(\"show\");
  putExtra(i, \"title\", \"T\" + total);
  send(i);
  var o = newIntentTo(\"other\");
}
fn test_click() {
  setup();
  click(findViewById(\"save\"));
}
fn test_total() {
  setup();
  assertTrue(findViewById(\"save\") != null);
}
";

#[test]
fn woven_and_traditional_agree_on_every_mutant() {
    let p = project(APP);
    let o = GenerationOptions {
        delay_steps: 500,
        ..GenerationOptions::default()
    };
    let (n, records) = prepare(&p, &o).unwrap();
    let kinds: BTreeSet<OperatorKind> = records.iter().map(|r| r.operator).collect();
    assert!(kinds.len() >= 12, "{kinds:?}");
    let woven = Program::load(&weave_schemata(&n, &records).unwrap().project().unwrap()).unwrap();
    let original = Program::load(&n).unwrap();
    for test in ["test_click", "test_total"] {
        let a = run_test_at(&original, test, -1, 5000).unwrap();
        let b = run_test_at(&woven, test, -1, 5000).unwrap();
        assert_eq!(a.outcome.status.code(), 0, "{}", a.outcome.message);
        assert_eq!(a, b);
    }
    let mut killed = 0;
    for r in &records {
        let tree = Program::load(&Project::from_modules(traditional_tree(&n, r)).unwrap()).unwrap();
        let mut dead = false;
        for test in ["test_click", "test_total"] {
            let a = run_test_at(&tree, test, -1, 5000).unwrap();
            let b = run_test_at(&woven, test, r.muid.0, 5000).unwrap();
            assert_eq!(a, b, "mutant {} ({})", r.muid, r.operator);
            dead |= a.outcome.status.code() != 0;
        }
        killed += usize::from(dead);
    }
    assert!(killed > 0);
}
