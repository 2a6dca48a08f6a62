use super::*;
use crate::lang::{parse_str, preorder_points};

fn ctx_for(ast: &Ast) -> OperatorContext {
    OperatorContext::scan([ast], DEFAULT_DELAY_STEPS)
}

/// Replacement texts of every mutation of `kind` in `text`.
fn replacements(kind: OperatorKind, text: &str, seed: u64) -> Vec<String> {
    let ast = parse_str(text).unwrap();
    let ctx = ctx_for(&ast);
    let mut stream = SeededStream::new(seed, kind.acronym());
    scan_sites(&ast, &[kind], &ctx)
        .into_iter()
        .flat_map(|s| mutations_at(kind, &ast, s.node, &ctx, &mut stream).unwrap())
        .map(|m| m.edit.texts(&ast).unwrap().1)
        .collect()
}

#[test]
fn names_round_trip() {
    for k in OperatorKind::ALL {
        assert_eq!(k.acronym().parse::<OperatorKind>(), Ok(k));
    }
    assert_eq!(
        "XYZ".parse::<OperatorKind>(),
        Err(UnknownOperator("XYZ".into()))
    );
    assert!("bma".parse::<OperatorKind>().is_err());
    assert_eq!(OperatorKind::NI.arm_label(0), "0_NullIntentOperatorMutator");
}

#[test]
fn bma_yields_the_four_other_operators() {
    let r = replacements(OperatorKind::BMA, "fn f() { var a = 1 + 2; }", 0);
    assert_eq!(r, ["1 - 2", "1 * 2", "1 / 2", "1 % 2"]);
    let r = replacements(OperatorKind::BMA, "fn f() { var a = 1 < 2; }", 0);
    assert!(r.is_empty());
}

#[test]
fn null_intent_and_findview_null() {
    assert_eq!(
        replacements(
            OperatorKind::NI,
            "fn f() { var i; i = newIntent(\"SEND\"); }",
            0
        ),
        ["null"]
    );
    assert_eq!(
        replacements(
            OperatorKind::FVBIRN,
            "fn f() { var w = findViewById(\"a\"); }",
            0
        ),
        ["null"]
    );
    assert!(replacements(OperatorKind::NI, "fn f() { send(newIntent(\"SEND\")); }", 0).is_empty());
}

#[test]
fn raid_draws_an_action_other_than_the_current_one() {
    let text = "fn f() { var i; i = newIntent(\"VIEW\"); }";
    let mut seen = BTreeSet::new();
    for seed in 0..50 {
        let r = replacements(OperatorKind::RAID, text, seed);
        assert_eq!(r.len(), 1);
        assert_ne!(r[0], "newIntent(\"VIEW\")");
        seen.insert(r[0].clone());
    }
    assert!(seen.contains("newIntent(\"SEND\")"));
    assert_eq!(seen.len(), 4);
}

#[test]
fn itr_needs_two_targets() {
    let one = "fn g() { } fn f() { var i; i = newIntentTo(\"g\"); }";
    assert!(replacements(OperatorKind::ITR, one, 0).is_empty());
    let two = "fn g() { } fn h() { } fn f() { var i; i = newIntentTo(\"g\"); var j; j = newIntentTo(\"h\"); }";
    assert_eq!(
        replacements(OperatorKind::ITR, two, 0),
        ["newIntentTo(\"h\")", "newIntentTo(\"g\")"]
    );
}

#[test]
fn payload_operators() {
    let text = "fn f(i) { putExtra(i, \"a\", 5); putExtra(i, \"b\", true); putExtra(i, \"c\", \"x\"); putExtra(i, \"d\", null); putExtra(i, \"e\", 0); }";
    assert_eq!(
        replacements(OperatorKind::IPLR, text, 0),
        [
            "putExtra(i, \"a\", 0)",
            "putExtra(i, \"b\", false)",
            "putExtra(i, \"c\", \"\")"
        ]
    );
    assert_eq!(replacements(OperatorKind::NVIPE, text, 0).len(), 4);
    assert_eq!(
        replacements(
            OperatorKind::IKI,
            "fn f(i) { return getExtra(i, \"k\"); }",
            0
        ),
        ["getExtra(i, \"__invalid_key__\")"]
    );
}

#[test]
fn widget_operators() {
    let text = "fn f() { createWidget(\"b\"); requestFocus(findViewById(\"b\")); onClick(findViewById(\"b\"), \"g\"); }
fn g() { print(1); }
";
    assert_eq!(
        replacements(OperatorKind::LGC, text, 0),
        ["sleep(10000); createWidget(\"b\");"]
    );
    assert_eq!(
        replacements(OperatorKind::VCNV, text, 0),
        ["createWidget(\"b\"); setVisible(findViewById(\"b\"), false);"]
    );
    assert_eq!(
        replacements(OperatorKind::IVF, text, 0),
        ["clearFocus(findViewById(\"b\"))"]
    );
    assert_eq!(
        replacements(OperatorKind::IIFV, text, 0),
        [
            "findViewById(\"__invalid_id__\")",
            "findViewById(\"__invalid_id__\")"
        ]
    );
    assert_eq!(
        replacements(OperatorKind::BGL, text, 0),
        ["onClick(findViewById(\"b\"), \"__noop\")"]
    );
    assert_eq!(
        replacements(OperatorKind::LGL, text, 0),
        ["fn g() { sleep(10000);"]
    );
}

#[test]
fn test_functions_are_never_sites() {
    let text = "fn test_a() { var a = 1 + 2; createWidget(\"x\"); }";
    let ast = parse_str(text).unwrap();
    assert!(scan_sites(&ast, &OperatorKind::ALL, &ctx_for(&ast)).is_empty());
}

#[test]
fn sites_are_ordered_by_point_then_node() {
    let text = "fn f() { var a; a = 1 + 2 * 3; if (a > 1 - 1) { a = a % 2; } }";
    let ast = parse_str(text).unwrap();
    let sites = scan_sites(&ast, &[OperatorKind::BMA], &ctx_for(&ast));
    let nodes: Vec<NodeId> = sites.iter().map(|s| s.node).collect();
    let oracle = preorder_points(
        &ast,
        |n| matches!(n.as_expr().map(|e| &e.kind), Some(ExprKind::Binary { op, .. }) if op.is_arithmetic()),
    );
    assert_eq!(nodes, oracle);
    let points: BTreeSet<NodeId> = sites.iter().map(|s| s.point).collect();
    assert_eq!(points.len(), 3);
}
