use std::path::Path;

use proptest::prelude::*;

use mutschema::lang::{
    parse_str, preorder_points, unparse, BinaryOp, ExprKind, NodeRef, Project, StmtKind,
};

fn corpus_projects() -> Vec<Project> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    ["notes", "calc", "messenger"]
        .iter()
        .map(|app| Project::load_dir(&root.join(app).join("src")).unwrap())
        .collect()
}

#[test]
fn declaration_with_binary_initializer() {
    let ast = parse_str("fn main() { var a = 1 + 2; }").unwrap();
    let StmtKind::Var { name, init } = &ast.functions[0].body.stmts[0].kind else {
        panic!("expected a declaration");
    };
    assert_eq!(name, "a");
    let ExprKind::Binary { op, lhs, rhs } = &init.as_ref().unwrap().kind else {
        panic!("expected a binary initializer");
    };
    assert_eq!(*op, BinaryOp::Add);
    assert_eq!(lhs.kind, ExprKind::Int(1));
    assert_eq!(rhs.kind, ExprKind::Int(2));
}

#[test]
fn missing_initializer_is_reported_at_the_semicolon() {
    let text = "fn main() {\n  var a = ;\n}\n";
    let err = parse_str(text).unwrap_err();
    assert_eq!(&text[err.offset..err.offset + 1], ";");
    assert_eq!((err.line, err.column), (2, 11));
}

#[test]
fn empty_function_round_trips() {
    let ast = parse_str("fn main() { }").unwrap();
    let text = unparse(&ast);
    assert_eq!(text, "fn main() {\n}\n");
    assert!(parse_str(&text).unwrap().structurally_eq(&ast));
}

#[test]
fn corpus_round_trips() {
    for project in corpus_projects() {
        for (module, ast) in project.modules.iter().zip(&project.asts) {
            let again = parse_str(&unparse(ast)).unwrap();
            assert!(again.structurally_eq(ast), "{}", module.path);
        }
    }
}

#[test]
fn node_ids_are_stable_and_dense() {
    for project in corpus_projects() {
        for module in &project.modules {
            let a = parse_str(&module.text).unwrap();
            let b = parse_str(&module.text).unwrap();
            assert_eq!(a, b);
            let ids = preorder_points(&a, |_| true);
            let dense: Vec<u32> = (0..ids.len() as u32).collect();
            assert_eq!(
                ids.iter().map(|n| n.0).collect::<Vec<_>>(),
                dense,
                "{}",
                module.path
            );
        }
    }
}

#[test]
fn empty_block_has_no_points() {
    let ast = parse_str("fn main() { }").unwrap();
    assert!(preorder_points(&ast, |n| matches!(n, NodeRef::Expr(_))).is_empty());
}

#[test]
fn two_additions_in_source_order() {
    let ast = parse_str("fn f() { print(1 + 2); var b = 3 + 4; }").unwrap();
    let plus = |n: NodeRef<'_>| matches!(n, NodeRef::Expr(e) if matches!(e.kind, ExprKind::Binary { op: BinaryOp::Add, .. }));
    let points = preorder_points(&ast, plus);
    assert_eq!(points.len(), 2);
    assert!(points[0] < points[1]);
}

/// Byte offsets of intent constructor calls found by scanning the text.
fn scan_intent_constructors(text: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(at) = text[from..].find("newIntent") {
        let start = from + at;
        let rest = &text[start + "newIntent".len()..];
        if rest.starts_with('(') || rest.starts_with("To(") {
            out.push(start);
        }
        from = start + 1;
    }
    out
}

#[test]
fn intent_points_match_a_textual_scan() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/notes/src/notes.mini");
    let text = unparse(&parse_str(&std::fs::read_to_string(root).unwrap()).unwrap());
    let ast = parse_str(&text).unwrap();
    let is_intent = |n: NodeRef<'_>| {
        matches!(n, NodeRef::Expr(e)
            if e.as_call_to("newIntent").is_some() || e.as_call_to("newIntentTo").is_some())
    };
    let points = preorder_points(&ast, is_intent);
    let offsets: Vec<usize> = points
        .iter()
        .map(|id| ast.node(*id).unwrap().span().start)
        .collect();
    assert_eq!(offsets, scan_intent_constructors(&text));
    assert!(points.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(points.len(), 3);
}

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "count", "title", "x1"]).prop_map(str::to_string)
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(|v| v.to_string()),
        "[a-z ]{0,6}".prop_map(|s| format!("\"{s}\"")),
        Just("true".to_string()),
        Just("null".to_string()),
        ident(),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let op = prop::sample::select(vec![
            "+", "-", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", "&&", "||",
        ]);
        prop_oneof![
            (inner.clone(), op, inner.clone()).prop_map(|(l, o, r)| format!("({l} {o} {r})")),
            inner.clone().prop_map(|e| format!("-({e})")),
            inner.clone().prop_map(|e| format!("!({e})")),
            prop::collection::vec(inner, 0..3).prop_map(|args| format!("f({})", args.join(", "))),
        ]
    })
}

fn stmt() -> impl Strategy<Value = String> {
    let simple = prop_oneof![
        (ident(), expr()).prop_map(|(n, e)| format!("var {n} = {e};")),
        ident().prop_map(|n| format!("var {n};")),
        (ident(), expr()).prop_map(|(n, e)| format!("{n} = {e};")),
        expr().prop_map(|e| format!("return {e};")),
        expr().prop_map(|e| format!("print({e});")),
    ];
    simple.prop_recursive(3, 12, 3, |inner| {
        let block = prop::collection::vec(inner, 0..3).prop_map(|s| s.join(" "));
        prop_oneof![
            (expr(), block.clone()).prop_map(|(c, b)| format!("if ({c}) {{ {b} }}")),
            (expr(), block.clone(), block.clone())
                .prop_map(|(c, a, b)| format!("if ({c}) {{ {a} }} else {{ {b} }}")),
            (expr(), block).prop_map(|(c, b)| format!("while ({c}) {{ {b} }}")),
        ]
    })
}

fn program() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::collection::vec(stmt(), 0..4), 1..3).prop_map(|fns| {
        fns.iter()
            .enumerate()
            .map(|(i, body)| format!("fn f{i}(a, b) {{ {} }}", body.join(" ")))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

proptest! {
    #[test]
    fn parse_unparse_parse_is_identity(src in program()) {
        let ast = parse_str(&src).unwrap();
        let text = unparse(&ast);
        let again = parse_str(&text).unwrap();
        prop_assert!(again.structurally_eq(&ast), "{}", text);
        prop_assert_eq!(unparse(&again), text);
    }
}
