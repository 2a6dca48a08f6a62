use super::*;

#[test]
fn minimal_program() {
    let ast = parse_str("fn main() { }").unwrap();
    assert_eq!(ast.functions.len(), 1);
    assert!(ast.functions[0].body.stmts.is_empty());
}
