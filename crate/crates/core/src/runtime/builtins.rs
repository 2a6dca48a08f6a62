//! Builtin callables of the toy widget/intent framework.

/// Arity of each builtin; `None` for user-defined names.
pub fn builtin_arity(name: &str) -> Option<usize> {
    Some(match name {
        "createWidget" => 1,
        "findViewById" => 1,
        "setVisible" => 2,
        "requestFocus" => 1,
        "clearFocus" => 1,
        "onClick" => 2,
        "click" => 1,
        "newIntent" => 1,
        "newIntentTo" => 1,
        "putExtra" => 3,
        "getExtra" => 2,
        "send" => 1,
        "sleep" => 1,
        "print" => 1,
        "assertEq" => 2,
        "assertTrue" => 1,
        "getMUID" => 0,
        _ => return None,
    })
}

pub const BUILTINS: [&str; 17] = [
    "createWidget",
    "findViewById",
    "setVisible",
    "requestFocus",
    "clearFocus",
    "onClick",
    "click",
    "newIntent",
    "newIntentTo",
    "putExtra",
    "getExtra",
    "send",
    "sleep",
    "print",
    "assertEq",
    "assertTrue",
    "getMUID",
];

/// Builtins whose first argument is a widget or intent receiver; applying
/// them to `null` is a null dereference.
pub fn is_method_style(name: &str) -> bool {
    matches!(
        name,
        "setVisible"
            | "requestFocus"
            | "clearFocus"
            | "onClick"
            | "click"
            | "putExtra"
            | "getExtra"
            | "send"
    )
}
