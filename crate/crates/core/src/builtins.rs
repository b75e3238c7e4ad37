//! The fixed set of built-in types every program can use.
//!
//! All built-ins sit directly under `Object`. None of them have fields;
//! `Object` and `List` are the only ones with constructors.

pub const OBJECT: &str = "Object";
pub const INTEGER: &str = "Integer";
pub const STRING: &str = "String";
pub const BOOLEAN: &str = "Boolean";
pub const LIST: &str = "List";

pub const TYPE_NAMES: &[&str] = &[OBJECT, INTEGER, STRING, BOOLEAN, LIST];

pub fn is_builtin_type(name: &str) -> bool {
    TYPE_NAMES.contains(&name)
}

/// Superclass of a built-in type; `None` for `Object` itself.
pub fn superclass(name: &str) -> Option<&'static str> {
    if is_builtin_type(name) && name != OBJECT {
        Some(OBJECT)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuiltinMethod {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub ret: &'static str,
}

const INTEGER_METHODS: &[BuiltinMethod] =
    &[BuiltinMethod { name: "toString", params: &[], ret: STRING }];

const STRING_METHODS: &[BuiltinMethod] = &[
    BuiltinMethod { name: "concat", params: &[STRING], ret: STRING },
    BuiltinMethod { name: "equals", params: &[STRING], ret: BOOLEAN },
    BuiltinMethod { name: "contains", params: &[STRING], ret: BOOLEAN },
];

const LIST_METHODS: &[BuiltinMethod] = &[
    BuiltinMethod { name: "add", params: &[OBJECT], ret: BOOLEAN },
    BuiltinMethod { name: "get", params: &[INTEGER], ret: OBJECT },
    BuiltinMethod { name: "size", params: &[], ret: INTEGER },
    BuiltinMethod { name: "contains", params: &[OBJECT], ret: BOOLEAN },
];

pub fn methods(type_name: &str) -> &'static [BuiltinMethod] {
    match type_name {
        INTEGER => INTEGER_METHODS,
        STRING => STRING_METHODS,
        LIST => LIST_METHODS,
        _ => &[],
    }
}

/// Looks a method up on a built-in type, walking up to `Object` (which
/// declares nothing, so the walk only matters for uniformity).
pub fn lookup_method(type_name: &str, member: &str) -> Option<&'static BuiltinMethod> {
    let mut cur = Some(type_name);
    while let Some(t) = cur {
        if let Some(m) = methods(t).iter().find(|m| m.name == member) {
            return Some(m);
        }
        cur = superclass(t);
    }
    None
}

/// Constructor parameter types, when the built-in can be `new`-ed.
pub fn ctor_params(type_name: &str) -> Option<&'static [&'static str]> {
    match type_name {
        OBJECT | LIST => Some(&[]),
        _ => None,
    }
}
