//! Hand-written example programs. Each pair holds the same program in both
//! decomposition styles.

/// Integer sets as an interface with three classes.
pub const SETS_OOP: &str = include_str!("../corpus/sets_oop.food");
/// Integer sets as a datatype with four consumers.
pub const SETS_FP: &str = include_str!("../corpus/sets_fp.food");
pub const EXP_OOP: &str = include_str!("../corpus/exp_oop.food");
pub const EXP_FP: &str = include_str!("../corpus/exp_fp.food");

/// Sets and lists, both object-oriented. Both types have a `contains`.
pub const SETLIST_OOP: &str = include_str!("../corpus/setlist_oop.food");
/// Sets and lists, both functional.
pub const SETLIST_FP: &str = include_str!("../corpus/setlist_fp.food");
/// `SETLIST_OOP` with only `Set` turned functional.
pub const SETLIST_SET_FP: &str = include_str!("../corpus/setlist_set_fp.food");
/// `SETLIST_FP` with only `Set` turned object-oriented.
pub const SETLIST_SET_OOP: &str = include_str!("../corpus/setlist_set_oop.food");

/// Boolean formula normalizer, first iteration: `Context` is an interface
/// with `apply` only.
pub const BOOL_ITER1: &str = include_str!("../corpus/bool_iter1.food");
/// Definitions added in the second iteration, written against `Context` as
/// a datatype.
pub const BOOL_ITER2_ADDITIONS: &str = include_str!("../corpus/bool_iter2_additions.food");
/// Full normalizer with `Context` as an interface.
pub const BOOL_OOP_CTX: &str = include_str!("../corpus/bool_oop_ctx.food");
/// Full normalizer with `Context` as a datatype.
pub const BOOL_FP_CTX: &str = include_str!("../corpus/bool_fp_ctx.food");

/// Every complete program in the corpus, by file stem.
pub const ALL: &[(&str, &str)] = &[
    ("sets_oop", SETS_OOP),
    ("sets_fp", SETS_FP),
    ("exp_oop", EXP_OOP),
    ("exp_fp", EXP_FP),
    ("setlist_oop", SETLIST_OOP),
    ("setlist_fp", SETLIST_FP),
    ("setlist_set_fp", SETLIST_SET_FP),
    ("setlist_set_oop", SETLIST_SET_OOP),
    ("bool_iter1", BOOL_ITER1),
    ("bool_oop_ctx", BOOL_OOP_CTX),
    ("bool_fp_ctx", BOOL_FP_CTX),
];
