//! Model files shipped with the crate.

/// `(name, file name, contents)` for every bundled model.
pub const MODELS: [(&str, &str, &str); 9] = [
    ("lapwing", "lapwing.ssm", include_str!("../models/lapwing.ssm")),
    ("polarbear", "polarbear.ssm", include_str!("../models/polarbear.ssm")),
    (
        "mar1_partial",
        "mar1_partial.ssm",
        include_str!("../models/mar1_partial.ssm"),
    ),
    ("mar1_full", "mar1_full.ssm", include_str!("../models/mar1_full.ssm")),
    ("ar1", "ar1.ssm", include_str!("../models/ar1.ssm")),
    (
        "ar1_crosscov",
        "ar1_crosscov.ssm",
        include_str!("../models/ar1_crosscov.ssm"),
    ),
    (
        "compartment3",
        "compartment3.ssm",
        include_str!("../models/compartment3.ssm"),
    ),
    (
        "twocompartment_ct",
        "twocompartment_ct.ssm",
        include_str!("../models/twocompartment_ct.ssm"),
    ),
    (
        "ar1_intercept",
        "ar1_intercept.kssm",
        include_str!("../models/ar1_intercept.kssm"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    MODELS.iter().map(|(n, _, _)| *n)
}

/// Source text of a bundled model by name (with or without extension).
pub fn source(name: &str) -> Option<&'static str> {
    MODELS
        .iter()
        .find(|(n, file, _)| *n == name || *file == name)
        .map(|(_, _, text)| *text)
}
