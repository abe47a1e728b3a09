//! Built-in theory specs. The same files ship in the top-level `catalog/` directory.

use crate::error::{Error, Result};
use crate::theory::{parse_theory, TheorySpec};

pub const ENTRIES: [(&str, &str); 10] = [
    ("su2_sqcd_nf3", include_str!("../../../catalog/su2_sqcd_nf3.json")),
    ("su3_sqcd_nf4", include_str!("../../../catalog/su3_sqcd_nf4.json")),
    ("su3_sqcd_nf5", include_str!("../../../catalog/su3_sqcd_nf5.json")),
    ("sp4_sqcd_nf4", include_str!("../../../catalog/sp4_sqcd_nf4.json")),
    ("so3_sqcd_nf2", include_str!("../../../catalog/so3_sqcd_nf2.json")),
    ("so5_sqcd_nf4", include_str!("../../../catalog/so5_sqcd_nf4.json")),
    ("iss", include_str!("../../../catalog/iss.json")),
    ("class_s_g2", include_str!("../../../catalog/class_s_g2.json")),
    ("bci_so3", include_str!("../../../catalog/bci_so3.json")),
    ("bci_so5", include_str!("../../../catalog/bci_so5.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<TheorySpec> {
    let text = source(name).ok_or_else(|| Error::InvalidArgument(format!("no catalog theory {name:?}")))?;
    parse_theory(text)
}

pub fn all() -> Vec<(&'static str, TheorySpec)> {
    ENTRIES.iter().map(|(n, s)| (*n, parse_theory(s).expect("catalog entries parse"))).collect()
}
