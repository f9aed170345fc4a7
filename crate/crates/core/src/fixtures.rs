//! Reference designs shipped with the crate, stored as text design files.

use crate::design::io::parse_text;
use crate::design::Design;
use crate::error::{Error, Result};

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        /// `(name, file contents)` for every bundled design.
        pub const ALL: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../fixtures/", $name, ".txt")))),*
        ];
    };
}

fixtures!(
    "mcd8_repeated",
    "mcd8_paired",
    "mcd8_paired_transposed",
    "mcd16_a",
    "mcd16_b",
    "mcd16_c",
    "juxtaposed16_plain",
    "juxtaposed16_permuted",
    "juxtaposed16_repeated_qualitative",
    "lb2_attaining",
    "lb1_attaining",
    "ccd_factorial_z1",
    "ccd_factorial_z2",
    "ccd_factorial_z3",
    "ccd_factorial_z4",
    "ccd_z1",
    "ccd_z2",
    "ccd_z3",
    "ccd_z4",
);

pub fn source(name: &str) -> Result<&'static str> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::domain(format!("no bundled design named `{name}`")))
}

pub fn load(name: &str) -> Result<Design> {
    parse_text(source(name)?)
}
