//! Example geometries compiled into the binary.
//!
//! A name resolves if it matches an entry directly (`cp2`) or through its
//! file stem (`examples/cp2.json`), so the documented invocations work
//! from any directory.

use std::path::Path;

pub const ENTRIES: &[(&str, &str)] = &[
    ("cp2", include_str!("../examples/cp2.json")),
    ("square", include_str!("../examples/square.json")),
    ("product_p", include_str!("../examples/product_p.json")),
    ("blowup_p", include_str!("../examples/blowup_p.json")),
    ("blowup_anticanonical", include_str!("../examples/blowup_anticanonical.json")),
    ("cube3", include_str!("../examples/cube3.json")),
    ("c3", include_str!("../examples/c3.json")),
    ("conifold", include_str!("../examples/conifold.json")),
];

pub fn lookup(name: &str) -> Option<(&'static str, &'static str)> {
    let stem = Path::new(name).file_stem()?.to_str()?;
    ENTRIES.iter().copied().find(|(n, _)| *n == name || *n == stem)
}
