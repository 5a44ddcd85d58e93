//! The figure fixtures bundled with the crate.

use crate::error::Result;
use crate::workspace::Workspace;

/// Temporal examples: `M`, `U2`, `U3`, `U4`, `U5`, `Udouble`.
pub const DETL: [(&str, &str); 6] = [
    ("M", include_str!("../fixtures/detl/M.json")),
    ("U2", include_str!("../fixtures/detl/U2.json")),
    ("U3", include_str!("../fixtures/detl/U3.json")),
    ("U4", include_str!("../fixtures/detl/U4.json")),
    ("U5", include_str!("../fixtures/detl/U5.json")),
    ("Udouble", include_str!("../fixtures/detl/Udouble.json")),
];

/// The YDEL example: `M8` and the atemporal action `U8`.
pub const YDEL: [(&str, &str); 2] = [
    ("M8", include_str!("../fixtures/ydel/M8.json")),
    ("U8", include_str!("../fixtures/ydel/U8.json")),
];

pub fn detl() -> Result<Workspace> {
    Workspace::from_sources(DETL)
}

pub fn ydel() -> Result<Workspace> {
    Workspace::from_sources(YDEL)
}
