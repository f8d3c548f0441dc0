use super::{parse_manifest, FrobeniusData};

const SOURCES: [(&str, &str); 4] = [
    ("e1", include_str!("../../../../manifolds/e1.fm")),
    ("a2", include_str!("../../../../manifolds/a2.fm")),
    ("cp1", include_str!("../../../../manifolds/cp1.fm")),
    ("bad", include_str!("../../../../manifolds/bad.fm")),
];

pub fn bundled_names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

pub fn bundled_source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A bundled manifold by name (`e1`, `a2`, `cp1`, `bad`).
pub fn bundled(name: &str) -> Option<FrobeniusData> {
    bundled_source(name).map(|s| parse_manifest(s).expect("bundled manifold parses"))
}
