//! Run configs shipped with the binary, one per validation scenario.

pub const PRESETS: &[(&str, &str)] = &[
    ("tiling", include_str!("../presets/tiling.json")),
    ("map-lemma", include_str!("../presets/map-lemma.json")),
    ("separated", include_str!("../presets/separated.json")),
    ("entropy", include_str!("../presets/entropy.json")),
    ("meanrank", include_str!("../presets/meanrank.json")),
    ("sofic-rank", include_str!("../presets/sofic-rank.json")),
    ("snf", include_str!("../presets/snf.json")),
    ("mdim", include_str!("../presets/mdim.json")),
    ("amplification", include_str!("../presets/amplification.json")),
    ("ocap", include_str!("../presets/ocap.json")),
    ("microstates", include_str!("../presets/microstates.json")),
    ("determinism", include_str!("../presets/determinism.json")),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
