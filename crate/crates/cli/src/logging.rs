use std::io::Write;

use log::LevelFilter;

/// JSON lines on stderr: `{"level":..,"target":..,"message":..}`.
pub fn init(level: LevelFilter) {
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("KGFORGE_LOG")
        .format(|buf, record| {
            let line = serde_json::json!({
                "level": record.level().as_str(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            writeln!(buf, "{line}")
        })
        .target(env_logger::Target::Stderr)
        .try_init();
}

pub fn parse_level(s: &str) -> Option<LevelFilter> {
    s.parse().ok()
}
