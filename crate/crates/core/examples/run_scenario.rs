//! Run one CLI command from code and write its CSV and metadata.
//!
//! ```text
//! cargo run --example run_scenario -- sweep-theta scenarios/reference.toml out/
//! ```

use uav_backhaul::commands::{run_command, Command};
use uav_backhaul::config::{load_config, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let command: Command = args.next().as_deref().unwrap_or("max-length").parse()?;
    let cfg = match args.next() {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join("uav-backhaul").display().to_string());

    let record = run_command(command, &cfg)?;
    let (csv, meta) = record.write(&out)?;
    println!("{}", serde_json::to_string_pretty(&record.summary)?);
    println!("wrote {} and {}", csv.display(), meta.display());
    Ok(())
}
