//! Running a scenario from flat `key = value` text, writing the three
//! CSV files, and printing the config back out.
//!
//! cargo run --example config_file

use abrsim::scenario::{parse_config, run_scenario};

const CONFIG: &str = "\
# four stations walking around three access points
scenario = d
seed = 2024
horizon_s = 15
wifi_phy_rate_mbps = 150
bin_width_s = 0.5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.set("num_sta", "4")?;
    cfg.out_dir = std::env::temp_dir().join("abrsim-config-example");
    let report = run_scenario(&cfg, &mut std::io::stdout())?;
    println!("{} mobility samples; CSV files in {}", report.mobility.len(), cfg.out_dir.display());
    println!("--- effective config ---\n{}", cfg.to_text());
    Ok(())
}
