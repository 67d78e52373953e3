//! Regenerates the CSV fixtures used by the CLI tests.
//!
//! cargo run -p linkcusum --example make_fixtures -- crates/cli/tests/fixtures

use std::fs::File;
use std::path::PathBuf;

use linkcusum::panel::{write_long, Pairing, Panel, PanelPair};
use linkcusum::rng::stream;
use linkcusum::simulation::{make_scenario_pair, Alternative, Model, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/cli/tests/fixtures".into()),
    );

    let sc = ScenarioConfig::new(Model::PairedGaussian, Alternative::A1, 100, 20);
    let pair = make_scenario_pair(&sc, &mut stream(20_240_101, 0))?;
    write_long(&pair, File::create(dir.join("a1_paired.csv"))?)?;

    // Each column is a rotation of the same eight values, identical in x and y.
    let values = [-1.5, -0.75, -0.2, 0.0, 0.4, 0.9, 1.3, 2.1];
    let rows: Vec<Vec<f64>> = (0..values.len())
        .map(|i| (0..6).map(|t| values[(i + t) % values.len()]).collect())
        .collect();
    let ids: Vec<String> = (1..=values.len()).map(|i| format!("p{i}")).collect();
    let x = Panel::from_rows("x", ids.clone(), rows.clone())?;
    let y = Panel::from_rows("y", ids, rows)?;
    write_long(
        &PanelPair::new(x, y, Pairing::Paired)?,
        File::create(dir.join("identical_static.csv"))?,
    )?;
    Ok(())
}
