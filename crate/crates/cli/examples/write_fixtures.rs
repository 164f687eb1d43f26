//! Writes the built-in fixtures as input files plus one run config per command.
//!
//! Usage: cargo run -p cone-ends-cli --example write_fixtures -- [dir]

use cone_ends::fields::io::to_json_string;
use cone_ends::fixtures::{genus_two_octagon_rep, one_holed_torus_rep};
use cone_ends_cli::config::CommandName;
use cone_ends_cli::inputs::{datum_fixture, germ_fixture, pair_fixture};
use cone_ends_cli::{resolve_config, Flags};
use serde_json::json;
use std::f64::consts::PI;
use std::path::Path;

fn write(dir: &Path, name: &str, text: &str) -> std::io::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fixtures".into());
    let dir = Path::new(&dir);
    std::fs::create_dir_all(dir)?;
    let cfg = resolve_config(CommandName::BuildEnd, &Flags::default())?;

    for name in ["octagon-fuchsian", "octagon-perturbed", "pole-order-two"] {
        write(dir, &format!("{name}.json"), &datum_fixture(name, &cfg)?.to_json()?)?;
    }
    write(dir, "normalized-pair.json", &pair_fixture("normalized-pair", &cfg)?.to_json()?)?;
    for (name, (rep, curve)) in
        [("one-holed-torus", one_holed_torus_rep(PI / 2.0)), ("genus-two-octagon", genus_two_octagon_rep())]
    {
        write(dir, &format!("{name}.json"), &rep.to_json())?;
        write(dir, &format!("{name}-multicurve.json"), &curve.to_json())?;
    }
    for name in ["moebius", "cone-germ"] {
        write(dir, &format!("{name}-germ.json"), &to_json_string(&germ_fixture(name)?)?)?;
    }

    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let configs = [
        ("build-end", json!({"inputs": {"datum": path("octagon-fuchsian.json")}})),
        ("foliate", json!({"inputs": {"datum": path("octagon-fuchsian.json")}, "dualize": true})),
        ("dualize", json!({"inputs": {"datum": path("octagon-fuchsian.json")}, "curvatures": [-0.5]})),
        (
            "graft",
            json!({"inputs": {
                "representation": path("one-holed-torus.json"),
                "multicurve": path("one-holed-torus-multicurve.json"),
            }}),
        ),
        ("schwarzian", json!({"inputs": {"germ": path("cone-germ-germ.json")}})),
        ("verify", json!({"inputs": {"pair": path("normalized-pair.json")}})),
    ];
    for (command, config) in configs {
        write(dir, &format!("run-{command}.json"), &serde_json::to_string_pretty(&config)?)?;
    }
    Ok(())
}
