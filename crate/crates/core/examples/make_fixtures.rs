//! Regenerates the synthetic fixtures shipped in `fixtures/`.
//!
//! cargo run -p qcrystal-core --example make_fixtures -- fixtures

use std::path::PathBuf;

use qcrystal::events::LevelScheme;
use qcrystal::potentials::DoubleWellSpec;
use qcrystal::synthetic::{debye_series, linspace, model_series, with_relative_noise};
use qcrystal::thermal::CrystalModel;
use qcrystal::units;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    let temps = linspace(10.0, 270.0, 100);

    let ice = model_series(&CrystalModel::ice_ih(), &temps)?;
    std::fs::write(dir.join("synthetic_ice.csv"), ice.to_csv())?;
    let noisy = with_relative_noise(&ice, 0.01, 2024, 0, true)?;
    std::fs::write(dir.join("synthetic_ice_noisy.csv"), noisy.to_csv())?;
    let debye = debye_series(222.0, 1.0, &temps)?;
    std::fs::write(dir.join("synthetic_debye.csv"), debye.to_csv())?;

    let quantum = units::cm1_to_joule(200.0);
    let levels = LevelScheme::harmonic(12, quantum)?;
    std::fs::write(dir.join("levels_harmonic12.csv"), levels.to_csv())?;

    std::fs::write(dir.join("ice.model"), CrystalModel::ice_ih().to_config())?;
    std::fs::write(dir.join("kdp.model"), CrystalModel::kdp().to_config())?;
    let well = DoubleWellSpec {
        barrier_height: units::cm1_to_joule(4000.0),
        well_separation: 0.7,
        asymmetry_bias: units::cm1_to_joule(200.0),
        particle_mass: units::PROTON_MASS,
        grid_min: -1.0,
        grid_max: 1.0,
        grid_points: 4096,
    };
    std::fs::write(dir.join("double_well.conf"), well.to_config())?;
    Ok(())
}
