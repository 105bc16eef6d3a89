//! Roll the default control grid out from one agent state.

use covertraj::dynamics::{dynamic_set, ControlGrid, IntegrationConfig, VehicleParams};
use covertraj::AgentState;

fn main() -> covertraj::Result<()> {
    let grid = ControlGrid::default();
    let params = VehicleParams::default();
    let cfg = IntegrationConfig::default();

    for speed in [0.0, 5.0, 12.0] {
        let set = dynamic_set(&AgentState::at_origin(speed), &grid, &params, &cfg)?;
        println!("v = {speed:>4} m/s: {} distinct modes from {} profiles", set.len(), grid.len());
        // the sharpest left and right turns at full braking and full throttle
        let profiles = set.profiles().expect("dynamic sets keep their profiles");
        for (mode, p) in set.modes().iter().zip(profiles).filter(|(_, p)| p.a_lat.abs() == 6.0 && p.a_lon.abs() >= 2.0) {
            let [x, y] = mode.last();
            println!("    a_lat {:>4}, a_lon {:>4} -> ends at ({x:7.2}, {y:7.2})", p.a_lat, p.a_lon);
        }
    }
    Ok(())
}
