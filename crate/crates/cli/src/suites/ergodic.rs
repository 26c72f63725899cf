use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiclass_core::classical::{billiard_flow, billiard_orbit_csv, domain_cells, ergodic_average, visited_cells, BilliardState, Region};

use crate::config::ExperimentConfig;
use crate::error::{CliResult, Context};
use crate::render::grid_pgm_bytes;
use crate::report::{Check, ReportBuilder};

const COVERAGE_BOUNCES: usize = 100_000;
const GRID: (usize, usize) = (32, 16);
const ORBIT_CSV_BOUNCES: usize = 1000;

pub fn run(config: &ExperimentConfig, rb: &mut ReportBuilder) -> CliResult<()> {
    let stadium = config.stadium()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let [x0, x1, y0, y1] = stadium.bounding_box();
    let position = loop {
        let p = [x0 + (x1 - x0) * rng.random::<f64>(), y0 + (y1 - y0) * rng.random::<f64>()];
        if stadium.strictly_contains(p) {
            break p;
        }
    };
    let angle = std::f64::consts::TAU * rng.random::<f64>();
    let start = BilliardState { position, direction: [angle.cos(), angle.sin()] };

    let left = ergodic_average(&stadium, &start, &Region::left_half(), config.bounces).context("ergodic average")?;
    rb.push(
        Check::below("left_half_fraction", "acceptance 9: time average equals area fraction", (left - 0.5).abs(), 0.02)
            .with_detail(format!("fraction {left:.5} over {} bounces", config.bounces)),
    );

    let (nx, ny) = GRID;
    let visited = visited_cells(&stadium, &start, COVERAGE_BOUNCES, nx, ny).context("cell coverage")?;
    let inside = domain_cells(&stadium, nx, ny);
    let missed = inside.iter().zip(&visited).filter(|(i, v)| **i && !**v).count();
    rb.push(Check::new(
        "cell_coverage",
        "acceptance 9: every 32x16 cell visited within 1e5 bounces",
        missed == 0,
        missed as f64,
        0.0,
        -(missed as f64),
    ));
    // rows top to bottom
    let raster: Vec<Vec<f64>> = (0..ny)
        .rev()
        .map(|j| (0..nx).map(|i| if visited[j * nx + i] { 1.0 } else { 0.0 }).collect())
        .collect();
    rb.write("coverage.pgm", &grid_pgm_bytes(&raster)?)?;

    let orbit = billiard_flow(&stadium, &start, ORBIT_CSV_BOUNCES).context("orbit")?;
    let speed = orbit
        .states
        .iter()
        .map(|s| (s.direction[0].hypot(s.direction[1]) - 1.0).abs())
        .fold(0.0, f64::max);
    rb.push(Check::below("speed_preserved", "classical: reflection preserves speed", speed, 1e-12));
    rb.write_text("orbit.csv", &billiard_orbit_csv(&orbit))?;
    Ok(())
}
