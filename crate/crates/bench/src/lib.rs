//! Shared input builders for the benchmark targets.

use masspack_core::circle::CircleWeight;
use masspack_core::dyadic::CellField;
use masspack_core::pack::RoofGrid;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn bench_roof(n: usize, m: u32, seed: u64) -> RoofGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 1usize << (n as u32 * m);
    let values = (0..len)
        .map(|_| {
            let pick: f64 = rng.gen();
            if pick < 0.2 {
                0.0
            } else if pick < 0.35 {
                f64::INFINITY
            } else {
                rng.gen_range(0.1..32.0)
            }
        })
        .collect();
    RoofGrid::new(CellField::new(n, m, values).unwrap())
}

pub fn bench_weight(grid: usize, seed: u64) -> CircleWeight {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![1.0; grid];
    let mut j = 0;
    while j < grid {
        let run = rng.gen_range(1..=grid / 16);
        let value = if rng.gen_bool(0.4) { 0.0 } else { 1.0 };
        for cell in samples.iter_mut().skip(j).take(run) {
            *cell = value;
        }
        j += run;
    }
    CircleWeight::new(samples, 2.0).unwrap()
}
