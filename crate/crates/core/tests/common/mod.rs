#![allow(dead_code)]

use mmrelay::{NetworkInstance, ObjectiveKind, ProblemSpec, QualityParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random small instance: up to 3×3, rates uniform in [0, 3] Gbit/s, beams
/// in {1, 2}, lower bounds in {0, 0.75}.
pub fn random_spec(seed: u64, objective: ObjectiveKind) -> ProblemSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = rng.gen_range(1..=3);
    let r = rng.gen_range(1..=3);
    random_spec_sized(&mut rng, s, r, objective)
}

pub fn random_spec_sized(rng: &mut ChaCha8Rng, s: usize, r: usize, objective: ObjectiveKind) -> ProblemSpec {
    let srr = (0..s).map(|_| (0..r).map(|_| rng.gen_range(0.0..3.0)).collect()).collect();
    let rdr = (0..r).map(|_| rng.gen_range(0.0..3.0)).collect();
    let bs = (0..s).map(|_| rng.gen_range(1..=2)).collect();
    let br = (0..r).map(|_| rng.gen_range(1..=2)).collect();
    let lb = (0..s).map(|_| if rng.gen_bool(0.5) { 0.0 } else { 0.75 }).collect();
    let inst = NetworkInstance::from_rates(srr, rdr).unwrap().with_beams(bs, br).unwrap();
    ProblemSpec::new(inst, QualityParams::default(), lb, objective).unwrap()
}

/// Every 0/1 matrix of the given shape, in lexicographic order.
pub fn all_assignments(s: usize, r: usize) -> Vec<Vec<Vec<u8>>> {
    let n = s * r;
    (0u32..(1 << n))
        .map(|mask| {
            (0..s)
                .map(|i| (0..r).map(|j| ((mask >> (n - 1 - (i * r + j))) & 1) as u8).collect())
                .collect()
        })
        .collect()
}
