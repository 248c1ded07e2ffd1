//! Child-seed derivation for experiment trials.
//!
//! Seeds are chained through the splitmix64 finalizer, one field at a time, so every field of
//! the scenario key perturbs all output bits.

use xbar_core::ProblemKind;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn absorb(state: u64, field: u64) -> u64 {
    splitmix64(state ^ splitmix64(field))
}

/// Seed for generating the problem instance. Independent of sigma so every variation level
/// of a trial sees the same problem.
pub fn instance_seed(master: u64, kind: ProblemKind, n: usize, density: f64, trial: usize) -> u64 {
    let kind_tag = match kind {
        ProblemKind::Socp => 1,
        ProblemKind::Qcqp => 2,
    };
    [kind_tag, n as u64, density.to_bits(), trial as u64].into_iter().fold(splitmix64(master), absorb)
}

/// Seed for the crossbar variation draw of one (instance, sigma) pair.
pub fn variation_seed(instance_seed: u64, sigma: f64) -> u64 {
    absorb(absorb(instance_seed, 0x5eed), sigma.to_bits())
}
