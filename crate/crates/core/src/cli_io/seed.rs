const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function: a bijective 64-bit avalanche mix.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replication `replication_id` under `master_seed`:
/// `mix64(master_seed ^ mix64(replication_id + 0x9e3779b97f4a7c15))`.
///
/// Every step is a bijection, so distinct ids always give distinct seeds
/// under one master. Pure integer arithmetic, identical on every platform.
pub fn seed_derivation(master_seed: u64, replication_id: u64) -> u64 {
    mix64(master_seed ^ mix64(replication_id.wrapping_add(GOLDEN_GAMMA)))
}
