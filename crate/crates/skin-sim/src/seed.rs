/// splitmix64 step, used to derive independent sub-seeds from a scenario
/// seed plus purpose tags.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = base;
    let mut out = splitmix(&mut state);
    for &t in tags {
        state ^= t.wrapping_mul(0x2545_f491_4f6c_dd1d);
        out = splitmix(&mut state);
    }
    out
}
