//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha8 stream, derived from
//! the master seed, a role and an agent id. Streams never share state, so
//! enabling an extension that draws from one stream leaves every other
//! stream's sequence untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum StreamRole {
    Environment = 1,
    Profile = 2,
    Placement = 3,
    Walk = 4,
    Flight = 5,
    Shock = 6,
}

/// Derive the stream for `(master_seed, role, agent_id)`.
///
/// Pure: the same triple always yields the same sequence.
pub fn derive_stream(master_seed: u64, role: StreamRole, agent_id: u32) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((role as u64) << 32) | u64::from(agent_id));
    rng
}
