use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random stream addressed by `(seed, session, round)`.
///
/// The seed and session id form the ChaCha key and the round index selects
/// the ChaCha stream, so distinct addresses never share a keystream.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    session: u64,
    round: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, session: u64, round: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&session.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(round);
        Self {
            seed,
            session,
            round,
            rng,
        }
    }

    /// Single-stream convenience constructor (`session = 0, round = 0`).
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self) -> (u64, u64) {
        (self.session, self.round)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
