use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot draw from an empty choice list")]
pub struct EmptyChoices;

/// ChaCha words reserved for each draw; one draw never consumes more.
const WORDS_PER_DRAW: u128 = 64;

/// Counter-based random stream: the n-th draw depends only on
/// (seed, operator name, n), so draws are reproducible regardless of which
/// other operators ran or in what order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededStream {
    pub seed: u64,
    pub operator: String,
    pub cursor: u64,
}

impl SeededStream {
    pub fn new(seed: u64, operator: impl Into<String>) -> Self {
        Self {
            seed,
            operator: operator.into(),
            cursor: 0,
        }
    }

    /// Picks one element and advances the cursor.
    pub fn draw<T: Clone>(&mut self, choices: &[T]) -> Result<T, EmptyChoices> {
        if choices.is_empty() {
            return Err(EmptyChoices);
        }
        let i = draw_index(self.seed, &self.operator, self.cursor, choices.len());
        self.cursor += 1;
        Ok(choices[i].clone())
    }
}

/// Index in `0..len` of draw number `n` for (seed, operator).
pub fn draw_index(seed: u64, operator: &str, n: u64, len: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(operator));
    rng.set_word_pos(u128::from(n) * WORDS_PER_DRAW);
    rng.gen_range(0..len)
}

/// 64-bit FNV-1a of the operator name, stable across builds and platforms.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_choice() {
        assert_eq!(SeededStream::new(42, "RAID").draw(&["SEND"]), Ok("SEND"));
    }

    #[test]
    fn empty_choices() {
        assert_eq!(
            SeededStream::new(42, "RAID").draw::<u8>(&[]),
            Err(EmptyChoices)
        );
    }

    #[test]
    fn draws_are_pure_in_seed_operator_and_cursor() {
        let choices: Vec<u32> = (0..1000).collect();
        let mut a = SeededStream::new(7, "RAID");
        let seq: Vec<u32> = (0..20).map(|_| a.draw(&choices).unwrap()).collect();
        assert_eq!(a.cursor, 20);
        for (n, v) in seq.iter().enumerate() {
            assert_eq!(draw_index(7, "RAID", n as u64, 1000) as u32, *v);
        }
        // Interleaving another operator's draws changes nothing.
        let mut b = SeededStream::new(7, "RAID");
        let mut other = SeededStream::new(7, "ITR");
        let seq2: Vec<u32> = (0..20)
            .map(|_| {
                other.draw(&choices).unwrap();
                b.draw(&choices).unwrap()
            })
            .collect();
        assert_eq!(seq, seq2);
        let mut c = SeededStream::new(8, "RAID");
        let seq3: Vec<u32> = (0..20).map(|_| c.draw(&choices).unwrap()).collect();
        assert_ne!(seq, seq3);
        let mut d = SeededStream::new(7, "ITR");
        let seq4: Vec<u32> = (0..20).map(|_| d.draw(&choices).unwrap()).collect();
        assert_ne!(seq, seq4);
    }
}
