use gleak_core::preprocess::GuessSecretSource;
use gleak_core::{Gain, IntegerGain, Mechanism, Observable, Secret, SecretSource, StreamRng};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::TwoSidedGeometric;
use crate::error::{EstimateError, Result};

pub const BITS: u32 = 128;

/// Bit-by-bit password checker. The attacker knows the first
/// `prefix_len` bits and wants the next one; the stored password is uniform
/// over the remaining bits. The query repeats the known prefix followed by
/// zeros, and the checker's running time, blurred by two-sided geometric
/// delay of decay `nu` and clamped to `1..=128`, reveals where the first
/// mismatch occurred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PasswordConfig {
    pub prefix: u64,
    pub prefix_len: u32,
    pub nu: f64,
}

impl Default for PasswordConfig {
    fn default() -> Self {
        PasswordConfig {
            prefix: 0b101101,
            prefix_len: 6,
            nu: 0.2,
        }
    }
}

/// Bit `j` (1-based from the most significant end).
pub fn bit(x: u128, j: u32) -> u8 {
    ((x >> (BITS - j)) & 1) as u8
}

impl PasswordConfig {
    pub fn validate(&self) -> Result<()> {
        if self.prefix_len == 0 || self.prefix_len > 64 || self.prefix_len >= BITS - 1 {
            return Err(EstimateError::InvalidConfig("prefix length must be in 1..=64".into()));
        }
        if self.prefix_len < 64 && self.prefix >> self.prefix_len != 0 {
            return Err(EstimateError::InvalidConfig("prefix does not fit its length".into()));
        }
        if self.nu.is_nan() || self.nu <= 0.0 {
            return Err(EstimateError::InvalidConfig("delay decay must be positive".into()));
        }
        Ok(())
    }

    /// Position of the attacked bit.
    pub fn target(&self) -> u32 {
        self.prefix_len + 1
    }

    fn suffix_bits(&self) -> u32 {
        BITS - self.prefix_len
    }

    fn prefix_word(&self) -> u128 {
        u128::from(self.prefix) << self.suffix_bits()
    }

    /// The known prefix followed by zeros.
    pub fn query(&self) -> u128 {
        self.prefix_word()
    }

    /// First mismatching position against the query, 128 when none.
    pub fn fail_position(&self, x: u128) -> u32 {
        ((x ^ self.query()).leading_zeros() + 1).min(BITS)
    }

    fn draw_suffix(&self, rng: &mut StreamRng) -> u128 {
        rng.gen::<u128>() >> self.prefix_len
    }

    pub fn source(&self) -> Result<PasswordSource> {
        self.validate()?;
        Ok(PasswordSource { config: self.clone() })
    }

    pub fn checker(&self) -> Result<TimingChecker> {
        self.validate()?;
        Ok(TimingChecker {
            config: self.clone(),
            delay: TwoSidedGeometric::new(self.nu)?,
        })
    }

    pub fn gain(&self) -> Result<PasswordGain> {
        self.validate()?;
        Ok(PasswordGain { target: self.target() })
    }

    /// Pre-processed input side: both values of the attacked bit are equally
    /// likely and the rest of the password stays uniform.
    pub fn preprocessed(&self) -> Result<TargetBitSource> {
        self.validate()?;
        Ok(TargetBitSource { config: self.clone() })
    }

    /// Law of the first mismatch position given the attacked bit `w`:
    /// `(position, probability)` pairs.
    pub fn fail_law(&self, w: u8) -> Vec<(u32, f64)> {
        let t = self.target();
        if w == 1 {
            // the query has a zero there
            return vec![(t, 1.0)];
        }
        // bits after t are fair coins; the first 1 among them is the mismatch
        let mut law: Vec<(u32, f64)> = (t + 1..BITS).map(|p| (p, 0.5f64.powi((p - t) as i32))).collect();
        // mismatch at the last bit, or no mismatch at all
        law.push((BITS, 2.0 * 0.5f64.powi((BITS - t) as i32)));
        law
    }

    /// `RC`: law of the observable (columns `1..=128`) given the attacked bit.
    pub fn analytic_rc(&self) -> Result<[Vec<f64>; 2]> {
        self.validate()?;
        let delay = TwoSidedGeometric::new(self.nu)?;
        let row = |w: u8| -> Vec<f64> {
            let mut row = vec![0.0; BITS as usize];
            for (f, pf) in self.fail_law(w) {
                let f = i64::from(f);
                for (b, cell) in row.iter_mut().enumerate() {
                    let b = b as i64 + 1;
                    let p = if b == 1 {
                        delay.cdf(1 - f)
                    } else if b == BITS as i64 {
                        1.0 - delay.cdf(BITS as i64 - 1 - f)
                    } else {
                        delay.pmf(b - f)
                    };
                    *cell += pf * p;
                }
            }
            row
        };
        Ok([row(0), row(1)])
    }

    /// `Σ_y max_w τ_w·RC[w][y]` with `τ` uniform.
    pub fn exact_vulnerability(&self) -> Result<f64> {
        let [r0, r1] = self.analytic_rc()?;
        Ok(r0.iter().zip(&r1).map(|(a, b)| 0.5 * a.max(*b)).sum())
    }
}

#[derive(Clone, Debug)]
pub struct PasswordSource {
    config: PasswordConfig,
}

impl SecretSource for PasswordSource {
    fn draw(&self, rng: &mut StreamRng) -> Secret {
        self.config.prefix_word() | self.config.draw_suffix(rng)
    }
}

#[derive(Clone, Debug)]
pub struct TimingChecker {
    config: PasswordConfig,
    delay: TwoSidedGeometric,
}

impl Mechanism for TimingChecker {
    fn observe(&self, secret: Secret, rng: &mut StreamRng) -> Observable {
        let f = i64::from(self.config.fail_position(secret));
        Observable::scalar((f + self.delay.sample(rng)).clamp(1, BITS as i64))
    }
}

/// Guess `w ∈ {0, 1}` pays 1 when it equals the attacked bit.
#[derive(Clone, Copy, Debug)]
pub struct PasswordGain {
    target: u32,
}

impl Gain for PasswordGain {
    fn num_guesses(&self) -> usize {
        2
    }

    fn gain(&self, guess: usize, secret: Secret) -> f64 {
        f64::from(u8::from(bit(secret, self.target) as usize == guess))
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

impl IntegerGain for PasswordGain {
    fn num_guesses(&self) -> usize {
        2
    }

    fn weight(&self, guess: usize, secret: Secret) -> u64 {
        u64::from(bit(secret, self.target) as usize == guess)
    }
}

#[derive(Clone, Debug)]
pub struct TargetBitSource {
    config: PasswordConfig,
}

impl GuessSecretSource for TargetBitSource {
    fn beta(&self) -> f64 {
        1.0
    }

    fn num_guesses(&self) -> usize {
        2
    }

    fn draw_guess(&self, rng: &mut StreamRng) -> usize {
        rng.gen_range(0..2)
    }

    fn draw_secret(&self, guess: usize, rng: &mut StreamRng) -> Secret {
        let t = self.config.target();
        let mask = 1u128 << (BITS - t);
        let x = self.config.prefix_word() | self.config.draw_suffix(rng);
        if guess == 1 {
            x | mask
        } else {
            x & !mask
        }
    }
}
