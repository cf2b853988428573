use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::numeric::{content_lines, format_row, parse_dims, parse_row};
use crate::sample::Secret;

/// Payoff `g(w, x)` of guessing `w` when the secret is `x`.
///
/// Implemented by dense gain matrices and by structured gains over secret
/// spaces too large to enumerate.
pub trait Gain: Send + Sync {
    fn num_guesses(&self) -> usize;
    fn gain(&self, guess: usize, secret: Secret) -> f64;
    /// Interval `[a, b]` containing every gain value.
    fn range(&self) -> (f64, f64);
    /// Amount added to the original gain to make it non-negative.
    fn shift(&self) -> f64 {
        0.0
    }
}

/// Integer-valued gain driving the duplication of the data pre-processing.
pub trait IntegerGain: Send + Sync {
    fn num_guesses(&self) -> usize;
    fn weight(&self, guess: usize, secret: Secret) -> u64;
    /// Factor `K` relating this gain to the original one (`K·g`).
    fn scale(&self) -> u64 {
        1
    }
}

/// Dense gain matrix over guesses `W` × secrets `X`.
///
/// Negative gains are shifted up by `-min g` at construction; `shift` records
/// the amount so vulnerabilities can be reported in the original units.
#[derive(Clone, Debug, PartialEq)]
pub struct GainFunction {
    guesses: Alphabet,
    secrets: Alphabet,
    matrix: Vec<f64>,
    shift: f64,
}

impl GainFunction {
    pub fn new(guesses: Alphabet, secrets: Alphabet, mut matrix: Vec<f64>) -> Result<Self> {
        let expected = guesses.size() * secrets.size();
        if matrix.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: matrix.len(),
            });
        }
        if let Some((i, v)) = matrix.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidEntry { index: i, value: *v });
        }
        let min = matrix.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = if min < 0.0 { -min } else { 0.0 };
        if shift > 0.0 {
            matrix.iter_mut().for_each(|v| *v += shift);
        }
        Ok(GainFunction {
            guesses,
            secrets,
            matrix,
            shift,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nw = rows.len();
        let nx = rows.first().map_or(0, Vec::len);
        if nw == 0 || nx == 0 {
            return Err(Error::InvalidArgument("gain must be non-empty".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != nx) {
            return Err(Error::Dimension {
                expected: nx,
                got: r.len(),
            });
        }
        GainFunction::new(
            Alphabet::indexed(nw),
            Alphabet::indexed(nx),
            rows.into_iter().flatten().collect(),
        )
    }

    /// The identity gain `g(w, x) = [w == x]`, i.e. Bayes vulnerability.
    pub fn identity(alphabet: &Alphabet) -> Self {
        let n = alphabet.size();
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = 1.0;
        }
        GainFunction {
            guesses: alphabet.clone(),
            secrets: alphabet.clone(),
            matrix,
            shift: 0.0,
        }
    }

    pub fn guesses(&self) -> &Alphabet {
        &self.guesses
    }

    pub fn secrets(&self) -> &Alphabet {
        &self.secrets
    }

    pub fn get(&self, w: usize, x: usize) -> f64 {
        self.matrix[w * self.secrets.size() + x]
    }

    /// Row `w` of the (shifted, non-negative) matrix.
    pub fn row(&self, w: usize) -> &[f64] {
        let nx = self.secrets.size();
        &self.matrix[w * nx..(w + 1) * nx]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Converts a vulnerability computed on the shifted gain back to the
    /// original units.
    pub fn to_original_units(&self, v: f64) -> f64 {
        v - self.shift
    }

    pub fn is_integer_valued(&self) -> bool {
        self.matrix.iter().all(|v| v.fract() == 0.0)
    }

    /// Parses the text format: `|W| |X|` then `|W|` rows of `|X|` decimals.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty gain file"))?;
        let (nw, nx) = parse_dims(header, lineno)?;
        let mut data = Vec::with_capacity(nw * nx);
        for _ in 0..nw {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing gain rows"))?;
            data.extend(parse_row(line, lineno, nx)?);
        }
        GainFunction::new(Alphabet::indexed(nw), Alphabet::indexed(nx), data)
    }

    /// Text form in the original (unshifted) units.
    pub fn to_text(&self) -> String {
        let (nw, nx) = (self.guesses.size(), self.secrets.size());
        let mut s = format!("{nw} {nx}\n");
        for w in 0..nw {
            let row: Vec<f64> = self.row(w).iter().map(|v| v - self.shift).collect();
            s.push_str(&format_row(&row));
            s.push('\n');
        }
        s
    }
}

impl Gain for GainFunction {
    fn num_guesses(&self) -> usize {
        self.guesses.size()
    }

    fn gain(&self, guess: usize, secret: Secret) -> f64 {
        self.get(guess, secret as usize)
    }

    fn range(&self) -> (f64, f64) {
        let min = self.matrix.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.matrix.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min, max)
    }

    fn shift(&self) -> f64 {
        self.shift
    }
}
