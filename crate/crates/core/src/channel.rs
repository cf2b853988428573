use rand::distributions::{Distribution, WeightedIndex};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::numeric::{content_lines, format_row, kahan_sum, parse_dims, parse_row};
use crate::prior::check_distribution;
use crate::rng::StreamRng;
use crate::sample::{Mechanism, Observable, Secret};
use crate::STOCHASTIC_TOL;

/// Row-stochastic matrix `C[x][y] = P(y | x)`, stored dense row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(input: Alphabet, output: Alphabet, data: Vec<f64>) -> Result<Self> {
        let (nx, ny) = (input.size(), output.size());
        if data.len() != nx * ny {
            return Err(Error::Dimension {
                expected: nx * ny,
                got: data.len(),
            });
        }
        for (x, row) in data.chunks_exact(ny).enumerate() {
            let sum = check_distribution(row).map_err(|e| match e {
                Error::InvalidEntry { index, value } => Error::InvalidEntry {
                    index: x * ny + index,
                    value,
                },
                e => e,
            })?;
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic { row: x, sum });
            }
        }
        Ok(Channel {
            input,
            output,
            data,
        })
    }

    /// Builds a channel with indexed alphabets from explicit rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("channel must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(nx * ny);
        for row in rows {
            if row.len() != ny {
                return Err(Error::Dimension {
                    expected: ny,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Channel::new(Alphabet::indexed(nx), Alphabet::indexed(ny), data)
    }

    /// Builds a channel from non-negative row weights, normalizing each row.
    pub fn from_weights(input: Alphabet, output: Alphabet, mut data: Vec<f64>) -> Result<Self> {
        let ny = output.size();
        if data.len() != input.size() * ny {
            return Err(Error::Dimension {
                expected: input.size() * ny,
                got: data.len(),
            });
        }
        for (x, row) in data.chunks_exact_mut(ny).enumerate() {
            let sum = check_distribution(row)?;
            if sum <= 0.0 {
                return Err(Error::NotStochastic { row: x, sum });
            }
            row.iter_mut().for_each(|v| *v /= sum);
        }
        Channel::new(input, output, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        let a = Alphabet::indexed(n);
        Channel {
            input: a.clone(),
            output: a,
            data,
        }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn rows(&self) -> usize {
        self.input.size()
    }

    pub fn cols(&self) -> usize {
        self.output.size()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let ny = self.cols();
        &self.data[x * ny..(x + 1) * ny]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols() + y]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Cascade `self · next`: the channel obtained by feeding this channel's
    /// output into `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.cols() != next.rows() {
            return Err(Error::Dimension {
                expected: self.cols(),
                got: next.rows(),
            });
        }
        self.output.ensure_same(&next.input, "composition")?;
        let (nw, ny) = (self.rows(), next.cols());
        let mut data = vec![0.0; nw * ny];
        for w in 0..nw {
            let out = &mut data[w * ny..(w + 1) * ny];
            for (x, &r) in self.row(w).iter().enumerate() {
                if r == 0.0 {
                    continue;
                }
                for (o, &c) in out.iter_mut().zip(next.row(x)) {
                    *o += r * c;
                }
            }
        }
        // Rounding can push a row sum a few ulps past the tolerance on very
        // wide channels; renormalize to keep the invariant exact.
        for row in data.chunks_exact_mut(ny) {
            let s = kahan_sum(row.iter().copied());
            row.iter_mut().for_each(|v| *v /= s);
        }
        Channel::new(self.input.clone(), next.output.clone(), data)
    }

    pub fn sampler(&self) -> Result<ChannelSampler> {
        ChannelSampler::new(self)
    }

    /// Parses the text format: `|X| |Y|` then `|X|` rows of `|Y|` decimals.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty channel file"))?;
        let (nx, ny) = parse_dims(header, lineno)?;
        let mut data = Vec::with_capacity(nx * ny);
        for _ in 0..nx {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing channel rows"))?;
            data.extend(parse_row(line, lineno, ny)?);
        }
        Channel::new(Alphabet::indexed(nx), Alphabet::indexed(ny), data)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows(), self.cols());
        for x in 0..self.rows() {
            s.push_str(&format_row(self.row(x)));
            s.push('\n');
        }
        s
    }
}

/// Black-box sampler for a matrix channel; observables are output indices.
#[derive(Clone, Debug)]
pub struct ChannelSampler {
    rows: Vec<WeightedIndex<f64>>,
}

impl ChannelSampler {
    pub fn new(channel: &Channel) -> Result<Self> {
        let rows = (0..channel.rows())
            .map(|x| {
                WeightedIndex::new(channel.row(x))
                    .map_err(|e| Error::Degenerate(format!("channel row {x}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(ChannelSampler { rows })
    }
}

impl Mechanism for ChannelSampler {
    fn observe(&self, secret: Secret, rng: &mut StreamRng) -> Observable {
        let y = self.rows[secret as usize].sample(rng);
        Observable::scalar(y as i64)
    }
}
