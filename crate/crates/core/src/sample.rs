//! Sampled secret/observable pairs and the empirical g-vulnerability.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::gain::Gain;
use crate::joint::JointDistribution;
use crate::numeric::kahan_sum;
use crate::rng::{stream_rng, Provenance, StreamId, StreamRng};

/// Secret identifier: an alphabet index for enumerable secret spaces, or the
/// secret value itself (e.g. a 128-bit password) for generative scenarios.
pub type Secret = u128;

/// Canonically encoded observable: an integer tuple compared and hashed
/// component-wise. Matrix channels use 1-tuples holding the output index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Observable(Vec<i64>);

impl Observable {
    pub fn scalar(v: i64) -> Self {
        Observable(vec![v])
    }

    pub fn tuple(components: Vec<i64>) -> Self {
        assert!(!components.is_empty(), "observable must have a component");
        Observable(components)
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// The output index, for 1-tuples with a non-negative component.
    pub fn as_index(&self) -> Option<usize> {
        match self.0.as_slice() {
            [v] if *v >= 0 => Some(*v as usize),
            _ => None,
        }
    }

    /// Canonical text form: components joined by `:`.
    pub fn encode(&self) -> String {
        self.to_string()
    }

    pub fn decode(s: &str) -> Result<Self> {
        let comps = s
            .split(':')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::InvalidArgument(format!("observable {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Observable(comps))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Draws secrets according to a prior.
pub trait SecretSource: Send + Sync {
    fn draw(&self, rng: &mut StreamRng) -> Secret;
}

/// Black-box access to a system: run it on a secret, collect an observable.
/// Must be a pure function of `(secret, rng state)`.
pub trait Mechanism: Send + Sync {
    fn observe(&self, secret: Secret, rng: &mut StreamRng) -> Observable;
}

/// A trained guessing rule `Y → W`; total over all observables.
pub trait Classifier: Send + Sync {
    fn predict(&self, y: &Observable) -> usize;
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn predict(&self, y: &Observable) -> usize {
        (**self).predict(y)
    }
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn predict(&self, y: &Observable) -> usize {
        (**self).predict(y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sample {
    pub secret: Secret,
    pub observable: Observable,
}

/// Multiset of i.i.d. `(x, y)` pairs with the seed they were drawn from.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub provenance: Option<Provenance>,
}

impl SampleSet {
    pub fn new(samples: Vec<Sample>) -> Self {
        SampleSet {
            samples,
            provenance: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter()
    }

    /// Checks that every secret is a valid index into `secrets`.
    pub fn validate(&self, secrets: &Alphabet) -> Result<()> {
        match self
            .samples
            .iter()
            .find(|s| s.secret >= secrets.size() as Secret)
        {
            Some(s) => Err(Error::InvalidArgument(format!(
                "secret index {} outside alphabet of size {}",
                s.secret,
                secrets.size()
            ))),
            None => Ok(()),
        }
    }

    /// Writes CSV lines `x_label,y_encoding`. Without an alphabet the secret
    /// is written as a decimal integer.
    pub fn write_csv<W: Write>(&self, w: W, secrets: Option<&Alphabet>) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for s in &self.samples {
            let label = match secrets {
                Some(a) => a.label(s.secret as usize).to_string(),
                None => s.secret.to_string(),
            };
            wr.write_record([label, s.observable.encode()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, secrets: Option<&Alphabet>) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut samples = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::parse(i + 1, "expected `x_label,y_encoding`"));
            }
            let secret = match secrets {
                Some(a) => a.index_of(&rec[0])? as Secret,
                None => rec[0]
                    .parse::<Secret>()
                    .map_err(|e| Error::parse(i + 1, e.to_string()))?,
            };
            samples.push(Sample {
                secret,
                observable: Observable::decode(&rec[1])?,
            });
        }
        Ok(SampleSet::new(samples))
    }
}

/// Draws `count` i.i.d. pairs `x ~ source`, `y ~ mechanism(x)` from the
/// named stream.
pub fn sample_pairs(
    source: &dyn SecretSource,
    mechanism: &dyn Mechanism,
    count: usize,
    master_seed: u64,
    stream: StreamId,
) -> SampleSet {
    let mut rng = stream_rng(master_seed, stream);
    let samples = (0..count)
        .map(|_| {
            let secret = source.draw(&mut rng);
            let observable = mechanism.observe(secret, &mut rng);
            Sample { secret, observable }
        })
        .collect();
    SampleSet {
        samples,
        provenance: Some(Provenance {
            master_seed,
            stream: stream.0,
        }),
    }
}

/// Draws `count` i.i.d. cells of a finite joint distribution.
pub fn sample_joint(
    joint: &JointDistribution,
    count: usize,
    master_seed: u64,
    stream: StreamId,
) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let ny = joint.observables().size();
    let cells = WeightedIndex::new(joint.probs())
        .map_err(|e| Error::Degenerate(format!("joint: {e}")))?;
    let mut rng = stream_rng(master_seed, stream);
    let samples = (0..count)
        .map(|_| {
            let c = cells.sample(&mut rng);
            Sample {
                secret: (c / ny) as Secret,
                observable: Observable::scalar((c % ny) as i64),
            }
        })
        .collect();
    Ok(SampleSet {
        samples,
        provenance: Some(Provenance {
            master_seed,
            stream: stream.0,
        }),
    })
}

/// Empirical g-vulnerability functional: `(1/n) Σ g(f(y), x)` over the
/// validation pairs.
pub fn empirical_functional<C: Classifier + ?Sized>(
    classifier: &C,
    validation: &SampleSet,
    gain: &dyn Gain,
) -> Result<f64> {
    if validation.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut guesses: HashMap<&Observable, usize> = HashMap::new();
    let total = kahan_sum(validation.iter().map(|s| {
        let w = *guesses
            .entry(&s.observable)
            .or_insert_with(|| classifier.predict(&s.observable));
        gain.gain(w, s.secret)
    }));
    Ok(total / validation.len() as f64)
}
