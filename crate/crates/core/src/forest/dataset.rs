use std::io::{Read, Write};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ForestError;
use crate::features::{csv_header, FeatureVector, N_FEATURES};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub features: FeatureVector<T>,
    pub is_directory: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset<T> {
    pub rows: Vec<Sample<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(rows: Vec<Sample<T>>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `(positives, negatives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.rows.iter().filter(|r| r.is_directory).count();
        (pos, self.rows.len() - pos)
    }

    pub fn ensure_both_classes(&self) -> Result<(), ForestError> {
        match self.class_counts() {
            (0, _) => Err(ForestError::EmptyClass { class: "directory" }),
            (_, 0) => Err(ForestError::EmptyClass { class: "non-directory" }),
            _ => Ok(()),
        }
    }

    /// Reads the training CSV (`f1..f15,label`). Labels may be `1`/`0`,
    /// `true`/`false` or `directory`/`non-directory`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, ForestError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = csv_header();
        if headers.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
            return Err(ForestError::Format(format!(
                "expected CSV header `{}`, found `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for (ri, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut v = [T::zero(); N_FEATURES];
            for (i, slot) in v.iter_mut().enumerate() {
                let raw = rec.get(i).unwrap_or("").trim();
                let x: f64 = raw
                    .parse()
                    .map_err(|_| ForestError::Format(format!("row {}: column f{} is not a number: `{raw}`", ri + 1, i + 1)))?;
                *slot = T::of(x);
            }
            let label = match rec.get(N_FEATURES).unwrap_or("").trim().to_ascii_lowercase().as_str() {
                "1" | "true" | "directory" => true,
                "0" | "false" | "non-directory" => false,
                other => return Err(ForestError::Format(format!("row {}: unknown label `{other}`", ri + 1))),
            };
            rows.push(Sample { features: FeatureVector(v), is_directory: label });
        }
        Ok(Self { rows })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), ForestError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(csv_header())?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.features.0.iter().map(|x| x.to_string()).collect();
            rec.push(if r.is_directory { "1" } else { "0" }.to_string());
            w.write_record(rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Draws a class-rebalanced copy of `data`.
///
/// Each class is sampled uniformly without replacement when the target does
/// not exceed its supply, and with replacement otherwise. Positives are drawn
/// first, then negatives, from one `ChaCha8Rng` seeded with `seed`; the
/// concatenation is then shuffled with the same generator.
pub fn resample<T: Scalar>(data: &Dataset<T>, target_pos: usize, target_neg: usize, seed: u64) -> Result<Dataset<T>, ForestError> {
    data.ensure_both_classes()?;
    let pos: Vec<&Sample<T>> = data.rows.iter().filter(|r| r.is_directory).collect();
    let neg: Vec<&Sample<T>> = data.rows.iter().filter(|r| !r.is_directory).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(target_pos + target_neg);
    for (pool, target) in [(&pos, target_pos), (&neg, target_neg)] {
        if target <= pool.len() {
            rows.extend(index::sample(&mut rng, pool.len(), target).into_iter().map(|i| *pool[i]));
        } else {
            rows.extend((0..target).map(|_| *pool[rng.gen_range(0..pool.len())]));
        }
    }
    rows.shuffle(&mut rng);
    Ok(Dataset { rows })
}
