//! Append-only JSON-lines store of `T_p` characteristic polynomials, one
//! file per `(N, k)`. Later lines win over earlier ones with the same key.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use apgen_core::algebra::IntPolynomial;
use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::AppError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub schema: u32,
    pub level: u64,
    pub weight: u32,
    pub sign: i8,
    pub orbit: String,
    pub degree: usize,
    pub p: u64,
    /// Ascending, monic; written as plain JSON integers of any size.
    #[serde(serialize_with = "ser_big", deserialize_with = "de_big")]
    pub coeffs: Vec<BigInt>,
}

fn ser_big<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let nums: Vec<serde_json::Number> =
        v.iter().map(|c| serde_json::Number::from_str(&c.to_string()).expect("integers are JSON numbers")).collect();
    nums.serialize(s)
}

fn de_big<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    let nums = Vec::<serde_json::Number>::deserialize(d)?;
    nums.iter()
        .map(|n| BigInt::from_str(&n.to_string()).map_err(|_| serde::de::Error::custom(format!("non-integer coefficient {n}"))))
        .collect()
}

impl CacheRecord {
    pub fn new(level: u64, weight: u32, orbit: &str, p: u64, poly: &IntPolynomial) -> Self {
        CacheRecord {
            schema: SCHEMA,
            level,
            weight,
            sign: 1,
            orbit: orbit.to_string(),
            degree: poly.degree(),
            p,
            coeffs: poly.coeffs().to_vec(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.schema == SCHEMA
            && self.coeffs.len() == self.degree + 1
            && self.coeffs.last().is_some_and(|c| *c == BigInt::from(1))
    }

    pub fn polynomial(&self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.clone())
    }
}

/// Records of one file keyed by `(orbit, p)`, plus the number of unusable
/// lines (a torn final line after an interruption, wrong schema, ...).
#[derive(Clone, Debug, Default)]
pub struct Loaded {
    pub records: BTreeMap<(String, u64), CacheRecord>,
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Cache, AppError> {
        fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("cannot create cache directory {}: {e}", dir.display())))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn path(&self, level: u64, weight: u32) -> PathBuf {
        self.dir.join(format!("{level}-{weight}.jsonl"))
    }

    pub fn load(&self, level: u64, weight: u32) -> Result<Loaded, AppError> {
        let path = self.path(level, weight);
        let mut out = Loaded::default();
        let file = match fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(AppError::Io(format!("cannot read {}: {e}", path.display()))),
        };
        for line in BufReader::new(file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheRecord>(&line) {
                Ok(r) if r.is_valid() && r.level == level && r.weight == weight && r.sign == 1 => {
                    out.records.insert((r.orbit.clone(), r.p), r);
                }
                _ => out.skipped += 1,
            }
        }
        Ok(out)
    }

    /// Appends all records in one write.
    pub fn append(&self, records: &[CacheRecord]) -> Result<(), AppError> {
        let Some(first) = records.first() else {
            return Ok(());
        };
        let path = self.path(first.level, first.weight);
        let mut buf = String::new();
        for r in records {
            debug_assert_eq!((r.level, r.weight), (first.level, first.weight));
            buf.push_str(&serde_json::to_string(r).map_err(|e| AppError::Io(e.to_string()))?);
            buf.push('\n');
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))?;
        f.write_all(buf.as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_coefficients_stay_integers() {
        let big: BigInt = BigInt::from(3).pow(80);
        let poly = IntPolynomial::new(vec![-big.clone(), BigInt::from(0), BigInt::from(1)]);
        let r = CacheRecord::new(389, 2, "389.2.5", 7, &poly);
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.contains(&format!("[-{big},0,1]")), "{line}");
        let back: CacheRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<CacheRecord>(&line.replace(",0,", ",0.5,")).is_err());
    }
}
