//! Self-describing binary checkpoints.
//!
//! Layout: the 8-byte magic `TORICKPT`, a little-endian `u32` format version,
//! a little-endian `u64` header length, the JSON header, then three
//! little-endian `f64` arrays of `n_params` values each: parameters, Adam
//! first moments, Adam second moments.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dql::TrainConfig;
use crate::error::{Error, Result};
use crate::qnet::{Adam, AnyNetwork, Precision, QNetwork, Real};

pub const MAGIC: &[u8; 8] = b"TORICKPT";
pub const VERSION: u32 = 1;

/// Where a training run stood when the checkpoint was taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainCursor {
    pub seed: u64,
    pub episodes: u64,
    pub updates: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub config: TrainConfig,
    pub cursor: TrainCursor,
    pub precision: Precision,
    pub adam_step: u64,
    pub n_params: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub params: Vec<f64>,
    pub adam_m: Vec<f64>,
    pub adam_v: Vec<f64>,
}

impl Checkpoint {
    pub fn capture<T: Real>(
        config: &TrainConfig,
        cursor: TrainCursor,
        net: &QNetwork<T>,
        adam: &Adam<T>,
    ) -> Self {
        let widen = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
        Self {
            header: CheckpointHeader {
                config: config.clone(),
                cursor,
                precision: net.config().precision,
                adam_step: adam.step,
                n_params: net.param_count(),
            },
            params: widen(net.params()),
            adam_m: widen(&adam.m),
            adam_v: widen(&adam.v),
        }
    }

    pub fn d(&self) -> usize {
        self.header.config.network.d
    }

    pub fn network(&self) -> Result<AnyNetwork> {
        let cfg = self.header.config.network.clone();
        Ok(match self.header.precision {
            Precision::F64 => AnyNetwork::F64(QNetwork::from_params(cfg, self.params.clone())?),
            Precision::F32 => AnyNetwork::F32(QNetwork::from_params(
                cfg,
                self.params.iter().map(|&x| x as f32).collect(),
            )?),
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_vec(&self.header)?;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for arr in [&self.params, &self.adam_m, &self.adam_v] {
            for x in arr.iter() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Checkpoint("file too short".into()))?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint(
                "not a toric-lab checkpoint (bad magic)".into(),
            ));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {version}"
            )));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let len = u64::from_le_bytes(b8) as usize;
        let mut header = vec![0u8; len];
        r.read_exact(&mut header)?;
        let header: CheckpointHeader = serde_json::from_slice(&header)?;
        header.config.validate()?;
        let mut arrays = Vec::with_capacity(3);
        for _ in 0..3 {
            let mut raw = vec![0u8; header.n_params * 8];
            r.read_exact(&mut raw)
                .map_err(|_| Error::Checkpoint("truncated parameter data".into()))?;
            arrays.push(
                raw.chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect::<Vec<f64>>(),
            );
        }
        let adam_v = arrays.pop().unwrap();
        let adam_m = arrays.pop().unwrap();
        let params = arrays.pop().unwrap();
        let ck = Self {
            header,
            params,
            adam_m,
            adam_v,
        };
        // Reject a header whose architecture disagrees with the stored data.
        ck.network()?;
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnet::{AdamConfig, ConvSpec};

    fn small_config() -> TrainConfig {
        let mut c = TrainConfig::preset("d3").unwrap();
        c.network.conv = vec![ConvSpec {
            filters: 4,
            kernel: 3,
            stride: 2,
        }];
        c.network.fc = vec![4];
        c
    }

    #[test]
    fn round_trip_is_exact() {
        let cfg = small_config();
        let net = QNetwork::<f64>::new(cfg.network.clone(), 8).unwrap();
        let mut adam = Adam::new(AdamConfig::default(), net.param_count());
        let mut p = net.params().to_vec();
        let g = vec![0.3; p.len()];
        adam.update(&mut p, &g).unwrap();
        let cursor = TrainCursor {
            seed: 4,
            episodes: 10,
            updates: 77,
        };
        let ck = Checkpoint::capture(&cfg, cursor, &net, &adam);
        let mut buf = Vec::new();
        ck.write_to(&mut buf).unwrap();
        let back = Checkpoint::read_from(&buf[..]).unwrap();
        assert_eq!(back, ck);
        let AnyNetwork::F64(n) = back.network().unwrap() else {
            panic!()
        };
        assert_eq!(n.params(), net.params());
    }

    #[test]
    fn rejects_garbage_and_truncation() {
        assert!(matches!(
            Checkpoint::read_from(&b"NOTACKPT0000"[..]),
            Err(Error::Checkpoint(_))
        ));
        let cfg = small_config();
        let net = QNetwork::<f64>::new(cfg.network.clone(), 1).unwrap();
        let adam = Adam::new(AdamConfig::default(), net.param_count());
        let mut buf = Vec::new();
        Checkpoint::capture(&cfg, TrainCursor::default(), &net, &adam)
            .write_to(&mut buf)
            .unwrap();
        buf.truncate(buf.len() - 8);
        assert!(matches!(
            Checkpoint::read_from(&buf[..]),
            Err(Error::Checkpoint(_))
        ));
    }

    #[test]
    fn f32_networks_survive_widening() {
        let mut cfg = small_config();
        cfg.network.precision = Precision::F32;
        let net = QNetwork::<f32>::new(cfg.network.clone(), 2).unwrap();
        let adam = Adam::new(AdamConfig::default(), net.param_count());
        let ck = Checkpoint::capture(&cfg, TrainCursor::default(), &net, &adam);
        let AnyNetwork::F32(n) = ck.network().unwrap() else {
            panic!()
        };
        assert_eq!(n.params(), net.params());
    }
}
