//! Binary model files.
//!
//! Layout, all little-endian: magic `QPCA`, `u16` version, `u32` m, n, r,
//! then `f64` arrays Ψ planes 0..3 (m·n each, row-major), W planes 0..3
//! (n·r each, row-major), `weights_raw` (r), a `u32`-length-prefixed UTF-8
//! metadata block of `key=value` lines, and a CRC-32 of every preceding byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::{Model, TrainReport};
use crate::qcore::{NormOrder, QMatrix};
use crate::solver::SolverConfig;

pub const MAGIC: &[u8; 4] = b"QPCA";
pub const FORMAT_VERSION: u16 = 1;

fn put_u32(buf: &mut Vec<u8>, x: usize) -> Result<()> {
    let x = u32::try_from(x).map_err(|_| Error::Format(format!("{x} does not fit in u32")))?;
    buf.extend_from_slice(&x.to_le_bytes());
    Ok(())
}

fn put_f64s(buf: &mut Vec<u8>, xs: &[f64]) {
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn metadata(model: &Model) -> String {
    let c = &model.config;
    let rep = &model.report;
    let mut lines = vec![
        format!("s={:?}", c.s),
        format!("p={}", match c.p {
            NormOrder::Finite(p) => format!("{p:?}"),
            NormOrder::Infinity => "inf".into(),
        }),
        format!("r={}", c.r),
        format!("tol={:?}", c.tol),
        format!("max_iter={}", c.max_iter),
        format!("seed={}", c.seed),
        format!("eps_perturb={:?}", c.eps_perturb),
        format!("iterations={}", join(&rep.iterations)),
        format!("converged={}", join(&rep.converged.iter().map(|&b| u8::from(b)).collect::<Vec<_>>())),
        format!("restarts={}", join(&rep.restarts)),
        format!("truncated={}", rep.truncated),
    ];
    lines.extend(model.label_space.iter().map(|l| format!("label={l}")));
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

pub fn encode_model(model: &Model) -> Result<Vec<u8>> {
    let (m, n) = model.dims();
    let r = model.rank();
    let mut buf = Vec::with_capacity(18 + 8 * (4 * m * n + 4 * n * r + r) + 256);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for x in [m, n, r] {
        put_u32(&mut buf, x)?;
    }
    for plane in model.psi.planes() {
        put_f64s(&mut buf, plane);
    }
    for plane in model.basis.planes() {
        put_f64s(&mut buf, plane);
    }
    put_f64s(&mut buf, &model.weights_raw);
    let meta = metadata(model);
    put_u32(&mut buf, meta.len())?;
    buf.extend_from_slice(meta.as_bytes());
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    Ok(buf)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("truncated model file".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn f64s(&mut self, k: usize) -> Result<Vec<f64>> {
        let len = k.checked_mul(8).ok_or_else(|| Error::Format("array size overflow".into()))?;
        Ok(self
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn planes(&mut self, k: usize) -> Result<[Vec<f64>; 4]> {
        Ok([self.f64s(k)?, self.f64s(k)?, self.f64s(k)?, self.f64s(k)?])
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.parse().map_err(|_| Error::Format(format!("bad list entry {t:?}"))))
        .collect()
}

fn parse_metadata(text: &str) -> Result<(SolverConfig, Vec<String>, TrainReport)> {
    let mut kv = BTreeMap::new();
    let mut labels = Vec::new();
    for line in text.lines() {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad metadata line {line:?}")))?;
        if k == "label" {
            labels.push(v.to_string());
        } else {
            kv.insert(k, v);
        }
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::Format(format!("metadata lacks {k}")));
    fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
        v.parse().map_err(|_| Error::Format(format!("bad metadata value {k}={v}")))
    }
    let config = SolverConfig {
        s: num("s", get("s")?)?,
        p: get("p")?.parse().map_err(|_| Error::Format("bad metadata value p".into()))?,
        r: num("r", get("r")?)?,
        tol: num("tol", get("tol")?)?,
        max_iter: num("max_iter", get("max_iter")?)?,
        seed: num("seed", get("seed")?)?,
        eps_perturb: num("eps_perturb", get("eps_perturb")?)?,
    };
    let report = TrainReport {
        iterations: parse_list(get("iterations")?)?,
        converged: parse_list::<u8>(get("converged")?)?.into_iter().map(|b| b != 0).collect(),
        restarts: parse_list(get("restarts")?)?,
        truncated: num("truncated", get("truncated")?)?,
    };
    Ok((config, labels, report))
}

pub fn decode_model(bytes: &[u8]) -> Result<Model> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing QPCA magic bytes".into()));
    }
    if bytes.len() < 6 {
        return Err(Error::Format("truncated model file".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    if bytes.len() < 10 {
        return Err(Error::Format("truncated model file".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    let mut rd = Reader { bytes: body, pos: 6 };
    let (m, n, r) = (rd.u32()?, rd.u32()?, rd.u32()?);
    let psi = QMatrix::from_planes(m, n, rd.planes(m * n)?)?;
    let basis = QMatrix::from_planes(n, r, rd.planes(n * r)?)?;
    let weights = rd.f64s(r)?;
    let meta_len = rd.u32()?;
    let meta = std::str::from_utf8(rd.take(meta_len)?)
        .map_err(|_| Error::Format("metadata is not UTF-8".into()))?;
    if rd.pos != body.len() {
        return Err(Error::Format("trailing bytes after metadata".into()));
    }
    let (config, labels, report) = parse_metadata(meta)?;
    Model::from_parts(psi, basis, weights, config, labels, report)
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_model(model)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    decode_model(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
