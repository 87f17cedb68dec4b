//! Columnar little-endian dump of a [`MarketRealization`].
//!
//! ```text
//! magic      4 bytes  "LHMR"
//! version    u32      1
//! n, m       u64, u64
//! x_dim      u64
//! z_dim      u64
//! sigma      f64
//! outside    f64      outside-option utility
//! utility    u8       0 = dot, 1 = zero; then beta f64, xi_weight f64
//! quotas     m × u32
//! columns    f64 arrays in order: x (n·x_dim), eps (n·m), eta (n·m),
//!            z (m·z_dim), xi (m), lambda (n), omega (n·m), c (m)
//! ```

use std::io::{Read, Write};

use super::config::UtilitySpec;
use super::realization::MarketRealization;
use crate::error::{Error, Result};
use crate::market::Quotas;

pub const MAGIC: &[u8; 4] = b"LHMR";
pub const VERSION: u32 = 1;

pub fn write_realization<W: Write>(real: &MarketRealization, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    for v in [real.n, real.m, real.x_dim, real.z_dim] {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    out.write_all(&real.sigma.to_le_bytes())?;
    out.write_all(&real.outside_utility.to_le_bytes())?;
    let (tag, beta, xi_weight) = match real.utility {
        UtilitySpec::Dot { beta, xi_weight } => (0u8, beta, xi_weight),
        UtilitySpec::Zero => (1u8, 0.0, 0.0),
    };
    out.write_all(&[tag])?;
    out.write_all(&beta.to_le_bytes())?;
    out.write_all(&xi_weight.to_le_bytes())?;
    for &q in real.quotas.as_slice() {
        out.write_all(&q.to_le_bytes())?;
    }
    for col in [&real.x, &real.eps, &real.eta, &real.z, &real.xi, &real.lambda, &real.omega, &real.c] {
        let mut buf = Vec::with_capacity(col.len() * 8);
        for v in col.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner
            .read_exact(&mut b)
            .map_err(|e| Error::Format(format!("truncated realization dump: {e}")))?;
        Ok(b)
    }

    fn u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.bytes()?);
        usize::try_from(v).map_err(|_| Error::Format(format!("dimension {v} too large")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn column(&mut self, len: usize) -> Result<Vec<f64>> {
        let mut raw = vec![0u8; len.checked_mul(8).ok_or_else(|| Error::Format("column too large".into()))?];
        self.inner
            .read_exact(&mut raw)
            .map_err(|e| Error::Format(format!("truncated realization dump: {e}")))?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn read_realization<R: Read>(input: R) -> Result<MarketRealization> {
    let mut r = Reader { inner: input };
    if &r.bytes::<4>()? != MAGIC {
        return Err(Error::Format("not a realization dump (bad magic)".into()));
    }
    let version = u32::from_le_bytes(r.bytes()?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported dump version {version}")));
    }
    let (n, m, x_dim, z_dim) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
    let sigma = r.f64()?;
    let outside_utility = r.f64()?;
    let [tag] = r.bytes::<1>()?;
    let (beta, xi_weight) = (r.f64()?, r.f64()?);
    let utility = match tag {
        0 => UtilitySpec::Dot { beta, xi_weight },
        1 => UtilitySpec::Zero,
        t => return Err(Error::Format(format!("unknown utility tag {t}"))),
    };
    let quotas = (0..m)
        .map(|_| r.bytes::<4>().map(u32::from_le_bytes))
        .collect::<Result<Vec<u32>>>()?;
    Ok(MarketRealization {
        n,
        m,
        x_dim,
        z_dim,
        sigma,
        x: r.column(n * x_dim)?,
        eps: r.column(n * m)?,
        eta: r.column(n * m)?,
        z: r.column(m * z_dim)?,
        xi: r.column(m)?,
        lambda: r.column(n)?,
        omega: r.column(n * m)?,
        c: r.column(m)?,
        quotas: Quotas::new(quotas)?,
        utility,
        outside_utility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_market, ModelConfig};

    #[test]
    fn binary_round_trip() {
        let real = sample_market(&ModelConfig::new(25, 3).with_seed(6)).unwrap();
        let mut buf = Vec::new();
        write_realization(&real, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"LHMR");
        assert_eq!(read_realization(&buf[..]).unwrap(), real);
    }

    #[test]
    fn json_round_trip_keeps_infinite_thresholds() {
        let real = sample_market(&ModelConfig::new(5, 2).with_seed(6)).unwrap();
        assert!(real.c.iter().all(|c| *c == f64::NEG_INFINITY));
        let text = serde_json::to_string(&real).unwrap();
        assert!(text.contains("\"-inf\""));
        let back: MarketRealization = serde_json::from_str(&text).unwrap();
        assert_eq!(back, real);
    }

    #[test]
    fn truncated_input_is_a_format_error() {
        let real = sample_market(&ModelConfig::new(5, 2).with_seed(6)).unwrap();
        let mut buf = Vec::new();
        write_realization(&real, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_realization(&buf[..]), Err(Error::Format(_))));
    }
}
