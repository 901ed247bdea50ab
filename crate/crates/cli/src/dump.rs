//! Versioned binary dump of ensemble accumulators, so long sweeps can
//! be merged or resumed without rerunning trajectories.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic "PSACCDMP"
//! 8       4     format version (u32), currently 1
//! 12      1     representation (0 = positive-P, 1 = Wigner)
//! 13      8     n_traj (u64)
//! 21      8     diverged (u64)
//! 29      8     n_batches (u64)
//! 37      8     n_checkpoints (u64)
//! 45      ...   accumulator records
//! ```
//!
//! Records follow in batch-major, checkpoint-minor order. Each record
//! holds the output block then the intracavity block; each block is a
//! `u64` sample count followed by 4 first-moment and 10 packed
//! second-moment complex sums as `(re, im)` f64 pairs, in the packing
//! order of the in-memory accumulator.

use crate::ensemble::EnsembleResult;
use num_complex::Complex;
use phasespace_core::moments::{CheckpointAccumulator, MomentAccumulator, N_PAIRS, N_VARS};
use phasespace_core::sde::Representation;
use std::time::Duration;

const MAGIC: &[u8; 8] = b"PSACCDMP";
const VERSION: u32 = 1;
/// Bytes per moment block: count + (4 + 10) complex sums.
const BLOCK_BYTES: usize = 8 + (N_VARS + N_PAIRS) * 16;

pub fn encode(result: &EnsembleResult) -> Vec<u8> {
    let n_batches = result.batches.len();
    let n_cp = result.n_checkpoints();
    let mut out = Vec::with_capacity(45 + n_batches * n_cp * 2 * BLOCK_BYTES);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match result.representation {
        Representation::PositiveP => 0,
        Representation::Wigner => 1,
    });
    out.extend_from_slice(&result.n_traj.to_le_bytes());
    out.extend_from_slice(&result.diverged.to_le_bytes());
    out.extend_from_slice(&(n_batches as u64).to_le_bytes());
    out.extend_from_slice(&(n_cp as u64).to_le_bytes());
    for batch in &result.batches {
        for cp in batch {
            encode_block(&cp.output, &mut out);
            encode_block(&cp.intracavity, &mut out);
        }
    }
    out
}

fn encode_block(acc: &MomentAccumulator, out: &mut Vec<u8>) {
    let (count, first, second) = acc.raw_sums();
    out.extend_from_slice(&count.to_le_bytes());
    for v in first.iter().chain(second.iter()) {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        if self.pos + n > self.data.len() {
            return Err("unexpected end of dump".into());
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn complex(&mut self) -> Result<Complex<f64>, String> {
        Ok(Complex::new(self.f64()?, self.f64()?))
    }
}

pub fn decode(data: &[u8]) -> Result<EnsembleResult, String> {
    let mut c = Cursor { data, pos: 0 };
    if c.take(8)? != MAGIC {
        return Err("not an accumulator dump (bad magic)".into());
    }
    let version = u32::from_le_bytes(c.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(format!("unsupported dump version {version} (expected {VERSION})"));
    }
    let representation = match c.take(1)?[0] {
        0 => Representation::PositiveP,
        1 => Representation::Wigner,
        other => return Err(format!("unknown representation tag {other}")),
    };
    let n_traj = c.u64()?;
    let diverged = c.u64()?;
    let n_batches = c.u64()? as usize;
    let n_cp = c.u64()? as usize;
    let expect = 45 + n_batches * n_cp * 2 * BLOCK_BYTES;
    if data.len() != expect {
        return Err(format!("dump length {} does not match header ({expect})", data.len()));
    }
    let mut batches = Vec::with_capacity(n_batches);
    for _ in 0..n_batches {
        let mut cps = Vec::with_capacity(n_cp);
        for _ in 0..n_cp {
            let output = decode_block(&mut c)?;
            let intracavity = decode_block(&mut c)?;
            cps.push(CheckpointAccumulator { output, intracavity });
        }
        batches.push(cps);
    }
    Ok(EnsembleResult {
        batches,
        diverged,
        n_traj,
        representation,
        wall_time: Duration::ZERO,
    })
}

fn decode_block(c: &mut Cursor) -> Result<MomentAccumulator, String> {
    let count = c.u64()?;
    let mut first = [Complex::default(); N_VARS];
    for v in &mut first {
        *v = c.complex()?;
    }
    let mut second = [Complex::default(); N_PAIRS];
    for v in &mut second {
        *v = c.complex()?;
    }
    Ok(MomentAccumulator::from_raw_sums(count, first, second))
}
