//! Bit-level payloads: fixed-width integer packing and explicit fragmentation.

use bitvec::prelude::*;

use crate::error::SimError;

pub type Payload = BitVec<u8, Msb0>;

/// Bits needed to write any value in `0..n` (at least 1).
pub fn id_bits(n: usize) -> usize {
    crate::lbgraph::ceil_log2(n).max(1)
}

/// Bits needed to write the value `v` itself.
pub fn value_bits(v: u64) -> usize {
    (u64::BITS - v.leading_zeros()).max(1) as usize
}

#[derive(Clone, Debug, Default)]
pub struct BitWriter {
    bits: Payload,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the low `width` bits of `value`, most significant first.
    pub fn put(&mut self, value: u64, width: usize) -> &mut Self {
        debug_assert!(width == 64 || value < (1u64 << width), "{value} does not fit in {width} bits");
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
        self
    }

    pub fn put_bit(&mut self, b: bool) -> &mut Self {
        self.bits.push(b);
        self
    }

    pub fn put_bits(&mut self, other: &BitSlice<u8, Msb0>) -> &mut Self {
        self.bits.extend_from_bitslice(other);
        self
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn finish(self) -> Payload {
        self.bits
    }
}

#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bits: &'a BitSlice<u8, Msb0>,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitSlice<u8, Msb0>) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn get(&mut self, width: usize) -> Result<u64, SimError> {
        if self.pos + width > self.bits.len() {
            return Err(SimError::Decode(format!("need {width} bits at {}, have {}", self.pos, self.bits.len())));
        }
        let mut v = 0u64;
        for b in &self.bits[self.pos..self.pos + width] {
            v = (v << 1) | (*b as u64);
        }
        self.pos += width;
        Ok(v)
    }

    pub fn get_bit(&mut self) -> Result<bool, SimError> {
        self.get(1).map(|v| v == 1)
    }

    pub fn take(&mut self, width: usize) -> Result<Payload, SimError> {
        if self.pos + width > self.bits.len() {
            return Err(SimError::Decode(format!("need {width} bits at {}, have {}", self.pos, self.bits.len())));
        }
        let out = self.bits[self.pos..self.pos + width].to_bitvec();
        self.pos += width;
        Ok(out)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

/// Split a payload into consecutive pieces of at most `bandwidth` bits.
pub fn fragment(payload: &BitSlice<u8, Msb0>, bandwidth: usize) -> Vec<Payload> {
    assert!(bandwidth > 0);
    payload.chunks(bandwidth).map(BitSlice::to_bitvec).collect()
}

/// Lowercase hex of the payload bytes (the final byte zero-padded).
pub fn to_hex(p: &BitSlice<u8, Msb0>) -> String {
    let mut v = p.to_bitvec();
    v.set_uninitialized(false);
    v.as_raw_slice().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_fixed_width() {
        let mut w = BitWriter::new();
        w.put(5, 3).put(0, 1).put(1023, 10).put_bit(true);
        let p = w.finish();
        assert_eq!(p.len(), 15);
        let mut r = BitReader::new(&p);
        assert_eq!(r.get(3).unwrap(), 5);
        assert_eq!(r.get(1).unwrap(), 0);
        assert_eq!(r.get(10).unwrap(), 1023);
        assert!(r.get_bit().unwrap());
        assert!(r.get(1).is_err());
    }

    #[test]
    fn fragments_reassemble() {
        let mut w = BitWriter::new();
        w.put(0xdead_beef, 32);
        let p = w.finish();
        let parts = fragment(&p, 7);
        assert_eq!(parts.len(), 5);
        assert!(parts.iter().all(|x| x.len() <= 7));
        let mut joined = Payload::new();
        for x in &parts {
            joined.extend_from_bitslice(x);
        }
        assert_eq!(joined, p);
    }

    #[test]
    fn widths() {
        assert_eq!([1, 2, 3, 4, 5, 62].map(id_bits), [1, 1, 2, 2, 3, 6]);
        assert_eq!([0, 1, 2, 255, 256].map(value_bits), [1, 1, 2, 8, 9]);
    }
}
