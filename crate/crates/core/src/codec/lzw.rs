//! Variable-width LZW over 8-bit symbols.
//!
//! Codes 0..=255 are literals, 256 is CLEAR and 257 is END. Code width starts
//! at 9 bits and grows to 12; when the dictionary fills, CLEAR is emitted and
//! both sides reset. Codes are packed most-significant-bit first and the final
//! byte is zero-padded.
//!
//! The width used for each code is the bit length of the largest code the
//! decoder could legally see at that point, which is one less than the
//! encoder's next free slot.

use crate::error::{Error, Result};

const CLEAR: u16 = 256;
const END: u16 = 257;
const FIRST_FREE: u16 = 258;
const MAX_CODES: u16 = 4096;
const MIN_WIDTH: u32 = 9;

#[inline]
fn width_for(max_code: u16) -> u32 {
    (16 - max_code.min(MAX_CODES - 1).leading_zeros()).max(MIN_WIDTH)
}

struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    fn new(capacity: usize) -> Self {
        Self {
            out: Vec::with_capacity(capacity),
            acc: 0,
            nbits: 0,
        }
    }

    #[inline]
    fn write(&mut self, code: u16, width: u32) {
        self.acc = (self.acc << width) | u64::from(code);
        self.nbits += width;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.out.push((self.acc >> self.nbits) as u8);
        }
        self.acc &= (1u64 << self.nbits) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
}

impl<'a> BitReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self {
            data,
            pos: 0,
            acc: 0,
            nbits: 0,
        }
    }

    fn read(&mut self, width: u32) -> Option<u16> {
        while self.nbits < width {
            let byte = *self.data.get(self.pos)?;
            self.pos += 1;
            self.acc = (self.acc << 8) | u64::from(byte);
            self.nbits += 8;
        }
        self.nbits -= width;
        let code = (self.acc >> self.nbits) as u16 & ((1u16 << width) - 1);
        self.acc &= (1u64 << self.nbits) - 1;
        Some(code)
    }
}

/// Open-addressed `(prefix, byte) -> code` table sized for 4096 entries.
struct Dictionary {
    keys: Vec<u32>,
    values: Vec<u16>,
}

const TABLE_SIZE: usize = 1 << 13;

impl Dictionary {
    fn new() -> Self {
        Self {
            keys: vec![u32::MAX; TABLE_SIZE],
            values: vec![0; TABLE_SIZE],
        }
    }

    fn clear(&mut self) {
        self.keys.fill(u32::MAX);
    }

    #[inline]
    fn slot(&self, key: u32) -> usize {
        let mut i = (key.wrapping_mul(0x9E37_79B1) >> 19) as usize;
        while self.keys[i] != u32::MAX && self.keys[i] != key {
            i = (i + 1) & (TABLE_SIZE - 1);
        }
        i
    }

    #[inline]
    fn get(&self, key: u32) -> Option<u16> {
        let i = self.slot(key);
        (self.keys[i] == key).then(|| self.values[i])
    }

    #[inline]
    fn insert(&mut self, key: u32, code: u16) {
        let i = self.slot(key);
        self.keys[i] = key;
        self.values[i] = code;
    }
}

/// Compresses `payload`. Deterministic byte-for-byte.
pub fn compress(payload: &[u8]) -> Vec<u8> {
    let mut writer = BitWriter::new(payload.len() / 2 + 4);
    let mut next = FIRST_FREE;
    let Some((&first, rest)) = payload.split_first() else {
        writer.write(END, width_for(next - 1));
        return writer.finish();
    };

    let mut dict = Dictionary::new();
    let mut prefix = u16::from(first);
    for &byte in rest {
        let key = (u32::from(prefix) << 8) | u32::from(byte);
        if let Some(code) = dict.get(key) {
            prefix = code;
            continue;
        }
        writer.write(prefix, width_for(next - 1));
        if next < MAX_CODES {
            dict.insert(key, next);
            next += 1;
        }
        if next == MAX_CODES {
            writer.write(CLEAR, width_for(next - 1));
            dict.clear();
            next = FIRST_FREE;
        }
        prefix = u16::from(byte);
    }
    writer.write(prefix, width_for(next - 1));
    // the decoder adds one entry on reading the final code
    next = (next + 1).min(MAX_CODES);
    writer.write(END, width_for(next - 1));
    writer.finish()
}

/// Inverse of [`compress`].
pub fn decompress(data: &[u8]) -> Result<Vec<u8>> {
    let corrupt = |what: &str| Error::InvalidInput(format!("corrupt LZW stream: {what}"));
    let mut reader = BitReader::new(data);
    let mut out = Vec::with_capacity(data.len() * 2);

    // entry i (i >= 258) = string(prefix[i]) + suffix[i]
    let mut prefix = vec![0u16; MAX_CODES as usize];
    let mut suffix = vec![0u8; MAX_CODES as usize];
    let mut first_byte = vec![0u8; MAX_CODES as usize];
    for i in 0..256 {
        suffix[i] = i as u8;
        first_byte[i] = i as u8;
    }
    let mut next = FIRST_FREE;
    let mut previous: Option<u16> = None;
    let mut scratch = Vec::new();

    loop {
        let code = reader
            .read(width_for(next))
            .ok_or_else(|| corrupt("missing end code"))?;
        match code {
            END => return Ok(out),
            CLEAR => {
                next = FIRST_FREE;
                previous = None;
                continue;
            }
            _ => {}
        }
        let Some(prev) = previous else {
            if code >= 256 {
                return Err(corrupt("first code after reset is not a literal"));
            }
            out.push(code as u8);
            previous = Some(code);
            continue;
        };

        let head = if code < next {
            first_byte[code as usize]
        } else if code == next {
            first_byte[prev as usize]
        } else {
            return Err(corrupt("code beyond dictionary"));
        };
        if next < MAX_CODES {
            prefix[next as usize] = prev;
            suffix[next as usize] = head;
            first_byte[next as usize] = first_byte[prev as usize];
            next += 1;
        }

        scratch.clear();
        let mut c = code;
        while c >= FIRST_FREE {
            scratch.push(suffix[c as usize]);
            c = prefix[c as usize];
        }
        scratch.push(c as u8);
        out.extend(scratch.iter().rev());
        previous = Some(code);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_payload_is_end_code_only() {
        // END = 257 in 9 bits: 1000_0000_1 -> 0x80 0x80
        assert_eq!(compress(&[]), vec![0x80, 0x80]);
        assert_eq!(decompress(&compress(&[])).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn single_byte() {
        // 'A' (65) then END, 9 bits each: 001000001 100000001 -> pad to 3 bytes
        let c = compress(b"A");
        assert_eq!(c, vec![0b0010_0000, 0b1100_0000, 0b0100_0000]);
        assert_eq!(decompress(&c).unwrap(), b"A");
    }

    #[test]
    fn classic_kwkwk_case() {
        let data = b"abababababababab";
        assert_eq!(decompress(&compress(data)).unwrap(), data);
        let data = b"aaaaaaaaaaaaaaaaaaaaaaaaaaa";
        assert_eq!(decompress(&compress(data)).unwrap(), data);
    }

    #[test]
    fn run_of_identical_bytes_compresses_hard() {
        let data = vec![42u8; 10_000];
        let c = compress(&data);
        assert!(c.len() * 20 < data.len(), "{} bytes", c.len());
        assert_eq!(decompress(&c).unwrap(), data);
    }

    #[test]
    fn dictionary_reset_round_trips() {
        // pseudo-random bytes fill the 4096-entry dictionary several times
        let mut x = 0x1234_5678u32;
        let data: Vec<u8> = (0..200_000)
            .map(|_| {
                x ^= x << 13;
                x ^= x >> 17;
                x ^= x << 5;
                (x >> 24) as u8
            })
            .collect();
        let c = compress(&data);
        assert!(c.len() > data.len());
        assert_eq!(decompress(&c).unwrap(), data);
    }

    #[test]
    fn truncated_stream_is_an_error() {
        let c = compress(b"hello hello hello");
        assert!(decompress(&c[..c.len() - 2]).is_err());
    }
}
