//! Canonical Huffman entropy coder.
//!
//! The code is built from empirical symbol frequencies and serialized as one
//! byte of code length per alphabet symbol; canonical assignment makes the
//! table sufficient to reconstruct the exact codes. Payload bits are packed
//! MSB-first within bytes.
//!
//! Blob layout: magic `GSCZ`, u32 alphabet size, per-symbol u8 code lengths,
//! u64 symbol count, u64 original byte size, bit-packed payload.

use crate::error::{Error, Result};

pub const BLOB_MAGIC: &[u8; 4] = b"GSCZ";

/// Longest admissible code. Counts are u64 so Huffman depths stay far below
/// this in practice; the cap keeps the bit accumulator math in u64.
const MAX_CODE_LEN: u8 = 63;

/// An entropy-coded symbol sequence plus its canonical code table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBlob {
    /// Code length per alphabet symbol; 0 marks a symbol absent from the
    /// sequence.
    pub code_lengths: Vec<u8>,
    pub symbol_count: u64,
    /// Size of the fixed-length byte representation the sequence was encoded
    /// from, recorded for rate accounting.
    pub original_byte_size: u64,
    pub payload: Vec<u8>,
}

impl CompressedBlob {
    /// Serialized size in bytes.
    pub fn byte_size(&self) -> usize {
        4 + 4 + self.code_lengths.len() + 8 + 8 + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_size());
        out.extend_from_slice(BLOB_MAGIC);
        out.extend_from_slice(&(self.code_lengths.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.code_lengths);
        out.extend_from_slice(&self.symbol_count.to_le_bytes());
        out.extend_from_slice(&self.original_byte_size.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Truncated {
                expected: 8,
                actual: bytes.len(),
            });
        }
        if &bytes[..4] != BLOB_MAGIC {
            return Err(Error::BadMagic { expected: "GSCZ" });
        }
        let alphabet = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        // The table needs one byte per symbol, so a sane alphabet size can
        // never exceed what is actually present.
        if alphabet == 0 || bytes.len() < 8 + alphabet + 16 {
            return Err(Error::CorruptBlob(format!(
                "alphabet size {alphabet} inconsistent with blob of {} bytes",
                bytes.len()
            )));
        }
        let code_lengths = bytes[8..8 + alphabet].to_vec();
        let rest = &bytes[8 + alphabet..];
        let symbol_count = u64::from_le_bytes(rest[..8].try_into().unwrap());
        let original_byte_size = u64::from_le_bytes(rest[8..16].try_into().unwrap());
        let payload = rest[16..].to_vec();
        Ok(CompressedBlob {
            code_lengths,
            symbol_count,
            original_byte_size,
            payload,
        })
    }
}

/// Huffman code lengths from symbol frequencies, deterministic across
/// platforms (ties broken by node id).
fn build_code_lengths(freqs: &[u64]) -> Result<Vec<u8>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let present: Vec<usize> = (0..freqs.len()).filter(|&s| freqs[s] > 0).collect();
    let mut lengths = vec![0u8; freqs.len()];
    match present.len() {
        0 => return Err(Error::EmptyInput),
        1 => {
            // Degenerate one-symbol alphabet: assign length 1 (not 0) so the
            // payload stays decodable by length.
            lengths[present[0]] = 1;
            return Ok(lengths);
        }
        _ => {}
    }

    // Node ids: leaves first in symbol order, then internal nodes in merge
    // order. Heap ordering on (freq, id) is therefore deterministic.
    let mut node_freq: Vec<u64> = present.iter().map(|&s| freqs[s]).collect();
    let mut parent: Vec<usize> = vec![usize::MAX; present.len()];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = node_freq
        .iter()
        .enumerate()
        .map(|(id, &f)| Reverse((f, id)))
        .collect();
    while heap.len() > 1 {
        let Reverse((fa, a)) = heap.pop().unwrap();
        let Reverse((fb, b)) = heap.pop().unwrap();
        let id = node_freq.len();
        node_freq.push(fa + fb);
        parent.push(usize::MAX);
        parent[a] = id;
        parent[b] = id;
        heap.push(Reverse((fa + fb, id)));
    }

    for (leaf, &sym) in present.iter().enumerate() {
        let mut depth = 0u8;
        let mut node = leaf;
        while parent[node] != usize::MAX {
            node = parent[node];
            depth += 1;
        }
        if depth > MAX_CODE_LEN {
            return Err(Error::CorruptBlob("code length overflow".into()));
        }
        lengths[sym] = depth;
    }
    Ok(lengths)
}

/// Canonical code assignment (per-length counting, DEFLATE style): symbols
/// sorted by (length, symbol index) receive consecutive codes.
fn canonical_codes(lengths: &[u8]) -> Result<Vec<u64>> {
    let max_len = *lengths.iter().max().unwrap_or(&0);
    if max_len == 0 {
        return Err(Error::EmptyInput);
    }
    if max_len > MAX_CODE_LEN {
        return Err(Error::CorruptBlob(format!(
            "code length {max_len} exceeds maximum {MAX_CODE_LEN}"
        )));
    }
    let mut bl_count = vec![0u64; max_len as usize + 1];
    for &l in lengths {
        if l > 0 {
            bl_count[l as usize] += 1;
        }
    }
    // Kraft inequality in integers: sum of count[len] << (max-len) <= 1<<max.
    let kraft: u64 = (1..=max_len as usize)
        .map(|l| bl_count[l] << (max_len as usize - l))
        .sum();
    if kraft > 1u64 << max_len {
        return Err(Error::KraftViolation);
    }
    let mut next_code = vec![0u64; max_len as usize + 1];
    let mut code = 0u64;
    for l in 1..=max_len as usize {
        code = (code + bl_count[l - 1]) << 1;
        next_code[l] = code;
    }
    let mut codes = vec![0u64; lengths.len()];
    for (sym, &l) in lengths.iter().enumerate() {
        if l > 0 {
            codes[sym] = next_code[l as usize];
            next_code[l as usize] += 1;
        }
    }
    Ok(codes)
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter {
            bytes: Vec::new(),
            acc: 0,
            nbits: 0,
        }
    }

    fn push(&mut self, code: u64, len: u8) {
        for i in (0..len).rev() {
            self.acc = (self.acc << 1) | ((code >> i) & 1);
            self.nbits += 1;
            if self.nbits == 8 {
                self.bytes.push(self.acc as u8);
                self.acc = 0;
                self.nbits = 0;
            }
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.bytes.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.bytes
    }
}

/// Entropy-encode a symbol sequence with a canonical Huffman code built from
/// its empirical frequencies.
pub fn entropy_encode(symbols: &[u32], alphabet: usize) -> Result<CompressedBlob> {
    if symbols.is_empty() {
        return Err(Error::EmptyInput);
    }
    if alphabet == 0 {
        return Err(Error::CorruptBlob("alphabet size must be >= 1".into()));
    }
    let mut freqs = vec![0u64; alphabet];
    for &s in symbols {
        if s as usize >= alphabet {
            return Err(Error::SymbolOutOfRange { symbol: s, alphabet });
        }
        freqs[s as usize] += 1;
    }
    let code_lengths = build_code_lengths(&freqs)?;
    let codes = canonical_codes(&code_lengths)?;
    let mut writer = BitWriter::new();
    for &s in symbols {
        writer.push(codes[s as usize], code_lengths[s as usize]);
    }
    // Rate accounting reference: the fixed-length byte representation of the
    // sequence (ceil(log2 L) bits per symbol, byte aligned per symbol).
    let sym_bytes = fixed_symbol_bytes(alphabet);
    Ok(CompressedBlob {
        code_lengths,
        symbol_count: symbols.len() as u64,
        original_byte_size: symbols.len() as u64 * sym_bytes as u64,
        payload: writer.finish(),
    })
}

/// Bytes per symbol in the uncompressed fixed-length representation.
pub fn fixed_symbol_bytes(alphabet: usize) -> usize {
    let bits = usize::BITS - (alphabet.max(2) - 1).leading_zeros();
    (bits as usize).div_ceil(8)
}

/// Decode the exact original symbol sequence.
pub fn entropy_decode(blob: &CompressedBlob) -> Result<Vec<u32>> {
    let lengths = &blob.code_lengths;
    let max_len = *lengths.iter().max().unwrap_or(&0) as usize;
    if max_len == 0 {
        return if blob.symbol_count == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::CorruptBlob("empty code table".into()))
        };
    }
    if max_len > MAX_CODE_LEN as usize {
        return Err(Error::CorruptBlob(format!(
            "code length {max_len} exceeds maximum {MAX_CODE_LEN}"
        )));
    }

    // Symbols sorted by (length, symbol), as in canonical assignment.
    let mut sorted: Vec<(u8, u32)> = lengths
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0)
        .map(|(s, &l)| (l, s as u32))
        .collect();
    sorted.sort_unstable();
    let mut count = vec![0u64; max_len + 1];
    for &(l, _) in &sorted {
        count[l as usize] += 1;
    }
    let kraft: u64 = (1..=max_len)
        .map(|l| count[l] << (max_len - l))
        .sum();
    if kraft > 1u64 << max_len {
        return Err(Error::KraftViolation);
    }
    // first_code[l] / first_index[l]: canonical code value and position in
    // `sorted` of the first symbol of length l.
    let mut first_code = vec![0u64; max_len + 1];
    let mut first_index = vec![0u64; max_len + 1];
    let mut code = 0u64;
    let mut index = 0u64;
    for l in 1..=max_len {
        code = (code + count[l - 1]) << 1;
        first_code[l] = code;
        first_index[l] = index;
        index += count[l];
    }

    let total_bits = blob.payload.len() as u64 * 8;
    if blob.symbol_count > total_bits {
        return Err(Error::TruncatedPayload);
    }
    let mut out = Vec::with_capacity(blob.symbol_count as usize);
    let mut bit_pos: u64 = 0;
    while (out.len() as u64) < blob.symbol_count {
        let mut code = 0u64;
        let mut len = 0usize;
        loop {
            if bit_pos >= total_bits {
                return Err(Error::TruncatedPayload);
            }
            let byte = blob.payload[(bit_pos / 8) as usize];
            let bit = (byte >> (7 - (bit_pos % 8))) & 1;
            bit_pos += 1;
            code = (code << 1) | bit as u64;
            len += 1;
            if len > max_len {
                return Err(Error::CorruptBlob("invalid code word".into()));
            }
            if count[len] > 0 && code >= first_code[len] && code - first_code[len] < count[len] {
                let idx = first_index[len] + (code - first_code[len]);
                out.push(sorted[idx as usize].1);
                break;
            }
        }
    }
    Ok(out)
}
