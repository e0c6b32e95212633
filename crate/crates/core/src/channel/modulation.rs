//! Gray-mapped constellations and hard-decision demapping.

use num_complex::Complex64;

use super::SymbolStream;

pub type Bit = bool;

/// Supported constellations, all scaled to unit average power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constellation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Constellation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Bpsk => 1,
            Constellation::Qpsk => 2,
            Constellation::Qam16 => 4,
            Constellation::Qam64 => 6,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// Constellation points indexed by the symbol's bit pattern (MSB-first).
    ///
    /// QAM axes use reflected Gray coding so adjacent points differ in a
    /// single bit; BPSK maps bit 0 -> +1, bit 1 -> -1.
    pub fn points(self) -> Vec<Complex64> {
        match self {
            Constellation::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            Constellation::Qpsk => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                // first bit -> I sign, second bit -> Q sign; 0 = +, 1 = -
                (0..4)
                    .map(|i| {
                        let re = if i & 0b10 == 0 { s } else { -s };
                        let im = if i & 0b01 == 0 { s } else { -s };
                        Complex64::new(re, im)
                    })
                    .collect()
            }
            Constellation::Qam16 => square_qam(&GRAY2, 10.0),
            Constellation::Qam64 => square_qam(&GRAY3, 42.0),
        }
    }
}

// Reflected Gray code -> amplitude level, lowest level first.
const GRAY2: [u64; 4] = [0b00, 0b01, 0b11, 0b10];
const GRAY3: [u64; 8] = [0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100];

fn square_qam(gray: &[u64], norm: f64) -> Vec<Complex64> {
    let m = gray.len(); // levels per axis
    let bits_per_axis = m.trailing_zeros() as usize;
    let scale = 1.0 / norm.sqrt();
    let level = |g: u64| -> f64 {
        let pos = gray.iter().position(|&x| x == g).unwrap();
        (2.0 * pos as f64 - (m as f64 - 1.0)) * scale
    };
    (0..m * m)
        .map(|idx| {
            let hi = (idx >> bits_per_axis) as u64; // I bits (first on the wire)
            let lo = (idx & (m - 1)) as u64; // Q bits
            Complex64::new(level(hi), level(lo))
        })
        .collect()
}

/// Pack bytes into bits, MSB-first within each byte.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<Bit> {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for i in (0..8).rev() {
            bits.push((b >> i) & 1 == 1);
        }
    }
    bits
}

/// Pack bits into bytes, MSB-first; the last byte is zero-padded.
pub fn bits_to_bytes(bits: &[Bit]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[i / 8] |= 1 << (7 - (i % 8));
        }
    }
    bytes
}

/// Map a bit sequence onto constellation symbols. The sequence is padded
/// with zero bits to a whole number of symbols.
pub fn map_bits(bits: &[Bit], constellation: Constellation) -> SymbolStream {
    let bps = constellation.bits_per_symbol();
    let points = constellation.points();
    let n_symbols = bits.len().div_ceil(bps);
    let mut symbols = Vec::with_capacity(n_symbols);
    for i in 0..n_symbols {
        let mut idx = 0usize;
        for j in 0..bps {
            let bit = bits.get(i * bps + j).copied().unwrap_or(false);
            idx = (idx << 1) | usize::from(bit);
        }
        symbols.push(points[idx]);
    }
    SymbolStream::new(symbols)
}

/// Hard-decision demapping: minimum Euclidean distance per symbol, ties
/// broken toward the lowest symbol index. Returns bits_per_symbol bits per
/// received symbol (including any padding the mapper added).
pub fn demap_symbols(rx: &SymbolStream, constellation: Constellation) -> Vec<Bit> {
    let bps = constellation.bits_per_symbol();
    let points = constellation.points();
    let mut bits = Vec::with_capacity(rx.len() * bps);
    for &r in &rx.symbols {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (idx, &p) in points.iter().enumerate() {
            let d = (r - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        for j in (0..bps).rev() {
            bits.push((best >> j) & 1 == 1);
        }
    }
    bits
}
