//! Scrambled generalized Faure sequences on `[0, 1)^d`.
//!
//! Coordinate `j` of point `n` is the radical inverse, in a prime base
//! `p ≥ d`, of the digit vector `C_j · digits(n) mod p` with generator
//! matrix `C_j = A_j P^j`. `P` is the upper-triangular Pascal matrix mod `p`
//! and `A_j` is a random nonsingular lower-triangular matrix drawn from the
//! scramble seed; `A_j = I` without a seed, which is plain Faure. Lower
//! triangular scrambling preserves the (0, d)-sequence property.
//!
//! Any index can be reached directly, so the stream can be cut into blocks
//! and each block regenerated independently of the others.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloore::{BlooreComplex, BlooreReal, BlooreVector, CanonicalScales};
use crate::{Case, Error, Result};

/// Points per parallel work unit.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Configuration of a point stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub dimension: usize,
    pub base: u64,
    /// `None` selects the unscrambled Faure sequence.
    pub scramble_seed: Option<u64>,
    /// Number of leading points discarded.
    pub skip: u64,
    /// Number of points emitted by [`generate`].
    pub count: u64,
}

impl SequenceSpec {
    /// Scrambled stream in the smallest prime base not below `dimension`.
    pub fn for_dimension(
        dimension: usize,
        scramble_seed: Option<u64>,
        skip: u64,
        count: u64,
    ) -> Self {
        SequenceSpec {
            dimension,
            base: smallest_prime_at_least(dimension.max(2) as u64),
            scramble_seed,
            skip,
            count,
        }
    }

    pub fn for_case(case: Case, scramble_seed: Option<u64>, skip: u64, count: u64) -> Self {
        SequenceSpec {
            dimension: case.dimension(),
            base: case.faure_base(),
            scramble_seed,
            skip,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidSequence("dimension must be positive".into()));
        }
        if !is_prime(self.base) {
            return Err(Error::InvalidSequence(format!(
                "base {} is not prime",
                self.base
            )));
        }
        if self.base < self.dimension as u64 {
            return Err(Error::InvalidSequence(format!(
                "base {} is smaller than dimension {}",
                self.base, self.dimension
            )));
        }
        if self.base > u16::MAX as u64 {
            return Err(Error::InvalidSequence(format!(
                "base {} is too large",
                self.base
            )));
        }
        self.skip
            .checked_add(self.count)
            .ok_or_else(|| Error::InvalidSequence("skip + count overflows u64".into()))?;
        Ok(())
    }

    /// Compact human-readable form used in file metadata.
    pub fn describe(&self) -> String {
        let seed = self
            .scramble_seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "faure(dimension={}, base={}, seed={}, skip={}, count={})",
            self.dimension, self.base, seed, self.skip, self.count
        )
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

pub fn smallest_prime_at_least(n: u64) -> u64 {
    (n.max(2)..)
        .find(|&k| is_prime(k))
        .expect("primes are unbounded")
}

/// Immutable generator matrices, shared by every cursor over the sequence.
#[derive(Debug, Clone)]
pub struct FaureGenerator {
    dimension: usize,
    base: u32,
    /// Output digits per coordinate: smallest `k` with `base^-k < 2^-53`.
    out_digits: usize,
    /// Input digits: enough to index any `u64`.
    in_digits: usize,
    /// `columns[(j * in_digits + c) * out_digits + r] = C_j[r][c]`.
    columns: Vec<u32>,
    denom: f64,
}

impl FaureGenerator {
    pub fn new(spec: &SequenceSpec) -> Result<Self> {
        spec.validate()?;
        let p = spec.base as u32;
        let pu = p as u128;

        let mut out_digits = 0;
        let mut scale: u128 = 1;
        while scale <= 1u128 << 53 {
            scale *= pu;
            out_digits += 1;
        }
        let mut in_digits = 0;
        let mut cap: u128 = 1;
        while cap <= u64::MAX as u128 {
            cap *= pu;
            in_digits += 1;
        }

        let k = out_digits;
        let m = in_digits;
        let n = k.max(m);
        // Pascal's triangle mod p.
        let mut binom = vec![vec![0u32; n]; n];
        for c in 0..n {
            binom[c][0] = 1;
            for r in 1..=c {
                binom[c][r] = (binom[c - 1][r - 1] + if r < c { binom[c - 1][r] } else { 0 }) % p;
            }
        }

        let mut rng = spec.scramble_seed.map(ChaCha8Rng::seed_from_u64);
        let mut columns = vec![0u32; spec.dimension * m * k];
        for j in 0..spec.dimension {
            // P^j[r][c] = C(c, r) j^(c-r) mod p
            let jp = (j as u32) % p;
            let mut pascal = vec![vec![0u32; m]; k];
            for (r, row) in pascal.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate().skip(r) {
                    *entry = (binom[c][r] as u64 * pow_mod(jp, (c - r) as u32, p) as u64 % p as u64)
                        as u32;
                }
            }
            let gen = match rng.as_mut() {
                None => pascal,
                Some(rng) => {
                    let mut a = vec![vec![0u32; k]; k];
                    for (r, row) in a.iter_mut().enumerate() {
                        for (c, entry) in row.iter_mut().enumerate().take(r + 1) {
                            *entry = if c == r {
                                rng.random_range(1..p)
                            } else {
                                rng.random_range(0..p)
                            };
                        }
                    }
                    let mut out = vec![vec![0u32; m]; k];
                    for r in 0..k {
                        for c in 0..m {
                            let mut acc = 0u64;
                            for t in 0..=r {
                                acc += a[r][t] as u64 * pascal[t][c] as u64;
                            }
                            out[r][c] = (acc % p as u64) as u32;
                        }
                    }
                    out
                }
            };
            for c in 0..m {
                for r in 0..k {
                    columns[(j * m + c) * k + r] = gen[r][c];
                }
            }
        }

        Ok(FaureGenerator {
            dimension: spec.dimension,
            base: p,
            out_digits: k,
            in_digits: m,
            columns,
            denom: scale as f64,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// A cursor positioned at absolute index `start`.
    pub fn cursor(&self, start: u64) -> FaureCursor<'_> {
        let k = self.out_digits;
        let mut digits = vec![0u32; self.in_digits];
        let mut n = start;
        for d in digits.iter_mut() {
            *d = (n % self.base as u64) as u32;
            n /= self.base as u64;
        }
        let mut y = vec![0u32; self.dimension * k];
        for j in 0..self.dimension {
            for (c, &a) in digits.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let col = &self.columns[(j * self.in_digits + c) * k..][..k];
                for (yr, &g) in y[j * k..(j + 1) * k].iter_mut().zip(col) {
                    *yr = (*yr + g * a) % self.base;
                }
            }
        }
        FaureCursor {
            gen: self,
            index: start,
            digits,
            y,
        }
    }
}

fn pow_mod(b: u32, e: u32, p: u32) -> u32 {
    let mut acc = 1u64 % p as u64;
    for _ in 0..e {
        acc = acc * b as u64 % p as u64;
    }
    acc as u32
}

/// Sequential access from some index onwards.
#[derive(Debug, Clone)]
pub struct FaureCursor<'a> {
    gen: &'a FaureGenerator,
    index: u64,
    digits: Vec<u32>,
    y: Vec<u32>,
}

impl FaureCursor<'_> {
    /// Absolute index of the point the next call to [`Self::next_into`] writes.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Writes the current point into `out` and advances by one.
    pub fn next_into(&mut self, out: &mut [f64]) {
        let g = self.gen;
        let k = g.out_digits;
        let p = g.base as u128;
        for (j, x) in out.iter_mut().enumerate().take(g.dimension) {
            let mut acc: u128 = 0;
            for &d in &self.y[j * k..(j + 1) * k] {
                acc = acc * p + d as u128;
            }
            let v = acc as f64 / g.denom;
            *x = if v < 1.0 { v } else { 1.0 - f64::EPSILON / 2.0 };
        }
        self.advance();
    }

    fn advance(&mut self) {
        let g = self.gen;
        let k = g.out_digits;
        // Each digit that changes, whether p-1 → 0 on carry or the final
        // +1, moves by +1 mod p, so y gains the corresponding column.
        for c in 0..g.in_digits {
            for j in 0..g.dimension {
                let col = &g.columns[(j * g.in_digits + c) * k..][..k];
                for (yr, &gv) in self.y[j * k..(j + 1) * k].iter_mut().zip(col) {
                    let s = *yr + gv;
                    *yr = if s >= g.base { s - g.base } else { s };
                }
            }
            self.digits[c] += 1;
            if self.digits[c] < g.base {
                break;
            }
            self.digits[c] = 0;
        }
        self.index = self.index.wrapping_add(1);
    }
}

/// The points `skip .. skip + count` of the configured sequence.
pub fn generate(spec: &SequenceSpec) -> Result<Vec<Vec<f64>>> {
    let gen = FaureGenerator::new(spec)?;
    let mut cur = gen.cursor(spec.skip);
    let mut out = Vec::with_capacity(spec.count as usize);
    for _ in 0..spec.count {
        let mut x = vec![0.0; spec.dimension];
        cur.next_into(&mut x);
        out.push(x);
    }
    Ok(out)
}

/// Writes the stream as little-endian `f64`, row-major, no header.
pub fn dump_points<W: Write>(spec: &SequenceSpec, mut w: W) -> std::io::Result<()> {
    let gen = FaureGenerator::new(spec).map_err(std::io::Error::other)?;
    let mut cur = gen.cursor(spec.skip);
    let mut x = vec![0.0; spec.dimension];
    for _ in 0..spec.count {
        cur.next_into(&mut x);
        for v in &x {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

/// A Bloore vector of either kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyBloore {
    Real(BlooreReal),
    Complex(BlooreComplex),
}

impl BlooreVector for AnyBloore {
    fn entries(&self) -> [num_complex::Complex64; 6] {
        match self {
            AnyBloore::Real(z) => z.entries(),
            AnyBloore::Complex(z) => z.entries(),
        }
    }

    fn is_psd(&self) -> bool {
        match self {
            AnyBloore::Real(z) => z.is_psd(),
            AnyBloore::Complex(z) => z.is_psd(),
        }
    }

    fn pt_determinant(&self, scales: &CanonicalScales) -> f64 {
        match self {
            AnyBloore::Real(z) => z.pt_determinant(scales),
            AnyBloore::Complex(z) => z.pt_determinant(scales),
        }
    }
}

#[inline]
fn to_z(u: f64) -> f64 {
    2.0 * u - 1.0
}

/// `u ↦ 2u − 1` per coordinate; first six coordinates are the real parts,
/// the next six the imaginary parts in the complex case.
pub fn map_to_bloore(point: &[f64], case: Case) -> Result<AnyBloore> {
    if point.len() != case.dimension() {
        return Err(Error::DimensionMismatch {
            expected: case.dimension(),
            got: point.len(),
        });
    }
    Ok(match case {
        Case::Real => AnyBloore::Real(BlooreReal(std::array::from_fn(|k| to_z(point[k])))),
        Case::Complex => {
            let re = std::array::from_fn(|k| to_z(point[k]));
            let im = std::array::from_fn(|k| to_z(point[k + 6]));
            AnyBloore::Complex(BlooreComplex::from_parts(&re, &im))
        }
    })
}

/// Volume of the image cube, `2^d`.
pub fn cube_volume_factor(case: Case) -> f64 {
    case.cube_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dimension: usize, base: u64, seed: Option<u64>, skip: u64, count: u64) -> SequenceSpec {
        SequenceSpec {
            dimension,
            base,
            scramble_seed: seed,
            skip,
            count,
        }
    }

    #[test]
    fn van_der_corput_prefix() {
        let pts = generate(&spec(1, 2, None, 0, 8)).unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]);
    }

    #[test]
    fn faure_second_coordinate_base_three() {
        // With P^1, point n = 1 has digits (1) → y = (1); n = 3 = (0,1) maps
        // to column 1 of P = (1, 1) → 1/3 + 1/9.
        let pts = generate(&spec(2, 3, None, 0, 4)).unwrap();
        assert!((pts[1][1] - 1.0 / 3.0).abs() < 1e-16);
        assert!((pts[3][1] - (1.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_bases() {
        assert!(FaureGenerator::new(&spec(6, 8, None, 0, 1)).is_err());
        assert!(FaureGenerator::new(&spec(6, 5, None, 0, 1)).is_err());
        assert!(FaureGenerator::new(&spec(0, 5, None, 0, 1)).is_err());
        assert!(FaureGenerator::new(&spec(6, 7, Some(3), 0, 1)).is_ok());
    }

    #[test]
    fn elementary_intervals_are_balanced() {
        for seed in [None, Some(42)] {
            let pts = generate(&spec(6, 7, seed, 0, 7u64.pow(4))).unwrap();
            for j in 0..6 {
                let mut counts = [0u32; 7];
                for p in &pts {
                    // Points on a bin edge such as 5/7 round to just below it.
                    counts[(p[j] * 7.0 + 1e-9) as usize] += 1;
                }
                assert!(
                    counts.iter().all(|&c| c == 343),
                    "{seed:?} coord {j}: {counts:?}"
                );
            }
        }
    }

    #[test]
    fn restart_matches_prefix() {
        for seed in [None, Some(9)] {
            let all = generate(&spec(12, 13, seed, 0, 500)).unwrap();
            let tail = generate(&spec(12, 13, seed, 123, 200)).unwrap();
            assert_eq!(&all[123..323], &tail[..]);
        }
    }

    #[test]
    fn seeds_change_the_stream() {
        let a = generate(&spec(6, 7, Some(1), 0, 10)).unwrap();
        let b = generate(&spec(6, 7, Some(2), 0, 10)).unwrap();
        let c = generate(&spec(6, 7, Some(1), 0, 10)).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn coordinates_stay_below_one() {
        let pts = generate(&spec(6, 7, Some(5), 7u64.pow(19) - 5, 10)).unwrap();
        assert!(pts.iter().flatten().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn mapping_examples() {
        let z = map_to_bloore(&[0.5; 6], Case::Real).unwrap();
        assert_eq!(z, AnyBloore::Real(BlooreReal::default()));
        let z = map_to_bloore(&[0.0, 1.0, 0.5, 0.5, 0.5, 0.5], Case::Real).unwrap();
        assert_eq!(
            z,
            AnyBloore::Real(BlooreReal::new(-1.0, 1.0, 0.0, 0.0, 0.0, 0.0))
        );
        assert_eq!(cube_volume_factor(Case::Real), 64.0);
        assert_eq!(cube_volume_factor(Case::Complex), 4096.0);
        assert!(matches!(
            map_to_bloore(&[0.5; 6], Case::Complex),
            Err(Error::DimensionMismatch {
                expected: 12,
                got: 6
            })
        ));
        let mut u = [0.5; 12];
        u[6] = 1.0;
        match map_to_bloore(&u, Case::Complex).unwrap() {
            AnyBloore::Complex(z) => assert_eq!(z.0[0], num_complex::Complex64::new(0.0, 1.0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn dump_is_little_endian_row_major() {
        let s = spec(2, 2, None, 1, 2);
        let mut buf = Vec::new();
        dump_points(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 2 * 2 * 8);
        let vals: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let pts = generate(&s).unwrap();
        assert_eq!(vals, pts.concat());
    }
}
