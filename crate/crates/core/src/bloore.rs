//! Bloore-parameterization algebra for 4×4 density matrices.
//!
//! Off-diagonal entries are written `ρ_ij = √(ρ_ii ρ_jj) z_ij`. With this
//! scaling `det ρ = (Π ρ_ii)·A₂(z)` and every principal minor factors the same
//! way, so positivity is a property of `z` alone. The determinant of the
//! partial transpose does depend on the diagonal, but only through
//! `ν = ρ11 ρ44 / (ρ22 ρ33)`:
//!
//! ```text
//! det ρ_PT = (ρ22 ρ33)² · Σ_k c_k ν^{k/2}
//! ```
//!
//! with the quartic coefficients of [`a3_quartic_coeffs`].
//!
//! Basis ordering is `|00⟩, |01⟩, |10⟩, |11⟩`; matrix indices are zero-based
//! in code while the `z_ij` names keep the one-based convention.

use num_complex::Complex64;

use crate::{Error, Result};

/// Upper-triangle index pairs in storage order `12, 13, 14, 23, 24, 34`.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

const TRACE_TOL: f64 = 1e-12;

/// Six real Bloore variables `z12, z13, z14, z23, z24, z34`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlooreReal(pub [f64; 6]);

/// Six complex Bloore variables in the same order; `z_ji = conj(z_ij)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlooreComplex(pub [Complex64; 6]);

impl BlooreReal {
    pub fn new(z12: f64, z13: f64, z14: f64, z23: f64, z24: f64, z34: f64) -> Self {
        BlooreReal([z12, z13, z14, z23, z24, z34])
    }
}

impl BlooreComplex {
    /// Builds from twelve reals: six real parts followed by six imaginary parts.
    pub fn from_parts(re: &[f64; 6], im: &[f64; 6]) -> Self {
        let mut z = [Complex64::new(0.0, 0.0); 6];
        for k in 0..6 {
            z[k] = Complex64::new(re[k], im[k]);
        }
        BlooreComplex(z)
    }
}

impl From<BlooreReal> for BlooreComplex {
    fn from(z: BlooreReal) -> Self {
        BlooreComplex(z.0.map(|x| Complex64::new(x, 0.0)))
    }
}

/// Common interface of the real and complex Bloore vectors.
pub trait BlooreVector {
    /// The six `z_ij` in [`PAIRS`] order, as complex numbers.
    fn entries(&self) -> [Complex64; 6];

    /// PSD test of the unit-diagonal matrix `Z` (equivalently of `ρ` for any
    /// strictly positive diagonal).
    fn is_psd(&self) -> bool;

    /// Determinant of `ρ_PT` at the canonical diagonal for `μ = √ν`.
    fn pt_determinant(&self, scales: &CanonicalScales) -> f64;

    /// The unit-diagonal Hermitian matrix `Z` with `ρ = D Z D`, `D = diag(√d)`.
    fn correlation_matrix(&self) -> Matrix4 {
        let z = self.entries();
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            m[i][j] = z[k];
            m[j][i] = z[k].conj();
        }
        m
    }
}

pub type Matrix4 = [[Complex64; 4]; 4];

/// Probabilities `d1..d4` on the diagonal of ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalVector(pub [f64; 4]);

impl DiagonalVector {
    /// Validates nonnegativity and unit trace.
    pub fn new(d: [f64; 4]) -> Result<Self> {
        if let Some((index, &value)) = d.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
            return Err(Error::NegativeDiagonal {
                index: index + 1,
                value,
            });
        }
        let sum: f64 = d.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit { sum });
        }
        Ok(DiagonalVector(d))
    }

    pub fn product(&self) -> f64 {
        self.0.iter().product()
    }

    /// `d1 d4 / (d2 d3)`.
    pub fn nu(&self) -> f64 {
        self.0[0] * self.0[3] / (self.0[1] * self.0[2])
    }
}

/// The diagonal ratio `ν` together with `μ = √ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuRatio {
    nu: f64,
    mu: f64,
}

impl NuRatio {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::InvalidNu(nu));
        }
        Ok(NuRatio { nu, mu: nu.sqrt() })
    }

    /// From `μ = √ν`; the grid is uniform in μ, so this is the exact input.
    pub fn from_mu(mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidNu(mu * mu));
        }
        Ok(NuRatio { nu: mu * mu, mu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// A 4×4 Hermitian matrix with unit trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(pub Matrix4);

impl DensityMatrix4 {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i].re).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|i| {
            (0..4).all(|j| {
                let d = self.0[i][j] - self.0[j][i].conj();
                d.re.abs() <= tol && d.im.abs() <= tol
            })
        })
    }

    pub fn determinant(&self) -> f64 {
        hermitian_det(&self.0)
    }
}

/// `ρ_ij = √(d_i d_j) z_ij`.
pub fn assemble_density<Z: BlooreVector + ?Sized>(
    z: &Z,
    d: &DiagonalVector,
) -> Result<DensityMatrix4> {
    if let Some((index, &value)) = d.0.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
        return Err(Error::NegativeDiagonal {
            index: index + 1,
            value,
        });
    }
    let mut m = z.correlation_matrix();
    let root = d.0.map(f64::sqrt);
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                m[i][j] = Complex64::new(d.0[i], 0.0);
            } else {
                m[i][j] *= root[i] * root[j];
            }
        }
    }
    Ok(DensityMatrix4(m))
}

/// The determinant factor `A₂(z)`, so that `det ρ = (Π d_i)·A₂(z)`.
pub fn a2_real(z: &BlooreReal) -> f64 {
    let [z12, z13, z14, z23, z24, z34] = z.0;
    (z34 * z34 - 1.0) * z12 * z12 + 2.0 * (z14 * (z24 - z23 * z34) + z13 * (z23 - z24 * z34)) * z12
        - z23 * z23
        - z24 * z24
        - z34 * z34
        + z14 * z14 * (z23 * z23 - 1.0)
        + z13 * z13 * (z24 * z24 - 1.0)
        + 2.0 * z23 * z24 * z34
        + 2.0 * z13 * z14 * (z34 - z23 * z24)
        + 1.0
}

/// PSD test through the characteristic polynomial of `Z`.
///
/// A Hermitian matrix is PSD iff every elementary symmetric function of its
/// eigenvalues is nonnegative, i.e. iff the sums of principal minors of each
/// order are nonnegative. Order one is the trace, 4, and is skipped.
pub fn is_psd<Z: BlooreVector + ?Sized>(z: &Z) -> bool {
    z.is_psd()
}

impl BlooreVector for BlooreReal {
    fn entries(&self) -> [Complex64; 6] {
        self.0.map(|x| Complex64::new(x, 0.0))
    }

    fn is_psd(&self) -> bool {
        let [z12, z13, z14, z23, z24, z34] = self.0;
        if self.0.iter().any(|z| z.abs() > 1.0) {
            return false;
        }
        let sq = self.0.map(|x| x * x);
        let e2 = 6.0 - sq.iter().sum::<f64>();
        let minor3 = |a: f64, b: f64, c: f64, a2: f64, b2: f64, c2: f64| {
            1.0 - a2 - b2 - c2 + 2.0 * a * b * c
        };
        // {1,2,3}, {1,2,4}, {1,3,4}, {2,3,4}
        let e3 = minor3(z12, z23, z13, sq[0], sq[3], sq[1])
            + minor3(z12, z24, z14, sq[0], sq[4], sq[2])
            + minor3(z13, z34, z14, sq[1], sq[5], sq[2])
            + minor3(z23, z34, z24, sq[3], sq[5], sq[4]);
        let e4 = a2_real(self);
        e2 >= 0.0 && e3 >= 0.0 && e4 >= 0.0
    }

    fn pt_determinant(&self, scales: &CanonicalScales) -> f64 {
        scales.quartic_prefactor() * a3_quartic_coeffs(self).eval(scales.mu)
    }
}

impl BlooreVector for BlooreComplex {
    fn entries(&self) -> [Complex64; 6] {
        self.0
    }

    fn is_psd(&self) -> bool {
        if self.0.iter().any(|z| z.norm_sqr() > 1.0) {
            return false;
        }
        let sq = self.0.map(|z| z.norm_sqr());
        let e2 = 6.0 - sq.iter().sum::<f64>();
        // det [[1, a, b], [ā, 1, c], [b̄, c̄, 1]] = 1 - |a|² - |b|² - |c|² + 2 Re(a c b̄)
        let minor3 = |ia: usize, ic: usize, ib: usize| {
            let (a, b, c) = (self.0[ia], self.0[ib], self.0[ic]);
            1.0 - sq[ia] - sq[ib] - sq[ic] + 2.0 * (a * c * b.conj()).re
        };
        let e3 = minor3(0, 3, 1) + minor3(0, 4, 2) + minor3(1, 5, 2) + minor3(3, 5, 4);
        let e4 = hermitian_det(&self.correlation_matrix());
        e2 >= 0.0 && e3 >= 0.0 && e4 >= 0.0
    }

    fn pt_determinant(&self, scales: &CanonicalScales) -> f64 {
        // ρ_PT[(a,b),(a',b')] = ρ[(a,b'),(a',b)]: the 12 and 34 blocks are
        // conjugated in place and ρ14, ρ23 trade places.
        let z = &self.0;
        let s = &scales.offdiag;
        let d = &scales.diag;
        let c = |x: f64| Complex64::new(x, 0.0);
        let rho = |k: usize| z[k] * s[k];
        let (r12, r13, r14, r23, r24, r34) = (rho(0), rho(1), rho(2), rho(3), rho(4), rho(5));
        // Rows of ρ_PT; (i,j) ← ρ(PT(i,j)).
        let m = [
            [c(d[0]), r12.conj(), r13, r23],
            [r12, c(d[1]), r14, r24],
            [r13.conj(), r14.conj(), c(d[2]), r34.conj()],
            [r23.conj(), r24.conj(), r34, c(d[3])],
        ];
        hermitian_det(&m)
    }
}

/// Determinant of a Hermitian 4×4 matrix by Laplace expansion along the
/// first two rows. The result is real up to rounding; the imaginary part is
/// discarded.
pub fn hermitian_det(m: &Matrix4) -> f64 {
    let top = |i: usize, j: usize| m[0][i] * m[1][j] - m[0][j] * m[1][i];
    let bot = |i: usize, j: usize| m[2][i] * m[3][j] - m[2][j] * m[3][i];
    let det = top(0, 1) * bot(2, 3) - top(0, 2) * bot(1, 3)
        + top(0, 3) * bot(1, 2)
        + top(1, 2) * bot(0, 3)
        - top(1, 3) * bot(0, 2)
        + top(2, 3) * bot(0, 1);
    det.re
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to the nearer endpoint.
    pub fn endpoint_distance(&self, x: f64) -> f64 {
        (x - self.lo).abs().min((x - self.hi).abs())
    }
}

/// Nested CAD bounds of the real PSD region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadBounds {
    pub z23: Interval,
    pub z24: Interval,
    pub z34: Interval,
}

/// Bounds on `z23`, given `z12, z13 ∈ [-1, 1]`.
pub fn cad_bounds_z23(z12: f64, z13: f64) -> Result<Interval> {
    if z12.abs() > 1.0 || z13.abs() > 1.0 {
        return Err(Error::OutOfRegion("z12 and z13 must lie in [-1, 1]"));
    }
    let c = z12 * z13;
    let r = (1.0 - z12 * z12).sqrt() * (1.0 - z13 * z13).sqrt();
    Ok(Interval {
        lo: c - r,
        hi: c + r,
    })
}

/// Full nested bounds. Each level is only defined when the previous levels
/// hold; violations are reported as [`Error::OutOfRegion`].
pub fn cad_bounds(z12: f64, z13: f64, z14: f64, z23: f64, z24: f64) -> Result<CadBounds> {
    if z14.abs() > 1.0 {
        return Err(Error::OutOfRegion("z14 must lie in [-1, 1]"));
    }
    let b23 = cad_bounds_z23(z12, z13)?;
    if !b23.contains(z23) {
        return Err(Error::OutOfRegion("z23 outside [Z23-, Z23+]"));
    }
    let c = z12 * z14;
    let r = (1.0 - z12 * z12).sqrt() * (1.0 - z14 * z14).sqrt();
    let b24 = Interval {
        lo: c - r,
        hi: c + r,
    };
    if !b24.contains(z24) {
        return Err(Error::OutOfRegion("z24 outside [Z24-, Z24+]"));
    }
    let denom = 1.0 - z12 * z12;
    if denom == 0.0 {
        return Err(Error::OutOfRegion("|z12| = 1 leaves Z34 undefined"));
    }
    // Both radicands are minus a 3×3 principal minor, hence ≤ 0 in-region;
    // clamp rounding noise so their product stays nonnegative.
    let r1 = (-1.0 + z12 * z12 + z13 * z13 - 2.0 * z12 * z13 * z23 + z23 * z23).min(0.0);
    let r2 = (-1.0 + z12 * z12 + z14 * z14 - 2.0 * z12 * z14 * z24 + z24 * z24).min(0.0);
    let s = (r1 * r2).sqrt();
    let centre = z13 * z14 - z12 * z14 * z23 - z12 * z13 * z24 + z23 * z24;
    let b34 = Interval {
        lo: (centre - s) / denom,
        hi: (centre + s) / denom,
    };
    Ok(CadBounds {
        z23: b23,
        z24: b24,
        z34: b34,
    })
}

/// Membership of `z` in the CAD description of the PSD region.
pub fn cad_contains(z: &BlooreReal) -> bool {
    let [z12, z13, z14, z23, z24, z34] = z.0;
    if z12.abs() > 1.0 || z13.abs() > 1.0 {
        return false;
    }
    match cad_bounds(z12, z13, z14, z23, z24) {
        Ok(b) => b.z34.contains(z34),
        Err(_) => false,
    }
}

/// The symmetric diagonal `d1 = d4 = c√ν`, `d2 = d3 = c`, `c = 1/(2(1+√ν))`.
pub fn canonical_diagonals(nu: NuRatio) -> DiagonalVector {
    let c = 0.5 / (1.0 + nu.mu());
    DiagonalVector([c * nu.mu(), c, c, c * nu.mu()])
}

/// Precomputed canonical diagonal and `√(d_i d_j)` factors for one `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalScales {
    pub mu: f64,
    pub diag: [f64; 4],
    pub offdiag: [f64; 6],
}

impl CanonicalScales {
    pub fn new(nu: NuRatio) -> Self {
        let d = canonical_diagonals(nu).0;
        let root = d.map(f64::sqrt);
        let offdiag = PAIRS.map(|(i, j)| root[i] * root[j]);
        CanonicalScales {
            mu: nu.mu(),
            diag: d,
            offdiag,
        }
    }

    /// `(d2 d3)²`, the positive factor between `det ρ_PT` and the quartic.
    pub fn quartic_prefactor(&self) -> f64 {
        let p = self.diag[1] * self.diag[2];
        p * p
    }
}

/// Transposes each 2×2 block, i.e. transposes the second qubit.
pub fn partial_transpose(rho: &DensityMatrix4) -> DensityMatrix4 {
    let mut out = rho.0;
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    out[2 * a + b][2 * ap + bp] = rho.0[2 * a + bp][2 * ap + b];
                }
            }
        }
    }
    DensityMatrix4(out)
}

/// Coefficients `c0..c4` of the partial-transpose quartic in `μ = √ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtQuartic(pub [f64; 5]);

impl PtQuartic {
    /// `Σ c_k μ^k`.
    #[inline]
    pub fn eval(&self, mu: f64) -> f64 {
        let c = &self.0;
        (((c[4] * mu + c[3]) * mu + c[2]) * mu + c[1]) * mu + c[0]
    }
}

/// The quartic whose value at `μ` has the sign of `det ρ_PT` at any diagonal
/// with ratio `ν = μ²`. Exactly, `det ρ_PT = (d2 d3)² · Σ c_k μ^k`.
pub fn a3_quartic_coeffs(z: &BlooreReal) -> PtQuartic {
    let [z12, z13, z14, z23, z24, z34] = z.0;
    let s = (z34 * z34 - 1.0) * z12 * z12 - 2.0 * (z14 * z23 + z13 * z24) * z34 * z12 - z13 * z13
        + z14 * z14 * z23 * z23
        + (z13 * z13 - 1.0) * z24 * z24
        - z34 * z34
        - 2.0 * z13 * z14 * z23 * z24
        + 1.0;
    PtQuartic([
        -z23 * z23,
        2.0 * z23 * (z12 * z24 + z13 * z34),
        s,
        2.0 * z14 * (z12 * z13 + z24 * z34),
        -z14 * z14,
    ])
}

/// Peres–Horodecki test at ratio `ν`: `det ρ_PT ≥ 0`. Meaningful as a
/// separability test only when `z` is PSD.
pub fn is_ppt<Z: BlooreVector + ?Sized>(z: &Z, nu: NuRatio) -> bool {
    z.pt_determinant(&CanonicalScales::new(nu)) >= 0.0
}
