//! Lattice matrices and coupling coordinates.
//!
//! The six-site Hamiltonian carries three real couplings `(x, y, z)` placed
//! antisymmetrically on the off-diagonals of a discrete Laplacean. All
//! spectral quantities depend on them only through the pair products
//! `A = 1 - x^2`, `B = 1 - y^2`, `C = 1 - z^2`, so [`ProductCouplings`] is
//! the native coordinate system of everything downstream.

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The raw couplings `(x, y, z)` of the six-site Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianCouplings {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianCouplings {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// The pair products `(1 - x^2, 1 - y^2, 1 - z^2)`.
    pub fn to_products(self) -> ProductCouplings {
        ProductCouplings {
            a: 1.0 - self.x * self.x,
            b: 1.0 - self.y * self.y,
            c: 1.0 - self.z * self.z,
        }
    }
}

/// The reduced coupling products `(A, B, C)`: `A` innermost, `C` outermost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductCouplings {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ProductCouplings {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Nonnegative-branch preimage `(sqrt(1-A), sqrt(1-B), sqrt(1-C))`.
    ///
    /// Products above 1 have no real preimage; sign choices never affect a
    /// spectral quantity (they flip signs inside off-diagonal pairs, keeping
    /// the products fixed).
    pub fn to_cartesian(self) -> Result<CartesianCouplings> {
        for v in [self.a, self.b, self.c] {
            if v > 1.0 {
                return Err(Error::NoRealPreimage(v));
            }
        }
        Ok(CartesianCouplings {
            x: (1.0 - self.a).sqrt(),
            y: (1.0 - self.b).sqrt(),
            z: (1.0 - self.c).sqrt(),
        })
    }
}

/// A small dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> RealMatrix {
        let n = self.dim;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, rhs: &RealMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV body: one row per line, comma separated, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format!("{:.16e}", self[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

// JSON shape: {"dim": n, "rows": [[...], ...]}
impl Serialize for RealMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Rows<'a>(&'a RealMatrix);
        impl Serialize for Rows<'_> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let n = self.0.dim;
                let mut seq = s.serialize_seq(Some(n))?;
                for i in 0..n {
                    let row: Vec<f64> = (0..n).map(|j| self.0[(i, j)]).collect();
                    seq.serialize_element(&row)?;
                }
                seq.end()
            }
        }
        let mut st = serializer.serialize_struct("RealMatrix", 2)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("rows", &Rows(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for RealMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            rows: Vec<Vec<f64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.rows.len() != raw.dim || raw.rows.iter().any(|r| r.len() != raw.dim) {
            return Err(serde::de::Error::custom("rows do not match dim"));
        }
        Ok(RealMatrix { dim: raw.dim, data: raw.rows.into_iter().flatten().collect() })
    }
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(())
}

/// The parity matrix: ones on the antidiagonal. Squares to the identity.
pub fn parity(n: usize) -> Result<RealMatrix> {
    check_even(n)?;
    let mut p = RealMatrix::zeros(n);
    for i in 0..n {
        p[(i, n - 1 - i)] = 1.0;
    }
    Ok(p)
}

/// The discrete Laplacean: `-1` on both off-diagonals, zero elsewhere.
pub fn discrete_laplacean(n: usize) -> Result<RealMatrix> {
    check_even(n)?;
    let mut m = RealMatrix::zeros(n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = -1.0;
        m[(i + 1, i)] = -1.0;
    }
    Ok(m)
}

/// The six-site Hamiltonian: superdiagonal `(-1+z, -1+y, -1+x, -1+y, -1+z)`,
/// subdiagonal `(-1-z, -1-y, -1-x, -1-y, -1-z)`, zero elsewhere.
pub fn hamiltonian6(c: &CartesianCouplings) -> RealMatrix {
    let mut m = RealMatrix::zeros(6);
    let g = [c.z, c.y, c.x, c.y, c.z];
    for (i, gi) in g.iter().enumerate() {
        m[(i, i + 1)] = -1.0 + gi;
        m[(i + 1, i)] = -1.0 - gi;
    }
    m
}

/// The four-site predecessor: outer off-diagonal entries `-1 +- sqrt(1-lambda)`,
/// inner `-1 +- sqrt(1-a)`. Requires `lambda <= 1` and `a <= 1` for real
/// entries; outside that range use [`product_representative`] with products
/// `(lambda, a, lambda)`.
pub fn hamiltonian4(lambda: f64, a: f64) -> Result<RealMatrix> {
    if lambda > 1.0 || a > 1.0 {
        return Err(Error::ComplexEntries { lambda, a });
    }
    let u = (1.0 - lambda).sqrt();
    let v = (1.0 - a).sqrt();
    let mut m = RealMatrix::zeros(4);
    let g = [u, v, u];
    for (i, gi) in g.iter().enumerate() {
        m[(i, i + 1)] = -1.0 + gi;
        m[(i + 1, i)] = -1.0 - gi;
    }
    Ok(m)
}

/// A real matrix with the same characteristic polynomial as the lattice
/// Hamiltonian at arbitrary real products.
///
/// The characteristic polynomial of a zero-diagonal tridiagonal matrix
/// depends on the off-diagonal entries only through their opposing-pair
/// products, so putting the whole product on the superdiagonal
/// (`-(C,B,A,B,C)` for n=6, `-(A,B,A)` for n=4) with a unit subdiagonal
/// gives a spectral representative that stays real even where the printed
/// entries of the Hamiltonian would need imaginary couplings.
pub fn product_representative(p: &ProductCouplings, n: usize) -> Result<RealMatrix> {
    let sup: Vec<f64> = match n {
        6 => vec![p.c, p.b, p.a, p.b, p.c],
        4 => vec![p.a, p.b, p.a],
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let mut m = RealMatrix::zeros(n);
    for (i, s) in sup.iter().enumerate() {
        m[(i, i + 1)] = -s;
        m[(i + 1, i)] = -1.0;
    }
    Ok(m)
}

/// PT symmetry test: parity sandwich against transposition.
///
/// Conjugating by the antidiagonal parity just reverses both indices, so the
/// condition is the entrywise identity `H[n-1-i][n-1-j] = H[j][i]`, checked
/// to 1e-14 absolute (exact inputs compare exactly since no arithmetic is
/// performed).
pub fn is_pt_symmetric(h: &RealMatrix) -> bool {
    let n = h.dim();
    for i in 0..n {
        for j in 0..n {
            if (h[(n - 1 - i, n - 1 - j)] - h[(j, i)]).abs() > 1e-14 {
                return false;
            }
        }
    }
    true
}
