//! Dense square matrices of exact amplitudes, for gate unitaries of
//! dimension 3^m.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::amplitude::ExactAmplitude;

/// A dense `dim × dim` matrix of [`ExactAmplitude`]s, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<ExactAmplitude>,
}

impl Matrix {
    pub fn zero(dim: usize) -> Self {
        Matrix {
            dim,
            entries: vec![ExactAmplitude::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zero(dim);
        for i in 0..dim {
            m.set(i, i, ExactAmplitude::one());
        }
        m
    }

    /// Builds a 3×3 matrix from rows.
    pub fn from_rows3(rows: [[ExactAmplitude; 3]; 3]) -> Self {
        Matrix {
            dim: 3,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// The permutation matrix sending basis state `j` to `image[j]`.
    pub fn permutation(image: &[usize]) -> Self {
        let dim = image.len();
        let mut m = Matrix::zero(dim);
        for (col, &row) in image.iter().enumerate() {
            m.set(row, col, ExactAmplitude::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> ExactAmplitude {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: ExactAmplitude) {
        self.entries[row * self.dim + col] = value;
    }

    /// Exact matrix product. Panics on dimension mismatch.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.dim, rhs.dim,
            "matrix dimension mismatch: {} vs {}",
            self.dim, rhs.dim
        );
        let n = self.dim;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let e = out.get(i, j) + a * b;
                    out.set(i, j, e);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Kronecker product; `self` is the more-significant qutrit digit.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Matrix::zero(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..m {
                    for q in 0..m {
                        let b = rhs.get(p, q);
                        if !b.is_zero() {
                            out.set(i * m + p, j * m + q, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: ExactAmplitude) -> Matrix {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&e| s * e).collect(),
        }
    }

    /// M·M† = I, by exact equality.
    pub fn is_unitary(&self) -> bool {
        self.mul(&self.dagger()) == Matrix::identity(self.dim)
    }

    /// Checks `self = λ·rhs` for a unimodular ring scalar λ and returns λ.
    ///
    /// The unimodular scalars of the ring are the twelfth roots of unity
    /// ±ω^j and ±i·ω^j (note i = (√3 + 2√3·ω)/3 lies in the ring).
    pub fn global_phase_equal(&self, rhs: &Matrix) -> Option<ExactAmplitude> {
        if self.dim != rhs.dim {
            return None;
        }
        let pivot = (0..self.entries.len()).find(|&i| !rhs.entries[i].is_zero())?;
        for lambda in unimodular_scalars() {
            if self.entries[pivot] == lambda * rhs.entries[pivot] {
                let equal = self
                    .entries
                    .iter()
                    .zip(&rhs.entries)
                    .all(|(&x, &y)| x == lambda * y);
                return if equal { Some(lambda) } else { None };
            }
        }
        None
    }

    /// If every column holds a single exact 1, returns the basis image
    /// vector `col ↦ row`.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let one = ExactAmplitude::one();
        let mut image = Vec::with_capacity(self.dim);
        for col in 0..self.dim {
            let mut hit = None;
            for row in 0..self.dim {
                let e = self.get(row, col);
                if e.is_zero() {
                    continue;
                }
                if e != one || hit.is_some() {
                    return None;
                }
                hit = Some(row);
            }
            image.push(hit?);
        }
        Some(image)
    }

    /// Stable 128-bit fingerprint of the canonical entries. Used to key
    /// search tables; candidate matches are always re-verified exactly.
    pub fn fingerprint128(&self) -> u128 {
        let mut h1: u64 = 0xcbf2_9ce4_8422_2325;
        let mut h2: u64 = 0x6c62_272e_07bb_0142;
        let mut eat = |v: u64| {
            h1 = (h1 ^ v).wrapping_mul(0x0000_0100_0000_01b3);
            h2 = (h2 ^ v.rotate_left(29)).wrapping_mul(0x0000_0100_0000_01b3);
        };
        for (idx, e) in self.entries.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let (a, b, c, d, k) = e.coefficients();
            eat(idx as u64);
            eat(k as u64);
            for v in [a, b, c, d] {
                eat(v as u64);
                eat((v >> 64) as u64);
            }
        }
        ((h1 as u128) << 64) | h2 as u128
    }

    /// First coordinate where the two matrices differ, if any.
    pub fn first_difference(&self, rhs: &Matrix) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.get(i, j) != rhs.get(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            dim: self.dim,
            entries: (0..self.dim)
                .map(|i| {
                    (0..self.dim)
                        .map(|j| AmplitudeJson::from(self.get(i, j)))
                        .collect()
                })
                .collect(),
            floats: (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.get(i, j).to_float()).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Matrix {
        let mut m = Matrix::zero(json.dim);
        for (i, row) in json.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m.set(i, j, ExactAmplitude::new(e.a, e.b, e.c, e.d, e.k));
            }
        }
        m
    }
}

/// The twelve unimodular scalars ±ω^j, ±i·ω^j of the ring.
pub fn unimodular_scalars() -> impl Iterator<Item = ExactAmplitude> {
    // i = (√3 + 2√3·ω)/3
    let i_unit = ExactAmplitude::new(0, 0, 1, 2, 1);
    (0..3).flat_map(move |j| {
        let w = ExactAmplitude::omega_pow(j);
        [w, -w, i_unit * w, -(i_unit * w)]
    })
}

/// JSON form of a single amplitude's canonical coefficients.
#[derive(Serialize, Deserialize)]
pub struct AmplitudeJson {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
    pub k: u32,
}

impl From<ExactAmplitude> for AmplitudeJson {
    fn from(e: ExactAmplitude) -> Self {
        let (a, b, c, d, k) = e.coefficients();
        AmplitudeJson { a, b, c, d, k }
    }
}

/// JSON form of a matrix: exact entries plus a float mirror for display.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<AmplitudeJson>>,
    #[serde(default)]
    pub floats: Vec<Vec<(f64, f64)>>,
}

impl fmt::Display for Matrix {
    /// Row-major rendering with the amplitude cell format, cells aligned
    /// per column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        let widths: Vec<usize> = (0..self.dim)
            .map(|j| cells.iter().map(|row| row[j].len()).max().unwrap_or(0))
            .collect();
        for (i, row) in cells.iter().enumerate() {
            write!(f, "[ ")?;
            for (j, cell) in row.iter().enumerate() {
                write!(f, "{cell:>width$}", width = widths[j])?;
                if j + 1 < self.dim {
                    write!(f, "  ")?;
                }
            }
            write!(f, " ]")?;
            if i + 1 < self.dim {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({})\n{}", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: i64) -> ExactAmplitude {
        ExactAmplitude::omega_pow(n)
    }

    #[test]
    fn identity_multiplication() {
        let id = Matrix::identity(3);
        let mut m = Matrix::zero(3);
        m.set(0, 1, w(1));
        m.set(1, 2, w(2));
        m.set(2, 0, ExactAmplitude::one());
        assert_eq!(id.mul(&m), m);
        assert_eq!(m.mul(&id), m);
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(
            Matrix::identity(3).kron(&Matrix::identity(3)),
            Matrix::identity(9)
        );
    }

    #[test]
    fn permutation_roundtrip() {
        let p = Matrix::permutation(&[2, 0, 1]);
        assert_eq!(p.as_permutation(), Some(vec![2, 0, 1]));
        assert!(p.is_unitary());
        assert_eq!(Matrix::identity(4).as_permutation(), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn global_phase_detection() {
        let mut m = Matrix::identity(3);
        m.set(1, 1, w(1));
        let scaled = m.scale(w(1));
        assert_eq!(m.global_phase_equal(&m), Some(ExactAmplitude::one()));
        assert_eq!(scaled.global_phase_equal(&m), Some(w(1)));
        let i_unit = ExactAmplitude::new(0, 0, 1, 2, 1);
        assert_eq!(m.scale(i_unit).global_phase_equal(&m), Some(i_unit));
        let mut other = m.clone();
        other.set(0, 1, ExactAmplitude::one());
        assert_eq!(other.global_phase_equal(&m), None);
    }

    #[test]
    fn unimodular_scalars_have_norm_one() {
        for s in unimodular_scalars() {
            assert_eq!(s.norm_sqr(), ExactAmplitude::one());
        }
        let all: Vec<_> = unimodular_scalars().collect();
        assert_eq!(all.len(), 12);
        for (i, x) in all.iter().enumerate() {
            for y in &all[i + 1..] {
                assert_ne!(x, y);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut m = Matrix::zero(3);
        m.set(0, 0, ExactAmplitude::inv_sqrt3());
        m.set(1, 2, w(2));
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Matrix::from_json(&back), m);
    }
}
