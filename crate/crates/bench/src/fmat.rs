//! FMAT v1, a minimal binary matrix format.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "FMAT"
//! 4       1     version, 0x01
//! 5       1     scalar: 0 = real f64, 1 = complex f64 pair (re, im)
//! 6       8     rows, u64 little-endian
//! 14      8     cols, u64 little-endian
//! 22      ...   row-major payload, IEEE-754 binary64 little-endian
//! ```
//!
//! Vectors are stored as single-column matrices (`len x 1`); readers also
//! accept a single row.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use fisher_core::{Complex64, Mat};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"FMAT";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 22;

#[derive(Debug, Error)]
pub enum FmatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not an FMAT file (bad magic)")]
    BadMagic,
    #[error("unsupported FMAT version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown scalar code {0}")]
    BadScalar(u8),
    #[error("dimensions {rows}x{cols} overflow")]
    TooLarge { rows: u64, cols: u64 },
    #[error("payload is shorter than the header promises")]
    Truncated,
    #[error("trailing bytes after payload")]
    TrailingData,
    #[error("expected a vector, got a {rows}x{cols} matrix")]
    NotAVector { rows: usize, cols: usize },
    #[error("expected real data, found complex")]
    ExpectedReal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FmatMatrix {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
}

impl FmatMatrix {
    pub fn rows(&self) -> usize {
        match self {
            FmatMatrix::Real(m) => m.rows(),
            FmatMatrix::Complex(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            FmatMatrix::Real(m) => m.cols(),
            FmatMatrix::Complex(m) => m.cols(),
        }
    }

    pub fn real_vector(v: &[f64]) -> Self {
        FmatMatrix::Real(Mat::from_vec(v.len(), 1, v.to_vec()).expect("column shape"))
    }

    pub fn complex_vector(v: &[Complex64]) -> Self {
        FmatMatrix::Complex(Mat::from_vec(v.len(), 1, v.to_vec()).expect("column shape"))
    }

    /// Flattens a single row or column; complex data is returned as is and
    /// real data is lifted.
    pub fn into_complex_vector(self) -> Result<Vec<Complex64>, FmatError> {
        self.check_vector()?;
        Ok(match self {
            FmatMatrix::Real(m) => m.into_vec().into_iter().map(|r| Complex64::new(r, 0.0)).collect(),
            FmatMatrix::Complex(m) => m.into_vec(),
        })
    }

    /// Flattens a single row or column of real data.
    pub fn into_real_vector(self) -> Result<Vec<f64>, FmatError> {
        self.check_vector()?;
        match self {
            FmatMatrix::Real(m) => Ok(m.into_vec()),
            FmatMatrix::Complex(_) => Err(FmatError::ExpectedReal),
        }
    }

    fn check_vector(&self) -> Result<(), FmatError> {
        let (rows, cols) = (self.rows(), self.cols());
        if rows == 1 || cols == 1 {
            Ok(())
        } else {
            Err(FmatError::NotAVector { rows, cols })
        }
    }
}

pub fn write_fmat<W: Write>(mut w: W, mat: &FmatMatrix) -> io::Result<()> {
    let (code, rows, cols) = match mat {
        FmatMatrix::Real(m) => (0u8, m.rows(), m.cols()),
        FmatMatrix::Complex(m) => (1u8, m.rows(), m.cols()),
    };
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, code])?;
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    match mat {
        FmatMatrix::Real(m) => {
            for x in m.as_slice() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        FmatMatrix::Complex(m) => {
            for z in m.as_slice() {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    w.flush()
}

pub fn read_fmat<R: Read>(mut r: R) -> Result<FmatMatrix, FmatError> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(eof_as_truncated)?;
    if &header[..4] != MAGIC {
        return Err(FmatError::BadMagic);
    }
    if header[4] != VERSION {
        return Err(FmatError::UnsupportedVersion(header[4]));
    }
    let code = header[5];
    let rows = u64::from_le_bytes(header[6..14].try_into().unwrap());
    let cols = u64::from_le_bytes(header[14..22].try_into().unwrap());
    let per = match code {
        0 => 1,
        1 => 2,
        c => return Err(FmatError::BadScalar(c)),
    };
    let count = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(per))
        .and_then(|c| usize::try_from(c).ok())
        .filter(|c| c.checked_mul(8).is_some())
        .ok_or(FmatError::TooLarge { rows, cols })?;
    let (rows, cols) = (rows as usize, cols as usize);

    let mut values = Vec::with_capacity(count.min(1 << 24));
    let mut buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf).map_err(eof_as_truncated)?;
        values.push(f64::from_le_bytes(buf));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(FmatError::TrailingData);
    }
    Ok(if code == 0 {
        FmatMatrix::Real(Mat::from_vec(rows, cols, values).expect("count checked"))
    } else {
        let data = values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        FmatMatrix::Complex(Mat::from_vec(rows, cols, data).expect("count checked"))
    })
}

fn eof_as_truncated(e: io::Error) -> FmatError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        FmatError::Truncated
    } else {
        FmatError::Io(e)
    }
}

pub fn save(path: impl AsRef<Path>, mat: &FmatMatrix) -> Result<(), FmatError> {
    let file = File::create(path)?;
    write_fmat(BufWriter::new(file), mat)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<FmatMatrix, FmatError> {
    read_fmat(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(m: &FmatMatrix) -> Vec<u8> {
        let mut out = Vec::new();
        write_fmat(&mut out, m).unwrap();
        out
    }

    #[test]
    fn header_layout_is_exact() {
        let m = FmatMatrix::Real(Mat::from_rows(&[[1.0, -2.5]]).unwrap());
        let bytes = encode(&m);
        let mut want = b"FMAT\x01\x00".to_vec();
        want.extend_from_slice(&1u64.to_le_bytes());
        want.extend_from_slice(&2u64.to_le_bytes());
        want.extend_from_slice(&1.0f64.to_le_bytes());
        want.extend_from_slice(&(-2.5f64).to_le_bytes());
        assert_eq!(bytes, want);
    }

    #[test]
    fn complex_payload_interleaves() {
        let m = FmatMatrix::complex_vector(&[Complex64::new(1.0, 2.0)]);
        let bytes = encode(&m);
        assert_eq!(bytes[5], 1);
        assert_eq!(&bytes[6..14], &1u64.to_le_bytes());
        assert_eq!(&bytes[14..22], &1u64.to_le_bytes());
        assert_eq!(&bytes[22..30], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[30..38], &2.0f64.to_le_bytes());
        assert_eq!(read_fmat(&bytes[..]).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_input() {
        let good = encode(&FmatMatrix::real_vector(&[1.0, 2.0]));
        assert!(matches!(read_fmat(&b"FMAX"[..]), Err(FmatError::Truncated)));
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(read_fmat(&bad[..]), Err(FmatError::BadMagic)));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(read_fmat(&bad[..]), Err(FmatError::UnsupportedVersion(2))));
        let mut bad = good.clone();
        bad[5] = 7;
        assert!(matches!(read_fmat(&bad[..]), Err(FmatError::BadScalar(7))));
        assert!(matches!(read_fmat(&good[..good.len() - 1]), Err(FmatError::Truncated)));
        let mut bad = good.clone();
        bad.push(0);
        assert!(matches!(read_fmat(&bad[..]), Err(FmatError::TrailingData)));
        let mut huge = good[..6].to_vec();
        huge.extend_from_slice(&u64::MAX.to_le_bytes());
        huge.extend_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(read_fmat(&huge[..]), Err(FmatError::TooLarge { .. })));
    }

    #[test]
    fn vector_shapes() {
        let row = FmatMatrix::Real(Mat::from_rows(&[[1.0, 2.0]]).unwrap());
        assert_eq!(row.into_complex_vector().unwrap().len(), 2);
        let sq = FmatMatrix::Real(Mat::zeros(2, 2));
        assert!(sq.into_complex_vector().is_err());
        let z = FmatMatrix::complex_vector(&[Complex64::new(0.0, 1.0)]);
        assert!(matches!(z.into_real_vector(), Err(FmatError::ExpectedReal)));
    }
}
