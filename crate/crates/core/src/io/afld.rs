//! AFLD binary field files.
//!
//! Layout, all integers and reals little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `AFLD`                              |
//! | 4      | 2    | version, `u16` = 1                        |
//! | 6      | 12   | `n1, n2, n3` as `u32`                     |
//! | 18     | 2    | component count, `u16`                    |
//! | 20     | 1    | layout: 0 real samples, 1 half spectrum   |
//! | 21     | ...  | payload of `f64`                          |
//!
//! The payload is component-major, then row-major with `x3` fastest. Real
//! samples take `n1 n2 n3` values per component. A half spectrum keeps the
//! modes with third index `0 ..= n3/2` as interleaved `(re, im)` pairs,
//! `2 n1 n2 (n3/2 + 1)` values per component; the rest follows from
//! Hermitian symmetry.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{forward_transform, inverse_transform, Grid, RealField, SpectralField};

pub const MAGIC: [u8; 4] = *b"AFLD";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    RealSamples = 0,
    HalfSpectrum = 1,
}

/// Decoded contents of an AFLD file.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldFile {
    Real(Vec<RealField>),
    Spectral(Vec<SpectralField>),
}

impl FieldFile {
    pub fn grid(&self) -> Option<Grid> {
        match self {
            FieldFile::Real(v) => v.first().map(RealField::grid),
            FieldFile::Spectral(v) => v.first().map(SpectralField::grid),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FieldFile::Real(v) => v.len(),
            FieldFile::Spectral(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layout(&self) -> Layout {
        match self {
            FieldFile::Real(_) => Layout::RealSamples,
            FieldFile::Spectral(_) => Layout::HalfSpectrum,
        }
    }

    /// Spectra of every component.
    pub fn to_spectral(&self) -> Vec<SpectralField> {
        match self {
            FieldFile::Real(v) => v.iter().map(forward_transform).collect(),
            FieldFile::Spectral(v) => v.clone(),
        }
    }

    /// Samples of every component.
    pub fn to_real(&self) -> Vec<RealField> {
        match self {
            FieldFile::Real(v) => v.clone(),
            FieldFile::Spectral(v) => v.iter().map(inverse_transform).collect(),
        }
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let grid = self.grid().ok_or_else(|| Error::Format("no components".into()))?;
        let ncomp = u16::try_from(self.len()).map_err(|_| Error::Format("too many components".into()))?;
        let [n1, n2, n3] = grid.dims();
        let mut out = Vec::with_capacity(HEADER_LEN + self.len() * payload_len(grid, self.layout()) * 8);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for n in [n1, n2, n3] {
            let n = u32::try_from(n).map_err(|_| Error::Format(format!("axis length {n} exceeds u32")))?;
            out.extend_from_slice(&n.to_le_bytes());
        }
        out.extend_from_slice(&ncomp.to_le_bytes());
        out.push(self.layout() as u8);
        let mut put = |x: f64| out.extend_from_slice(&x.to_le_bytes());
        match self {
            FieldFile::Real(v) => {
                for f in v {
                    if f.grid() != grid {
                        return Err(Error::Format("components on different grids".into()));
                    }
                    f.samples().iter().for_each(|&x| put(x));
                }
            }
            FieldFile::Spectral(v) => {
                for f in v {
                    if f.grid() != grid {
                        return Err(Error::Format("components on different grids".into()));
                    }
                    if f.hermitian_defect() != 0.0 {
                        return Err(Error::Format(
                            "spectrum is not exactly Hermitian; a half spectrum cannot represent it".into(),
                        ));
                    }
                    for i1 in 0..n1 {
                        for i2 in 0..n2 {
                            for i3 in 0..=n3 / 2 {
                                let c = f.coeffs()[grid.index(i1, i2, i3)];
                                put(c.re);
                                put(c.im);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("{} bytes is shorter than the {HEADER_LEN}-byte header", bytes.len())));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic (expected AFLD)".into()));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
        let version = u16_at(4);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let grid = Grid::new(u32_at(6), u32_at(10), u32_at(14))?;
        let ncomp = u16_at(18) as usize;
        let layout = match bytes[20] {
            0 => Layout::RealSamples,
            1 => Layout::HalfSpectrum,
            b => return Err(Error::Format(format!("unknown layout byte {b}"))),
        };
        if ncomp == 0 {
            return Err(Error::Format("component count is zero".into()));
        }
        let per = payload_len(grid, layout);
        let expected = HEADER_LEN + 8 * per * ncomp;
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "payload length {} does not match header ({} expected for {ncomp} component(s) on {grid})",
                bytes.len() - HEADER_LEN,
                expected - HEADER_LEN
            )));
        }
        let values: Vec<f64> = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(match layout {
            Layout::RealSamples => FieldFile::Real(
                values.chunks_exact(per).map(|c| RealField::new(grid, c.to_vec())).collect::<Result<_>>()?,
            ),
            Layout::HalfSpectrum => FieldFile::Spectral(
                values.chunks_exact(per).map(|c| unfold_half(grid, c)).collect::<Result<_>>()?,
            ),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.encode()?)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::decode(&std::fs::read(path)?)
    }
}

fn payload_len(grid: Grid, layout: Layout) -> usize {
    let [n1, n2, n3] = grid.dims();
    match layout {
        Layout::RealSamples => n1 * n2 * n3,
        Layout::HalfSpectrum => 2 * n1 * n2 * (n3 / 2 + 1),
    }
}

fn unfold_half(grid: Grid, values: &[f64]) -> Result<SpectralField> {
    let [n1, n2, n3] = grid.dims();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut it = values.chunks_exact(2);
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            for i3 in 0..=n3 / 2 {
                let v = it.next().expect("length checked");
                c[grid.index(i1, i2, i3)] = Complex64::new(v[0], v[1]);
            }
        }
    }
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            for i3 in n3 / 2 + 1..n3 {
                let idx = grid.index(i1, i2, i3);
                c[idx] = c[grid.conjugate_index(idx)].conj();
            }
        }
    }
    let field = SpectralField::new(grid, c)?;
    if field.hermitian_defect() != 0.0 {
        return Err(Error::Format("stored half spectrum is not Hermitian on its self-conjugate planes".into()));
    }
    Ok(field)
}
