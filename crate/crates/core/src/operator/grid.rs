//! Complex functions on the periodic grid `(Z/L)^2`.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::{BufRead, Read, Write};
use std::path::Path;

const MAGIC: &str = "PDGRID v1";
const DTYPE: &str = "complex128-le";

/// Row-major values `f(i, j)` at index `i * L + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    side: usize,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(side: usize, values: Vec<Complex64>) -> Result<Self> {
        check_side(side)?;
        if values.len() != side * side {
            return Err(invalid(format!(
                "{} values for a grid of side {side}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("grid values must be finite"));
        }
        Ok(GridFunction { side, values })
    }

    pub fn zeros(side: usize) -> Result<Self> {
        Self::new(side, vec![Complex64::new(0.0, 0.0); side * side])
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_side(side)?;
        let values = (0..side * side).map(|k| f(k / side, k % side)).collect();
        Self::new(side, values)
    }

    /// Point mass at `(i, j)`.
    pub fn delta(side: usize, i: usize, j: usize) -> Result<Self> {
        let mut g = Self::zeros(side)?;
        g.values[(i % side) * side + j % side] = Complex64::new(1.0, 0.0);
        Ok(g)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at `(i, j)` reduced mod `L`.
    pub fn at(&self, i: i64, j: i64) -> Complex64 {
        let l = self.side as i64;
        self.values[(i.rem_euclid(l) * l + j.rem_euclid(l)) as usize]
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `||self - other|| / ||other||`, or the absolute difference when
    /// `other` vanishes.
    pub fn relative_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.side, other.side);
        let d: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let n = other.norm();
        if n == 0.0 {
            d
        } else {
            d / n
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            side: self.side,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> GridFunction {
        assert_eq!(self.side, other.side);
        GridFunction {
            side: self.side,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `x -> f(x - a)`.
    pub fn translated(&self, a: (i64, i64)) -> GridFunction {
        let l = self.side;
        GridFunction::from_fn(l, |i, j| self.at(i as i64 - a.0, j as i64 - a.1)).expect("same side")
    }

    /// `x -> e((theta . x) / L) f(x)`.
    pub fn modulated(&self, theta: (i64, i64)) -> GridFunction {
        let l = self.side as i64;
        GridFunction::from_fn(self.side, |i, j| {
            let ph = (theta.0 * i as i64 + theta.1 * j as i64).rem_euclid(l) as f64 / l as f64;
            self.values[i * self.side + j] * Complex64::from_polar(1.0, std::f64::consts::TAU * ph)
        })
        .expect("same side")
    }

    /// Unnormalized forward transform `sum_x f(x) e(-x . xi / L)`.
    pub fn fft(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        fft2(&mut buf, self.side, false);
        buf
    }

    /// Inverse of [`GridFunction::fft`].
    pub fn from_spectrum(side: usize, mut spectrum: Vec<Complex64>) -> Result<Self> {
        check_side(side)?;
        fft2(&mut spectrum, side, true);
        let scale = 1.0 / (side * side) as f64;
        for z in &mut spectrum {
            *z *= scale;
        }
        Self::new(side, spectrum)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(out, "{MAGIC}\nside {}\ndtype {DTYPE}\ndata\n", self.side)?;
        for z in &self.values {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut inp = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut side = None;
        let mut line_no = 0;
        loop {
            let mut line = String::new();
            if inp.read_line(&mut line)? == 0 {
                return Err(Error::Format("grid file ends before its data".into()));
            }
            line_no += 1;
            let line = line.trim_end_matches('\n');
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                column: 1,
                message,
            };
            match (line_no, line.split_once(' ')) {
                (1, _) if line == MAGIC => {}
                (1, _) => return Err(parse_err(format!("expected `{MAGIC}`"))),
                (_, _) if line == "data" => break,
                (_, Some(("side", v))) => {
                    side = Some(v.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
                }
                (_, Some(("dtype", v))) if v == DTYPE => {}
                _ => return Err(parse_err(format!("unexpected header line `{line}`"))),
            }
        }
        let side = side.ok_or_else(|| Error::Format("grid header has no side".into()))?;
        check_side(side)?;
        let mut bytes = Vec::new();
        inp.read_to_end(&mut bytes)?;
        if bytes.len() != side * side * 16 {
            return Err(Error::Format(format!(
                "expected {} data bytes, found {}",
                side * side * 16,
                bytes.len()
            )));
        }
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Self::new(side, values)
    }

    /// Real parts as `L` comma-separated rows.
    pub fn write_real_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for row in self.values.chunks(self.side) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:e}", z.re)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_side(side: usize) -> Result<()> {
    if side < 2 || !side.is_power_of_two() {
        return Err(invalid(format!("grid side {side} must be a power of two >= 2")));
    }
    Ok(())
}

/// In-place 2D transform of a row-major square array.
fn fft2(buf: &mut [Complex64], side: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(side)
    } else {
        planner.plan_fft_forward(side)
    };
    plan.process(buf);
    transpose(buf, side);
    plan.process(buf);
    transpose(buf, side);
}

fn transpose(buf: &mut [Complex64], side: usize) {
    for i in 0..side {
        for j in i + 1..side {
            buf.swap(i * side + j, j * side + i);
        }
    }
}
