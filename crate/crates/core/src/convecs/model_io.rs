//! Text model files.
//!
//! ```text
//! convecs-model 1
//! k <k>
//! degree <d>
//! rho <rho>
//! platt <a> <b>
//! projection <name>|-
//! support <n>
//! <coef> <x_1> ... <x_2k>        (n lines)
//! ```
//!
//! Floats are written in shortest round-trip form.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{ConvecsModel, KernelMachine};
use crate::error::{Error, Result};

pub const MODEL_VERSION: u32 = 1;
const MAGIC: &str = "convecs-model";

pub fn write_model<W: Write>(mut w: W, m: &ConvecsModel) -> Result<()> {
    writeln!(w, "{MAGIC} {MODEL_VERSION}")?;
    writeln!(w, "k {}", m.k)?;
    writeln!(w, "degree {}", m.machine.degree)?;
    writeln!(w, "rho {}", m.machine.rho)?;
    writeln!(w, "platt {} {}", m.platt_a, m.platt_b)?;
    writeln!(w, "projection {}", m.projection.as_deref().unwrap_or("-"))?;
    writeln!(w, "support {}", m.machine.coef.len())?;
    for (c, x) in m.machine.coef.iter().zip(&m.machine.support) {
        write!(w, "{c}")?;
        for v in x {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn save_model(path: impl AsRef<Path>, m: &ConvecsModel) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_model(&mut w, m)?;
    w.flush()?;
    Ok(())
}

struct Lines<'a, R> {
    inner: std::io::Lines<R>,
    path: &'a Path,
    n: usize,
}

impl<R: BufRead> Lines<'_, R> {
    fn next(&mut self) -> Result<String> {
        self.n += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(Error::parse(self.path, self.n, "unexpected end of model file")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.n, msg)
    }

    /// `key v1 v2 ...`
    fn field(&mut self, key: &str) -> Result<Vec<String>> {
        let line = self.next()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected {key:?}")));
        }
        Ok(parts.map(str::to_owned).collect())
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number {s:?}")))
    }

    fn one<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let f = self.field(key)?;
        match f.as_slice() {
            [v] => self.num(v),
            _ => Err(self.err(format!("{key} takes one value"))),
        }
    }
}

pub fn read_model<R: BufRead>(r: R, path: &Path) -> Result<ConvecsModel> {
    let mut lines = Lines {
        inner: r.lines(),
        path,
        n: 0,
    };
    let version: u32 = lines.one(MAGIC)?;
    if version != MODEL_VERSION {
        return Err(lines.err(format!("unsupported model version {version}")));
    }
    let k: usize = lines.one("k")?;
    let degree: u32 = lines.one("degree")?;
    let rho: f64 = lines.one("rho")?;
    let platt = lines.field("platt")?;
    if platt.len() != 2 {
        return Err(lines.err("platt takes two values"));
    }
    let (platt_a, platt_b) = (lines.num(&platt[0])?, lines.num(&platt[1])?);
    let projection = match lines.field("projection")?.as_slice() {
        [p] if p == "-" => None,
        [p] => Some(p.clone()),
        _ => return Err(lines.err("projection takes one value")),
    };
    let n: usize = lines.one("support")?;
    let mut coef = Vec::with_capacity(n);
    let mut support = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next()?;
        let vals = line
            .split_whitespace()
            .map(|s| lines.num::<f64>(s))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 2 * k + 1 {
            return Err(lines.err(format!("support line needs {} values", 2 * k + 1)));
        }
        coef.push(vals[0]);
        support.push(vals[1..].to_vec());
    }
    Ok(ConvecsModel {
        k,
        machine: KernelMachine {
            degree,
            coef,
            support,
            rho,
        },
        platt_a,
        platt_b,
        projection,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ConvecsModel> {
    let path = path.as_ref();
    read_model(BufReader::new(fs::File::open(path)?), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convecs::{train_convecs, PairExample};

    #[test]
    fn round_trip() {
        let data: Vec<PairExample> = (0..8)
            .map(|i| PairExample {
                u: vec![i as f64, 1.0 / (i as f64 + 1.0)],
                v: vec![0.3, -(i as f64)],
                label: i % 2 == 0,
            })
            .collect();
        let mut m = train_convecs(&data, 2, 1.0, 1).unwrap();
        m.projection = Some("fold3".into());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        save_model(&p, &m).unwrap();
        assert_eq!(load_model(&p).unwrap(), m);
    }

    #[test]
    fn wrong_version_rejected() {
        let text = "convecs-model 9\n";
        assert!(read_model(text.as_bytes(), Path::new("x")).is_err());
    }

    #[test]
    fn short_support_line_rejected() {
        let text = "convecs-model 1\nk 1\ndegree 2\nrho 0\nplatt -1 0\nprojection -\nsupport 1\n0.5 1\n";
        let e = read_model(text.as_bytes(), Path::new("m")).unwrap_err();
        assert!(e.to_string().starts_with("m:8:"), "{e}");
    }
}
