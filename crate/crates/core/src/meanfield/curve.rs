use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrators::TimeGrid;

/// Deterministic per-population curves on the time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanCurve {
    pub grid: TimeGrid,
    pub labels: Vec<String>,
    /// `[population][node]` estimate of `E[S(V_t)]`.
    pub m_s: Vec<Vec<f64>>,
    /// Standard errors of `m_s`.
    pub m_s_se: Vec<Vec<f64>>,
    /// `[population][node]` curve `E[y_t]`.
    pub y_bar: Vec<Vec<f64>>,
    pub config_hash: String,
    pub seed: u64,
}

const HEADER: [&str; 5] = ["t", "population", "m_S", "y_bar", "SE"];

impl MeanCurve {
    pub fn n_populations(&self) -> usize {
        self.labels.len()
    }

    /// Checks the curve invariants: `y_bar ∈ [0, 1]` and `m_S ∈ [0, c_max]`.
    pub fn is_admissible(&self, c_max: &[f64]) -> bool {
        self.y_bar.iter().flatten().all(|y| (0.0..=1.0).contains(y))
            && self
                .m_s
                .iter()
                .zip(c_max)
                .all(|(m, &c)| m.iter().all(|x| (0.0..=c).contains(x)))
    }

    /// Tidy CSV, one row per (population, node).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "# config_hash={}", self.config_hash).map_err(io)?;
        writeln!(out, "# seed={}", self.seed).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let cerr = |e| Error::csv(path, e);
        w.write_record(HEADER).map_err(cerr)?;
        for (g, label) in self.labels.iter().enumerate() {
            for k in 0..self.grid.n_nodes() {
                w.write_record([
                    self.grid.t(k).to_string(),
                    label.clone(),
                    self.m_s[g][k].to_string(),
                    self.y_bar[g][k].to_string(),
                    self.m_s_se[g][k].to_string(),
                ])
                .map_err(cerr)?;
            }
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    /// Reads a curve written by [`write_csv`](Self::write_csv). With
    /// `expected_hash`, a curve computed for a different configuration is refused.
    pub fn read_csv(path: &Path, expected_hash: Option<&str>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::new(file);
        let mut meta = |key: &str| -> Result<String> {
            let mut line = String::new();
            reader
                .read_line(&mut line)
                .map_err(|e| Error::io(path, e))?;
            line.trim_end()
                .strip_prefix(&format!("# {key}="))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("{}: missing '# {key}=' line", path.display())))
        };
        let config_hash = meta("config_hash")?;
        let seed: u64 = meta("seed")?
            .parse()
            .map_err(|_| Error::Parse(format!("{}: seed is not an integer", path.display())))?;
        if let Some(want) = expected_hash {
            if want != config_hash {
                return Err(Error::HashMismatch {
                    path: path.to_path_buf(),
                    expected: want.to_string(),
                    found: config_hash,
                });
            }
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
        if header.iter().ne(HEADER) {
            return Err(Error::Parse(format!(
                "{}: unexpected header {:?}",
                path.display(),
                header
            )));
        }
        let mut labels: Vec<String> = Vec::new();
        let mut times: Vec<f64> = Vec::new();
        let mut m_s: Vec<Vec<f64>> = Vec::new();
        let mut y_bar: Vec<Vec<f64>> = Vec::new();
        let mut m_s_se: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| {
                    Error::Parse(format!(
                        "{}: row {}: bad number {:?}",
                        path.display(),
                        line + 1,
                        &rec[i]
                    ))
                })
            };
            let label = &rec[1];
            let g = match labels.iter().position(|l| l == label) {
                Some(g) => g,
                None => {
                    labels.push(label.to_string());
                    m_s.push(Vec::new());
                    y_bar.push(Vec::new());
                    m_s_se.push(Vec::new());
                    labels.len() - 1
                }
            };
            if g == 0 {
                times.push(num(0)?);
            }
            m_s[g].push(num(2)?);
            y_bar[g].push(num(3)?);
            m_s_se[g].push(num(4)?);
        }
        let nodes = times.len();
        if nodes < 1 || m_s.iter().any(|c| c.len() != nodes) {
            return Err(Error::Parse(format!(
                "{}: populations have unequal node counts",
                path.display()
            )));
        }
        let grid = TimeGrid::new(*times.last().unwrap(), nodes - 1);
        if nodes > 1
            && times
                .iter()
                .enumerate()
                .any(|(k, t)| (t - grid.t(k)).abs() > 1e-9 * grid.t_end.max(1.0))
        {
            return Err(Error::Parse(format!(
                "{}: time column is not a uniform grid",
                path.display()
            )));
        }
        Ok(Self {
            grid,
            labels,
            m_s,
            m_s_se,
            y_bar,
            config_hash,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MeanCurve {
        let grid = TimeGrid::new(0.3, 3);
        MeanCurve {
            grid,
            labels: vec!["E".into(), "I".into()],
            m_s: vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.5, 0.6, 0.7, 1.0 / 3.0]],
            m_s_se: vec![vec![0.0; 4], vec![0.01; 4]],
            y_bar: vec![vec![0.05, 0.06, 0.07, 0.08], vec![0.1, 0.2, 0.3, 0.4]],
            config_hash: "00112233aabbccdd".into(),
            seed: 42,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("curve.csv");
        let c = sample();
        c.write_csv(&p).unwrap();
        let back = MeanCurve::read_csv(&p, Some("00112233aabbccdd")).unwrap();
        assert_eq!(back.m_s, c.m_s);
        assert_eq!(back.y_bar, c.y_bar);
        assert_eq!(back.labels, c.labels);
        assert_eq!(back.grid.n_steps, 3);
        assert!((back.grid.dt() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn foreign_hash_refused() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("curve.csv");
        sample().write_csv(&p).unwrap();
        assert!(matches!(
            MeanCurve::read_csv(&p, Some("ffff")),
            Err(Error::HashMismatch { .. })
        ));
    }

    #[test]
    fn admissibility() {
        let c = sample();
        assert!(c.is_admissible(&[1.0, 1.0]));
        assert!(!c.is_admissible(&[0.35, 1.0]));
    }
}
