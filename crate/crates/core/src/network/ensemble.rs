use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{Conductance, NetworkConfig, NeuronState};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::integrators::TimeGrid;
use crate::model::Recovery;

#[derive(Clone, Copy, Debug)]
pub struct EnsembleOptions {
    pub n_paths: usize,
    /// Store every `thin`-th node (the final node is always stored).
    pub thin: usize,
    pub exec: Execution,
}

impl EnsembleOptions {
    pub fn new(n_paths: usize) -> Self {
        Self {
            n_paths,
            thin: 1,
            exec: Execution::default(),
        }
    }

    pub fn thin(self, thin: usize) -> Self {
        Self { thin, ..self }
    }

    pub fn sequential(self) -> Self {
        Self {
            exec: Execution::Sequential,
            ..self
        }
    }
}

/// Stored trajectories of many paths of the N-neuron system.
///
/// `data` is laid out `[path][stored time][neuron][column]`; columns that do
/// not apply to a neuron's membrane model hold NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    pub grid: TimeGrid,
    pub stored_steps: Vec<usize>,
    pub n_paths: usize,
    pub pop_of: Vec<usize>,
    pub labels: Vec<String>,
    pub columns: Vec<String>,
    pub data: Vec<f64>,
    pub config_hash: String,
    pub seed: u64,
}

const FIXED_COLUMNS: [&str; 6] = ["v", "y", "w", "n", "m", "h"];
const MAGIC: &[u8; 4] = b"MFNE";
const FORMAT_VERSION: u32 = 1;

impl PathEnsemble {
    pub(crate) fn stored_steps(n_steps: usize, thin: usize) -> Vec<usize> {
        let mut s: Vec<usize> = (0..=n_steps).step_by(thin).collect();
        if *s.last().unwrap() != n_steps {
            s.push(n_steps);
        }
        s
    }

    pub(crate) fn columns_for(cfg: &NetworkConfig) -> Vec<String> {
        let mut cols: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
        if cfg.conductance == Conductance::SignPreserving {
            cols.extend(cfg.labels().iter().map(|l| format!("j_{l}")));
        }
        cols
    }

    pub(crate) fn push_row(data: &mut Vec<f64>, st: &NeuronState, n_cols: usize) {
        let start = data.len();
        data.push(st.v);
        data.push(st.y);
        match st.q {
            Recovery::Fhn { w } => data.extend([w, f64::NAN, f64::NAN, f64::NAN]),
            Recovery::Hh { n, m, h } => data.extend([f64::NAN, n, m, h]),
        }
        data.extend(st.j.iter().copied());
        debug_assert_eq!(data.len() - start, n_cols);
    }

    pub(crate) fn assemble(
        cfg: &NetworkConfig,
        stored: Vec<usize>,
        columns: Vec<String>,
        paths: Vec<Vec<f64>>,
    ) -> Self {
        let n_paths = paths.len();
        Self {
            grid: cfg.grid,
            stored_steps: stored,
            n_paths,
            pop_of: cfg.population_map(),
            labels: cfg.labels(),
            columns,
            data: paths.concat(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
        }
    }

    pub fn n_neurons(&self) -> usize {
        self.pop_of.len()
    }

    pub fn n_stored(&self) -> usize {
        self.stored_steps.len()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn offset(&self, path: usize, time: usize, neuron: usize) -> usize {
        ((path * self.n_stored() + time) * self.n_neurons() + neuron) * self.columns.len()
    }

    pub fn row(&self, path: usize, time: usize, neuron: usize) -> &[f64] {
        let o = self.offset(path, time, neuron);
        &self.data[o..o + self.columns.len()]
    }

    pub fn value(&self, path: usize, time: usize, neuron: usize, column: usize) -> f64 {
        self.row(path, time, neuron)[column]
    }

    /// Reconstructs a stored neuron state.
    pub fn state(
        &self,
        path: usize,
        time: usize,
        neuron: usize,
        cfg: &NetworkConfig,
    ) -> NeuronState {
        let r = self.row(path, time, neuron);
        let q = if cfg.populations[self.pop_of[neuron]].params.membrane.is_hh() {
            Recovery::Hh {
                n: r[3],
                m: r[4],
                h: r[5],
            }
        } else {
            Recovery::Fhn { w: r[2] }
        };
        NeuronState {
            v: r[0],
            y: r[1],
            q,
            j: r[6..].iter().copied().collect(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.stored_steps.iter().map(|&k| self.grid.t(k)).collect()
    }

    /// Number of stored values of `y, n, m, h` outside `[0, 1]` or of `J` below 0.
    pub fn confinement_violations(&self) -> usize {
        let n_cols = self.columns.len();
        self.data
            .chunks_exact(n_cols)
            .map(|r| {
                let unit = r[1..2]
                    .iter()
                    .chain(&r[3..6])
                    .filter(|x| !x.is_nan() && !(0.0..=1.0).contains(*x))
                    .count();
                unit + r[6..].iter().filter(|&&j| !(j >= 0.0)).count()
            })
            .sum()
    }

    /// Mean of `V²` over paths and neurons at each stored time.
    pub fn mean_square_v(&self) -> Vec<f64> {
        let n = (self.n_paths * self.n_neurons()) as f64;
        (0..self.n_stored())
            .map(|t| {
                let mut acc = 0.0;
                for p in 0..self.n_paths {
                    for i in 0..self.n_neurons() {
                        acc += self.value(p, t, i, 0).powi(2);
                    }
                }
                acc / n
            })
            .collect()
    }

    pub fn bit_eq(&self, other: &PathEnsemble) -> bool {
        self.stored_steps == other.stored_steps
            && self.columns == other.columns
            && self.data.len() == other.data.len()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Columnar CSV, one row per (path, neuron, stored time). Inapplicable
    /// columns are left empty.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "# config_hash={}", self.config_hash).map_err(io)?;
        writeln!(out, "# seed={}", self.seed).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e| Error::csv(path, e);
        let mut header = vec![
            "path".to_string(),
            "neuron".into(),
            "population".into(),
            "t".into(),
        ];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        let times = self.times();
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for p in 0..self.n_paths {
            for i in 0..self.n_neurons() {
                for (ti, t) in times.iter().enumerate() {
                    record.clear();
                    record.push(p.to_string());
                    record.push(i.to_string());
                    record.push(self.labels[self.pop_of[i]].clone());
                    record.push(t.to_string());
                    record.extend(self.row(p, ti, i).iter().map(|x| {
                        if x.is_nan() {
                            String::new()
                        } else {
                            x.to_string()
                        }
                    }));
                    w.write_record(&record).map_err(csv_err)?;
                }
            }
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    /// Compact little-endian binary form:
    /// `"MFNE" | version u32 | hash (16 ascii bytes) | seed u64 | t_end f64 |
    /// n_steps u64 | n_paths u32 | n_stored u32 | n_neurons u32 | n_pops u32 |
    /// n_cols u32 | stored steps u64* | pop_of u32* | labels | columns | data f64*`,
    /// strings as `u16 length + utf8`.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut buf: Vec<u8> = Vec::with_capacity(64 + self.data.len() * 8);
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        let mut hash = [b' '; 16];
        let hb = self.config_hash.as_bytes();
        hash[..hb.len().min(16)].copy_from_slice(&hb[..hb.len().min(16)]);
        buf.extend_from_slice(&hash);
        buf.extend_from_slice(&self.seed.to_le_bytes());
        buf.extend_from_slice(&self.grid.t_end.to_le_bytes());
        buf.extend_from_slice(&(self.grid.n_steps as u64).to_le_bytes());
        for n in [
            self.n_paths,
            self.n_stored(),
            self.n_neurons(),
            self.labels.len(),
            self.columns.len(),
        ] {
            buf.extend_from_slice(&(n as u32).to_le_bytes());
        }
        for &k in &self.stored_steps {
            buf.extend_from_slice(&(k as u64).to_le_bytes());
        }
        for &g in &self.pop_of {
            buf.extend_from_slice(&(g as u32).to_le_bytes());
        }
        for s in self.labels.iter().chain(&self.columns) {
            buf.extend_from_slice(&(s.len() as u16).to_le_bytes());
            buf.extend_from_slice(s.as_bytes());
        }
        for x in &self.data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        let bad = |what: &str| {
            Error::InvalidInput(format!(
                "{}: malformed ensemble file ({what})",
                path.display()
            ))
        };
        let mut r = ByteReader {
            bytes: &bytes,
            pos: 0,
        };
        if r.take(4).ok_or_else(|| bad("magic"))? != MAGIC {
            return Err(bad("magic"));
        }
        if r.u32().ok_or_else(|| bad("version"))? != FORMAT_VERSION {
            return Err(bad("version"));
        }
        let hash = String::from_utf8_lossy(r.take(16).ok_or_else(|| bad("hash"))?)
            .trim_end()
            .to_string();
        let seed = r.u64().ok_or_else(|| bad("seed"))?;
        let t_end = f64::from_bits(r.u64().ok_or_else(|| bad("grid"))?);
        let n_steps = r.u64().ok_or_else(|| bad("grid"))? as usize;
        let mut dims = [0usize; 5];
        for d in &mut dims {
            *d = r.u32().ok_or_else(|| bad("dims"))? as usize;
        }
        let [n_paths, n_stored, n_neurons, n_pops, n_cols] = dims;
        let stored_steps = (0..n_stored)
            .map(|_| r.u64().map(|x| x as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("times"))?;
        let pop_of = (0..n_neurons)
            .map(|_| r.u32().map(|x| x as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("populations"))?;
        let labels = (0..n_pops)
            .map(|_| r.string())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("labels"))?;
        let columns = (0..n_cols)
            .map(|_| r.string())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("columns"))?;
        let n_data = n_paths * n_stored * n_neurons * n_cols;
        let data = (0..n_data)
            .map(|_| r.u64().map(f64::from_bits))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("data"))?;
        if r.pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(Self {
            grid: TimeGrid::new(t_end, n_steps),
            stored_steps,
            n_paths,
            pop_of,
            labels,
            columns,
            data,
            config_hash: hash,
            seed,
        })
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }

    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }

    fn string(&mut self) -> Option<String> {
        let n = u16::from_le_bytes(self.take(2)?.try_into().ok()?) as usize;
        String::from_utf8(self.take(n)?.to_vec()).ok()
    }
}
