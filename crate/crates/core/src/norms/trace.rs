use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::radial_spectral::RadialField;

/// Trapezoid accumulation of `int_{t0}^t h(s) ds` from samples pushed in time
/// order (either direction).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryAccumulator {
    origin: f64,
    times: Vec<f64>,
    values: Vec<f64>,
    integrals: Vec<f64>,
}

impl HistoryAccumulator {
    /// Starts an accumulator whose integral is anchored at `origin`; the first
    /// sample pushed must sit at `origin`.
    pub fn new(origin: f64) -> Self {
        Self {
            origin,
            times: Vec::new(),
            values: Vec::new(),
            integrals: Vec::new(),
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if !(t.is_finite() && value.is_finite()) {
            return Err(invalid("history sample", format!("non-finite sample ({t}, {value})")));
        }
        match self.times.last() {
            None => {
                if t != self.origin {
                    return Err(Error::AccumulatorGap {
                        covered: self.origin,
                        requested: t,
                    });
                }
                self.integrals.push(0.0);
            }
            Some(&last) => {
                let forward = self.times.len() < 2 || self.times[1] > self.times[0];
                if t == last || (self.times.len() >= 2 && (t > last) != forward) {
                    return Err(invalid("history sample", format!("time {t} breaks monotone order after {last}")));
                }
                let prev = *self.values.last().expect("nonempty");
                let acc = *self.integrals.last().expect("nonempty");
                self.integrals.push(acc + 0.5 * (t - last) * (prev + value));
            }
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    /// Integral from the origin to `t`, which must be the latest sample or an
    /// earlier one.
    pub fn integral_to(&self, t: f64) -> Result<f64> {
        match self.times.iter().rposition(|&s| s == t) {
            Some(i) => Ok(self.integrals[i]),
            None => Err(Error::AccumulatorGap {
                covered: self.times.last().copied().unwrap_or(self.origin),
                requested: t,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Recomputes the full trapezoid sum from scratch.
    pub fn recompute(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.integrals.last().copied().unwrap_or(0.0)
    }
}

/// One row of an [`EnergyTrace`]. Quantities of the decomposed field `W` are
/// absent for runs without a high-low split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    #[serde(rename = "calE")]
    pub cal_e: Option<f64>,
    pub h1_w: Option<f64>,
    pub l3_w: Option<f64>,
    pub h12_w: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    records: Vec<EnergyRecord>,
    pub history: Option<HistoryAccumulator>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub min: f64,
    pub max: f64,
    pub first: f64,
    pub last: f64,
    /// `max |x - x_first| / |x_first|`, or the absolute drift when `x_first = 0`.
    pub drift: f64,
}

impl ColumnSummary {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.collect();
        let first = *v.first()?;
        let dev = v.iter().map(|x| (x - first).abs()).fold(0.0, f64::max);
        Some(Self {
            min: v.iter().cloned().fold(f64::INFINITY, f64::min),
            max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            first,
            last: *v.last()?,
            drift: if first == 0.0 { dev } else { dev / first.abs() },
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub samples: usize,
    pub mass: Option<ColumnSummary>,
    pub energy: Option<ColumnSummary>,
    #[serde(rename = "P")]
    pub p: Option<ColumnSummary>,
    #[serde(rename = "calE")]
    pub cal_e: Option<ColumnSummary>,
}

pub const ENERGY_CSV_HEADER: [&str; 8] = ["t", "mass", "energy", "P", "calE", "h1_W", "l3_W", "h12_W"];

impl EnergyTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_history(history: HistoryAccumulator) -> Self {
        Self {
            records: Vec::new(),
            history: Some(history),
        }
    }

    /// Appends a record; times must be strictly monotone and entries finite.
    pub fn push(&mut self, record: EnergyRecord) -> Result<()> {
        let finite = [record.t, record.mass, record.energy]
            .into_iter()
            .chain([record.p, record.cal_e, record.h1_w, record.l3_w, record.h12_w].into_iter().flatten())
            .all(f64::is_finite);
        if !finite {
            return Err(invalid("energy record", format!("non-finite entry at t = {}", record.t)));
        }
        if let [.., a, b] = self.records.as_slice() {
            if (record.t > b.t) != (b.t > a.t) || record.t == b.t {
                return Err(invalid("energy record", format!("time {} breaks monotone order", record.t)));
            }
        } else if let Some(b) = self.records.last() {
            if record.t == b.t {
                return Err(invalid("energy record", format!("repeated time {}", record.t)));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[EnergyRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn summary(&self) -> EnergySummary {
        let r = &self.records;
        EnergySummary {
            samples: r.len(),
            mass: ColumnSummary::of(r.iter().map(|x| x.mass)),
            energy: ColumnSummary::of(r.iter().map(|x| x.energy)),
            p: ColumnSummary::of(r.iter().filter_map(|x| x.p)),
            cal_e: ColumnSummary::of(r.iter().filter_map(|x| x.cal_e)),
        }
    }

    /// Writes the columns `t, mass, energy, P, calE, h1_W, l3_W, h12_W`;
    /// absent values are empty cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(ENERGY_CSV_HEADER)?;
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                cell(Some(r.t)),
                cell(Some(r.mass)),
                cell(Some(r.energy)),
                cell(r.p),
                cell(r.cal_e),
                cell(r.h1_w),
                cell(r.l3_w),
                cell(r.h12_w),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Time-stamped field snapshots over a window, sorted by increasing time.
#[derive(Clone, Debug)]
pub struct SpaceTimeTrace {
    times: Vec<f64>,
    fields: Vec<RadialField>,
    stride: usize,
}

impl SpaceTimeTrace {
    /// Builds a trace from snapshots in either time order; they are stored
    /// in increasing time.
    pub fn new(mut samples: Vec<(f64, RadialField)>, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if samples.len() >= 2 && samples[0].0 > samples[1].0 {
            samples.reverse();
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(invalid("trace", format!("times not strictly monotone at {}", w[1].0)));
            }
            if w[1].1.grid() != w[0].1.grid() {
                return Err(Error::GridMismatch);
            }
        }
        if samples.iter().any(|(t, _)| !t.is_finite()) {
            return Err(invalid("trace", "non-finite time"));
        }
        let (times, fields) = samples.into_iter().unzip();
        Ok(Self { times, fields, stride })
    }

    /// Samples `f(t)` at `n` equally spaced times covering `[a, b]`.
    pub fn sample(a: f64, b: f64, n: usize, f: impl Fn(f64) -> RadialField) -> Result<Self> {
        if !(b > a) || n < 2 {
            return Err(Error::EmptyWindow);
        }
        let h = (b - a) / (n - 1) as f64;
        let samples = (0..n)
            .map(|i| {
                let t = if i == n - 1 { b } else { a + h * i as f64 };
                (t, f(t))
            })
            .collect();
        Self::new(samples, 1)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[RadialField] {
        &self.fields
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `[a, b]`, the first and last sampled times.
    pub fn window(&self) -> Result<(f64, f64)> {
        match (self.times.first(), self.times.last()) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(Error::EmptyWindow),
        }
    }

    /// The snapshots with `a <= t <= b`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = self.window()?;
        if a < lo || b > hi || !(b >= a) {
            return Err(invalid("window", format!("[{a}, {b}] is not inside [{lo}, {hi}]")));
        }
        let samples = self
            .times
            .iter()
            .zip(&self.fields)
            .filter(|(t, _)| **t >= a && **t <= b)
            .map(|(t, f)| (*t, f.clone()))
            .collect();
        Self::new(samples, self.stride)
    }

    /// Applies `op` to every snapshot, keeping the times.
    pub fn map(&self, op: impl Fn(f64, &RadialField) -> RadialField) -> Self {
        Self {
            times: self.times.clone(),
            fields: self.times.iter().zip(&self.fields).map(|(&t, f)| op(t, f)).collect(),
            stride: self.stride,
        }
    }
}
