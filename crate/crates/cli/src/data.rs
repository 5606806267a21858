//! CSV input and output.

use std::path::Path;

use diffcpf::drivers::AdaptSummary;
use diffcpf::fk::Trajectory;
use diffcpf::ChainRecord64;

use crate::error::{CliError, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::data(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::Reader::from_path(path).map_err(|e| CliError::data(path, e))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| CliError::data(path, format!("missing column {name:?}")))
}

/// Writes observations as `t,y` with one-based `t`.
pub fn write_series(path: &Path, y: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "y"]).map_err(|e| CliError::data(path, e))?;
    for (k, v) in y.iter().enumerate() {
        w.write_record([(k + 1).to_string(), v.to_string()])
            .map_err(|e| CliError::data(path, e))?;
    }
    finish(w, path)
}

/// Reads the `y` column of a `t,y` file.
pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let mut r = reader(path)?;
    let headers = r.headers().map_err(|e| CliError::data(path, e))?.clone();
    let col = column(&headers, "y", path)?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::data(path, e))?;
        let v: f64 = rec[col]
            .trim()
            .parse()
            .map_err(|_| CliError::data(path, format!("row {}: bad value {:?}", line + 1, &rec[col])))?;
        out.push(v);
    }
    Ok(out)
}

/// Writes daily counts as `date,count`; `date` is the one-based day index.
pub fn write_counts(path: &Path, counts: &[u64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["date", "count"]).map_err(|e| CliError::data(path, e))?;
    for (k, c) in counts.iter().enumerate() {
        w.write_record([(k + 1).to_string(), c.to_string()])
            .map_err(|e| CliError::data(path, e))?;
    }
    finish(w, path)
}

/// Reads the `count` column of a `date,count` file in row order. Dates are
/// free-form and only used in error messages.
pub fn read_counts(path: &Path) -> Result<Vec<u64>> {
    let mut r = reader(path)?;
    let headers = r.headers().map_err(|e| CliError::data(path, e))?.clone();
    let date = column(&headers, "date", path)?;
    let col = column(&headers, "count", path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::data(path, e))?;
        let c: u64 = rec[col]
            .trim()
            .parse()
            .map_err(|_| CliError::data(path, format!("{}: count {:?} is not a non-negative integer", &rec[date], &rec[col])))?;
        out.push(c);
    }
    Ok(out)
}

/// Column name of coordinate `j` of state `k` (both zero-based).
pub fn state_column(k: usize, j: usize, names: &[&str]) -> String {
    if names.len() == 1 {
        format!("x{}", k + 1)
    } else {
        format!("x{}_{}", k + 1, names[j])
    }
}

/// Writes a latent path as `t,<names...>`.
pub fn write_truth(path: &Path, x: &Trajectory<f64>, names: &[&str]) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().map(|n| n.to_string()));
    w.write_record(&header).map_err(|e| CliError::data(path, e))?;
    for (k, s) in x.states().enumerate() {
        let mut row = vec![(k + 1).to_string()];
        row.extend(s.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(|e| CliError::data(path, e))?;
    }
    finish(w, path)
}

/// Which states a chain file stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathColumns {
    /// First and last states only.
    Ends,
    All,
}

fn stored_states(horizon: usize, cols: PathColumns) -> Vec<usize> {
    match cols {
        PathColumns::All => (0..horizon).collect(),
        PathColumns::Ends if horizon == 1 => vec![0],
        PathColumns::Ends => vec![0, horizon - 1],
    }
}

/// Writes chain records as
/// `iter,alpha,block_alpha,block_accepted,theta0..,x<k>[_<name>]..`.
pub fn write_chain(path: &Path, records: &[ChainRecord64], names: &[&str], cols: PathColumns) -> Result<()> {
    let mut w = writer(path)?;
    let n_theta = records.first().and_then(|r| r.theta.as_ref()).map_or(0, Vec::len);
    let horizon = records.first().map_or(0, |r| r.trajectory.len());
    let states = stored_states(horizon, cols);
    let mut header: Vec<String> = ["iter", "alpha", "block_alpha", "block_accepted"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..n_theta).map(|i| format!("theta{i}")));
    for &k in &states {
        header.extend((0..names.len()).map(|j| state_column(k, j, names)));
    }
    w.write_record(&header).map_err(|e| CliError::data(path, e))?;
    for r in records {
        let mut row = vec![
            r.iter.to_string(),
            r.alpha.to_string(),
            r.block_alpha.map_or(String::new(), |v| v.to_string()),
            r.block_accepted.map_or(String::new(), |v| u8::from(v).to_string()),
        ];
        if let Some(theta) = &r.theta {
            row.extend(theta.iter().map(|v| v.to_string()));
        }
        for &k in &states {
            row.extend(r.trajectory.state(k).iter().map(|v| v.to_string()));
        }
        w.write_record(&row).map_err(|e| CliError::data(path, e))?;
    }
    finish(w, path)
}

/// Reads one numeric column of a chain file.
pub fn read_chain_column(path: &Path, name: &str) -> Result<Vec<f64>> {
    let mut r = reader(path)?;
    let headers = r.headers().map_err(|e| CliError::data(path, e))?.clone();
    let col = column(&headers, name, path)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| CliError::data(path, e))?;
            rec[col]
                .parse()
                .map_err(|_| CliError::data(path, format!("bad value {:?} in column {name}", &rec[col])))
        })
        .collect()
}

/// Reads records of a chain written with [`PathColumns::All`].
pub fn read_chain(path: &Path, horizon: usize, names: &[&str]) -> Result<Vec<ChainRecord64>> {
    let mut r = reader(path)?;
    let headers = r.headers().map_err(|e| CliError::data(path, e))?.clone();
    let iter = column(&headers, "iter", path)?;
    let alpha = column(&headers, "alpha", path)?;
    let thetas: Vec<usize> = (0..)
        .map_while(|i| headers.iter().position(|h| h == format!("theta{i}")))
        .collect();
    let mut state_cols = Vec::with_capacity(horizon * names.len());
    for k in 0..horizon {
        for j in 0..names.len() {
            state_cols.push(column(&headers, &state_column(k, j, names), path)?);
        }
    }
    let num = |rec: &csv::StringRecord, c: usize| -> Result<f64> {
        rec[c]
            .parse()
            .map_err(|_| CliError::data(path, format!("bad value {:?}", &rec[c])))
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::data(path, e))?;
        let flat = state_cols.iter().map(|&c| num(&rec, c)).collect::<Result<Vec<_>>>()?;
        let theta = thetas.iter().map(|&c| num(&rec, c)).collect::<Result<Vec<_>>>()?;
        out.push(ChainRecord64 {
            iter: num(&rec, iter)? as usize,
            trajectory: Trajectory::from_flat(names.len(), flat),
            theta: (!theta.is_empty()).then_some(theta),
            alpha: num(&rec, alpha)?,
            block_alpha: None,
            block_accepted: None,
            adapt: AdaptSummary::default(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("y.csv");
        let y = vec![0.1, -2.5, 1e-17, 3.0];
        write_series(&p, &y).unwrap();
        assert_eq!(read_series(&p).unwrap(), y);
    }

    #[test]
    fn counts_loader_reports_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        std::fs::write(&p, "date,count\n2020-03-01,4\n2020-03-02,-1\n").unwrap();
        let err = read_counts(&p).unwrap_err().to_string();
        assert!(err.contains("2020-03-02"), "{err}");
        std::fs::write(&p, "date,count\n2020-03-01,4\n2020-03-02, 7\n").unwrap();
        assert_eq!(read_counts(&p).unwrap(), vec![4, 7]);
    }

    #[test]
    fn chain_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("chain.csv");
        let rec = |i: usize| ChainRecord64 {
            iter: i,
            trajectory: Trajectory::from_flat(2, vec![i as f64, 0.5, -1.0, 2.0]),
            theta: Some(vec![0.25 * i as f64]),
            alpha: 0.75,
            block_alpha: Some(0.5),
            block_accepted: Some(i % 2 == 0),
            adapt: AdaptSummary::default(),
        };
        let recs = vec![rec(1), rec(2)];
        write_chain(&p, &recs, &["a", "b"], PathColumns::All).unwrap();
        let back = read_chain(&p, 2, &["a", "b"]).unwrap();
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.trajectory, b.trajectory);
            assert_eq!(a.theta, b.theta);
            assert_eq!(a.iter, b.iter);
        }
        assert_eq!(read_chain_column(&p, "x2_b").unwrap(), vec![2.0, 2.0]);
    }
}
