//! CSV artifacts: solutions as `t,x,u` and error series as `t,elf,eel`.
//!
//! Floats are written with 17 significant digits, enough to read every
//! `f64` back exactly.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::fv::GridSolution;
use crate::{Error, Result};

use super::metrics::ErrorSeries;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: `{field}`")))
}

pub fn write_solution<W: Write>(solution: &GridSolution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "u"])?;
    for (n, &t) in solution.times.iter().enumerate() {
        for (j, &x) in solution.x_centers.iter().enumerate() {
            w.write_record([fmt_f64(t), fmt_f64(x), fmt_f64(solution.values[[n, j]])])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a solution; rows must be grouped by time with the same abscissae
/// at every time level.
pub fn read_solution<R: Read>(input: R) -> Result<GridSolution> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["t", "x", "u"] {
        return Err(Error::Parse(format!(
            "expected header `t,x,u`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times: Vec<f64> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut column = 0;
    for record in reader.records() {
        let record = record?;
        if record.len() != 3 {
            return Err(Error::Parse(format!("expected 3 fields, found {}", record.len())));
        }
        let (t, x, u) = (
            parse_f64(&record[0])?,
            parse_f64(&record[1])?,
            parse_f64(&record[2])?,
        );
        if times.last() != Some(&t) {
            if !times.is_empty() && column != xs.len() {
                return Err(Error::GridMismatch(format!(
                    "time level {} has {column} cells, expected {}",
                    times.last().unwrap(),
                    xs.len()
                )));
            }
            times.push(t);
            column = 0;
        }
        if times.len() == 1 {
            xs.push(x);
        } else if xs.get(column) != Some(&x) {
            return Err(Error::GridMismatch(format!(
                "time level {t} does not repeat the abscissae of the first level"
            )));
        }
        values.push(u);
        column += 1;
    }
    if times.is_empty() {
        return Err(Error::Parse("solution file has no rows".into()));
    }
    if column != xs.len() {
        return Err(Error::GridMismatch(format!(
            "last time level has {column} cells, expected {}",
            xs.len()
        )));
    }
    let values = Array2::from_shape_vec((times.len(), xs.len()), values)
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(GridSolution {
        x_centers: xs,
        times,
        values,
    })
}

pub fn write_errors<W: Write>(series: &ErrorSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "elf", "eel"])?;
    for ((t, elf), eel) in series.times.iter().zip(&series.elf).zip(&series.eel) {
        w.write_record([fmt_f64(*t), fmt_f64(*elf), fmt_f64(*eel)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_errors<R: Read>(input: R) -> Result<ErrorSeries> {
    let mut reader = csv::Reader::from_reader(input);
    let mut series = ErrorSeries {
        times: vec![],
        elf: vec![],
        eel: vec![],
    };
    for record in reader.records() {
        let record = record?;
        if record.len() != 3 {
            return Err(Error::Parse(format!("expected 3 fields, found {}", record.len())));
        }
        series.times.push(parse_f64(&record[0])?);
        series.elf.push(parse_f64(&record[1])?);
        series.eel.push(parse_f64(&record[2])?);
    }
    Ok(series)
}

pub fn save_solution(solution: &GridSolution, path: &Path) -> Result<()> {
    write_solution(solution, std::fs::File::create(path)?)
}

pub fn load_solution(path: &Path) -> Result<GridSolution> {
    read_solution(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(times: Vec<f64>, xs: Vec<f64>, values: Vec<f64>) -> GridSolution {
        GridSolution {
            values: Array2::from_shape_vec((times.len(), xs.len()), values).unwrap(),
            x_centers: xs,
            times,
        }
    }

    #[test]
    fn header_and_format() {
        let sol = grid(vec![0.5], vec![-1.0, 1.0], vec![0.1, 1.0 / 3.0]);
        let mut buf = Vec::new();
        write_solution(&sol, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x,u"));
        assert_eq!(
            lines.next(),
            Some("5.0000000000000000e-1,-1.0000000000000000e0,1.0000000000000001e-1")
        );
    }

    #[test]
    fn ragged_files_are_rejected() {
        let text = "t,x,u\n0,0,1\n0,1,1\n1,0,1\n";
        assert!(matches!(read_solution(text.as_bytes()), Err(Error::GridMismatch(_))));
        let text = "t,x,u\n0,0,1\n0,1,1\n1,0,1\n1,2,1\n";
        assert!(matches!(read_solution(text.as_bytes()), Err(Error::GridMismatch(_))));
        assert!(read_solution("a,b,c\n".as_bytes()).is_err());
        assert!(read_solution("t,x,u\n".as_bytes()).is_err());
    }

    #[test]
    fn error_series_round_trip() {
        let s = ErrorSeries {
            times: vec![2.0, 4.0],
            elf: vec![1e-3, 2.5e-4],
            eel: vec![std::f64::consts::PI * 1e-5, 0.0],
        };
        let mut buf = Vec::new();
        write_errors(&s, &mut buf).unwrap();
        assert!(buf.starts_with(b"t,elf,eel\n"));
        assert_eq!(read_errors(buf.as_slice()).unwrap(), s);
    }

    proptest! {
        #[test]
        fn solution_round_trip(
            rows in 1usize..4,
            raw in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 3..40),
        ) {
            let cols = raw.len() / rows;
            let xs: Vec<f64> = (0..cols).map(|j| -3.0 + 0.37 * j as f64).collect();
            let times: Vec<f64> = (0..rows).map(|n| 0.1 * (n + 1) as f64).collect();
            let sol = grid(times, xs, raw[..rows * cols].to_vec());
            let mut buf = Vec::new();
            write_solution(&sol, &mut buf).unwrap();
            prop_assert_eq!(read_solution(buf.as_slice()).unwrap(), sol);
        }
    }
}
