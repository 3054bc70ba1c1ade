//! Plain-text point-cloud and pair files.
//!
//! A cloud is a header line `d n` followed by `n` lines of `d`
//! whitespace-separated coordinates. A pair file holds two such blocks
//! separated by one blank line. Lines starting with `#` are comments.
//! Coordinates are written in shortest round-trip form, so write → read is
//! bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::cloud::PointCloud;
use crate::error::{GeoError, Result};

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.starts_with('#'))
            .collect();
        Lines { lines, pos: 0 }
    }

    fn skip_blank(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.lines.len() && self.lines[self.pos].1.is_empty() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied();
        self.pos += 1;
        l
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }

    fn parse_block(&mut self) -> Result<PointCloud> {
        self.skip_blank();
        let (hl, header) = self.next_line().ok_or(GeoError::Parse {
            line: self.last_line() + 1,
            msg: "missing header \"d n\"".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| GeoError::Parse {
                line: hl,
                msg: format!("malformed header \"{header}\": expected two integers \"d n\""),
            })
        };
        if fields.len() != 2 {
            return Err(GeoError::Parse {
                line: hl,
                msg: format!("malformed header \"{header}\": expected two integers \"d n\""),
            });
        }
        let d = parse_dim(fields[0])?;
        let n = parse_dim(fields[1])?;
        if d == 0 || n == 0 {
            return Err(GeoError::Parse {
                line: hl,
                msg: "header requires d ≥ 1 and n ≥ 1".into(),
            });
        }
        let mut coords = Vec::with_capacity(d * n);
        for k in 0..n {
            let (ln, line) = match self.next_line() {
                Some((ln, l)) if !l.is_empty() => (ln, l),
                Some((ln, _)) => {
                    return Err(GeoError::Parse {
                        line: ln,
                        msg: format!("expected {n} points, found {k}"),
                    })
                }
                None => {
                    return Err(GeoError::Parse {
                        line: self.last_line() + 1,
                        msg: format!("expected {n} points, found {k}"),
                    })
                }
            };
            let before = coords.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| GeoError::Parse {
                    line: ln,
                    msg: format!("non-numeric token \"{tok}\""),
                })?;
                if !v.is_finite() {
                    return Err(GeoError::Parse {
                        line: ln,
                        msg: format!("non-finite coordinate \"{tok}\""),
                    });
                }
                coords.push(v);
            }
            let got = coords.len() - before;
            if got != d {
                return Err(GeoError::Parse {
                    line: ln,
                    msg: format!("expected {d} coordinates, found {got}"),
                });
            }
        }
        // A coordinate line directly after the block means the header undercounts.
        if let Some((ln, l)) = self.peek() {
            if !l.is_empty()
                && l.split_whitespace().count() == d
                && l.split_whitespace().all(|t| t.parse::<f64>().is_ok())
            {
                return Err(GeoError::Parse {
                    line: ln,
                    msg: format!("expected {n} points, found more"),
                });
            }
        }
        PointCloud::new(DMatrix::from_column_slice(d, n, &coords))
    }

    fn expect_end(&mut self) -> Result<()> {
        self.skip_blank();
        match self.peek() {
            None => Ok(()),
            Some((ln, l)) => Err(GeoError::Parse {
                line: ln,
                msg: format!("unexpected trailing content \"{l}\""),
            }),
        }
    }
}

pub fn parse_cloud(text: &str) -> Result<PointCloud> {
    let mut lines = Lines::new(text);
    let cloud = lines.parse_block()?;
    lines.expect_end()?;
    Ok(cloud)
}

pub fn parse_pair(text: &str) -> Result<(PointCloud, PointCloud)> {
    let mut lines = Lines::new(text);
    let x = lines.parse_block()?;
    let sep_line = lines.peek().map_or(lines.last_line() + 1, |l| l.0);
    if lines.skip_blank() == 0 {
        return Err(GeoError::Parse {
            line: sep_line,
            msg: "expected a blank line between the two clouds".into(),
        });
    }
    let y = lines.parse_block()?;
    lines.expect_end()?;
    if x.dim() != y.dim() || x.len() != y.len() {
        return Err(GeoError::Shape(format!(
            "pair clouds differ in shape: {}×{} vs {}×{}",
            x.dim(),
            x.len(),
            y.dim(),
            y.len()
        )));
    }
    Ok((x, y))
}

pub fn format_cloud(x: &PointCloud) -> String {
    let mut s = format!("{} {}\n", x.dim(), x.len());
    for i in 0..x.len() {
        let row: Vec<String> = x.point(i).iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Pair file text; each `comments` entry becomes a `# ` line at the top.
pub fn format_pair(x: &PointCloud, y: &PointCloud, comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "# {c}");
    }
    s.push_str(&format_cloud(x));
    s.push('\n');
    s.push_str(&format_cloud(y));
    s
}

/// `key: value` pairs from `# key: value` comment lines, in file order.
pub fn header_fields(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    parse_cloud(&std::fs::read_to_string(path)?)
}

pub fn write_cloud(x: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_cloud(x))?;
    Ok(())
}

pub fn read_pair(path: impl AsRef<Path>) -> Result<(PointCloud, PointCloud)> {
    parse_pair(&std::fs::read_to_string(path)?)
}

pub fn write_pair(
    x: &PointCloud,
    y: &PointCloud,
    comments: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, format_pair(x, y, comments))?;
    Ok(())
}
