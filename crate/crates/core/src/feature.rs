use crate::error::{GeoError, Result};

/// Output of an invariant feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `‖a − b‖∞ / max(1, ‖a‖∞, ‖b‖∞)`.
    pub fn relative_gap(&self, other: &FeatureVector) -> f64 {
        relative_gap(&self.0, &other.0)
    }

    pub fn l2_distance(&self, other: &FeatureVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `K` on the first line, then one value per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.0.len());
        for v in &self.0 {
            s.push_str(&format!("{v:?}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<FeatureVector> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(GeoError::Parse {
            line: 1,
            msg: "missing length header".into(),
        })?;
        let k: usize = header.parse().map_err(|_| GeoError::Parse {
            line: hl,
            msg: format!("malformed length header \"{header}\""),
        })?;
        let mut out = Vec::with_capacity(k);
        for (ln, l) in lines {
            let v: f64 = l.parse().map_err(|_| GeoError::Parse {
                line: ln,
                msg: format!("non-numeric token \"{l}\""),
            })?;
            out.push(v);
        }
        if out.len() != k {
            return Err(GeoError::Parse {
                line: hl,
                msg: format!("expected {k} values, found {}", out.len()),
            });
        }
        Ok(FeatureVector(out))
    }
}

/// `‖a − b‖∞ / max(1, ‖a‖∞, ‖b‖∞)`; infinite when the lengths differ.
pub fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut diff = 0.0_f64;
    let mut scale = 1.0_f64;
    for (x, y) in a.iter().zip(b) {
        diff = diff.max((x - y).abs());
        scale = scale.max(x.abs()).max(y.abs());
    }
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_is_relative_above_one() {
        assert_eq!(relative_gap(&[0.0, 0.5], &[0.0, 0.25]), 0.25);
        assert_eq!(relative_gap(&[100.0], &[99.0]), 0.01);
        assert!(relative_gap(&[1.0], &[1.0, 2.0]).is_infinite());
    }

    #[test]
    fn text_round_trip() {
        let f = FeatureVector(vec![0.1, -3.5e-300, 1.0 / 3.0]);
        assert_eq!(FeatureVector::parse(&f.to_text()).unwrap(), f);
        assert!(FeatureVector::parse("3\n1\n2\n").is_err());
    }
}
