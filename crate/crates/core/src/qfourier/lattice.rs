use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::QContext;
use crate::error::{QError, QResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    fn parse(s: &str) -> QResult<Self> {
        match s.trim() {
            "+" | "1" | "+1" => Ok(Sign::Plus),
            "-" | "-1" => Ok(Sign::Minus),
            other => Err(QError::Serialization(format!("bad sign '{other}'"))),
        }
    }
}

/// The point `sign * q^{2m}` of the Jackson lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub sign: Sign,
    pub m: i32,
}

impl LatticePoint {
    pub fn pos(m: i32) -> Self {
        Self {
            sign: Sign::Plus,
            m,
        }
    }

    pub fn neg(m: i32) -> Self {
        Self {
            sign: Sign::Minus,
            m,
        }
    }

    pub fn value(self, ctx: &QContext) -> f64 {
        self.sign.factor() * ctx.q2().powi(self.m)
    }

    /// Jackson weight `(1 - q^2) |x|`.
    pub fn weight(self, ctx: &QContext) -> f64 {
        (1.0 - ctx.q2()) * ctx.q2().powi(self.m)
    }

    /// Recovers the point from a value on the lattice, if it is one.
    pub fn from_value(x: f64, ctx: &QContext) -> Option<Self> {
        if x == 0.0 || !x.is_finite() {
            return None;
        }
        let m = (x.abs().ln() / ctx.q2().ln()).round() as i32;
        let sign = if x > 0.0 { Sign::Plus } else { Sign::Minus };
        let p = Self { sign, m };
        ((p.value(ctx) - x).abs() <= 1e-12 * x.abs()).then_some(p)
    }
}

/// A point of the one- or two-variable lattice.
pub type LatticeKey = Vec<LatticePoint>;

/// Finitely supported function on the lattice (one or two variables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFunction {
    arity: usize,
    /// Exponent window `[-window, window]` per variable.
    window: i32,
    /// Set when the negative sector was filled by sign extension.
    #[serde(default)]
    sign_extended: bool,
    #[serde(with = "entries")]
    values: BTreeMap<LatticeKey, Complex64>,
}

mod entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        point: LatticeKey,
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(
        v: &BTreeMap<LatticeKey, Complex64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let list: Vec<Entry> = v
            .iter()
            .map(|(k, c)| Entry {
                point: k.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<LatticeKey, Complex64>, D::Error> {
        let list = Vec::<Entry>::deserialize(d)?;
        Ok(list
            .into_iter()
            .map(|e| (e.point, Complex64::new(e.re, e.im)))
            .collect())
    }
}

impl LatticeFunction {
    pub fn zero(arity: usize, window: i32) -> QResult<Self> {
        if !(1..=2).contains(&arity) {
            return Err(QError::InvalidParameter(format!(
                "arity must be 1 or 2, got {arity}"
            )));
        }
        if window < 0 {
            return Err(QError::InvalidParameter(
                "window must be non-negative".into(),
            ));
        }
        Ok(Self {
            arity,
            window,
            sign_extended: false,
            values: BTreeMap::new(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn window(&self) -> i32 {
        self.window
    }

    pub fn sign_extended(&self) -> bool {
        self.sign_extended
    }

    pub fn values(&self) -> &BTreeMap<LatticeKey, Complex64> {
        &self.values
    }

    pub fn get(&self, key: &[LatticePoint]) -> Complex64 {
        self.values.get(key).copied().unwrap_or_default()
    }

    /// Sets a value; zeros are not stored.
    pub fn set(&mut self, key: LatticeKey, c: Complex64) -> QResult<()> {
        if key.len() != self.arity {
            return Err(QError::InvalidParameter(format!(
                "point has {} coordinates, function has arity {}",
                key.len(),
                self.arity
            )));
        }
        if key.iter().any(|p| p.m.abs() > self.window) {
            return Err(QError::InvalidParameter(format!(
                "point {key:?} outside window {}",
                self.window
            )));
        }
        if c == Complex64::default() {
            self.values.remove(&key);
        } else {
            self.values.insert(key, c);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// All window points of the chosen sectors, in ascending order.
    pub fn window_points(arity: usize, window: i32, positive_only: bool) -> Vec<LatticeKey> {
        let mut one: Vec<LatticePoint> = Vec::new();
        if !positive_only {
            one.extend((-window..=window).map(LatticePoint::neg));
        }
        one.extend((-window..=window).map(LatticePoint::pos));
        if arity == 1 {
            one.into_iter().map(|p| vec![p]).collect()
        } else {
            one.iter()
                .flat_map(|&a| one.iter().map(move |&b| vec![a, b]))
                .collect()
        }
    }

    /// The bound `K` with `f = 0` at every exponent below `-K`, or `None` for the zero function.
    pub fn finite_bound(&self) -> Option<i32> {
        self.values
            .keys()
            .flat_map(|k| k.iter().map(|p| -p.m))
            .max()
    }

    /// Jackson-weighted absolute sum over the stored support.
    pub fn weighted_abs_sum(&self, ctx: &QContext) -> f64 {
        self.values
            .iter()
            .map(|(k, c)| c.norm() * k.iter().map(|p| p.weight(ctx)).product::<f64>())
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v * c))
            .filter(|(_, v)| *v != Complex64::default())
            .collect();
        out
    }

    pub fn checked_add(&self, other: &Self) -> QResult<Self> {
        if self.arity != other.arity {
            return Err(QError::InvalidParameter("arity mismatch".into()));
        }
        let mut out = self.clone();
        out.window = self.window.max(other.window);
        out.sign_extended |= other.sign_extended;
        for (k, v) in &other.values {
            let s = out.get(k) + v;
            out.set(k.clone(), s)?;
        }
        Ok(out)
    }

    /// Restriction to the all-positive sector.
    pub fn positive_part(&self) -> Self {
        let mut out = self.clone();
        out.values
            .retain(|k, _| k.iter().all(|p| p.sign == Sign::Plus));
        out
    }

    /// `max |f - g| / max(max |f|, max |g|)` over the union of supports.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let scale = self
            .values
            .values()
            .chain(other.values.values())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        self.values
            .keys()
            .chain(other.values.keys())
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn to_json(&self) -> QResult<String> {
        serde_json::to_string(self).map_err(|e| QError::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> QResult<Self> {
        let f: Self = serde_json::from_str(s).map_err(|e| QError::Serialization(e.to_string()))?;
        let mut check = Self::zero(f.arity, f.window)?;
        for (k, v) in &f.values {
            check.set(k.clone(), *v)?;
        }
        check.sign_extended = f.sign_extended;
        Ok(check)
    }

    /// CSV with columns `sign1,m1[,sign2,m2],re,im`.
    pub fn to_csv(&self) -> QResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| QError::Serialization(e.to_string());
        let mut header = vec!["sign1", "m1"];
        if self.arity == 2 {
            header.extend(["sign2", "m2"]);
        }
        header.extend(["re", "im"]);
        w.write_record(&header).map_err(ser)?;
        for (k, v) in &self.values {
            let mut row: Vec<String> = Vec::new();
            for p in k {
                row.push(p.sign.symbol().to_string());
                row.push(p.m.to_string());
            }
            row.push(format!("{:e}", v.re));
            row.push(format!("{:e}", v.im));
            w.write_record(&row).map_err(ser)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| QError::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| QError::Serialization(e.to_string()))
    }

    /// Parses the CSV layout of [`LatticeFunction::to_csv`]; arity is read from the header.
    pub fn from_csv(s: &str, window: i32) -> QResult<Self> {
        let ser = |e: csv::Error| QError::Serialization(e.to_string());
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let arity = match r.headers().map_err(ser)?.len() {
            4 => 1,
            6 => 2,
            n => {
                return Err(QError::Serialization(format!(
                    "expected 4 or 6 columns, got {n}"
                )))
            }
        };
        let mut f = Self::zero(arity, window)?;
        for rec in r.records() {
            let rec = rec.map_err(ser)?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
            let num = |i: usize| -> QResult<f64> {
                field(i)
                    .parse::<f64>()
                    .map_err(|e| QError::Serialization(format!("column {i}: {e}")))
            };
            let int = |i: usize| -> QResult<i32> {
                field(i)
                    .parse::<i32>()
                    .map_err(|e| QError::Serialization(format!("column {i}: {e}")))
            };
            let mut key = Vec::with_capacity(arity);
            for v in 0..arity {
                key.push(LatticePoint {
                    sign: Sign::parse(&field(2 * v))?,
                    m: int(2 * v + 1)?,
                });
            }
            f.set(key, Complex64::new(num(2 * arity)?, num(2 * arity + 1)?))?;
        }
        Ok(f)
    }
}

/// How [`skeleton_map`] fills the negative sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeSector {
    /// Leave it zero.
    #[default]
    Zero,
    /// Substitute `-q^{2k}` into the series.
    SignExtend,
}

/// `psi_{k,l} = sum a_{m,n} q^{2mk + 2nl}` for `|k|, |l| <= window`.
pub fn skeleton_map(
    coeffs: &BTreeMap<(i32, i32), Complex64>,
    window: i32,
    negative: NegativeSector,
    ctx: &QContext,
) -> QResult<LatticeFunction> {
    let mut f = LatticeFunction::zero(2, window)?;
    f.sign_extended = negative == NegativeSector::SignExtend;
    let positive_only = negative == NegativeSector::Zero;
    for key in LatticeFunction::window_points(2, window, positive_only) {
        let (x, y) = (key[0].value(ctx), key[1].value(ctx));
        let mut sum = Complex64::default();
        let mut abs = 0.0;
        for (&(m, n), &a) in coeffs {
            let t = a * x.powi(m) * y.powi(n);
            sum += t;
            abs += t.norm();
        }
        if !abs.is_finite() {
            return Err(QError::Divergence {
                what: format!("skeleton series at (k,l) = ({}, {})", key[0].m, key[1].m),
                spread: abs,
            });
        }
        f.set(key, sum)?;
    }
    Ok(f)
}
