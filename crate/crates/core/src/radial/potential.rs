use crate::error::{Error, Result};

/// Unit shape of a radial potential, `shape(r) ≥ 0`, as a function of `x = r/a`.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// `e^{−x}/x`
    Yukawa,
    /// `e^{−x}`
    Exponential,
    /// `e^{−x²}`
    Gaussian,
    /// `1` for `x < 1`
    SquareWell,
    /// Linear interpolation of `(x, shape)` pairs, zero beyond the last point.
    Table(Vec<(f64, f64)>),
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Yukawa => "yukawa",
            ShapeKind::Exponential => "exponential",
            ShapeKind::Gaussian => "gaussian",
            ShapeKind::SquareWell => "square_well",
            ShapeKind::Table(_) => "table",
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            ShapeKind::Yukawa => (-x).exp() / x,
            ShapeKind::Exponential => (-x).exp(),
            ShapeKind::Gaussian => (-x * x).exp(),
            ShapeKind::SquareWell => {
                if x < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ShapeKind::Table(t) => interpolate(t, x),
        }
    }
}

fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    let last = table.len() - 1;
    if x > table[last].0 {
        return 0.0;
    }
    if x <= table[0].0 {
        return table[0].1;
    }
    let i = table.partition_point(|p| p.0 <= x).min(last);
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// One signed term `sign·strength·shape(r/a)` of a pair potential.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub kind: ShapeKind,
    pub strength: f64,
    pub range: f64,
}

impl Term {
    fn validate(&self, what: &'static str) -> Result<()> {
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(Error::InvalidParameter {
                name: what,
                reason: format!("range must be positive, got {}", self.range),
            });
        }
        if !(self.strength >= 0.0) || !self.strength.is_finite() {
            return Err(Error::InvalidParameter {
                name: what,
                reason: format!("strength must be nonnegative, got {}", self.strength),
            });
        }
        if let ShapeKind::Table(t) = &self.kind {
            if t.len() < 2 {
                return Err(Error::InvalidParameter {
                    name: what,
                    reason: "table needs at least two rows".into(),
                });
            }
            if t.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return Err(Error::InvalidParameter {
                    name: what,
                    reason: "table abscissae must increase strictly".into(),
                });
            }
            if t.iter().any(|p| !(p.1 >= 0.0) || !p.0.is_finite() || p.0 < 0.0) {
                return Err(Error::InvalidParameter {
                    name: what,
                    reason: "table shape values must be finite and nonnegative".into(),
                });
            }
        }
        Ok(())
    }

    pub fn shape(&self, r: f64) -> f64 {
        self.kind.eval(r / self.range)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.strength * self.shape(r)
    }

    /// Radius beyond which the shape vanishes, if it has compact support.
    pub fn support(&self) -> Option<f64> {
        match &self.kind {
            ShapeKind::SquareWell => Some(self.range),
            ShapeKind::Table(t) => Some(t[t.len() - 1].0 * self.range),
            _ => None,
        }
    }

    /// Radius beyond which the shape is below `1e-16` of its scale.
    pub fn effective_extent(&self) -> f64 {
        match &self.kind {
            ShapeKind::Yukawa | ShapeKind::Exponential => 37.0 * self.range,
            ShapeKind::Gaussian => 6.1 * self.range,
            _ => self.support().expect("compact support"),
        }
    }
}

/// Radial pair potential `v(r) = −λ·shape(r/a) + v_rep(r)` in units `ħ = 2m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub attractive: Term,
    pub repulsive: Option<Term>,
}

impl PotentialSpec {
    pub fn new(kind: ShapeKind, strength: f64, range: f64) -> Result<Self> {
        let attractive = Term { kind, strength, range };
        attractive.validate("potential")?;
        Ok(Self {
            attractive,
            repulsive: None,
        })
    }

    pub fn with_repulsion(mut self, kind: ShapeKind, strength: f64, range: f64) -> Result<Self> {
        let term = Term { kind, strength, range };
        term.validate("repulsive_part")?;
        self.repulsive = Some(term);
        Ok(self)
    }

    pub fn square_well(strength: f64, range: f64) -> Result<Self> {
        Self::new(ShapeKind::SquareWell, strength, range)
    }

    pub fn yukawa(strength: f64, range: f64) -> Result<Self> {
        Self::new(ShapeKind::Yukawa, strength, range)
    }

    pub fn strength(&self) -> f64 {
        self.attractive.strength
    }

    pub fn range(&self) -> f64 {
        self.attractive.range
    }

    /// Same shapes, attractive strength replaced by `lambda`.
    pub fn with_strength(&self, lambda: f64) -> Self {
        let mut p = self.clone();
        p.attractive.strength = lambda;
        p
    }

    /// All strengths multiplied by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.attractive.strength *= c;
        if let Some(r) = p.repulsive.as_mut() {
            r.strength *= c;
        }
        p
    }

    /// Shapes rescaled `r → r/s` (every range multiplied by `s`).
    pub fn rescaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.attractive.range *= s;
        if let Some(r) = p.repulsive.as_mut() {
            r.range *= s;
        }
        p
    }

    pub fn value(&self, r: f64) -> f64 {
        let rep = self.repulsive.as_ref().map_or(0.0, |t| t.value(r));
        rep - self.attractive.value(r)
    }

    /// `v₊ = max(v, 0)`.
    pub fn v_plus(&self, r: f64) -> f64 {
        self.value(r).max(0.0)
    }

    /// `v₋ = max(−v, 0)`.
    pub fn v_minus(&self, r: f64) -> f64 {
        (-self.value(r)).max(0.0)
    }

    pub fn has_repulsion(&self) -> bool {
        self.repulsive.as_ref().is_some_and(|t| t.strength > 0.0)
    }

    /// Radius beyond which `v` vanishes or is negligible.
    pub fn extent(&self) -> f64 {
        let a = self.attractive.effective_extent();
        self.repulsive.as_ref().map_or(a, |t| a.max(t.effective_extent()))
    }

    /// Radii where `v` may be discontinuous or kinked.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        for t in std::iter::once(&self.attractive).chain(self.repulsive.as_ref()) {
            match &t.kind {
                ShapeKind::SquareWell => b.push(t.range),
                ShapeKind::Table(tab) => b.extend(tab.iter().map(|p| p.0 * t.range)),
                _ => {}
            }
        }
        b.retain(|x| *x > 0.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}
