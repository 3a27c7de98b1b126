use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linop::{count_in, Relation};

use super::kernel::three_boson_kernel;
use super::separable::{lambda_unitary, SeparableModel};

/// Energy scan for [`trimer_levels`], in units of `β²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Deepest energy examined (negative).
    pub e_floor: f64,
    /// Shallowest energy examined (negative, above `e_floor`).
    pub e_ceiling: f64,
    pub points_per_decade: usize,
    /// Relative tolerance on each level.
    pub rel_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            e_floor: -1.0,
            e_ceiling: -1e-15,
            points_per_decade: 8,
            rel_tol: 1e-10,
        }
    }
}

/// Eigenvalues of `Λ(E)` above one: the number of trimers below `E`.
pub fn trimer_count(model: &SeparableModel, energy: f64) -> Result<usize> {
    Ok(count_and_top(model, energy)?.0)
}

fn count_and_top(model: &SeparableModel, energy: f64) -> Result<(usize, f64)> {
    let k = three_boson_kernel(model, energy)?;
    let eigs = k.eigenvalues();
    let top = eigs.last().copied().unwrap_or(0.0);
    Ok((count_in(&eigs, Relation::Greater, 1.0, k.guard_band()), top))
}

fn scan_energies(model: &SeparableModel, opts: &ScanOptions) -> Result<Vec<f64>> {
    let b2 = model.beta * model.beta;
    let (lo, hi) = (opts.e_floor * b2, opts.e_ceiling * b2);
    if !(lo < hi && hi < 0.0) || opts.points_per_decade == 0 {
        return Err(Error::InvalidParameter {
            name: "scan",
            reason: format!(
                "need e_floor < e_ceiling < 0, got [{}, {}]",
                opts.e_floor, opts.e_ceiling
            ),
        });
    }
    let decades = (lo / hi).log10();
    let steps = (decades * opts.points_per_decade as f64).ceil().max(1.0) as usize;
    Ok((0..=steps)
        .map(|k| lo * 10f64.powf(-decades * k as f64 / steps as f64))
        .collect())
}

/// Trimer energies between `e_floor·β²` and `e_ceiling·β²`, deepest first.
///
/// `N(E)` and the top eigenvalue of `Λ(E)` are evaluated on a log-spaced
/// scan toward zero and must not decrease; each jump in `N` is refined by
/// bisection in `ln|E|`.
pub fn trimer_levels(model: &SeparableModel, opts: &ScanOptions) -> Result<Vec<f64>> {
    let energies = scan_energies(model, opts)?;
    let (counts, tops): (Vec<usize>, Vec<f64>) = energies
        .par_iter()
        .map(|&e| count_and_top(model, e))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    if let Some(i) = tops.windows(2).position(|w| w[1] < w[0] * (1.0 - 1e-12)) {
        return Err(Error::NotMonotone(format!(
            "top eigenvalue drops from {} at E = {:e} to {} at E = {:e}",
            tops[i],
            energies[i],
            tops[i + 1],
            energies[i + 1]
        )));
    }
    if let Some(i) = counts.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NotMonotone(format!(
            "trimer count drops from {} at E = {:e} to {} at E = {:e}",
            counts[i],
            energies[i],
            counts[i + 1],
            energies[i + 1]
        )));
    }
    if counts[0] > 0 {
        log::warn!("{} trimer(s) lie below the scan floor {:e}", counts[0], energies[0]);
    }
    let jumps: Vec<(usize, usize)> = (0..energies.len() - 1)
        .flat_map(|k| (counts[k]..counts[k + 1]).map(move |level| (k, level)))
        .collect();
    jumps
        .par_iter()
        .map(|&(k, level)| refine(model, level, energies[k], energies[k + 1], opts.rel_tol))
        .collect()
}

/// Energy at which the count first exceeds `level`, inside `(deep, shallow)`.
fn refine(model: &SeparableModel, level: usize, deep: f64, shallow: f64, rel_tol: f64) -> Result<f64> {
    let mut lo = (-deep).ln();
    let mut hi = (-shallow).ln();
    while lo - hi > rel_tol {
        let mid = 0.5 * (lo + hi);
        if trimer_count(model, -mid.exp())? > level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(-(0.5 * (lo + hi)).exp())
}

/// `E_n/E_{n+1}` for consecutive levels.
pub fn level_ratios(energies: &[f64]) -> Vec<f64> {
    energies.windows(2).map(|w| w[0] / w[1]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfimovSpectrum {
    /// Trimer energies, deepest first.
    pub energies: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Trimer spectrum at unitarity; at least three levels are required.
pub fn efimov_spectrum(model: &SeparableModel, opts: &ScanOptions) -> Result<EfimovSpectrum> {
    let lu = lambda_unitary(model.beta)?;
    if (model.lambda / lu - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("must equal the unitary coupling {lu} within 1e-8, got {}", model.lambda),
        });
    }
    let energies = trimer_levels(model, opts)?;
    if energies.len() < 3 {
        return Err(Error::TooFewLevels { found: energies.len() });
    }
    let ratios = level_ratios(&energies);
    Ok(EfimovSpectrum { energies, ratios })
}

/// Levels recomputed with `p_max` doubled, matched to the originals.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffComparison {
    pub wide: Vec<f64>,
    /// `|E_wide/E − 1|` for the wide level nearest in `ln|E|`.
    pub level_shift: Vec<f64>,
    /// `|r_wide/r − 1|` for consecutive ratios, when both ends are matched.
    pub ratio_shift: Vec<f64>,
}

impl CutoffComparison {
    pub fn stable_levels(&self, tol: f64) -> Vec<bool> {
        self.level_shift.iter().map(|d| *d < tol).collect()
    }

    /// Whether the `k` shallowest ratios move by less than `tol`.
    pub fn shallow_ratios_stable(&self, k: usize, tol: f64) -> bool {
        self.ratio_shift.len() >= k && self.ratio_shift.iter().rev().take(k).all(|d| *d < tol)
    }
}

/// Repeats [`trimer_levels`] with `p_max` doubled. The deepest states depend
/// on the cutoff; the shallow ones should not.
pub fn cutoff_stability(model: &SeparableModel, opts: &ScanOptions, energies: &[f64]) -> Result<CutoffComparison> {
    let wide = trimer_levels(&model.with_p_max(2.0 * model.p_max), opts)?;
    let matched: Vec<Option<f64>> = energies
        .iter()
        .map(|e| {
            wide.iter()
                .copied()
                .min_by(|a, b| (a / e).ln().abs().total_cmp(&(b / e).ln().abs()))
        })
        .collect();
    let level_shift = energies
        .iter()
        .zip(&matched)
        .map(|(e, w)| w.map_or(f64::INFINITY, |w| (w / e - 1.0).abs()))
        .collect();
    let ratio_shift = energies
        .windows(2)
        .zip(matched.windows(2))
        .map(|(e, w)| match (w[0], w[1]) {
            (Some(a), Some(b)) if a != b => ((a / b) / (e[0] / e[1]) - 1.0).abs(),
            _ => f64::INFINITY,
        })
        .collect();
    Ok(CutoffComparison {
        wide,
        level_shift,
        ratio_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efimov::s0_oracle;

    fn model() -> SeparableModel {
        SeparableModel::at_unitarity(1.0, 50.0, 128).unwrap()
    }

    #[test]
    fn unitary_levels_approach_efimov_ratio() {
        let opts = ScanOptions {
            e_ceiling: -1e-12,
            rel_tol: 1e-8,
            ..Default::default()
        };
        let s = efimov_spectrum(&model(), &opts).unwrap();
        assert!(s.energies.len() >= 4);
        let (_, ratio) = s0_oracle();
        let last = *s.ratios.last().unwrap();
        assert!((last / ratio - 1.0).abs() < 0.01, "{last} vs {ratio}");
    }

    #[test]
    fn detuned_spectrum_is_finite() {
        let m = model();
        let m = m.with_lambda(0.9 * m.lambda);
        let shallow = ScanOptions {
            e_ceiling: -1e-14,
            rel_tol: 1e-6,
            ..Default::default()
        };
        let deeper = ScanOptions {
            e_ceiling: -1e-9,
            ..shallow
        };
        assert_eq!(
            trimer_levels(&m, &shallow).unwrap().len(),
            trimer_levels(&m, &deeper).unwrap().len()
        );
        assert!(matches!(
            efimov_spectrum(&m, &shallow),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn weak_coupling_has_no_trimers() {
        let m = model();
        assert_eq!(trimer_count(&m.with_lambda(0.1 * m.lambda), -1e-12).unwrap(), 0);
    }

    #[test]
    fn scan_bounds_are_validated() {
        let bad = ScanOptions {
            e_floor: -1e-3,
            e_ceiling: -1.0,
            ..Default::default()
        };
        assert!(trimer_levels(&model(), &bad).is_err());
    }
}
