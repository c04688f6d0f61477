//! Checks the spectrum of a planted 3-colored instance against the
//! predicted shape: `λ_1 ≈ 2d/3`, the two most negative eigenvalues near
//! `-d/3`, a bounded middle, and the planted class vectors lying in the
//! bottom eigenspace.

use serde::{Deserialize, Serialize};

use super::{extreme_eigenpairs, full_spectrum_dense, lambda_expansion, IndicatorBasis, SpectralError, ITERATIVE_TOL};
use crate::generators::PlantedInstance;

/// Graphs up to this size are validated with the dense oracle.
const DENSE_VALIDATION_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlantingMode {
    RandomPlanting,
    AdversarialPlanting,
}

/// Window half-widths as fractions of `d`, the middle-band constant, and
/// the allowed alignment deficit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlack {
    pub top: f64,
    pub bottom: f64,
    pub middle_const: f64,
    pub alignment: f64,
}

impl Default for SpectrumSlack {
    fn default() -> Self {
        SpectrumSlack { top: 0.08, bottom: 0.08, middle_const: 6.0, alignment: 0.1 }
    }
}

impl SpectrumSlack {
    pub fn zero() -> Self {
        SpectrumSlack { top: 0.0, bottom: 0.0, middle_const: 0.0, alignment: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub mode: PlantingMode,
    pub d: f64,
    pub lambda_1: f64,
    pub lambda_n_minus_1: f64,
    pub lambda_n: f64,
    /// `max(|λ_2|, |λ_{n-2}|)`.
    pub middle_max: f64,
    pub host_lambda_hat: f64,
    pub top_window: (f64, f64),
    pub bottom_window: (f64, f64),
    pub middle_bound: f64,
    /// Projection norms of `x̄` and `ȳ` onto `span(e_{n-1}, e_n)`.
    pub alignment_x: f64,
    pub alignment_y: f64,
    pub top_ok: bool,
    pub bottom_ok: bool,
    pub middle_ok: bool,
    pub alignment_ok: bool,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.top_ok && self.bottom_ok && self.middle_ok && self.alignment_ok
    }
}

// Exact-arithmetic instances land on window edges; allow rounding.
const EDGE: f64 = 1e-9;

fn within((lo, hi): (f64, f64), x: f64) -> bool {
    x >= lo - EDGE && x <= hi + EDGE
}

/// Report-only check for a 3-planted instance (`n >= 5`).
pub fn validate_planted_spectrum(
    inst: &PlantedInstance,
    mode: PlantingMode,
    slack: SpectrumSlack,
) -> Result<SpectrumReport, SpectralError> {
    let g = &inst.result;
    let n = g.n();
    assert_eq!(inst.planted.k(), 3, "spectrum shape is stated for k = 3");
    assert!(n >= 5, "need five distinct eigenvalue positions");
    let d = inst.params.d;

    let spectrum = if n <= DENSE_VALIDATION_LIMIT {
        full_spectrum_dense(g)?
    } else {
        extreme_eigenpairs(g, 3, 2, ITERATIVE_TOL)?
    };
    let at = |i: usize| spectrum.lambda(i).expect("rank computed");
    let (lambda_1, lambda_2) = (at(1), at(2));
    let (lambda_n2, lambda_n1, lambda_n) = (at(n - 2), at(n - 1), at(n));
    let middle_max = lambda_2.abs().max(lambda_n2.abs());

    let host_lambda_hat = if inst.host.n() <= DENSE_VALIDATION_LIMIT {
        super::lambda_expansion_dense(&inst.host)?
    } else {
        lambda_expansion(&inst.host)?
    };

    let top_window = ((2.0 / 3.0 - slack.top) * d, (2.0 / 3.0 + slack.top) * d);
    let bottom_window = ((-1.0 / 3.0 - slack.bottom) * d, (-1.0 / 3.0 + slack.bottom) * d);
    let middle_bound = match mode {
        PlantingMode::RandomPlanting => 2.0 * host_lambda_hat + slack.middle_const * d.sqrt(),
        PlantingMode::AdversarialPlanting => 2.0 * host_lambda_hat + slack.middle_const * (d * host_lambda_hat).sqrt(),
    };

    let basis = IndicatorBasis::from_partition(&inst.planted);
    let bottom: Vec<&[f64]> = spectrum.bottom(2).iter().map(|p| p.vector.as_slice()).collect();
    let alignment_x = basis.projection_norm(1, &bottom);
    let alignment_y = basis.projection_norm(2, &bottom);

    Ok(SpectrumReport {
        mode,
        d,
        lambda_1,
        lambda_n_minus_1: lambda_n1,
        lambda_n,
        middle_max,
        host_lambda_hat,
        top_window,
        bottom_window,
        middle_bound,
        alignment_x,
        alignment_y,
        top_ok: within(top_window, lambda_1),
        bottom_ok: within(bottom_window, lambda_n1) && within(bottom_window, lambda_n),
        middle_ok: middle_max <= middle_bound + EDGE,
        alignment_ok: alignment_x >= 1.0 - slack.alignment - EDGE && alignment_y >= 1.0 - slack.alignment - EDGE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Model;
    use crate::graph::{Coloring, Graph};

    #[test]
    fn octahedron_passes_with_zero_slack() {
        // Host K6 treated with d = 6: planting J - I leaves J minus the
        // class blocks, whose spectrum is exactly (2/3)·6 and -(1/3)·6.
        let planted = Coloring::new(3, vec![1, 2, 3, 1, 2, 3]).unwrap();
        let inst = PlantedInstance::new(Graph::complete(6), planted, Model::AA, 6.0, 0).unwrap();
        let report = validate_planted_spectrum(&inst, PlantingMode::RandomPlanting, SpectrumSlack::zero()).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert!((report.alignment_x - 1.0).abs() < 1e-9 && (report.alignment_y - 1.0).abs() < 1e-9);
    }

    #[test]
    fn monochromatic_planting_fails_top_window() {
        let planted = Coloring::constant(9, 3, 1);
        let inst = PlantedInstance::new(Graph::complete(9), planted, Model::AA, 8.0, 0).unwrap();
        let report = validate_planted_spectrum(&inst, PlantingMode::RandomPlanting, SpectrumSlack::default()).unwrap();
        assert!(!report.top_ok);
        assert_eq!(report.lambda_1, 0.0);
        assert!(!report.passed());
    }
}
