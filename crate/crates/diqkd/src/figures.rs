//! Figure datasets: key-rate and error-rate curves over the benchmark
//! CHSH band, plus the attack-region boundaries mapped into observable
//! coordinates.
//!
//! Figure ids (`fig1`, `fig3`, `fig4`, `fig5`) are part of the command
//! interface; table and column names describe the content. Regions are
//! emitted as boundary data (a closed polygon, or per-abscissa lower
//! and upper bounds) rather than as rendered shading.

use std::str::FromStr;

use crate::attack::{gamma_for_target_chsh, CHSH_BAND_LOWER, CHSH_BAND_UPPER, QBER_CAP_ROUNDED};
use crate::error::{Error, Result};
use crate::keyrate::{
    collective_key_rate, max_interception_bias, sequential_collective_key_rate,
    sequential_individual_key_rate, sequential_qber,
};
use crate::output::{Column, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig1, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            other => Err(Error::Usage(format!(
                "unknown figure id {other:?} (expected fig1, fig3, fig4 or fig5)"
            ))),
        }
    }
}

/// QBER of the collective family expressed through its CHSH value:
/// Q = (3 - sqrt 2 S) / 4.
fn collective_qber_at_chsh(chsh: f64) -> f64 {
    (3.0 - std::f64::consts::SQRT_2 * chsh) / 4.0
}

fn band_grid(resolution: usize) -> Vec<f64> {
    let n = resolution.max(2);
    (0..n)
        .map(|i| {
            CHSH_BAND_LOWER + (CHSH_BAND_UPPER - CHSH_BAND_LOWER) * i as f64 / (n - 1) as f64
        })
        .collect()
}

/// Sharpness solving the optimal post-attack CHSH for `target` at bias
/// q; errors only if the solver is asked outside the reachable set,
/// which the callers' grids never do.
fn gamma_on_level_set(q: f64, target: f64) -> Result<f64> {
    gamma_for_target_chsh(q, target)?.ok_or_else(|| {
        Error::InvalidState(format!("CHSH target {target} unreachable at bias {q}"))
    })
}

/// Error rate along a fixed-CHSH level set as a function of the bias,
/// with no source noise: decreasing in q, zero at the vanishing-
/// sharpness end.
fn qber_on_level_set(q: f64, target: f64) -> Result<f64> {
    sequential_qber(q, gamma_on_level_set(q, target)?, 0.0)
}

/// Bias at which the level-set error rate reaches `cap` (bisection).
fn bias_at_qber_cap(target: f64, cap: f64) -> Result<f64> {
    let mut lo = 0.5;
    let mut hi = max_interception_bias(target)? - 1e-12;
    if qber_on_level_set(lo, target)? <= cap {
        return Ok(lo);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if qber_on_level_set(mid, target)? > cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn chsh_column() -> Column {
    Column::new(
        "chsh",
        "dimensionless",
        "CHSH value S, classical bound 2, Tsirelson bound 2 sqrt 2",
    )
}

/// Key rate of the collective bound along its own correlation family:
/// columns (S, Q(S), r_C).
fn collective_band_table(name: &str, resolution: usize) -> Result<Table> {
    let mut t = Table::new(
        name,
        vec![
            chsh_column(),
            Column::new("qber", "probability", "Q = (3 - sqrt(2) S) / 4"),
            Column::new(
                "key_rate",
                "bits/round",
                "r_C = 1 - H(Q) - H((1 + sqrt((S/2)^2 - 1)) / 2)",
            ),
        ],
    );
    for s in band_grid(resolution) {
        let q = collective_qber_at_chsh(s);
        t.push_row(vec![s, q, collective_key_rate(q, s)?.rate]);
    }
    Ok(t)
}

fn fig1(resolution: usize) -> Result<Vec<Table>> {
    Ok(vec![collective_band_table(
        "fig1_collective_key_rate",
        resolution,
    )?])
}

/// The error-rate target curve plus the interception region mapped to
/// (S-tilde*, Q^S) coordinates and clipped at the rounded cap. The
/// region is a closed polygon swept along its four edges: the
/// zero-error bottom (vanishing sharpness), the two fixed-CHSH side
/// edges, and the capped top.
fn fig3(resolution: usize) -> Result<Vec<Table>> {
    let mut target = Table::new(
        "fig3_error_rate_target",
        vec![
            chsh_column(),
            Column::new("qber", "probability", "Q = (3 - sqrt(2) S) / 4"),
        ],
    );
    for s in band_grid(resolution) {
        target.push_row(vec![s, collective_qber_at_chsh(s)]);
    }

    let cap = QBER_CAP_ROUNDED;
    let per_edge = (resolution / 4).max(2);
    let mut polygon = Table::new(
        "fig3_error_rate_region",
        vec![
            chsh_column(),
            Column::new(
                "qber",
                "probability",
                "Q^S boundary of the interception region, clipped at the rounded cap",
            ),
        ],
    );
    // Bottom edge: gamma = 0 keeps Q^S = 0 while the bias sweeps the
    // band.
    for i in 0..per_edge {
        let s = CHSH_BAND_LOWER
            + (CHSH_BAND_UPPER - CHSH_BAND_LOWER) * i as f64 / (per_edge - 1) as f64;
        polygon.push_row(vec![s, 0.0]);
    }
    // Right edge: the upper-target level set from zero error up to the
    // cap.
    let q_top_right = bias_at_qber_cap(CHSH_BAND_UPPER, cap)?;
    let q_max_right = max_interception_bias(CHSH_BAND_UPPER)? - 1e-12;
    for i in 1..per_edge {
        let q = q_max_right + (q_top_right - q_max_right) * i as f64 / (per_edge - 1) as f64;
        polygon.push_row(vec![CHSH_BAND_UPPER, qber_on_level_set(q, CHSH_BAND_UPPER)?]);
    }
    // Top edge: the capped error rate across the band.
    for i in 1..per_edge {
        let s = CHSH_BAND_UPPER
            - (CHSH_BAND_UPPER - CHSH_BAND_LOWER) * i as f64 / (per_edge - 1) as f64;
        let q = bias_at_qber_cap(s, cap)?;
        polygon.push_row(vec![s, qber_on_level_set(q, s)?]);
    }
    // Left edge back down to zero error, closing the polygon.
    let q_top_left = bias_at_qber_cap(CHSH_BAND_LOWER, cap)?;
    let q_max_left = max_interception_bias(CHSH_BAND_LOWER)? - 1e-12;
    for i in 1..per_edge {
        let q = q_top_left + (q_max_left - q_top_left) * i as f64 / (per_edge - 1) as f64;
        polygon.push_row(vec![CHSH_BAND_LOWER, qber_on_level_set(q, CHSH_BAND_LOWER)?]);
    }
    polygon.push_row(vec![CHSH_BAND_LOWER, 0.0]);

    Ok(vec![target, polygon])
}

/// Scans the clipped level set at one CHSH value and returns the
/// extreme values of a per-point rate.
fn level_set_rate_bounds(
    s: f64,
    cap: f64,
    rate: impl Fn(f64, f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let q_hi = max_interception_bias(s)? - 1e-12;
    let q_lo = bias_at_qber_cap(s, cap)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let samples = 33;
    for i in 0..samples {
        let q = q_lo + (q_hi - q_lo) * i as f64 / (samples - 1) as f64;
        let r = rate(q, gamma_on_level_set(q, s)?)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

fn rate_region_table(
    name: &str,
    resolution: usize,
    formula: &str,
    rate: impl Fn(f64, f64) -> Result<f64>,
) -> Result<Table> {
    let mut t = Table::new(
        name,
        vec![
            chsh_column(),
            Column::new("key_rate_lower", "bits/round", formula),
            Column::new("key_rate_upper", "bits/round", formula),
        ],
    );
    for s in band_grid(resolution) {
        let (lo, hi) = level_set_rate_bounds(s, QBER_CAP_ROUNDED, &rate)?;
        t.push_row(vec![s, lo, hi]);
    }
    Ok(t)
}

/// The extremal interception at a CHSH value: largest compatible bias,
/// vanishing sharpness, source noise matching the collective family.
fn extremal_point(s: f64) -> Result<(f64, f64)> {
    Ok((max_interception_bias(s)?, collective_qber_at_chsh(s)))
}

fn fig4(resolution: usize) -> Result<Vec<Table>> {
    let reference = collective_band_table("fig4_collective_reference", resolution)?;

    let mut optimal = Table::new(
        "fig4_individual_optimal",
        vec![
            chsh_column(),
            Column::new(
                "key_rate",
                "bits/round",
                "r_S at the extremal interception (largest bias, vanishing sharpness, \
                 source noise matched to the collective family)",
            ),
        ],
    );
    for s in band_grid(resolution) {
        let (q, base) = extremal_point(s)?;
        optimal.push_row(vec![s, sequential_individual_key_rate(q, 0.0, base)?.rate]);
    }

    let region = rate_region_table(
        "fig4_individual_region",
        resolution,
        "range of r_S = 1 - H(Q^S) - q over the clipped fixed-CHSH level set, no source noise",
        |q, gamma| Ok(sequential_individual_key_rate(q, gamma, 0.0)?.rate),
    )?;
    Ok(vec![reference, optimal, region])
}

fn fig5(resolution: usize) -> Result<Vec<Table>> {
    let reference = collective_band_table("fig5_collective_reference", resolution)?;

    let mut optimal = Table::new(
        "fig5_memory_optimal",
        vec![
            chsh_column(),
            Column::new(
                "key_rate",
                "bits/round",
                "r_CS at the extremal interception; coincides with r_C through the \
                 mirror-image Holevo identity",
            ),
        ],
    );
    for s in band_grid(resolution) {
        let (q, base) = extremal_point(s)?;
        optimal.push_row(vec![s, sequential_collective_key_rate(q, 0.0, base)?.rate]);
    }

    let region = rate_region_table(
        "fig5_memory_region",
        resolution,
        "range of r_CS = 1 - H(Q^S) - chi over the clipped fixed-CHSH level set, no source noise",
        |q, gamma| Ok(sequential_collective_key_rate(q, gamma, 0.0)?.rate),
    )?;
    Ok(vec![reference, optimal, region])
}

/// All tables of one figure at the given abscissa resolution.
pub fn figure_dataset(id: FigureId, resolution: usize) -> Result<Vec<Table>> {
    if resolution < 2 {
        return Err(Error::Domain {
            param: "resolution",
            value: resolution as f64,
            admissible: "at least 2",
        });
    }
    match id {
        FigureId::Fig1 => fig1(resolution),
        FigureId::Fig3 => fig3(resolution),
        FigureId::Fig4 => fig4(resolution),
        FigureId::Fig5 => fig5(resolution),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, eps: f64) {
        assert!((a - b).abs() <= eps, "{a} vs {b} (eps {eps})");
    }

    #[test]
    fn figure_ids_parse_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
        }
        assert!(matches!("fig2".parse::<FigureId>(), Err(Error::Usage(_))));
        assert!(figure_dataset(FigureId::Fig1, 1).is_err());
    }

    #[test]
    fn chsh_parameterized_qber_matches_alpha_route() {
        for alpha in [0.05, 0.15, 0.2625] {
            let s = crate::attack::collective_chsh(alpha).unwrap();
            assert_close(
                collective_qber_at_chsh(s),
                crate::attack::collective_qber(alpha).unwrap(),
                1e-12,
            );
        }
    }

    #[test]
    fn fig1_curve_is_strictly_increasing_with_expected_endpoints() {
        let tables = figure_dataset(FigureId::Fig1, 100).unwrap();
        let rates = tables[0].column_values("key_rate").unwrap();
        let chsh = tables[0].column_values("chsh").unwrap();
        assert!(rates.windows(2).all(|w| w[1] > w[0]));
        assert!(chsh.windows(2).all(|w| w[1] > w[0]));
        assert_close(chsh[0], 2.0965, 1e-12);
        assert_close(*chsh.last().unwrap(), 2.1213, 1e-12);
        assert!(rates[0].abs() < 2e-4);
        assert_close(*rates.last().unwrap(), 0.0921, 5e-4);
        let qber = tables[0].column_values("qber").unwrap();
        assert!(qber.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fig3_region_stays_inside_its_bounding_box_and_closes() {
        let tables = figure_dataset(FigureId::Fig3, 200).unwrap();
        let polygon = &tables[1];
        let chsh = polygon.column_values("chsh").unwrap();
        let qber = polygon.column_values("qber").unwrap();
        for (s, q) in chsh.iter().zip(&qber) {
            assert!(*s >= 2.0965 - 1e-9 && *s <= 2.1213 + 1e-9, "S out of box: {s}");
            assert!(*q >= -1e-12 && *q <= 0.0086 + 3e-4, "Q out of box: {q}");
        }
        let first = (chsh[0], qber[0]);
        let last = (*chsh.last().unwrap(), *qber.last().unwrap());
        assert_eq!(first, last, "polygon not closed");
        // The capped top edge actually reaches the cap.
        assert!(qber.iter().any(|q| (q - 0.0086).abs() < 1e-9));
        // Target curve spans the band with the exact-cap endpoint
        // slightly above the rounded cap.
        let target_q = tables[0].column_values("qber").unwrap();
        assert_close(target_q[0], 0.00877, 1e-4);
        assert!(target_q.last().unwrap().abs() < 1e-3);
    }

    #[test]
    fn fig4_individual_rate_dominates_collective_reference() {
        let tables = figure_dataset(FigureId::Fig4, 60).unwrap();
        let r_c = tables[0].column_values("key_rate").unwrap();
        let r_s = tables[1].column_values("key_rate").unwrap();
        for (c, s) in r_c.iter().zip(&r_s) {
            assert!(s > c, "individual bound not above collective: {s} vs {c}");
        }
        let lo = tables[2].column_values("key_rate_lower").unwrap();
        let hi = tables[2].column_values("key_rate_upper").unwrap();
        for (l, h) in lo.iter().zip(&hi) {
            assert!(l <= h);
            assert!(*l > 0.25 && *h < 0.45, "region bounds implausible: {l}..{h}");
        }
    }

    #[test]
    fn fig5_memory_curve_coincides_with_collective_curve() {
        let tables = figure_dataset(FigureId::Fig5, 60).unwrap();
        let r_c = tables[0].column_values("key_rate").unwrap();
        let r_cs = tables[1].column_values("key_rate").unwrap();
        for (c, cs) in r_c.iter().zip(&r_cs) {
            assert_close(*cs, *c, 2e-3);
            assert_close(*cs, *c, 1e-12);
        }
        let hi = tables[2].column_values("key_rate_upper").unwrap();
        let lo = tables[2].column_values("key_rate_lower").unwrap();
        for ((h, l), c) in hi.iter().zip(&lo).zip(&r_c) {
            assert!(l <= h);
            // The memoryless-error region sits above the source-noise
            // matched curve.
            assert!(h > c);
        }
    }

    #[test]
    fn datasets_are_deterministic() {
        for id in FigureId::ALL {
            let a = figure_dataset(id, 40).unwrap();
            let b = figure_dataset(id, 40).unwrap();
            let csv_a: Vec<String> = a.iter().map(|t| t.to_csv_string()).collect();
            let csv_b: Vec<String> = b.iter().map(|t| t.to_csv_string()).collect();
            assert_eq!(csv_a, csv_b);
        }
    }

    #[test]
    fn level_set_error_rate_is_monotone_in_bias() {
        for s in [2.0965, 2.11, 2.1213] {
            let q_hi = max_interception_bias(s).unwrap() - 1e-9;
            let mut prev = f64::INFINITY;
            for i in 0..12 {
                let q = 0.5 + (q_hi - 0.5) * i as f64 / 11.0;
                let qs = qber_on_level_set(q, s).unwrap();
                assert!(qs < prev + 1e-12, "not decreasing at S={s}, q={q}");
                prev = qs;
            }
            assert!(prev < 1e-6, "level set does not reach zero error");
        }
    }
}
