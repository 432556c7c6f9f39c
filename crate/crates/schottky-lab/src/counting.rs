//! Resonance counting functions and Weyl-ratio diagnostics.
//!
//! Boundary conventions follow the displayed definitions: closed in the real
//! part and the radius, strict in |Im|.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::zeta::zeros::ResonanceSet;

/// N(sigma, T) = #{s : sigma <= Re(s) <= 1/2, |Im(s)| < T}, with multiplicity.
pub fn count_strip(rs: &ResonanceSet, sigma: f64, t: f64) -> Result<u64> {
    if sigma > 0.5 {
        return Ok(0);
    }
    if sigma < rs.box_spec.re_min || t > rs.box_spec.t_max {
        return Err(Error::Coverage(format!(
            "strip [{sigma}, 1/2] x (-{t}, {t}) exceeds the box [{}, {}] x [-{}, {}]",
            rs.box_spec.re_min, rs.box_spec.re_max, rs.box_spec.t_max, rs.box_spec.t_max
        )));
    }
    Ok(rs
        .zeros
        .iter()
        .filter(|&&(re, im, _)| sigma <= re && re <= 0.5 && im.abs() < t)
        .map(|z| z.2 as u64)
        .sum())
}

/// N(r) = #{s : |s| <= r}, with multiplicity. The validity region relies on
/// resonances being confined to Re(s) <= delta, so only the left and vertical
/// extents of the box limit r.
pub fn count_ball(rs: &ResonanceSet, r: f64) -> Result<u64> {
    if r < 0.0 {
        return Ok(0);
    }
    if r > -rs.box_spec.re_min || r > rs.box_spec.t_max {
        return Err(Error::Coverage(format!(
            "ball of radius {r} exceeds the box [{}, {}] x [-{}, {}]",
            rs.box_spec.re_min, rs.box_spec.re_max, rs.box_spec.t_max, rs.box_spec.t_max
        )));
    }
    Ok(rs
        .zeros
        .iter()
        .filter(|&&(re, im, _)| re * re + im * im <= r * r)
        .map(|z| z.2 as u64)
        .sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingProfile {
    pub surface: String,
    pub vol0: f64,
    /// (r, N(r)) on an increasing grid
    pub ball_counts: Vec<(f64, u64)>,
    /// (sigma, T, N(sigma, T))
    pub strip_counts: Vec<(f64, f64, u64)>,
    /// max over the grid of N(r) / (vol0 r^2)
    pub weyl_constant: f64,
    pub weyl_constant_min: f64,
}

/// Tabulate counts over radius and strip grids.
pub fn counting_profile(
    name: &str,
    rs: &ResonanceSet,
    vol0: f64,
    radii: &[f64],
    strips: &[(f64, f64)],
) -> Result<CountingProfile> {
    let mut ball_counts = Vec::with_capacity(radii.len());
    let mut cmax: f64 = 0.0;
    let mut cmin = f64::INFINITY;
    for &r in radii {
        let n = count_ball(rs, r)?;
        ball_counts.push((r, n));
        if r > 0.0 {
            let ratio = n as f64 / (vol0 * r * r);
            cmax = cmax.max(ratio);
            if n > 0 {
                cmin = cmin.min(ratio);
            }
        }
    }
    let mut strip_counts = Vec::with_capacity(strips.len());
    for &(sigma, t) in strips {
        strip_counts.push((sigma, t, count_strip(rs, sigma, t)?));
    }
    Ok(CountingProfile {
        surface: name.into(),
        vol0,
        ball_counts,
        strip_counts,
        weyl_constant: cmax,
        weyl_constant_min: cmin,
    })
}

impl CountingProfile {
    pub fn ball_csv(&self) -> String {
        let mut s = String::from("r,count\n");
        for (r, n) in &self.ball_counts {
            s.push_str(&format!("{r:.12e},{n}\n"));
        }
        s
    }

    pub fn strip_csv(&self) -> String {
        let mut s = String::from("sigma,t,count\n");
        for (sigma, t, n) in &self.strip_counts {
            s.push_str(&format!("{sigma:.12e},{t:.12e},{n}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylReport {
    pub per_surface: Vec<(String, f64, f64)>,
    /// single bracketing pair across all surfaces
    pub c_lo: f64,
    pub c_hi: f64,
    pub spread: f64,
}

/// Cross-surface check that one constant pair brackets N(r) / (vol0 r^2).
pub fn weyl_diagnostics(profiles: &[CountingProfile]) -> Result<WeylReport> {
    if profiles.len() < 2 {
        return Err(Error::Parameter(
            "weyl diagnostics needs at least two surfaces".into(),
        ));
    }
    let mut c_lo = f64::INFINITY;
    let mut c_hi = 0.0f64;
    let mut per_surface = Vec::new();
    for p in profiles {
        per_surface.push((p.surface.clone(), p.weyl_constant_min, p.weyl_constant));
        c_lo = c_lo.min(p.weyl_constant_min);
        c_hi = c_hi.max(p.weyl_constant);
    }
    Ok(WeylReport {
        per_surface,
        c_lo,
        c_hi,
        spread: c_hi / c_lo,
    })
}

/// Brute-force filter on the CSV serialization; the exact oracle for the
/// counting queries.
pub fn csv_filter_strip(csv: &str, sigma: f64, t: f64) -> u64 {
    csv_filter(csv, |re, im| sigma <= re && re <= 0.5 && im.abs() < t)
}

pub fn csv_filter_ball(csv: &str, r: f64) -> u64 {
    csv_filter(csv, |re, im| re * re + im * im <= r * r)
}

fn csv_filter<F: Fn(f64, f64) -> bool>(csv: &str, keep: F) -> u64 {
    let mut total = 0u64;
    for line in csv.lines().skip(1) {
        let mut it = line.split(',');
        let re: f64 = it.next().unwrap().parse().unwrap();
        let im: f64 = it.next().unwrap().parse().unwrap();
        let m: u64 = it.next().unwrap().parse().unwrap();
        if keep(re, im) {
            total += m;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::zeros::{BoxSpec, TopologicalEntry};

    fn fake_set() -> ResonanceSet {
        let zeros = vec![
            (0.31, 0.0, 1),
            (0.05, 2.2, 1),
            (0.05, -2.2, 1),
            (-0.4, 4.0, 2),
            (-0.4, -4.0, 2),
            (-0.9, 0.0, 1),
        ];
        let _ = TopologicalEntry {
            k: 0,
            expected: 1,
            found: 1,
            excess: 0,
        };
        ResonanceSet {
            zeros,
            box_spec: BoxSpec {
                re_min: -6.0,
                re_max: 0.9,
                t_max: 8.0,
            },
            tol: 1e-8,
            truncation_depth: 10,
            representation: "trivial".into(),
            topological: vec![],
            evaluations: 0,
        }
    }

    #[test]
    fn strip_conventions() {
        let rs = fake_set();
        // sigma > 1/2 is empty by definition
        assert_eq!(count_strip(&rs, 0.6, 5.0).unwrap(), 0);
        // T = 0 is empty (strict |Im| < T)
        assert_eq!(count_strip(&rs, -1.0, 0.0).unwrap(), 0);
        // boundary: Re = 0.31 <= 0.5 counted; |Im| = 2.2 < 2.2 is false
        assert_eq!(count_strip(&rs, -1.0, 2.2).unwrap(), 2);
        assert_eq!(count_strip(&rs, -1.0, 2.3).unwrap(), 4);
        assert_eq!(count_strip(&rs, -1.0, 5.0).unwrap(), 8);
        assert_eq!(count_strip(&rs, -0.5, 5.0).unwrap(), 7);
    }

    #[test]
    fn ball_counts_and_oracle() {
        let rs = fake_set();
        assert_eq!(count_ball(&rs, 0.32).unwrap(), 1);
        assert_eq!(count_ball(&rs, 2.21).unwrap(), 4);
        assert_eq!(count_ball(&rs, 5.0).unwrap(), 8);
        // CSV filter oracle agrees exactly
        let csv = rs.to_csv();
        for r in [0.32, 1.0, 2.21, 4.1, 5.0] {
            assert_eq!(count_ball(&rs, r).unwrap(), csv_filter_ball(&csv, r));
        }
        for (sigma, t) in [(-1.0, 2.2), (-0.5, 5.0), (0.0, 3.0)] {
            assert_eq!(
                count_strip(&rs, sigma, t).unwrap(),
                csv_filter_strip(&csv, sigma, t)
            );
        }
    }

    #[test]
    fn coverage_errors() {
        let rs = fake_set();
        assert!(count_strip(&rs, -7.0, 5.0).is_err());
        assert!(count_strip(&rs, -1.0, 9.0).is_err());
        assert!(count_ball(&rs, 7.0).is_err());
    }

    #[test]
    fn monotone_in_radius() {
        let rs = fake_set();
        let mut prev = 0;
        for r in [0.1, 0.5, 1.0, 2.3, 4.2, 5.5] {
            let n = count_ball(&rs, r).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn crude_strip_ball_inclusion() {
        let rs = fake_set();
        for (sigma, t) in [(-1.0f64, 2.0f64), (-2.0, 4.5), (-0.3, 1.0), (-5.0, 3.0)] {
            let r = (t * t + sigma.abs().max(0.5).powi(2)).sqrt();
            if r <= 6.0 && r <= 8.0 {
                assert!(
                    count_strip(&rs, sigma, t).unwrap() <= count_ball(&rs, r).unwrap(),
                    "sigma {sigma}, t {t}"
                );
            }
        }
    }

    #[test]
    fn conjugate_symmetry_of_counts() {
        let rs = fake_set();
        // counting with the mirrored filter gives the same answer
        let csv = rs.to_csv();
        let up: u64 = csv_filter(&csv, |re, im| (-1.0..=0.5).contains(&re) && im > 0.0 && im < 5.0);
        let down: u64 =
            csv_filter(&csv, |re, im| (-1.0..=0.5).contains(&re) && im < 0.0 && -im < 5.0);
        assert_eq!(up, down);
    }
}
