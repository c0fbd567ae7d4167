use std::path::{Path, PathBuf};

use srvf::counterexample::{parse_rational, CounterexampleConfig};
use srvf::io::{
    alignment_to_csv, alignment_to_json, curve_to_string, fmt_f64, matrix_to_csv, read_corpus,
    read_curve, read_srvf, report_gap_csv, report_to_csv, report_to_json, srvf_to_string,
    write_string, Format,
};
use srvf::{
    counterexample_report, dist_param, distance_matrix, probe_nondifferentiability,
    quotient_distance_on_grid, srvt, srvt_inverse, Partition, SampledCurve, ShapeRecord, SrvfError,
};

use crate::config::CliConfig;
use crate::{Direction, DistanceMode};

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

fn same_dim(b: &SampledCurve, c: &SampledCurve) -> srvf::Result<()> {
    if b.dim() != c.dim() {
        return Err(SrvfError::DimensionMismatch(b.dim(), c.dim()));
    }
    Ok(())
}

pub fn transform(
    cfg: &CliConfig,
    input: &Path,
    direction: Direction,
    output: Option<&Path>,
) -> srvf::Result<()> {
    let suffix = match direction {
        Direction::Forward => "srvf",
        Direction::Inverse => "curve",
    };
    let out = match output {
        Some(p) => p.to_path_buf(),
        None => cfg.output_path(&format!("{}_{suffix}", stem(input))),
    };
    let format = Format::from_path(&out);
    let text = match direction {
        Direction::Forward => srvf_to_string(&srvt(&read_curve(input)?), format),
        Direction::Inverse => curve_to_string(&srvt_inverse(&read_srvf(input)?), format),
    };
    write_string(&out, &text)?;
    println!("{}", out.display());
    Ok(())
}

pub fn distance(
    cfg: &CliConfig,
    b: &Path,
    c: &Path,
    mode: DistanceMode,
    alignment: Option<&Path>,
) -> srvf::Result<()> {
    let (b, c) = (read_curve(b)?, read_curve(c)?);
    same_dim(&b, &c)?;
    match mode {
        DistanceMode::Param => println!("{:.12}", dist_param(&b, &c)?),
        DistanceMode::Quotient => {
            let (d, result) = quotient_distance_on_grid(&b, &c, cfg.grid_n, &cfg.dp_options())?;
            let out = alignment.map_or_else(|| cfg.output_path("alignment"), Path::to_path_buf);
            let text = match Format::from_path(&out) {
                Format::Csv => alignment_to_csv(&result),
                Format::Json => alignment_to_json(&result),
            };
            write_string(&out, &text)?;
            println!("{d:.12}");
        }
    }
    Ok(())
}

pub fn geodesic(cfg: &CliConfig, b: &Path, c: &Path, steps: usize) -> srvf::Result<()> {
    if steps < 1 {
        return Err(SrvfError::InvalidArgument("steps must be ≥ 1".into()));
    }
    let (b, c) = (read_curve(b)?, read_curve(c)?);
    same_dim(&b, &c)?;
    let total = dist_param(&b, &c)?;
    let width = steps.to_string().len().max(3);
    let mut table = String::from("step,s,dist_from_b,dist_to_c\n");
    for i in 0..=steps {
        let s = i as f64 / steps as f64;
        let g = srvf::geodesic(&b, &c, s)?;
        let path = cfg.output_path(&format!("geodesic_{i:0width$}"));
        write_string(&path, &curve_to_string(&g, cfg.format))?;
        table.push_str(&format!(
            "{i},{},{},{}\n",
            fmt_f64(s),
            fmt_f64(dist_param(&b, &g)?),
            fmt_f64(dist_param(&g, &c)?)
        ));
    }
    write_string(&cfg.output_dir.join("geodesic_distances.csv"), &table)?;
    let mid = srvf::geodesic(&b, &c, 0.5)?;
    let half = dist_param(&b, &mid)?;
    println!("distance {total:.12}");
    println!(
        "midpoint: d(b, mid) = {half:.12}, d(b, c)/2 = {:.12}, |difference| = {:.3e}",
        total / 2.0,
        (half - total / 2.0).abs()
    );
    Ok(())
}

pub fn counterexample(
    cfg: &CliConfig,
    level: u32,
    epsilon: &str,
    grid: usize,
    k_list: &[u32],
    n_list: &[usize],
) -> srvf::Result<()> {
    let ce = CounterexampleConfig {
        cantor_level: level,
        epsilon: parse_rational(epsilon)?,
        grid_n: grid,
        fatten_delta: None,
    };
    ce.validate()?;
    let report = counterexample_report(&ce, n_list, k_list, &cfg.dp_options())?;
    let dir = &cfg.output_dir;
    write_string(&dir.join("counterexample.json"), &report_to_json(&report))?;
    write_string(&dir.join("counterexample.csv"), &report_to_csv(&report))?;
    write_string(
        &dir.join("counterexample_gap.csv"),
        &report_gap_csv(&report),
    )?;

    println!(
        "λ(B_k) = {} ≈ {:.12}",
        report.measure_b, report.measure_b_f64
    );
    println!(
        "dist(b, c)² = {:.12} (exact {})",
        report.dist_param_sq, report.dist_param_sq_exact
    );
    println!(
        "sup bound ½; largest value seen {:.12}",
        report.upper_bound.max_value
    );
    for row in &report.explicit {
        println!(
            "explicit k'={:<2} value {:.12} gap to ½ {:.3e}",
            row.k_prime, row.functional_value, row.gap_to_half
        );
    }
    for row in &report.dp {
        println!(
            "dp N={:<5} value {:.12} dist² {:.12}",
            row.n, row.dp_value, row.qdist_sq
        );
    }
    Ok(())
}

pub fn matrix(
    cfg: &CliConfig,
    corpus: &Path,
    skip_bad: bool,
    output: Option<&Path>,
) -> srvf::Result<()> {
    let entries = read_corpus(corpus)?;
    let mut shapes = Vec::with_capacity(entries.len());
    let mut first_err = None;
    for (id, loaded) in entries {
        match loaded {
            Ok(c) => shapes.push(ShapeRecord::new(id, &c)),
            Err(e) => {
                eprintln!(
                    "{}: shape {id:?}: {e}",
                    if skip_bad { "skipping" } else { "error" }
                );
                first_err.get_or_insert(e);
            }
        }
    }
    if let (Some(e), false) = (first_err, skip_bad) {
        return Err(e);
    }
    let n = shapes.len();
    eprintln!(
        "loaded {n} shapes; aligning {} pairs",
        n * n.saturating_sub(1) / 2
    );
    let m = distance_matrix(&shapes, &cfg.dp_options())?;
    for &k in &m.zero_shapes {
        eprintln!("warning: shape {:?} is the zero curve", m.ids[k]);
    }
    for &(i, j, gap) in m.asymmetric.iter().filter(|a| a.2 > cfg.tol) {
        eprintln!(
            "warning: alignments of {:?} and {:?} differ by {gap:.3e} between directions",
            m.ids[i], m.ids[j]
        );
    }
    let out: PathBuf = output.map_or_else(|| cfg.output_dir.join("matrix.csv"), Path::to_path_buf);
    write_string(&out, &matrix_to_csv(&m))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

pub fn canonical(cfg: &CliConfig, input: &Path, output: Option<&Path>) -> srvf::Result<()> {
    let rec = ShapeRecord::new(stem(input), &read_curve(input)?);
    let out = match output {
        Some(p) => p.to_path_buf(),
        None => cfg.output_path(&format!("{}_canonical", stem(input))),
    };
    write_string(
        &out,
        &curve_to_string(&rec.canonical, Format::from_path(&out)),
    )?;
    println!("‖c‖_AC {:.12}", rec.ac_length);
    Ok(())
}

/// A segment that stops halfway, and a perturbation moving only on the flat half.
fn builtin_probe_pair() -> srvf::Result<(SampledCurve, SampledCurve)> {
    let knots = Partition::uniform(4);
    let c = SampledCurve::from_fn(2, knots.clone(), |t| vec![t.min(0.5), 0.0])?;
    let h = SampledCurve::from_fn(2, knots, |t| vec![0.0, (t - 0.5).max(0.0)])?;
    Ok((c, h))
}

pub fn probe(files: Option<(&Path, &Path)>, eps_list: &[f64]) -> srvf::Result<()> {
    let (c, h) = match files {
        Some((c, h)) => (read_curve(c)?, read_curve(h)?),
        None => builtin_probe_pair()?,
    };
    let values = probe_nondifferentiability(&c, &h, eps_list)?;
    println!("eps,value,ratio_to_previous");
    for (k, (eps, v)) in eps_list.iter().zip(&values).enumerate() {
        let ratio = if k == 0 {
            String::new()
        } else {
            fmt_f64(v / values[k - 1])
        };
        println!("{},{},{ratio}", fmt_f64(*eps), fmt_f64(*v));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_probe_is_admissible() {
        let (c, h) = builtin_probe_pair().unwrap();
        let v = probe_nondifferentiability(&c, &h, &[0.1, 0.025]).unwrap();
        assert!((v[0] / v[1] - 0.5).abs() < 1e-12);
    }
}
