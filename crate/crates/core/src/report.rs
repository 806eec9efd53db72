//! CSV and SVG artifacts.
//!
//! Numbers are written with `{:.16e}` (17 significant digits, enough to
//! round-trip an f64) and every line ends in `\n`, so the same run always
//! produces the same bytes.

use std::io::{self, Write};

use plotters::prelude::*;

use crate::navigator::{EpochRecord, RankingRow, RunResult};

pub const SERIES_HEADER: &str = "t_s,verr_n_mps,verr_u_mps,verr_e_mps,perr_n_m,perr_u_m,perr_e_m,perr_horiz_m";

pub const RANKING_HEADER: &str =
    "rank,vel_alg,pos_alg,max_horiz_pos_err_m,max_horiz_vel_err_mps,final_horiz_pos_err_m,final_horiz_vel_err_mps";

pub fn write_series_csv<W: Write>(out: W, records: &[EpochRecord]) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "{SERIES_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.v_err.x, r.v_err.y, r.v_err.z, r.p_err.x, r.p_err.y, r.p_err.z, r.p_err_horiz
        )?;
    }
    out.flush()
}

pub fn write_ranking_csv<W: Write>(out: W, rows: &[RankingRow]) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "{RANKING_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.rank,
            r.vel_alg,
            r.pos_alg,
            r.max_horiz_pos_err,
            r.max_horiz_vel_err,
            r.final_horiz_pos_err,
            r.final_horiz_vel_err
        )?;
    }
    out.flush()
}

/// Human-readable ranking for the terminal.
pub fn format_ranking(rows: &[RankingRow]) -> String {
    let mut s = format!("{:<4} {:<8} {:<8} {:>14} {:>14}\n", "rank", "vel", "pos", "max|dp_h| m", "max|dv_h| m/s");
    for r in rows {
        s += &format!(
            "{:<4} {:<8} {:<8} {:>14.6e} {:>14.6e}\n",
            r.rank, r.vel_alg, r.pos_alg, r.max_horiz_pos_err, r.max_horiz_vel_err
        );
    }
    s
}

/// Most points drawn per series.
pub const PLOT_POINTS: usize = 2000;

/// Values below this are drawn at the floor of the log axis.
const PLOT_FLOOR: f64 = 1e-12;

const PALETTE: [RGBColor; 4] = [RGBColor(0, 114, 178), RGBColor(213, 94, 0), RGBColor(0, 158, 115), RGBColor(204, 121, 167)];

/// Horizontal position error against time for each run, on a log axis.
pub fn horizontal_error_svg(results: &[RunResult], title: &str) -> Result<String, String> {
    let series: Vec<(String, Vec<(f64, f64)>)> = results
        .iter()
        .map(|r| {
            let stride = r.records.len().div_ceil(PLOT_POINTS).max(1);
            let mut pts: Vec<(f64, f64)> =
                r.records.iter().step_by(stride).map(|e| (e.t, e.p_err_horiz.max(PLOT_FLOOR))).collect();
            if let Some(last) = r.records.last().filter(|_| (r.records.len() - 1) % stride != 0) {
                pts.push((last.t, last.p_err_horiz.max(PLOT_FLOOR)));
            }
            (r.config.label(), pts)
        })
        .collect();

    let t_max = series.iter().flat_map(|(_, p)| p.last()).map(|p| p.0).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let y_max = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).fold(PLOT_FLOOR, f64::max);
    let y_lo = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).filter(|&y| y > PLOT_FLOOR).fold(y_max, f64::min);
    let y_range = (y_lo / 2.0).max(PLOT_FLOOR)..(y_max * 2.0);

    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (900, 560)).into_drawing_area();
        let e = |err: &dyn std::fmt::Display| err.to_string();
        root.fill(&WHITE).map_err(|x| e(&x))?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(0.0..t_max, y_range.log_scale())
            .map_err(|x| e(&x))?;
        chart
            .configure_mesh()
            .x_desc("t (s)")
            .y_desc("horizontal position error (m)")
            .x_label_formatter(&|x| format!("{x:.0}"))
            .y_label_formatter(&|y| format!("{y:.0e}"))
            .draw()
            .map_err(|x| e(&x))?;
        for (i, (label, pts)) in series.into_iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                .map_err(|x| e(&x))?
                .label(label)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::LowerRight)
            .background_style(WHITE)
            .border_style(BLACK)
            .draw()
            .map_err(|x| e(&x))?;
        root.present().map_err(|x| e(&x))?;
    }
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::navigator::{run, RunConfig};
    use crate::scenario::Scenario;
    use crate::updates::Algorithm;

    fn short_run(alg: Algorithm) -> RunResult {
        let s = Scenario { duration: 2.0, ..Scenario::const_east_default() };
        run(&RunConfig::paired(s, alg)).unwrap()
    }

    #[test]
    fn series_csv_shape() {
        let r = short_run(Algorithm::Tn);
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &r.records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SERIES_HEADER);
        assert_eq!(lines.len(), 102);
        let last: Vec<f64> = lines[101].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(last.len(), 8);
        assert_eq!(last[0], 2.0);
        // full round trip
        assert_eq!(last[7], r.records[100].p_err_horiz);
        assert_eq!(last[3], r.records[100].v_err.z);
    }

    #[test]
    fn ranking_csv_shape() {
        let rows = vec![RankingRow {
            rank: 1,
            vel_alg: Algorithm::Derived,
            pos_alg: Algorithm::Sv2,
            max_horiz_pos_err: 1.5,
            max_horiz_vel_err: 0.25,
            final_horiz_pos_err: 1.0,
            final_horiz_vel_err: 0.125,
        }];
        let mut buf = Vec::new();
        write_ranking_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!("{RANKING_HEADER}\n1,derived,sv2,1.5000000000000000e0,2.5000000000000000e-1,1.0000000000000000e0,1.2500000000000000e-1\n")
        );
        assert!(format_ranking(&rows).contains("derived"));
    }

    #[test]
    fn svg_has_a_line_per_run() {
        let results = [short_run(Algorithm::Tn), short_run(Algorithm::Sv2)];
        let svg = horizontal_error_svg(&results, "test").unwrap();
        assert!(svg.starts_with("<svg"));
        // each colour appears once in the plot and once in the legend
        for color in ["#0072B2", "#D55E00"] {
            assert_eq!(svg.matches(color).count(), 2, "{color}");
        }
        assert!(svg.contains(">\ntn\n<") && svg.contains(">\nsv2\n<"));
        assert_eq!(svg, horizontal_error_svg(&results, "test").unwrap());
    }
}
