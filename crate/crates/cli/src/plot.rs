//! Plain-text gnuplot scripts that read the emitted CSV.

use std::fmt::Write;

use crate::csv::Table;

#[derive(Debug, Clone, PartialEq)]
pub enum PlotSpec {
    None,
    /// First column on x, every other numeric column as a line.
    Lines { xlabel: String, ylabel: String, logx: bool, logy: bool },
    /// p_target against p_user, one series per scheme.
    Region,
}

impl PlotSpec {
    pub fn lines(xlabel: &str, ylabel: &str, logx: bool, logy: bool) -> Self {
        PlotSpec::Lines { xlabel: xlabel.into(), ylabel: ylabel.into(), logx, logy }
    }

    pub fn region() -> Self {
        PlotSpec::Region
    }

    pub fn script(&self, csv_path: &str, table: &Table) -> Option<String> {
        let mut s = String::new();
        s.push_str("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
        match self {
            PlotSpec::None => return None,
            PlotSpec::Lines { xlabel, ylabel, logx, logy } => {
                writeln!(s, "set xlabel '{xlabel}'\nset ylabel '{ylabel}'").unwrap();
                if *logx {
                    s.push_str("set logscale x\n");
                }
                if *logy {
                    s.push_str("set logscale y\n");
                }
                let series: Vec<String> = (2..=table.header.len())
                    .filter(|&c| table.header[c - 1] != "std_error")
                    .map(|c| format!("'{csv_path}' using 1:{c} with linespoints"))
                    .collect();
                writeln!(s, "plot {}", series.join(", \\\n     ")).unwrap();
            }
            PlotSpec::Region => {
                s.push_str("set xlabel 'target outage'\nset ylabel 'user outage'\nset key noautotitle\n");
                for (name, title) in [("sjb", "SJB"), ("lb", "LB"), ("time_sharing", "time sharing")] {
                    if !table.rows.iter().any(|r| matches!(&r[0], crate::csv::Cell::Text(t) if t == name)) {
                        continue;
                    }
                    writeln!(
                        s,
                        "{} '{csv_path}' using (strcol(1) eq '{name}' ? $3 : NaN):4 with linespoints title '{title}'",
                        if s.contains("plot '") { "replot" } else { "plot" }
                    )
                    .unwrap();
                }
            }
        }
        Some(s)
    }
}
