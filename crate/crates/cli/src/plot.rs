//! gnuplot scripts for the figure analogs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, CliError};
use crate::sweep::{DILUTION_HEADER, SPECTRUM_HEADER, STM_ERROR_HEADER};

#[derive(Debug, Clone, Copy)]
enum Layout {
    StmError,
    Sqrt { log: bool },
    Pdop { reference: bool, log: bool },
    LogDecorrelation,
    Spectrum,
    Jet,
}

struct Figure {
    id: &'static str,
    title: &'static str,
    layout: Layout,
}

const FIGURES: &[Figure] = &[
    Figure { id: "fig2", title: "STM jet error norms", layout: Layout::StmError },
    Figure { id: "fig7", title: "Optical, Mars: sqrt(G) and correlation vs alpha0", layout: Layout::Sqrt { log: false } },
    Figure { id: "fig8", title: "Optical, Mars: PDOP vs alpha0", layout: Layout::Pdop { reference: true, log: false } },
    Figure { id: "fig9", title: "Optical, Neptune: sqrt(G) and correlation vs alpha0", layout: Layout::Sqrt { log: false } },
    Figure { id: "fig10", title: "Optical, Neptune: PDOP vs alpha0", layout: Layout::Pdop { reference: true, log: false } },
    Figure { id: "fig11", title: "Pulsar: sqrt(G) and correlation vs beta0", layout: Layout::Sqrt { log: false } },
    Figure { id: "fig12", title: "Pulsar: PDOP vs beta0", layout: Layout::Pdop { reference: true, log: false } },
    Figure { id: "fig13", title: "Range, Mars: sqrt(G) and correlation vs xi0", layout: Layout::Sqrt { log: true } },
    Figure { id: "fig14", title: "Range, Mars: log10(1 - |rho_xy|) vs xi0", layout: Layout::LogDecorrelation },
    Figure { id: "fig15", title: "Range, Mars: PDOP vs xi0", layout: Layout::Pdop { reference: false, log: true } },
    Figure { id: "fig16", title: "Range, Neptune: sqrt(G) and correlation vs xi0", layout: Layout::Sqrt { log: true } },
    Figure { id: "fig17", title: "Range, Neptune: PDOP vs xi0", layout: Layout::Pdop { reference: false, log: true } },
    Figure { id: "fig39", title: "Range information eigenvalues vs xi0", layout: Layout::Spectrum },
    Figure { id: "fig40", title: "Jet-2 third and fourth eigenvalues vs xi0", layout: Layout::Jet },
    Figure { id: "fig41", title: "Jet-3 third and fourth eigenvalues vs xi0", layout: Layout::Jet },
    Figure { id: "fig42", title: "Jet-4 third and fourth eigenvalues vs xi0", layout: Layout::Jet },
    Figure { id: "fig43", title: "Full third and fourth eigenvalues vs xi0", layout: Layout::Jet },
];

pub fn figure_ids() -> Vec<&'static str> {
    FIGURES.iter().map(|f| f.id).collect()
}

fn expected_header(layout: Layout) -> &'static str {
    match layout {
        Layout::StmError => STM_ERROR_HEADER,
        Layout::Spectrum | Layout::Jet => SPECTRUM_HEADER,
        _ => DILUTION_HEADER,
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Script for `figure_id` reading one or more CSV files (one curve family per file).
pub fn plot_script(csv_paths: &[String], figure_id: &str) -> Result<String, CliError> {
    let fig = FIGURES
        .iter()
        .find(|f| f.id == figure_id.to_ascii_lowercase())
        .ok_or_else(|| CliError::Validation(format!("unknown figure id '{figure_id}' (known: {})", figure_ids().join(" "))))?;
    if csv_paths.is_empty() {
        return invalid("no CSV files given");
    }
    for p in csv_paths {
        let text = std::fs::read_to_string(Path::new(p))?;
        let header = text.lines().next().unwrap_or("");
        if header != expected_header(fig.layout) {
            return invalid(format!("{p}: header '{header}' does not match {}", fig.id));
        }
    }

    let mut s = String::new();
    let _ = writeln!(s, "# {}: {}", fig.id, fig.title);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{}.png'", fig.id);
    let _ = writeln!(s, "set title {}", quote(fig.title));
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set grid");
    let angle_axis = |s: &mut String| {
        let _ = writeln!(s, "set xlabel 'initial angle [rad]'");
        let _ = writeln!(s, "set xrange [0:2*pi]");
    };
    let label = |p: &str| {
        Path::new(p).file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_else(|| p.to_string())
    };
    let mut curves: Vec<String> = Vec::new();
    match fig.layout {
        Layout::StmError => {
            let _ = writeln!(s, "set xlabel 't [day]'");
            let _ = writeln!(s, "set ylabel 'relative Frobenius error'");
            let _ = writeln!(s, "set logscale y");
            for p in csv_paths {
                curves.push(format!("{} using 1:2 skip 1 with lines title 'e2 {}'", quote(p), label(p)));
                curves.push(format!("{} using 1:3 skip 1 with lines title 'e3 {}'", quote(p), label(p)));
            }
        }
        Layout::Sqrt { log } => {
            angle_axis(&mut s);
            let _ = writeln!(s, "set ylabel 'sqrt(G)'");
            let _ = writeln!(s, "set y2label 'rho_xy'");
            let _ = writeln!(s, "set y2range [-1:1]");
            let _ = writeln!(s, "set y2tics");
            if log {
                let _ = writeln!(s, "set logscale y");
            }
            for p in csv_paths {
                let l = label(p);
                curves.push(format!("{} using 1:2 skip 1 with lines title 'sqrt Gxx {l}'", quote(p)));
                curves.push(format!("{} using 1:3 skip 1 with lines title 'sqrt Gyy {l}'", quote(p)));
                curves.push(format!("{} using 1:4 skip 1 axes x1y2 with lines dt 3 title 'rho_xy {l}'", quote(p)));
            }
        }
        Layout::Pdop { reference, log } => {
            angle_axis(&mut s);
            let _ = writeln!(s, "set ylabel 'PDOP'");
            if log {
                let _ = writeln!(s, "set logscale y");
            }
            for p in csv_paths {
                curves.push(format!("{} using 1:5 skip 1 with lines title 'PDOP {}'", quote(p), label(p)));
            }
            if reference {
                curves.push("sqrt(2) with lines dt 2 lc rgb 'black' title 'direct observation sqrt(2)'".into());
            }
        }
        Layout::LogDecorrelation => {
            angle_axis(&mut s);
            let _ = writeln!(s, "set ylabel 'log10(1 - |rho_xy|)'");
            for p in csv_paths {
                curves.push(format!("{} using 1:(log10(1 - abs($4))) skip 1 with lines title {}", quote(p), quote(&label(p))));
            }
        }
        Layout::Spectrum => {
            angle_axis(&mut s);
            let _ = writeln!(s, "set ylabel 'eigenvalue'");
            let _ = writeln!(s, "set logscale y");
            for p in csv_paths {
                for k in 1..=4 {
                    curves.push(format!("{} using 1:{} skip 1 with lines title 'lambda{k} {}'", quote(p), k + 1, label(p)));
                }
            }
        }
        Layout::Jet => {
            angle_axis(&mut s);
            let _ = writeln!(s, "set ylabel 'eigenvalue'");
            let _ = writeln!(s, "set yzeroaxis");
            let _ = writeln!(s, "set xzeroaxis lt -1");
            for p in csv_paths {
                curves.push(format!("{} using 1:3 skip 1 with lines title 'third {}'", quote(p), label(p)));
                curves.push(format!("{} using 1:2 skip 1 with lines title 'fourth {}'", quote(p), label(p)));
            }
        }
    }
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    Ok(s)
}
