use std::fmt::Write;

use super::CrossPlayMatrix;

/// One row per unordered pairing: `agent_a,agent_b,n,mean,sd,sem`.
pub fn render_csv(m: &CrossPlayMatrix) -> String {
    let mut out = String::from("agent_a,agent_b,n,mean,sd,sem\n");
    for (i, j) in m.pairs() {
        let c = m.cell(i, j);
        writeln!(
            out,
            "{},{},{},{:.4},{:.4},{:.4}",
            m.agents[i], m.agents[j], c.n, c.mean, c.sd, c.sem
        )
        .unwrap();
    }
    out
}

/// The whole matrix, histograms included, as pretty JSON.
pub fn render_json(m: &CrossPlayMatrix) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("matrix serializes");
    s.push('\n');
    s
}

/// Fixed-width text table: agents as rows and columns plus an average
/// column.
pub fn render_table(m: &CrossPlayMatrix) -> String {
    let width = m.agents.iter().map(String::len).max().unwrap_or(0).max(7) + 2;
    let mut out = format!("{:width$}", "");
    for a in m.agents.iter().chain(std::iter::once(&"Average".to_string())) {
        write!(out, "{a:>width$}").unwrap();
    }
    out.push('\n');
    for (i, a) in m.agents.iter().enumerate() {
        write!(out, "{a:width$}").unwrap();
        for j in 0..m.agents.len() {
            write!(out, "{:>width$.2}", m.cell(i, j).mean).unwrap();
        }
        writeln!(out, "{:>width$.2}", m.row_averages[i]).unwrap();
    }
    let max_sd = m.cells.iter().map(|c| c.sd).fold(0.0, f64::max);
    let max_sem = m.cells.iter().map(|c| c.sem).fold(0.0, f64::max);
    writeln!(out, "\n{} games per pairing; max SD {max_sd:.2}, max SEM {max_sem:.2}", m.n_games).unwrap();
    out
}

pub fn render_markdown(m: &CrossPlayMatrix) -> String {
    let mut out = String::from("| |");
    for a in &m.agents {
        write!(out, " {a} |").unwrap();
    }
    out.push_str(" Average |\n|---|");
    out.push_str(&"---:|".repeat(m.agents.len() + 1));
    out.push('\n');
    for (i, a) in m.agents.iter().enumerate() {
        write!(out, "| {a} |").unwrap();
        for j in 0..m.agents.len() {
            write!(out, " {:.2} |", m.cell(i, j).mean).unwrap();
        }
        writeln!(out, " {:.2} |", m.row_averages[i]).unwrap();
    }
    out
}
