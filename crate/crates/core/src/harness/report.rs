use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::trainer::{mean_steps, rate, Trajectory};
use crate::world::TaskType;

/// Success and step counts of one evaluation, per task type and overall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    pub tasks: usize,
    pub success: BTreeMap<String, f64>,
    pub steps: BTreeMap<String, f64>,
    pub avg_success: f64,
    /// Mean steps over successful episodes.
    pub avg_steps: f64,
    /// Mean steps over every episode.
    pub avg_steps_all: f64,
    pub planner_errors: u32,
}

impl EvalReport {
    pub fn from_trajectories(label: &str, trajs: &[Trajectory]) -> Self {
        let mut success = BTreeMap::new();
        let mut steps = BTreeMap::new();
        for t in TaskType::ALL {
            let of_type: Vec<&Trajectory> = trajs.iter().filter(|x| x.task.task_type == t).collect();
            if of_type.is_empty() {
                continue;
            }
            let ok: Vec<bool> = of_type.iter().map(|x| x.success).collect();
            let n: Vec<u32> = of_type.iter().map(|x| x.len() as u32).collect();
            success.insert(t.column().to_string(), rate(&ok));
            steps.insert(t.column().to_string(), mean_steps(&ok, &n));
        }
        let ok: Vec<bool> = trajs.iter().map(|x| x.success).collect();
        let n: Vec<u32> = trajs.iter().map(|x| x.len() as u32).collect();
        EvalReport {
            label: label.to_string(),
            tasks: trajs.len(),
            success,
            steps,
            avg_success: rate(&ok),
            avg_steps: mean_steps(&ok, &n),
            avg_steps_all: if n.is_empty() { 0.0 } else { n.iter().map(|&x| f64::from(x)).sum::<f64>() / n.len() as f64 },
            planner_errors: trajs.iter().map(|t| t.errors.total()).sum(),
        }
    }
}

/// A plain table that renders to CSV or aligned text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Table { title: title.to_string(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", line(&self.headers));
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

/// Success-rate table with one row per report.
pub fn success_table(title: &str, reports: &[EvalReport]) -> Table {
    let mut headers = vec!["Method"];
    headers.extend(TaskType::ALL.iter().map(|t| t.column()));
    headers.extend(["Avg", "Steps", "Steps (all)"]);
    let mut table = Table::new(title, &headers);
    for r in reports {
        let mut row = vec![r.label.clone()];
        for t in TaskType::ALL {
            row.push(r.success.get(t.column()).map_or("-".to_string(), |x| fmt3(*x)));
        }
        row.extend([fmt3(r.avg_success), format!("{:.2}", r.avg_steps), format!("{:.2}", r.avg_steps_all)]);
        table.push(row);
    }
    table
}
