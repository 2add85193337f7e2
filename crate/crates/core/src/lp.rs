//! Export of the time-indexed integer program in CPLEX LP text format.
//!
//! Variables are `x_i_j_t` (task (i,j) starts at slot t), `y_i_j_t` (task
//! (i,j) occupies slot t) and the continuous peak `z`, all 1-based. Every
//! constraint is written out literally, including the maximum-gap rows that
//! never bind, so the file can be checked against the model line by line.

use std::fmt::Write as _;

use crate::model::{Scenario, Slot};

const MAX_LINE: usize = 255;

fn x(i: usize, j: usize, t: Slot) -> String {
    format!("x_{}_{}_{}", i + 1, j + 1, t)
}

fn y(i: usize, j: usize, t: Slot) -> String {
    format!("y_{}_{}_{}", i + 1, j + 1, t)
}

fn fmt_coef(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

/// One linear row: `name: terms rel rhs`.
struct Row {
    name: String,
    terms: Vec<(f64, String)>,
    rel: &'static str,
    rhs: f64,
}

impl Row {
    fn new(name: String, rel: &'static str, rhs: f64) -> Self {
        Self {
            name,
            terms: Vec::new(),
            rel,
            rhs,
        }
    }

    fn term(&mut self, coef: f64, var: String) -> &mut Self {
        if coef != 0.0 {
            self.terms.push((coef, var));
        }
        self
    }

    fn write(&self, out: &mut String) {
        let mut tokens = Vec::with_capacity(self.terms.len() + 1);
        for (k, (c, v)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else if k == 0 { "" } else { "+" };
            let mag = c.abs();
            let body = if mag == 1.0 {
                v.clone()
            } else {
                format!("{} {v}", fmt_coef(mag))
            };
            tokens.push(if sign.is_empty() {
                body
            } else {
                format!("{sign} {body}")
            });
        }
        if tokens.is_empty() {
            tokens.push(format!("0 {}", "z"));
        }
        tokens.push(format!("{} {}", self.rel, fmt_coef(self.rhs)));
        write_wrapped(out, &format!(" {}:", self.name), &tokens);
    }
}

fn write_wrapped(out: &mut String, head: &str, tokens: &[String]) {
    let mut line = head.to_string();
    for tok in tokens {
        if line.len() + 1 + tok.len() > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
            line.push_str(tok);
        } else {
            line.push(' ');
            line.push_str(tok);
        }
    }
    out.push_str(&line);
    out.push('\n');
}

/// Number of variables in [`export_lp`]'s model: `2 · tasks · T + 1`.
pub fn variable_count(scenario: &Scenario) -> usize {
    2 * scenario.num_tasks() * scenario.period() as usize + 1
}

pub fn export_lp(scenario: &Scenario) -> String {
    let period = scenario.period() as Slot;
    let slots = || 1..=period;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ minmax peak-rate schedule: {} robots, {} tasks, {} slots",
        scenario.num_robots(),
        scenario.num_tasks(),
        period
    );
    out.push_str("Minimize\n obj: z\nSubject To\n");

    // aggregate rate below the peak in every slot
    for t in slots() {
        let mut row = Row::new(format!("peak_{t}"), "<=", 0.0);
        for (i, robot) in scenario.robots().iter().enumerate() {
            for (j, task) in robot.tasks.iter().enumerate() {
                row.term(task.rate, y(i, j, t));
            }
        }
        row.term(-1.0, "z".into());
        row.write(&mut out);
    }

    for (i, robot) in scenario.robots().iter().enumerate() {
        let chain = scenario.chain(i);
        for (j, task) in robot.tasks.iter().enumerate() {
            let d = task.duration as Slot;
            if let Some(first) = chain.cycle_start(j) {
                if first > 1 {
                    let mut row = Row::new(format!("cycle_start_{}_{}", i + 1, j + 1), ">=", first as f64);
                    for t in slots() {
                        row.term(t as f64, x(i, j, t));
                    }
                    row.write(&mut out);
                }
            }
            if chain.last_in_cycle(j) {
                // finish plus trailing minimum gap within the period (or cycle)
                let limit = chain.cycle_end(j) - task.gap_min as Slot;
                let mut row = Row::new(format!("end_{}_{}", i + 1, j + 1), "<=", limit as f64);
                for t in slots() {
                    row.term((t + d - 1) as f64, x(i, j, t));
                }
                row.write(&mut out);
            } else {
                // successor start minus (start + d) between the gap bounds
                let mut lo = Row::new(format!("gap_min_{}_{}", i + 1, j + 1), ">=", task.gap_min as f64);
                let mut hi = task
                    .gap_max
                    .map(|g| Row::new(format!("gap_max_{}_{}", i + 1, j + 1), "<=", g as f64));
                for t in slots() {
                    lo.term(t as f64, x(i, j + 1, t));
                    if let Some(hi) = hi.as_mut() {
                        hi.term(t as f64, x(i, j + 1, t));
                    }
                }
                for t in slots() {
                    lo.term(-((t + d) as f64), x(i, j, t));
                    if let Some(hi) = hi.as_mut() {
                        hi.term(-((t + d) as f64), x(i, j, t));
                    }
                }
                lo.write(&mut out);
                if let Some(hi) = hi {
                    hi.write(&mut out);
                }
            }
            // a start at t occupies t ..= min(t + d - 1, T)
            for t in slots() {
                for tp in t..=(t + d - 1).min(period) {
                    let mut row = Row::new(format!("link_{}_{}_{}_{}", i + 1, j + 1, t, tp), ">=", 0.0);
                    row.term(1.0, y(i, j, tp)).term(-1.0, x(i, j, t));
                    row.write(&mut out);
                }
            }
            let mut once = Row::new(format!("once_{}_{}", i + 1, j + 1), "=", 1.0);
            let mut dur = Row::new(format!("dur_{}_{}", i + 1, j + 1), "=", d as f64);
            for t in slots() {
                once.term(1.0, x(i, j, t));
                dur.term(1.0, y(i, j, t));
            }
            once.write(&mut out);
            dur.write(&mut out);
        }
    }

    out.push_str("Bounds\n z >= 0\nBinary\n");
    let mut names = Vec::with_capacity(variable_count(scenario));
    for (i, robot) in scenario.robots().iter().enumerate() {
        for j in 0..robot.tasks.len() {
            names.extend(slots().map(|t| x(i, j, t)));
            names.extend(slots().map(|t| y(i, j, t)));
        }
    }
    write_wrapped(&mut out, "", &names);
    out.push_str("End\n");
    out
}
