//! Human-readable output: letter aliases, the degree trace and LaTeX.

use std::io::{self, Write};
use std::sync::Mutex;

use forge_core::genset::{CellReport, KernelCheck, Progress};
use forge_core::polynomial::VariableNames;
use forge_core::{GeneratingSet, GeneratorRecord, Polynomial, RunMode, Variable};
use num_rational::BigRational;
use num_traits::{One, Signed};

const LETTERS: [char; 5] = ['x', 'y', 'u', 'v', 'w'];

/// `x_2`, `u_1`, ... for the first five forms, `x7_0` beyond.
pub fn render_letters(v: Variable) -> String {
    match LETTERS.get(v.form) {
        Some(c) => format!("{c}_{}", v.index),
        None => format!("x{}_{}", v.form, v.index),
    }
}

pub struct Letters;

impl VariableNames for Letters {
    fn name(&self, v: Variable) -> String {
        render_letters(v)
    }
}

fn latex_name(v: Variable) -> String {
    match LETTERS.get(v.form) {
        Some(c) => format!("{c}_{{{}}}", v.index),
        None => format!("x^{{({})}}_{{{}}}", v.form, v.index),
    }
}

/// LaTeX rendering, e.g. `3 x_{2}^{2} + x_{0} x_{4} - 4 x_{1} x_{3}`.
pub fn latex(p: &Polynomial<BigRational>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let spec = p.spec();
    let mut s = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        if c.is_negative() {
            s.push_str(if i == 0 { "-" } else { " - " });
        } else if i > 0 {
            s.push_str(" + ");
        }
        let mag = c.abs();
        let factors: Vec<String> = m
            .support()
            .map(|(flat, e)| {
                let n = latex_name(spec.variable(flat));
                if e == 1 {
                    n
                } else {
                    format!("{n}^{{{e}}}")
                }
            })
            .collect();
        let coeff = if mag.is_integer() {
            mag.numer().to_string()
        } else {
            format!("\\frac{{{}}}{{{}}}", mag.numer(), mag.denom())
        };
        if factors.is_empty() {
            s.push_str(&coeff);
        } else {
            if !mag.is_one() {
                s.push_str(&coeff);
                s.push(' ');
            }
            s.push_str(&factors.join(" "));
        }
    }
    s
}

fn noun(mode: RunMode) -> &'static str {
    match mode {
        RunMode::Invariants => "invariant",
        RunMode::SemiInvariants => "semi-invariant",
        RunMode::Kernel => "kernel element",
    }
}

fn found_line(mode: RunMode, r: &GeneratorRecord) -> String {
    match mode {
        RunMode::Invariants => format!(" irreducible invariant of multidegree {} found", r.multidegree),
        _ => format!(
            " irreducible {} of multidegree {} and order {} found",
            noun(mode),
            r.multidegree,
            r.order
        ),
    }
}

const RULE: &str = "-----------------------------degree------------------------------";

/// Writes the per-degree trace as the run progresses.
pub struct Trace<'a> {
    sink: Mutex<&'a mut (dyn Write + Send)>,
    mode: RunMode,
    verbose: bool,
    failed: Mutex<Option<io::Error>>,
}

impl<'a> Trace<'a> {
    pub fn new(sink: &'a mut (dyn Write + Send), mode: RunMode, verbose: bool) -> Self {
        Trace {
            sink: Mutex::new(sink),
            mode,
            verbose,
            failed: Mutex::new(None),
        }
    }

    fn line(&self, s: &str) {
        let mut sink = self.sink.lock().unwrap();
        if let Err(e) = writeln!(sink, "{s}") {
            self.failed.lock().unwrap().get_or_insert(e);
        }
    }

    /// First write error, if any.
    pub fn finish(self) -> io::Result<()> {
        match self.failed.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl Progress for Trace<'_> {
    fn cap_chosen(&self, cap: u32, beta: Option<usize>) {
        self.line("calculating multivariate Poincare series....");
        match beta {
            Some(b) => self.line(&format!("done!, upper bound, {b}")),
            None => self.line("done!, upper bound not identified"),
        }
        self.line(&format!("degree cap {cap}"));
    }

    fn degree_started(&self, degree: u32) {
        self.line(&format!("{RULE} {degree}"));
    }

    fn generators_found(&self, _degree: u32, records: &[GeneratorRecord]) {
        for r in records {
            self.line(&found_line(self.mode, r));
        }
    }

    fn cell_done(&self, report: &CellReport) {
        if !self.verbose {
            return;
        }
        let how = match report.check {
            KernelCheck::Exact => "exact",
            KernelCheck::Modular => "modular",
            KernelCheck::Skipped => "unchecked",
        };
        self.line(&format!(
            "   cell {}: {} monomials, dim {}, decomposables {}, new {} ({how})",
            report.cell, report.ambient, report.expected_dim, report.decomposable_rank, report.new_generators
        ));
    }
}

/// Closing count line followed by every generator.
pub fn text_summary(set: &GeneratingSet) -> String {
    let mut s = match set.mode {
        RunMode::Invariants => format!(
            "Total number of irreducible invariants in minimal generating set {}\n",
            set.len()
        ),
        RunMode::SemiInvariants => format!(
            "number of semi-invariants in minimal generating set {}\n",
            set.len()
        ),
        RunMode::Kernel => format!("number of kernel generators in minimal generating set {}\n", set.len()),
    };
    for w in &set.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    for (i, r) in set.records.iter().enumerate() {
        s.push_str(&format!(
            "g{} {} order {}: {}\n",
            i + 1,
            r.multidegree,
            r.order,
            r.polynomial.render(&Letters)
        ));
    }
    s
}

/// One display line per generator.
pub fn latex_document(set: &GeneratingSet) -> String {
    let mut s = String::new();
    for (i, r) in set.records.iter().enumerate() {
        s.push_str(&format!(
            "% multidegree {}, order {}\ng_{{{}}} = {} \\\\\n",
            r.multidegree,
            r.order,
            i + 1,
            latex(&r.polynomial)
        ));
    }
    s
}
