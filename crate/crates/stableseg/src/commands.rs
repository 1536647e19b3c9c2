//! The subcommands as functions from parsed arguments to output text.

use std::fmt::Write;

use stableseg_core::constructions::{
    greedy_stable_segmentation, mer_segmentation, two_value_stable,
};
use stableseg_core::cooperative::{core_description, CoreResult};
use stableseg_core::oracle::{targeted_checks, verify_market, AtomizedMarket, VerifyReport};
use stableseg_core::{Market, Rational};

use crate::error::CliError;
use crate::report::{join, Analysis, Format};
use crate::text::{load_market, load_segmentation, write_segmentation};

/// What a command printed, and its exit status.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mer,
    Greedy,
    TwoValue,
}

pub fn analyze(
    market: &str,
    segmentation: &str,
    canonical: bool,
    format: Format,
) -> Result<Output, CliError> {
    let parsed = load_market(market)?;
    let mut s = load_segmentation(segmentation, &parsed.market)?;
    if canonical {
        s = s.canonicalize();
    }
    Ok(Output {
        stdout: Analysis::new(s)?.render(format),
        warnings: parsed.warnings,
        code: 0,
    })
}

pub fn construct(
    market: &str,
    method: Method,
    trace: bool,
    canonical: bool,
) -> Result<Output, CliError> {
    let parsed = load_market(market)?;
    let m = &parsed.market;
    let mut out = String::new();
    let mut s = match method {
        Method::Mer => {
            let (s, steps) = mer_segmentation(m);
            if trace {
                for (k, step) in steps.steps.iter().enumerate() {
                    let exhausted: Vec<Rational> = step
                        .exhausted
                        .iter()
                        .map(|&i| m.values()[i].clone())
                        .collect();
                    writeln!(
                        out,
                        "# step {}: lambda={} price={} exhausted={} coalition={}",
                        k + 1,
                        step.lambda,
                        step.price,
                        join(&exhausted),
                        step.coalition
                    )
                    .unwrap();
                }
            }
            s
        }
        Method::Greedy => greedy_stable_segmentation(m),
        Method::TwoValue => two_value_stable(m)?,
    };
    if canonical {
        s = s.canonicalize();
    }
    out.push_str(&write_segmentation(&s));
    Ok(Output {
        stdout: out,
        warnings: parsed.warnings,
        code: 0,
    })
}

fn core_report(m: &Market, format: Format) -> String {
    let optimal = m
        .full_coalition()
        .optimal_prices()
        .expect("markets are nonempty");
    let lowest = m.lowest_value();
    let listed = optimal
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    match (format, core_description(m)) {
        (Format::Human, CoreResult::TrivialAt(p)) => {
            format!("core: trivial at price {p}\nmarket optimal prices: {listed}\n")
        }
        (Format::Human, CoreResult::Empty) => {
            let noun = if optimal.len() == 1 {
                "price"
            } else {
                "prices"
            };
            format!("core: empty (market optimal {noun} {listed} ≠ {lowest})\n")
        }
        (Format::Machine, result) => {
            let (kind, price) = match result {
                CoreResult::TrivialAt(p) => ("trivial", p.to_string()),
                CoreResult::Empty => ("empty", "none".to_string()),
            };
            format!(
                "core={kind}\ncore_price={price}\nmarket_optimal_prices={}\nlowest_value={lowest}\n",
                join(&optimal)
            )
        }
    }
}

pub fn core(market: &str, format: Format) -> Result<Output, CliError> {
    let parsed = load_market(market)?;
    Ok(Output {
        stdout: core_report(&parsed.market, format),
        warnings: parsed.warnings,
        code: 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Number of equal-mass atoms; the coarsest exact grid when absent.
    pub atoms: Option<usize>,
    pub cap: usize,
    /// Run the enumeration-free checks instead of full enumeration.
    pub targeted: bool,
}

pub fn atomize(m: &Market, atoms: Option<usize>) -> Result<AtomizedMarket, stableseg_core::Error> {
    match atoms {
        None => Ok(AtomizedMarket::finest(m)),
        Some(0) => Err(stableseg_core::Error::NotAtomizable),
        Some(n) => AtomizedMarket::new(m, m.total_mass() / Rational::from_integer(n.into())),
    }
}

fn verify_report(report: &VerifyReport, targeted: bool, format: Format) -> String {
    let mut out = String::new();
    let mode = if targeted { "targeted" } else { "enumeration" };
    let result = if report.passed() { "pass" } else { "fail" };
    match format {
        Format::Human => {
            writeln!(out, "mode: {mode}").unwrap();
            writeln!(out, "atoms: {}", report.atoms).unwrap();
            writeln!(out, "segmentations: {}", report.segmentations).unwrap();
            writeln!(out, "checks: {}", report.checks).unwrap();
            writeln!(out, "violations: {}", report.violations.len()).unwrap();
            for v in &report.violations {
                writeln!(out, "  {v}").unwrap();
            }
            writeln!(out, "result: {result}").unwrap();
        }
        Format::Machine => {
            writeln!(out, "mode={mode}").unwrap();
            writeln!(out, "atoms={}", report.atoms).unwrap();
            writeln!(out, "segmentations={}", report.segmentations).unwrap();
            writeln!(out, "checks={}", report.checks).unwrap();
            writeln!(out, "violations={}", report.violations.len()).unwrap();
            for v in &report.violations {
                writeln!(out, "violation={v}").unwrap();
            }
            writeln!(out, "result={result}").unwrap();
        }
    }
    out
}

pub fn verify(market: &str, options: &VerifyOptions, format: Format) -> Result<Output, CliError> {
    let parsed = load_market(market)?;
    let report = if options.targeted {
        let mut report = targeted_checks(&parsed.market)?;
        report.atoms = atomize(&parsed.market, options.atoms)
            .map(|am| am.len())
            .unwrap_or(0);
        report
    } else {
        verify_market(&atomize(&parsed.market, options.atoms)?, options.cap)?
    };
    Ok(Output {
        stdout: verify_report(&report, options.targeted, format),
        warnings: parsed.warnings,
        code: if report.passed() {
            0
        } else {
            CliError::Violations(report.violations.len()).exit_code()
        },
    })
}
