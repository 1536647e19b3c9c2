//! Analysis results and their human and machine renderings.
//!
//! The machine format is one `key=value` pair per line. Lists are comma
//! separated and every number is an exact integer or `p/q` fraction.

use std::fmt::Write;

use stableseg_core::stability::{
    diagnose, inefficiency_witness, is_efficient, is_saturated, nonsaturation_witness, Diagnosis,
};
use stableseg_core::{Rational, Segmentation, TransportPlan};

use crate::text::{write_plan, write_segmentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Machine,
}

pub struct Analysis {
    pub segmentation: Segmentation,
    pub canonical: Segmentation,
    pub efficient: bool,
    pub saturated_as_given: bool,
    pub saturated: bool,
    pub diagnosis: Diagnosis,
    /// A deviation from `segmentation` that no segment objects to.
    pub witness: Option<(Segmentation, TransportPlan)>,
}

impl Analysis {
    pub fn new(segmentation: Segmentation) -> Result<Self, stableseg_core::Error> {
        let canonical = segmentation.canonicalize();
        let diagnosis = diagnose(&segmentation);
        let witness = match diagnosis {
            Diagnosis::Stable => None,
            Diagnosis::Inefficient => inefficiency_witness(&segmentation),
            Diagnosis::Unsaturated => Some(nonsaturation_witness(&segmentation)?),
        };
        Ok(Analysis {
            efficient: is_efficient(&segmentation),
            saturated_as_given: is_saturated(&segmentation),
            saturated: is_saturated(&canonical),
            diagnosis,
            witness,
            canonical,
            segmentation,
        })
    }

    pub fn stable(&self) -> bool {
        self.diagnosis.stable()
    }

    pub fn failing_condition(&self) -> Option<&'static str> {
        match self.diagnosis {
            Diagnosis::Stable => None,
            Diagnosis::Inefficient => Some("efficiency"),
            Diagnosis::Unsaturated => Some("saturation (canonical)"),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.human(),
            Format::Machine => self.machine(),
        }
    }

    fn human(&self) -> String {
        let s = &self.segmentation;
        let mut out = String::new();
        let m = s.market();
        writeln!(
            out,
            "market: {} values, total mass {}",
            m.len(),
            m.total_mass()
        )
        .unwrap();
        writeln!(out, "segments:").unwrap();
        human_segments(&mut out, s);
        writeln!(out, "canonical form:").unwrap();
        human_segments(&mut out, &self.canonical);
        writeln!(out, "efficient: {}", self.efficient).unwrap();
        writeln!(out, "saturated (as given): {}", self.saturated_as_given).unwrap();
        writeln!(out, "saturated (canonical): {}", self.saturated).unwrap();
        writeln!(out, "stable: {}", self.stable()).unwrap();
        if let Some(failing) = self.failing_condition() {
            writeln!(out, "failing condition: {failing}").unwrap();
        }
        writeln!(
            out,
            "average consumer surplus: {}",
            s.average_consumer_surplus()
        )
        .unwrap();
        writeln!(out, "seller revenue: {}", s.seller_revenue()).unwrap();
        writeln!(
            out,
            "average seller revenue: {}",
            s.average_seller_revenue()
        )
        .unwrap();
        if let Some((w, plan)) = &self.witness {
            writeln!(out, "witness segmentation:").unwrap();
            for line in write_segmentation(w).lines().filter(|l| !l.is_empty()) {
                writeln!(out, "  {line}").unwrap();
            }
            writeln!(out, "witness plan (from-segment to-segment value mass):").unwrap();
            for line in write_plan(plan).lines() {
                writeln!(out, "  {line}").unwrap();
            }
        }
        out
    }

    fn machine(&self) -> String {
        let s = &self.segmentation;
        let mut out = String::new();
        machine_segments(&mut out, "segment", s);
        machine_segments(&mut out, "canonical", &self.canonical);
        writeln!(out, "efficient={}", self.efficient).unwrap();
        writeln!(out, "saturated_as_given={}", self.saturated_as_given).unwrap();
        writeln!(out, "saturated={}", self.saturated).unwrap();
        writeln!(out, "stable={}", self.stable()).unwrap();
        writeln!(
            out,
            "failing_condition={}",
            self.failing_condition().unwrap_or("none")
        )
        .unwrap();
        writeln!(out, "acs={}", s.average_consumer_surplus()).unwrap();
        writeln!(out, "seller_revenue={}", s.seller_revenue()).unwrap();
        writeln!(out, "average_seller_revenue={}", s.average_seller_revenue()).unwrap();
        if let Some((w, plan)) = &self.witness {
            machine_segments(&mut out, "witness", w);
            for line in write_plan(plan).lines() {
                writeln!(out, "witness.flow={line}").unwrap();
            }
        }
        out
    }
}

pub fn join(xs: &[Rational]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn optimal_prices(coalition: &stableseg_core::Coalition) -> Vec<Rational> {
    coalition.optimal_prices().expect("segments are nonempty")
}

fn human_segments(out: &mut String, s: &Segmentation) {
    for (k, seg) in s.segments().iter().enumerate() {
        writeln!(
            out,
            "  [{k}] price {} on {} (optimal prices: {})",
            seg.price(),
            seg.coalition(),
            optimal_prices(seg.coalition())
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )
        .unwrap();
    }
}

fn machine_segments(out: &mut String, prefix: &str, s: &Segmentation) {
    writeln!(out, "{prefix}.count={}", s.len()).unwrap();
    for (k, seg) in s.segments().iter().enumerate() {
        writeln!(out, "{prefix}.{k}.price={}", seg.price()).unwrap();
        writeln!(out, "{prefix}.{k}.masses={}", join(seg.coalition().mass())).unwrap();
        writeln!(
            out,
            "{prefix}.{k}.optimal_prices={}",
            join(&optimal_prices(seg.coalition()))
        )
        .unwrap();
    }
}
