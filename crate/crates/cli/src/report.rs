//! CSV and JSON renderings. CSV columns are fixed per command; lists inside
//! a CSV field are space separated.

use serde::Serialize;

use crate::commands::{CensusResult, CountRow, DensityReport, Gl2Out, OrbitRow, TwistReport};
use crate::config::Format;

pub const CENSUS_HEADER: &str = "N,k,orbit,degree,p,reducible";

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

pub fn orbits(rows: &[OrbitRow], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv(
            "N,k,orbit,degree,witness",
            rows.iter().map(|r| format!("{},{},{},{},{}", r.level, r.weight, r.orbit, r.degree, r.witness)),
        ),
    }
}

/// One CSV row per prime tested.
pub fn census(results: &[CensusResult], format: Format) -> String {
    match format {
        Format::Json => json(results),
        Format::Csv => csv(
            CENSUS_HEADER,
            results.iter().flat_map(|r| {
                r.verdicts
                    .iter()
                    .map(move |(p, red)| format!("{},{},{},{},{p},{}", r.level, r.weight, r.orbit, r.degree, u8::from(*red)))
            }),
        ),
    }
}

pub fn twists(reports: &[TwistReport], format: Format) -> String {
    match format {
        Format::Json => json(reports),
        Format::Csv => csv(
            "N,k,orbit,degree,cm,inner_twists,gamma,ff_degree,subgroup,field_degree,generation,containment",
            reports.iter().flat_map(|r| {
                let head = format!(
                    "{},{},{},{},{},{},{},{}",
                    r.level,
                    r.weight,
                    r.orbit,
                    r.degree,
                    r.cm_discriminant.map(|d| d.to_string()).unwrap_or_default(),
                    joined(&r.inner_twists),
                    r.gamma_order,
                    r.ff_degree
                );
                if r.densities.is_empty() {
                    vec![format!("{head},,,,")]
                } else {
                    r.densities
                        .iter()
                        .map(|d| format!("{head},{},{},{},{}", joined(&d.subgroup), d.field_degree, d.generation, d.containment))
                        .collect()
                }
            }),
        ),
    }
}

pub fn density(reports: &[DensityReport], format: Format) -> String {
    match format {
        Format::Json => json(reports),
        Format::Csv => csv(
            "N,k,orbit,degree,inner_twists,bound,field_degree,predicted,observed_count,total,observed,gap",
            reports.iter().flat_map(|r| {
                let t = &r.twists;
                r.comparison.iter().map(move |c| {
                    format!(
                        "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6}",
                        t.level,
                        t.weight,
                        t.orbit,
                        t.degree,
                        joined(&t.inner_twists),
                        r.bound,
                        c.field_degree,
                        c.predicted,
                        c.observed_count,
                        c.total,
                        c.observed,
                        c.gap
                    )
                })
            }),
        ),
    }
}

pub fn count(rows: &[CountRow], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv(
            "N,k,orbit,degree,x,count",
            rows.iter().map(|r| format!("{},{},{},{},{},{}", r.level, r.weight, r.orbit, r.degree, r.x, r.count)),
        ),
    }
}

/// CSV: one row per parameter point and charpoly with a nonempty class sum.
pub fn gl2(out: &Gl2Out, format: Format) -> String {
    match format {
        Format::Json => json(out),
        Format::Csv => csv(
            "q,r,R,R~,G,charpoly,classes,class_sum,bound,ratio",
            out.points.iter().flat_map(|p| {
                p.rows.iter().map(move |b| {
                    format!(
                        "{},{},{},{},{},{},{},{},{},{:.6}",
                        p.q,
                        p.r,
                        p.r_order,
                        p.rt_order,
                        p.variant,
                        b.charpoly,
                        b.classes,
                        b.class_sum,
                        p.bound,
                        b.class_sum as f64 / p.bound as f64
                    )
                })
            }),
        ),
    }
}
