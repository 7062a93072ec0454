//! Run reports in two formats: an aligned text table for people and
//! pretty-printed JSON for tools. Amounts are written with six decimals and
//! re-read to the same values.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::flow::{
    check_capacity, check_demand_satisfaction, check_node_balance, check_transit_restrictions, decompose,
    link_utilization, FlowAssignment,
};
use crate::mlg::{validate_structure, Layer, LinkKey, MultiLayerGraph};
use crate::scenario::Scenario;
use crate::synthesis::{verify_result, OracleOutcome, SynthesisResult, SynthesisStatus};
use crate::validation::{ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Validate,
    Synthesize,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Clean,
    Violations,
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstalledLink {
    pub a: String,
    pub b: String,
    #[serde(with = "fixed6")]
    pub capacity: f64,
    #[serde(with = "fixed6")]
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkUsage {
    pub a: String,
    pub b: String,
    pub installed: bool,
    #[serde(with = "fixed6")]
    pub flow: f64,
    #[serde(with = "fixed6")]
    pub capacity: f64,
    #[serde(with = "fixed6")]
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerShare {
    pub server: String,
    #[serde(with = "fixed6")]
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathEntry {
    pub path: Vec<String>,
    #[serde(with = "fixed6")]
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommodityEntry {
    pub id: String,
    pub subscriber: String,
    #[serde(with = "fixed6")]
    pub volume: f64,
    pub servers: Vec<ServerShare>,
    pub paths: Vec<PathEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    /// Link subsets enumerated by the oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsets: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub kind: ReportKind,
    pub status: ReportStatus,
    #[serde(default, with = "fixed6_opt", skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, with = "fixed6_opt", skip_serializing_if = "Option::is_none")]
    pub lp_bound: Option<f64>,
    pub installed_count: usize,
    pub installed_links: Vec<InstalledLink>,
    pub links: Vec<LinkUsage>,
    pub commodities: Vec<CommodityEntry>,
    pub validation: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverStats>,
}

/// Rounds to the six decimals the report prints, without negative zero.
pub fn round6(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.6}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn installed_links(keys: &[LinkKey], g: &MultiLayerGraph) -> Vec<InstalledLink> {
    keys.iter()
        .filter_map(|k| {
            let attrs = g.physical().edges.get(k)?;
            Some(InstalledLink {
                a: k.a.to_string(),
                b: k.b.to_string(),
                capacity: round6(attrs.capacity.unwrap_or(0.0)),
                weight: round6(attrs.weight),
            })
        })
        .collect()
}

impl Report {
    fn empty(kind: ReportKind, status: ReportStatus) -> Self {
        Self {
            kind,
            status,
            objective: None,
            lp_bound: None,
            installed_count: 0,
            installed_links: Vec::new(),
            links: Vec::new(),
            commodities: Vec::new(),
            validation: Vec::new(),
            solver: None,
        }
    }

    /// Structure checks on the scenario graph and, when the scenario carries
    /// flows, conservation checks on them.
    pub fn validation(scenario: &Scenario) -> Self {
        let mut findings = validate_structure(&scenario.graph);
        let mut report = Self::empty(ReportKind::Validate, ReportStatus::Clean);
        if let Some(paths) = &scenario.flows {
            let assignment = FlowAssignment::from_paths(scenario.graph.physical(), paths.clone())
                .expect("scenario flows follow physical links");
            let cs = &scenario.commodities;
            findings.merge(check_demand_satisfaction(&assignment, cs));
            findings.merge(check_node_balance(&assignment.link_flows, cs));
            findings.merge(check_transit_restrictions(&assignment.link_flows, &scenario.roles(), cs));
            findings.merge(check_capacity(&assignment.link_flows, scenario.graph.physical()));
            report.links = usage(&assignment, scenario.graph.physical(), None);
            report.commodities = cs
                .iter()
                .map(|c| {
                    let mut servers: Vec<ServerShare> = Vec::new();
                    let mut entries = Vec::new();
                    for pf in paths.iter().filter(|p| p.commodity == c.id) {
                        let first = pf.path.first().map(ToString::to_string).unwrap_or_default();
                        match servers.iter_mut().find(|s| s.server == first) {
                            Some(s) => s.amount += pf.amount,
                            None => servers.push(ServerShare {
                                server: first,
                                amount: pf.amount,
                            }),
                        }
                        entries.push(PathEntry {
                            path: pf.path.iter().map(ToString::to_string).collect(),
                            amount: round6(pf.amount),
                        });
                    }
                    servers.sort_by(|x, y| x.server.cmp(&y.server));
                    servers.iter_mut().for_each(|s| s.amount = round6(s.amount));
                    CommodityEntry {
                        id: c.id.to_string(),
                        subscriber: c.destination.to_string(),
                        volume: round6(c.volume),
                        servers,
                        paths: entries,
                    }
                })
                .collect();
        }
        if !findings.is_clean() {
            report.status = ReportStatus::Violations;
        }
        report.validation = findings.violations;
        report
    }

    /// Installed topology, routing and the validator findings on it.
    pub fn synthesis(result: &SynthesisResult, g: &MultiLayerGraph) -> Self {
        let status = match result.status {
            SynthesisStatus::Optimal => ReportStatus::Optimal,
            SynthesisStatus::Infeasible => ReportStatus::Infeasible,
            SynthesisStatus::Unbounded => ReportStatus::Unbounded,
        };
        let mut report = Self::empty(ReportKind::Synthesize, status);
        report.solver = Some(SolverStats {
            nodes: result.nodes,
            lp_iterations: result.lp_iterations,
            subsets: None,
        });
        report.lp_bound = Some(round6(result.lp_bound)).filter(|v| v.is_finite());
        if !result.is_optimal() {
            return report;
        }
        report.objective = Some(round6(result.objective));
        report.installed_links = installed_links(&result.installed, g);
        report.installed_count = report.installed_links.len();

        let paths = decompose(&result.link_flows, &result.commodities);
        let assignment = FlowAssignment {
            path_flows: paths.clone(),
            link_flows: result.link_flows.clone(),
        };
        let installed: BTreeSet<&LinkKey> = result.installed.iter().collect();
        report.links = usage(&assignment, g.physical(), Some(&installed));
        report.commodities = result
            .commodities
            .iter()
            .map(|c| CommodityEntry {
                id: c.id.to_string(),
                subscriber: c.destination.to_string(),
                volume: round6(c.volume),
                servers: result
                    .serving(c)
                    .into_iter()
                    .map(|(s, a)| ServerShare {
                        server: s.to_string(),
                        amount: round6(a),
                    })
                    .collect(),
                paths: paths
                    .iter()
                    .filter(|p| p.commodity == c.id)
                    .map(|p| PathEntry {
                        path: p
                            .path
                            .iter()
                            .filter(|v| !v.is_super_source())
                            .map(ToString::to_string)
                            .collect(),
                        amount: round6(p.amount),
                    })
                    .collect(),
            })
            .collect();
        report.validation = verify_result(result, g).violations;
        report
    }

    pub fn oracle(outcome: &OracleOutcome, g: &MultiLayerGraph) -> Self {
        let status = if outcome.objective.is_some() {
            ReportStatus::Optimal
        } else {
            ReportStatus::Infeasible
        };
        let mut report = Self::empty(ReportKind::Oracle, status);
        report.objective = outcome.objective.map(round6);
        report.installed_links = installed_links(&outcome.installed, g);
        report.installed_count = report.installed_links.len();
        report.solver = Some(SolverStats {
            nodes: 0,
            lp_iterations: 0,
            subsets: Some(outcome.subsets),
        });
        report
    }

    pub fn findings(&self) -> ValidationReport {
        ValidationReport {
            violations: self.validation.clone(),
        }
    }

    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_machine(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Machine => self.to_machine(),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            ReportKind::Validate => "validate",
            ReportKind::Synthesize => "synthesize",
            ReportKind::Oracle => "oracle",
        };
        let status = serde_json::to_value(self.status).expect("status serializes");
        let mut head = vec![
            ("command".to_string(), kind.to_string()),
            ("status".to_string(), status.as_str().unwrap_or_default().to_string()),
        ];
        if let Some(v) = self.objective {
            head.push(("objective".into(), format!("{v:.6}")));
        }
        if let Some(v) = self.lp_bound {
            head.push(("lp bound".into(), format!("{v:.6}")));
        }
        if self.kind != ReportKind::Validate {
            head.push(("installed links".into(), self.installed_count.to_string()));
        }
        if let Some(s) = &self.solver {
            head.push(("b&b nodes".into(), s.nodes.to_string()));
            head.push(("lp pivots".into(), s.lp_iterations.to_string()));
            if let Some(n) = s.subsets {
                head.push(("subsets".into(), n.to_string()));
            }
        }
        let width = head.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in head {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }

        if !self.installed_links.is_empty() {
            out.push_str("\ninstalled links\n");
            let rows: Vec<Vec<String>> = self
                .installed_links
                .iter()
                .map(|l| vec![l.a.clone(), l.b.clone(), format!("{:.6}", l.capacity), format!("{:.6}", l.weight)])
                .collect();
            table(&mut out, &["a", "b", "capacity", "weight"], &rows);
        }
        if !self.links.is_empty() {
            out.push_str("\nlink usage\n");
            let rows: Vec<Vec<String>> = self
                .links
                .iter()
                .map(|l| {
                    vec![
                        l.a.clone(),
                        l.b.clone(),
                        if l.installed { "yes" } else { "no" }.to_string(),
                        format!("{:.6}", l.flow),
                        format!("{:.6}", l.capacity),
                        format!("{:.6}", l.utilization),
                    ]
                })
                .collect();
            table(&mut out, &["a", "b", "installed", "flow", "capacity", "utilization"], &rows);
        }
        if !self.commodities.is_empty() {
            out.push_str("\ncommodities\n");
            let rows: Vec<Vec<String>> = self
                .commodities
                .iter()
                .map(|c| {
                    let servers: Vec<String> = c
                        .servers
                        .iter()
                        .map(|s| format!("{}={:.6}", s.server, s.amount))
                        .collect();
                    vec![c.id.clone(), c.subscriber.clone(), format!("{:.6}", c.volume), servers.join(" ")]
                })
                .collect();
            table(&mut out, &["id", "subscriber", "volume", "servers"], &rows);
            out.push_str("\npaths\n");
            let rows: Vec<Vec<String>> = self
                .commodities
                .iter()
                .flat_map(|c| {
                    c.paths
                        .iter()
                        .map(|p| vec![c.id.clone(), format!("{:.6}", p.amount), p.path.join(" > ")])
                })
                .collect();
            table(&mut out, &["id", "amount", "path"], &rows);
        }
        out.push_str("\nvalidation\n");
        if self.validation.is_empty() {
            out.push_str("  no violations\n");
        }
        for v in &self.validation {
            let _ = writeln!(out, "  {}: {v}", v.kind());
        }
        out
    }
}

fn usage(
    assignment: &FlowAssignment,
    physical: &Layer,
    installed: Option<&BTreeSet<&LinkKey>>,
) -> Vec<LinkUsage> {
    link_utilization(&assignment.link_flows, physical)
        .into_iter()
        .map(|(k, u)| LinkUsage {
            installed: installed.map_or(u.flow > 0.0, |set| set.contains(&k)),
            a: k.a.to_string(),
            b: k.b.to_string(),
            flow: round6(u.flow),
            capacity: round6(u.capacity),
            utilization: round6(u.fraction),
        })
        .collect()
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut s = String::from(" ");
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(s, " {cell:<w$}");
        }
        s.trim_end().to_string()
    };
    out.push_str(&line(header.to_vec()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
}

fn fixed(x: f64) -> serde_json::Number {
    serde_json::Number::from_str(&format!("{x:.6}")).expect("fixed-point literal")
}

mod fixed6 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        fixed(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

mod fixed6_opt {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        x.map(fixed).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;
    use crate::synthesis::synthesize;

    const DIAMOND: &str = r#"{
        "entities": [
            {"id": "vs1", "role": "video_server"},
            {"id": "x1", "role": "intermediate"},
            {"id": "x2", "role": "intermediate"},
            {"id": "na1", "role": "access_node"},
            {"id": "a1", "role": "subscriber"}
        ],
        "links": [
            {"a": "vs1", "b": "x1", "capacity": 10},
            {"a": "vs1", "b": "x2", "capacity": 10},
            {"a": "x1", "b": "na1", "capacity": 10},
            {"a": "x2", "b": "na1", "capacity": 10},
            {"a": "na1", "b": "a1", "capacity": 10}
        ],
        "catalog": [{"content": "film", "servers": ["vs1"]}],
        "requests": [{"subscriber": "a1", "content": "film", "rate": 4}],
        "options": {}
    }"#;

    fn diamond_report() -> Report {
        let s = parse_scenario(DIAMOND).unwrap();
        let r = synthesize(&s.graph, &s.commodities, &s.options).unwrap();
        Report::synthesis(&r, &s.graph)
    }

    #[test]
    fn diamond_report_lists_three_links() {
        let report = diamond_report();
        assert_eq!(report.installed_count, 3);
        assert!(report.validation.is_empty());
        let machine = report.to_machine();
        assert!(machine.contains("\"objective\": 12.000000"));
        assert!(report.to_table().contains("objective        12.000000"));
        assert_eq!(report.commodities[0].paths.len(), 1);
        assert_eq!(report.commodities[0].paths[0].path.first().map(String::as_str), Some("vs1"));
    }

    #[test]
    fn empty_demand_report() {
        let s = parse_scenario(DIAMOND).unwrap();
        let r = synthesize(&s.graph, &[], &s.options).unwrap();
        let report = Report::synthesis(&r, &s.graph);
        assert_eq!(report.objective, Some(0.0));
        assert_eq!(report.installed_count, 0);
        assert!(report.to_machine().contains("\"objective\": 0.000000"));
    }

    #[test]
    fn serialization_is_deterministic_and_round_trips() {
        let a = diamond_report();
        let b = diamond_report();
        assert_eq!(a.to_machine(), b.to_machine());
        assert_eq!(a.to_table(), b.to_table());
        let back = Report::from_machine(&a.to_machine()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_machine(), a.to_machine());
    }

    #[test]
    fn rounding_drops_negative_zero() {
        assert_eq!(round6(-1e-9).to_bits(), 0.0f64.to_bits());
        assert_eq!(round6(1.0000004), 1.0);
        assert_eq!(round6(2.5e-6), 3e-6);
    }
}
