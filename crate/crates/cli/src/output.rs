//! Report types for each command and their JSON / CSV / text renderings.
//!
//! Rendering is deterministic: struct field order fixes JSON, row order is
//! sorted, and floats print in shortest round-trip form everywhere.

use std::fmt::Write as _;

use serde::Serialize;

use matchbound_core::{BoundReport, HypothesisRecord, Matching, TowerChecks, TowerDims};

use crate::config::OutputFormat;
use crate::CliError;

pub fn emit(rendered: String, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Config(format!("cannot write {path}: {e}"))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn csv_row(fields: &[String]) -> String {
    let mut row = fields.join(",");
    row.push('\n');
    row
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct BoundOutput {
    pub filtration: String,
    #[serde(flatten)]
    pub report: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tower_dims: Option<TowerDims>,
}

impl BoundOutput {
    pub fn render(&self, format: OutputFormat, unamplified: bool) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let header = "group,order,p,n,ambient_order,filtration,per_factor_rate,lambda_star,per_factor_density,bound,soft_delta,pre_amplification\n";
                let r = &self.report;
                let mut s = header.to_string();
                s.push_str(&csv_row(&[
                    r.group.clone(),
                    r.group_order.to_string(),
                    r.p.to_string(),
                    r.n.to_string(),
                    r.ambient_order.to_string(),
                    self.filtration.clone(),
                    r.per_factor_rate.to_string(),
                    r.lambda_star.to_string(),
                    r.per_factor_density.to_string(),
                    r.bound.to_string(),
                    r.soft_delta.map(|v| v.to_string()).unwrap_or_default(),
                    r.pre_amplification.map(|v| v.to_string()).unwrap_or_default(),
                ]));
                s
            }
            OutputFormat::Text => {
                let r = &self.report;
                let mut s = String::new();
                let _ = writeln!(s, "group:              {} (order {})", r.group, r.group_order);
                let _ = writeln!(s, "coefficient field:  F_{}", r.p);
                let _ = writeln!(s, "filtration:         {}", self.filtration);
                for sd in &r.step_dims {
                    let _ = writeln!(s, "  step alpha = {:<5} dim = {}", sd.alpha, sd.dim);
                }
                let _ = writeln!(s, "rate function:      {}", rate_text(r));
                let _ = writeln!(s, "per-factor rate c:  {}", r.per_factor_rate);
                let _ = writeln!(
                    s,
                    "minimizer lambda*:  {}{}",
                    r.lambda_star,
                    if r.lambda_boundary { "  (boundary infimum)" } else { "" }
                );
                let _ = writeln!(s, "density delta:      {}", r.per_factor_density);
                let _ = writeln!(s, "power n:            {}", r.n);
                let _ = writeln!(s, "ambient order:      {}", r.ambient_order);
                let _ = writeln!(s, "matching bound:     {}", r.bound);
                if let Some(soft) = r.soft_delta {
                    let _ = writeln!(s, "soft density:       {soft}");
                }
                if unamplified {
                    if let Some(pre) = r.pre_amplification {
                        let _ = writeln!(s, "unamplified count:  {pre}");
                    }
                }
                let _ = writeln!(s, "hypotheses:         {}", hypotheses_text(r));
                s
            }
        }
    }
}

fn rate_text(r: &BoundReport) -> String {
    r.rate_terms
        .iter()
        .map(|t| format!("{} L^{}", t.coeff, t.exponent))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn hypotheses_text(r: &BoundReport) -> String {
    serde_json::to_string(&r.hypotheses).expect("record serializes")
}

#[derive(Serialize)]
pub struct VerifyStep {
    pub alpha: String,
    pub dim: usize,
    pub two_sided: bool,
    pub inner_invariant: bool,
}

#[derive(Serialize)]
pub struct VerifyOutput {
    pub group: String,
    pub order: usize,
    pub p: u64,
    pub filtration: String,
    pub ok: bool,
    pub vanishing: String,
    pub aut_invariance_verified: bool,
    pub steps: Vec<VerifyStep>,
}

impl VerifyOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut s =
                    "group,order,p,filtration,ok,vanishing,aut_invariance,alpha,dim,two_sided,inner_invariant\n"
                        .to_string();
                if self.steps.is_empty() {
                    s.push_str(&csv_row(&[
                        self.group.clone(),
                        self.order.to_string(),
                        self.p.to_string(),
                        self.filtration.clone(),
                        self.ok.to_string(),
                        self.vanishing.clone(),
                        self.aut_invariance_verified.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ]));
                }
                for st in &self.steps {
                    s.push_str(&csv_row(&[
                        self.group.clone(),
                        self.order.to_string(),
                        self.p.to_string(),
                        self.filtration.clone(),
                        self.ok.to_string(),
                        self.vanishing.clone(),
                        self.aut_invariance_verified.to_string(),
                        st.alpha.clone(),
                        st.dim.to_string(),
                        st.two_sided.to_string(),
                        st.inner_invariant.to_string(),
                    ]));
                }
                s
            }
            OutputFormat::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "group:       {} (order {})", self.group, self.order);
                let _ = writeln!(s, "field:       F_{}", self.p);
                let _ = writeln!(s, "filtration:  {}", self.filtration);
                for st in &self.steps {
                    let _ = writeln!(
                        s,
                        "  alpha = {:<5} dim = {:<5} two-sided = {:<5} inner-invariant = {}",
                        st.alpha, st.dim, st.two_sided, st.inner_invariant
                    );
                }
                let _ = writeln!(s, "vanishing:   {}", self.vanishing);
                let _ = writeln!(s, "aut-invariance verified: {}", self.aut_invariance_verified);
                let _ = writeln!(s, "result:      {}", if self.ok { "PASS" } else { "FAIL" });
                s
            }
        }
    }
}

#[derive(Serialize)]
pub struct SearchOutput {
    pub group: String,
    pub order: usize,
    pub mode: String,
    pub cardinality: usize,
    pub exact: bool,
    pub nodes: u64,
    pub node_budget: u64,
    #[serde(flatten)]
    pub matching: Matching,
}

impl SearchOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut s = "group,order,mode,cardinality,exact,nodes,s,t,u\n".to_string();
                let join = |v: &[u32]| {
                    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
                };
                s.push_str(&csv_row(&[
                    self.group.clone(),
                    self.order.to_string(),
                    self.mode.clone(),
                    self.cardinality.to_string(),
                    self.exact.to_string(),
                    self.nodes.to_string(),
                    join(&self.matching.s),
                    join(&self.matching.t),
                    join(&self.matching.u),
                ]));
                s
            }
            OutputFormat::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "group:        {} (order {})", self.group, self.order);
                let _ = writeln!(s, "mode:         {}", self.mode);
                let _ = writeln!(
                    s,
                    "cardinality:  {}{}",
                    self.cardinality,
                    if self.exact { "  (proven maximum)" } else { "  (budget-limited lower bound)" }
                );
                let _ = writeln!(s, "nodes:        {} / {}", self.nodes, self.node_budget);
                let _ = writeln!(s, "triples (s, t, u):");
                for (t, l) in self.matching.triples.iter().zip(&self.matching.labels) {
                    let _ = writeln!(
                        s,
                        "  ({:>3}, {:>3}, {:>3})   {} . {} . {} = 1",
                        t[0], t[1], t[2], l[0], l[1], l[2]
                    );
                }
                s
            }
        }
    }
}

#[derive(Serialize)]
pub struct CompareRow {
    pub p: u64,
    pub filtration: String,
    pub delta_soft: f64,
    pub delta_main2: f64,
    pub delta_filtration: f64,
    pub bound_soft: f64,
    pub bound_main2: f64,
    pub bound_filtration: f64,
    /// Which hypotheses behind the filtration bound were machine-checked;
    /// carried in the structured format only.
    pub hypotheses: HypothesisRecord,
}

#[derive(Serialize)]
pub struct CompareOutput {
    pub group: String,
    pub order: usize,
    pub m_star: usize,
    pub exact: bool,
    pub nodes: u64,
    pub dominance_ok: bool,
    pub rows: Vec<CompareRow>,
}

impl CompareOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut s = "group,order,m_star,exact,p,filtration,delta_soft,delta_main2,delta_filtration,bound_soft,bound_main2,bound_filtration\n".to_string();
                for r in &self.rows {
                    s.push_str(&csv_row(&[
                        self.group.clone(),
                        self.order.to_string(),
                        self.m_star.to_string(),
                        self.exact.to_string(),
                        r.p.to_string(),
                        r.filtration.clone(),
                        r.delta_soft.to_string(),
                        r.delta_main2.to_string(),
                        r.delta_filtration.to_string(),
                        r.bound_soft.to_string(),
                        r.bound_main2.to_string(),
                        r.bound_filtration.to_string(),
                    ]));
                }
                s
            }
            OutputFormat::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "group:  {} (order {})", self.group, self.order);
                let _ = writeln!(
                    s,
                    "m* = {}  ({})",
                    self.m_star,
                    if self.exact { "exact" } else { "budget-limited" }
                );
                let _ = writeln!(
                    s,
                    "{:>3}  {:<12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    "p", "filtration", "d_soft", "d_main2", "d_filt", "b_soft", "b_main2", "b_filt"
                );
                for r in &self.rows {
                    let _ = writeln!(
                        s,
                        "{:>3}  {:<12} {:>12.9} {:>12.9} {:>12.9} {:>12.6} {:>12.6} {:>12.6}",
                        r.p,
                        r.filtration,
                        r.delta_soft,
                        r.delta_main2,
                        r.delta_filtration,
                        r.bound_soft,
                        r.bound_main2,
                        r.bound_filtration
                    );
                }
                let _ = writeln!(
                    s,
                    "dominance: {}",
                    if self.dominance_ok { "m* below every bound" } else { "VIOLATED" }
                );
                s
            }
        }
    }
}

#[derive(Serialize)]
pub struct Psl2Output {
    pub p: u64,
    pub order: usize,
    pub gl2_side_verified: bool,
    pub dims: TowerDims,
    pub checks: TowerChecks,
    pub delta: f64,
    pub closed_form_lambda: f64,
    pub filtration_density: f64,
    pub rate_lambda_star: f64,
    pub square_zero_reference: f64,
    pub limit_density: f64,
}

impl Psl2Output {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json(self),
            OutputFormat::Csv => {
                let mut s = "p,order,gl2_side_verified,dim_quotient_by_j1,dim_j1_mod_j2,dim_j2_mod_j3,dim_j3,delta,closed_form_lambda,filtration_density,square_zero_reference,limit_density\n".to_string();
                s.push_str(&csv_row(&[
                    self.p.to_string(),
                    self.order.to_string(),
                    self.gl2_side_verified.to_string(),
                    self.dims.quotient_by_j1.to_string(),
                    self.dims.j1_mod_j2.to_string(),
                    self.dims.j2_mod_j3.to_string(),
                    self.dims.j3.to_string(),
                    self.delta.to_string(),
                    self.closed_form_lambda.to_string(),
                    self.filtration_density.to_string(),
                    self.square_zero_reference.to_string(),
                    self.limit_density.to_string(),
                ]));
                s
            }
            OutputFormat::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "projective tower over F_{}", self.p);
                let _ = writeln!(s, "group order:            {}", self.order);
                let _ = writeln!(
                    s,
                    "dims (H/J1, J1/J2, J2/J3, J3):  ({}, {}, {}, {})",
                    self.dims.quotient_by_j1,
                    self.dims.j1_mod_j2,
                    self.dims.j2_mod_j3,
                    self.dims.j3
                );
                let _ = writeln!(
                    s,
                    "checks:                 {}",
                    serde_json::to_string(&self.checks).expect("checks serialize")
                );
                let _ = writeln!(s, "gl2 side verified:      {}", self.gl2_side_verified);
                let _ = writeln!(s, "delta_p:                {}", self.delta);
                let _ = writeln!(s, "  closed-form lambda*:  {}", self.closed_form_lambda);
                let _ = writeln!(s, "  filtration density:   {}", self.filtration_density);
                let _ = writeln!(s, "  rate lambda*:         {}", self.rate_lambda_star);
                let _ = writeln!(s, "square-zero reference:  {}", self.square_zero_reference);
                let _ = writeln!(s, "large-p limit density:  {}", self.limit_density);
                s
            }
        }
    }
}
