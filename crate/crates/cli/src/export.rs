//! Serializers for the command outputs. Elements are written in one-line
//! notation and polynomials in their canonical string form, so the files
//! are stable across runs and worker counts.

use std::fmt::Write as _;

use anyhow::Result;
use quasicell_core::afun::{self, StructCoeffTables};
use quasicell_core::insertion::{self, Tableau};
use quasicell_core::matrix::PolyMatrix;
use quasicell_core::qpset::Action;
use quasicell_core::verify::VerifyReport;
use quasicell_core::wgraph::{LabeledGraph, Partition};
use quasicell_core::{CanonicalData, ModuleKind, QpSet};
use serde::Serialize;
use serde_json::{json, Value};

fn names(set: &QpSet, block: &[usize]) -> Vec<String> {
    block.iter().map(|&x| set.element(x).to_string()).collect()
}

fn partition(set: &QpSet, p: &Partition) -> Vec<Vec<String>> {
    p.iter().map(|b| names(set, b)).collect()
}

fn matrix_entries(set: &QpSet, m: &PolyMatrix) -> Vec<(String, String, String)> {
    m.nonzero_entries()
        .map(|((y, x), p)| (set.element(y).to_string(), set.element(x).to_string(), p.to_string()))
        .collect()
}

fn basis(set: &QpSet) -> Vec<String> {
    set.carrier().iter().map(ToString::to_string).collect()
}

pub fn pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn canonical_json(set: &QpSet, data: &CanonicalData) -> Value {
    let mu: Vec<(String, String, i64)> =
        data.mu_nonzero().map(|(x, y, m)| (set.element(x).to_string(), set.element(y).to_string(), m)).collect();
    json!({
        "set": set.name(),
        "kind": data.kind.label(),
        "basis": basis(set),
        "entries": matrix_entries(set, &data.c),
        "inverse": matrix_entries(set, &data.inv),
        "mu": mu,
    })
}

pub const CANONICAL_HEADER: [&str; 5] = ["kind", "matrix", "y", "x", "poly"];
pub const GRAPH_HEADER: [&str; 5] = ["kind", "from", "to", "weight", "same_cell"];
pub const AFUN_HEADER: [&str; 8] =
    ["kind", "element", "height", "a", "descents", "tableau", "tableau_stat", "gamma_terms"];

/// `matrix` is `canonical` or `inverse`.
pub fn canonical_csv(w: &mut csv::Writer<Vec<u8>>, set: &QpSet, data: &CanonicalData) -> Result<()> {
    for (label, m) in [("canonical", &data.c), ("inverse", &data.inv)] {
        for (y, x, p) in matrix_entries(set, m) {
            w.write_record([data.kind.label(), label, &y, &x, &p])?;
        }
    }
    Ok(())
}

pub fn graph_json(set: &QpSet, g: &LabeledGraph, cells: &Partition, molecules: &Partition) -> Value {
    let tau: Vec<Vec<usize>> = (0..g.len()).map(|x| g.tau_set(x)).collect();
    let edges: Vec<(String, String, i64)> =
        g.edges.iter().map(|(&(x, y), &w)| (set.element(x).to_string(), set.element(y).to_string(), w)).collect();
    json!({
        "set": set.name(),
        "kind": g.kind.label(),
        "vertices": basis(set),
        "tau": tau,
        "edges": edges,
        "cells": partition(set, cells),
        "molecules": partition(set, molecules),
    })
}

pub fn graph_csv(w: &mut csv::Writer<Vec<u8>>, set: &QpSet, g: &LabeledGraph, cells: &Partition) -> Result<()> {
    let cell_of = block_index(g.len(), cells);
    for (&(x, y), &wt) in &g.edges {
        w.write_record([
            g.kind.label(),
            &set.element(x).to_string(),
            &set.element(y).to_string(),
            &wt.to_string(),
            &(cell_of[x] == cell_of[y]).to_string(),
        ])?;
    }
    Ok(())
}

fn block_index(len: usize, p: &Partition) -> Vec<usize> {
    let mut idx = vec![0; len];
    for (b, block) in p.iter().enumerate() {
        for &x in block {
            idx[x] = b;
        }
    }
    idx
}

/// One cluster per cell, vertices labeled by element and descent set.
pub fn graph_dot(out: &mut String, set: &QpSet, g: &LabeledGraph, cells: &Partition) {
    let _ = writeln!(out, "digraph \"{}_{}\" {{", set.name(), g.kind.label());
    for (c, block) in cells.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{}_{c} {{", g.kind.label());
        for &x in block {
            let tau: Vec<String> = g.tau_set(x).iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "    \"{}\" [label=\"{}\\n{{{}}}\"];", set.element(x), set.element(x), tau.join(","));
        }
        out.push_str("  }\n");
    }
    for (&(x, y), &w) in &g.edges {
        let label = if w == 1 { String::new() } else { format!(" [label=\"{w}\"]") };
        let _ = writeln!(out, "  \"{}\" -> \"{}\"{label};", set.element(x), set.element(y));
    }
    out.push_str("}\n");
}

#[derive(Serialize)]
pub struct AfunRow {
    pub element: String,
    pub height: String,
    pub a: i32,
    pub descents: usize,
    pub tableau: Option<String>,
    pub tableau_stat: Option<usize>,
    /// Number of `(w, y)` attaining the maximal degree at this element.
    pub gamma_terms: usize,
}

pub fn afun_rows(set: &QpSet, t: &StructCoeffTables) -> Vec<AfunRow> {
    let mut gamma_terms = vec![0; set.len()];
    for &(_, _, z) in t.gamma.keys() {
        gamma_terms[z] += 1;
    }
    (0..set.len())
        .map(|z| {
            let elem = set.element(z);
            let tableau = if set.action() == Action::Conjugation && elem.is_fpf_involution() {
                match t.kind {
                    ModuleKind::M => insertion::p_rbs(elem).ok(),
                    ModuleKind::N => insertion::p_cbs(elem).ok(),
                }
            } else {
                None
            };
            AfunRow {
                element: elem.to_string(),
                height: set.height(z).to_string(),
                a: t.a[z],
                descents: afun::descent_count(t.kind, set, z),
                tableau_stat: tableau.as_ref().map(Tableau::stat_a),
                tableau: tableau.map(|t| t.to_string()),
                gamma_terms: gamma_terms[z],
            }
        })
        .collect()
}

pub fn afun_json(set: &QpSet, t: &StructCoeffTables) -> Value {
    json!({
        "set": set.name(),
        "kind": t.kind.label(),
        "bound": t.bound,
        "rows": afun_rows(set, t),
    })
}

pub fn afun_csv(w: &mut csv::Writer<Vec<u8>>, set: &QpSet, t: &StructCoeffTables) -> Result<()> {
    for r in afun_rows(set, t) {
        w.write_record([
            t.kind.label(),
            &r.element,
            &r.height,
            &r.a.to_string(),
            &r.descents.to_string(),
            r.tableau.as_deref().unwrap_or(""),
            &r.tableau_stat.map(|s| s.to_string()).unwrap_or_default(),
            &r.gamma_terms.to_string(),
        ])?;
    }
    Ok(())
}

pub fn verify_csv(w: &mut csv::Writer<Vec<u8>>, rep: &VerifyReport) -> Result<()> {
    w.write_record(["criterion", "scope", "check", "status", "detail"])?;
    for l in &rep.lines {
        w.write_record([&l.criterion.to_string(), &l.scope, &l.name, &l.status.to_string(), &l.detail])?;
    }
    Ok(())
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(w.into_inner()?)?)
}
