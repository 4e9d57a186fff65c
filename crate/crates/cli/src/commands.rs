//! Subcommand bodies; each renders its full output in memory.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use sbrw_core::arboreal::{self, ArborealMeasure, Recurrence};
use sbrw_core::chain::transition_up;
use sbrw_core::dirichlet::{self, BoundaryData, DirichletSolution, InvertibilityReport};
use sbrw_core::hodge::{self, HodgeSpaces};
use sbrw_core::kernels::{self, HeatKernelSeries};
use sbrw_core::sbrw::{SimConfig, Walker};
use sbrw_core::{chain::Form, lower_walk, Error, OrientedIndex, SimplicialComplex};

use crate::args::*;
use crate::io::{self, fmt_num, json_num, json_nums, Table};

/// Rendered output; `failed` marks a precondition failure that still produced a report.
pub struct Output {
    pub bytes: Vec<u8>,
    pub failed: bool,
}

impl Output {
    fn ok(bytes: Vec<u8>) -> Self {
        Output { bytes, failed: false }
    }

    fn json(v: Value) -> Self {
        Output::ok(io::json_bytes(&v))
    }
}

pub fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Betti(a) => betti(a),
        Command::Gap(a) => gap(a),
        Command::Hodge(a) => hodge_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::HeatKernel(a) => heat_kernel(a),
        Command::Limit(a) => limit(a),
        Command::FirstVisit(a) => first_visit(a),
        Command::SeriesCheck(a) => series_check(a),
        Command::Recurrence(a) => recurrence(a),
        Command::Arboreal(c) => arboreal_cmd(c),
        Command::Dirichlet(c) => dirichlet_cmd(c),
        Command::Lower(c) => lower(c),
    }
}

fn vertices(x: &SimplicialComplex, j: i32, o: OrientedIndex) -> Value {
    json!(x.oriented_cell(j, o).ordering())
}

fn label(x: &SimplicialComplex, j: i32, o: OrientedIndex) -> String {
    let v: Vec<String> = x.oriented_cell(j, o).ordering().iter().map(|v| v.to_string()).collect();
    v.join(" ")
}

fn cell_or_first(x: &SimplicialComplex, j: i32, cell: Option<&str>) -> Result<OrientedIndex> {
    match cell {
        Some(s) => io::parse_oriented(x, j, s),
        None => Ok(OrientedIndex::positive(0)),
    }
}

fn betti(a: &BettiArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let v = match a.k {
        Some(k) => json!({ "betti": hodge::betti(&x, k)? }),
        None => json!({ "betti": hodge::betti_numbers(&x)? }),
    };
    Ok(Output::json(v))
}

fn gap(a: &GapArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let k = match a.k {
        Some(k) => k,
        None => io::top_dim(&x)?,
    };
    Ok(Output::json(json!({ "k": k, "gap": json_num(hodge::spectral_gap(&x, k)?) })))
}

fn hodge_cmd(a: &HodgeArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let k = match a.k {
        Some(k) => k,
        None => io::top_dim(&x)?,
    };
    let spaces = HodgeSpaces::new(&x, k, &hodge::default_weight(&x))?;
    let cells: Vec<Value> = (0..x.num_cells(k)).map(|i| vertices(&x, k, OrientedIndex::positive(i))).collect();
    let v = match &a.values {
        Some(values) => {
            let f = Form::new(&x, k, values.clone())?;
            let dec = spaces.decompose(&f)?;
            json!({
                "k": k,
                "betti": spaces.betti(),
                "cells": cells,
                "boundary": json_nums(&dec.b.values),
                "harmonic": json_nums(&dec.h.values),
                "coboundary": json_nums(&dec.c.values),
            })
        }
        None => {
            let basis: Vec<Value> = spaces.harmonic_forms().iter().map(|f| json_nums(&f.values)).collect();
            json!({ "k": k, "betti": spaces.betti(), "cells": cells, "harmonic_basis": basis })
        }
    };
    Ok(Output::json(v))
}

fn simulate(a: &SimulateArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let j = if a.lower { x.dim() as i32 } else { io::top_dim(&x)? };
    if a.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let start = cell_or_first(&x, j, a.start.as_deref())?;
    let mut cfg = SimConfig::new(a.p, a.n, a.runs, a.seed);
    if !a.absorb.is_empty() {
        let cells = a
            .absorb
            .iter()
            .map(|s| io::cell_index(&x, j, &io::parse_vertices(s)?))
            .collect::<Result<Vec<_>>>()?;
        cfg.absorbing = Some(cells);
    }
    cfg.track_ancestry = a.ancestry;
    cfg.annihilate = a.annihilate;
    cfg.max_particles = a.max_particles;
    let walker = Walker::new(&x)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build()?;
    let runs: Vec<_> = pool.install(|| {
        (0..a.runs)
            .into_par_iter()
            .map(|r| {
                if a.lower {
                    walker.simulate_lower_run(start, &cfg, r)
                } else {
                    walker.simulate_run(start, &cfg, r).map(|rec| rec.states)
                }
            })
            .collect::<Result<Vec<_>, Error>>()
    })?;
    let labels: Vec<String> = (0..x.num_cells(j)).map(|i| label(&x, j, OrientedIndex::positive(i))).collect();
    let mut t = Table::new(&["run", "n", "cell", "sign", "D_value"])?;
    for (r, states) in runs.iter().enumerate() {
        for (n, state) in states.iter().enumerate() {
            for (i, cell) in labels.iter().enumerate() {
                t.row([r.to_string(), n.to_string(), cell.clone(), "1".into(), state.values[i].to_string()])?;
            }
        }
    }
    Ok(Output::ok(t.finish()?))
}

/// Rows `(n, σ, σ′, ℰ_n(σ,σ′))` over canonical `σ′`.
fn kernel_rows(
    x: &SimplicialComplex,
    j: i32,
    series: &HeatKernelSeries,
    from: Option<OrientedIndex>,
    format: Format,
) -> Result<Output> {
    let m = x.num_cells(j);
    let sources: Vec<OrientedIndex> = match from {
        Some(o) => vec![o],
        None => (0..m).map(OrientedIndex::positive).collect(),
    };
    let mut rows = Vec::new();
    for n in 0..=series.horizon() {
        for &s in &sources {
            for t in (0..m).map(OrientedIndex::positive) {
                rows.push((n, s, t, series.get(n, s, t)));
            }
        }
    }
    match format {
        Format::Csv => {
            let mut table = Table::new(&["n", "sigma", "sigma_prime", "value"])?;
            for (n, s, t, v) in rows {
                table.row([n.to_string(), label(x, j, s), label(x, j, t), fmt_num(v)])?;
            }
            Ok(Output::ok(table.finish()?))
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(n, s, t, v)| {
                    json!({ "n": n, "sigma": vertices(x, j, s), "sigma_prime": vertices(x, j, t), "value": json_num(v) })
                })
                .collect();
            Ok(Output::json(json!({ "p": json_num(series.p), "rows": rows })))
        }
    }
}

fn heat_kernel(a: &KernelArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let j = io::top_dim(&x)?;
    let from = a.from.as_deref().map(|s| io::parse_oriented(&x, j, s)).transpose()?;
    let series = kernels::exact_heat_kernel(&x, a.p, a.n)?;
    kernel_rows(&x, j, &series, from, a.format)
}

fn limit(a: &LimitArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let j = io::top_dim(&x)?;
    let lim = kernels::limit_kernel(&x, a.p)?;
    let m = x.num_cells(j);
    let pairs = (0..m).flat_map(|s| (0..m).map(move |t| (s, t)));
    match a.format {
        Format::Csv => {
            let mut table = Table::new(&["sigma", "sigma_prime", "value"])?;
            for (s, t) in pairs {
                let (so, to) = (OrientedIndex::positive(s), OrientedIndex::positive(t));
                table.row([label(&x, j, so), label(&x, j, to), fmt_num(lim.matrix[(s, t)])])?;
            }
            Ok(Output::ok(table.finish()?))
        }
        Format::Json => {
            let rows: Vec<Value> = pairs
                .map(|(s, t)| {
                    json!({
                        "sigma": vertices(&x, j, OrientedIndex::positive(s)),
                        "sigma_prime": vertices(&x, j, OrientedIndex::positive(t)),
                        "value": json_num(lim.matrix[(s, t)]),
                    })
                })
                .collect();
            Ok(Output::json(json!({
                "p": json_num(a.p),
                "iterations": lim.iterations,
                "iteration_error": json_num(lim.iteration_error),
                "homology_dim": kernels::homology_dim_from_kernel(&x, a.p)?,
                "rows": rows,
            })))
        }
    }
}

fn first_visit(a: &FirstVisitArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let j = io::top_dim(&x)?;
    let target = io::parse_oriented(&x, j, &a.target)?;
    let fv = kernels::first_visit_kernel(&x, a.p, target.index, a.n)?;
    let m = x.num_cells(j);
    let mut rows = Vec::new();
    for n in 0..=a.n {
        for s in (0..m).map(OrientedIndex::positive) {
            rows.push((n, s, fv.get(n, s, target.sign)));
        }
    }
    match a.format {
        Format::Csv => {
            let mut table = Table::new(&["n", "sigma", "sigma_prime", "value"])?;
            for (n, s, v) in rows {
                table.row([n.to_string(), label(&x, j, s), label(&x, j, target), fmt_num(v)])?;
            }
            Ok(Output::ok(table.finish()?))
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(n, s, v)| {
                    json!({ "n": n, "sigma": vertices(&x, j, s), "sigma_prime": vertices(&x, j, target), "value": json_num(v) })
                })
                .collect();
            Ok(Output::json(json!({ "p": json_num(a.p), "rows": rows })))
        }
    }
}

fn series_check(a: &SeriesArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let j = io::top_dim(&x)?;
    let cell = cell_or_first(&x, j, a.cell.as_deref())?;
    let gf = kernels::generating_functions(&x, a.p, cell.index, a.n)?;
    let conv = kernels::convolution_residual(&x, a.p, cell.index, a.n)?;
    Ok(Output::json(json!({
        "p": json_num(a.p),
        "cell": vertices(&x, j, cell),
        "order": a.n,
        "g": json_nums(&gf.g.coeffs),
        "f": json_nums(&gf.f.coeffs),
        "identity_residual": json_num(gf.residual()),
        "convolution_residual": json_num(conv),
    })))
}

fn recurrence(a: &RecurrenceArgs) -> Result<Output> {
    let x = io::read_complex(&a.input.complex)?;
    let j = io::top_dim(&x)?;
    let cell = cell_or_first(&x, j, a.cell.as_deref())?;
    let report = kernels::recurrence_sum(&x, cell.index, a.p, a.n)?;
    let checkpoints: Vec<Value> = report
        .partial_sums
        .iter()
        .enumerate()
        .filter(|(n, _)| n.is_power_of_two() || *n == 0 || *n == a.n)
        .map(|(n, s)| json!([n, json_num(*s)]))
        .collect();
    Ok(Output::json(json!({
        "p": json_num(a.p),
        "cell": vertices(&x, j, cell),
        "partial_sums": checkpoints,
        "atom_at_one": json_num(report.atom_at_one),
        "integral": report.integral.map(json_num),
        "recurrent": report.recurrent(),
    })))
}

fn arboreal_cmd(c: &ArborealCommand) -> Result<Output> {
    match c {
        ArborealCommand::Density { params, points } => {
            let m = ArborealMeasure::new(params.d, params.k)?;
            let mut t = Table::new(&["x", "rho"])?;
            if let Some((lo, hi)) = m.support {
                for i in 0..*points {
                    let x = lo + (hi - lo) * (i as f64 + 0.5) / *points as f64;
                    t.row([fmt_num(x), fmt_num(m.density(x))])?;
                }
            }
            for &(x, mass) in &m.atoms {
                t.row(["atom".to_string(), fmt_num(x), fmt_num(mass)])?;
            }
            Ok(Output::ok(t.finish()?))
        }
        ArborealCommand::Moments { params, order, radius } => {
            let (d, k) = (params.d, params.k);
            let kernel = match radius {
                Some(r) => truncation_diagonal(d, k, 0.0, *order, *r)?,
                None => arboreal::truncated_return_series(d, k, 0.0, *order)?,
            };
            let m = ArborealMeasure::new(d, k)?;
            let mut t = Table::new(&["n", "kernel", "moment", "error"])?;
            for (n, e) in kernel.iter().enumerate() {
                let mu = m.moment(n)?;
                t.row([n.to_string(), fmt_num(*e), fmt_num(mu), fmt_num((e - mu).abs())])?;
            }
            Ok(Output::ok(t.finish()?))
        }
        ArborealCommand::Classify { params, p, order } => {
            let (d, k) = (params.d, params.k);
            let c = arboreal::classify(d, k)?;
            let class = match c.class {
                Recurrence::Recurrent => "recurrent",
                Recurrence::Transient => "transient",
            };
            let mut v = json!({
                "d": d,
                "k": k,
                "class": class,
                "atom_at_one": json_num(c.atom_at_one),
                "integral": c.integral.map(json_num),
                "radius_of_convergence": json_num(arboreal::radius_of_convergence(d, k)),
            });
            if c.class == Recurrence::Recurrent && c.atom_at_one == 0.0 {
                let eps = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
                let cut = arboreal::truncated_resolvent_integral(d, k, &eps)?;
                v["cut_integrals"] = eps.iter().zip(&cut).map(|(e, c)| json!([json_num(*e), json_num(*c)])).collect();
            }
            if let Some(p) = p {
                if !(0.0..1.0).contains(p) {
                    return Err(Error::InvalidLaziness(*p).into());
                }
                let sum: f64 = arboreal::series_return_kernel(d, k, *p, *order).iter().sum();
                v["p"] = json_num(*p);
                v["order"] = json!(order);
                v["partial_sum"] = json_num(sum);
                v["scaled_integral"] = c.integral.map(|i| json_num(i / (1.0 - p))).into();
            }
            Ok(Output::json(v))
        }
        ArborealCommand::Gfun { params, p, order, radius } => {
            let (d, k) = (params.d, params.k);
            ArborealMeasure::new(d, k)?;
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidLaziness(*p).into());
            }
            let u = arboreal::solve_u_series(d, k, *p, *order);
            let f = arboreal::f_from_u(d, *p, &u);
            let g = arboreal::g_from_f(&f);
            let closed = (*p == 0.0 && k >= 2).then(|| arboreal::closed_form_coefficients(d, k, *order));
            let trunc = radius.map(|r| truncation_diagonal(d, k, *p, *order, r)).transpose()?;
            let mut header = vec!["n", "u", "f", "g"];
            if closed.is_some() {
                header.push("closed_form");
            }
            if trunc.is_some() {
                header.push("truncation");
            }
            let mut t = Table::new(&header)?;
            for n in 0..=*order {
                let mut row = vec![n.to_string(), fmt_num(u[n]), fmt_num(f[n]), fmt_num(g[n])];
                row.extend(closed.as_ref().map(|c| fmt_num(c[n])));
                row.extend(trunc.as_ref().map(|c| fmt_num(c[n])));
                t.row(row)?;
            }
            Ok(Output::ok(t.finish()?))
        }
    }
}

/// `ℰ_n(σ_0,σ_0)` on the truncation of the given radius, which must be exact to `order`.
fn truncation_diagonal(d: usize, k: usize, p: f64, order: usize, radius: usize) -> Result<Vec<f64>> {
    if radius < arboreal::locality_radius(order) {
        return Err(Error::InsufficientRadius { radius, order }.into());
    }
    let t = arboreal::build_truncated_t(d, k, radius)?;
    let s = transition_up(&t.complex, p)?;
    Ok(kernels::return_kernel_diagonal(&s, t.sigma0.index, order))
}

fn report_json(x: &SimplicialComplex, j: i32, r: &InvertibilityReport) -> Value {
    let witness = r.witness.as_ref().map(|w| {
        w.iter()
            .enumerate()
            .map(|(i, v)| json!({ "cell": vertices(x, j, OrientedIndex::positive(i)), "value": json_num(*v) }))
            .collect::<Vec<_>>()
    });
    json!({
        "invertible": r.invertible,
        "smallest_singular": json_num(r.smallest_singular),
        "largest_singular": json_num(r.largest_singular),
        "witness": witness,
        "witness_coboundary_norm": r.witness_coboundary_norm.map(json_num),
    })
}

fn dirichlet_cmd(c: &DirichletCommand) -> Result<Output> {
    let (a, solve) = match c {
        DirichletCommand::Solve(a) => (a, true),
        DirichletCommand::Diagnose(a) => (a, false),
    };
    let x = io::read_complex(&a.input.complex)?;
    let j = io::top_dim(&x)?;
    let (cells, values) = io::read_boundary(&a.boundary)?.resolve(&x).context("invalid boundary file")?;
    if !solve {
        let report = dirichlet::is_invertible(&x, &cells)?;
        let (exhaustive, steps) = dirichlet::check_exhaustive(&x, &cells)?;
        let steps: Vec<Vec<Value>> = steps
            .iter()
            .map(|s| s.iter().map(|&i| vertices(&x, j, OrientedIndex::positive(i))).collect())
            .collect();
        let mut v = json!({
            "invertibility": report_json(&x, j, &report),
            "exhaustive": exhaustive,
            "exhausting_steps": steps,
            "relative_homology_trivial": report.invertible,
        });
        if x.dim() >= 2 {
            let hinge = dirichlet::open_hinge(&x, &cells)?;
            v["open_hinge"] = hinge.map(|h| json!(x.cell(j - 1, h).vertices())).into();
        } else {
            v["meets_every_component"] = json!(dirichlet::meets_every_component(&x, &cells)?);
        }
        return Ok(Output::json(v));
    }
    let bd = BoundaryData::new(&x, &cells, &values)?;
    match dirichlet::solve_dirichlet(&x, &bd, a.p)? {
        DirichletSolution::Solved(f) => {
            let residual = dirichlet::dirichlet_residual(&x, &bd.cells, &f)?;
            let rows: Vec<Value> = f
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    json!({
                        "cell": vertices(&x, j, OrientedIndex::positive(i)),
                        "value": json_num(*v),
                        "boundary": bd.cells.binary_search(&i).is_ok(),
                    })
                })
                .collect();
            Ok(Output::json(json!({
                "status": "solved",
                "p": json_num(a.p),
                "solution": rows,
                "residual": json_num(residual),
            })))
        }
        DirichletSolution::Degenerate(report) => Ok(Output {
            bytes: io::json_bytes(&json!({
                "status": "degenerate",
                "p": json_num(a.p),
                "invertibility": report_json(&x, j, &report),
            })),
            failed: true,
        }),
    }
}

fn lower(c: &LowerCommand) -> Result<Output> {
    match c {
        LowerCommand::Kernel(a) => {
            let x = io::read_complex(&a.input.complex)?;
            let series = lower_walk::exact_lower_kernel(&x, a.p, a.n)?;
            kernel_rows(&x, x.dim() as i32, &series, None, Format::Csv)
        }
        LowerCommand::Check(a) => {
            let x = io::read_complex(&a.input.complex)?;
            let m = lower_walk::max_lower_degree(&x);
            let mut v = json!({ "p": json_num(a.p), "max_lower_degree": m });
            if m >= 2 {
                v["p_prime"] = json_num(lower_walk::lower_laziness(a.p, m));
                v["equivalence_deviation"] = json_num(lower_walk::lower_equivalence_check(&x, a.p, a.n)?);
            }
            match lower_walk::lower_homology_check(&x, a.p) {
                Ok(h) => {
                    v["rows_in_coboundaries"] = json!(h.rows_in_coboundaries);
                    v["betti_d"] = json!(h.betti_d);
                    v["consistent"] = json!(h.consistent);
                    let rate = lower_walk::lower_convergence_rate(&x, a.p, a.n)?;
                    v["rate_bound"] = json_num(rate.rate_bound);
                    v["max_ratio"] = json_num(rate.max_ratio);
                }
                Err(e) => v["homology_error"] = json!(e.to_string()),
            }
            Ok(Output::json(v))
        }
    }
}
