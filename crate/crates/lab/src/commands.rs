//! The experiment behind each subcommand, producing report tables.

use contagion_core::attack::{evaluate_attack, AttackSetup};
use contagion_core::bounds::solve_giant_fraction;
use contagion_core::graph::Cleanup;
use contagion_core::percolation::{component_size_stats, conditional_giant_distributions, estimate_giant_membership};
use contagion_core::privacy::{hypothesis_test_error, push_through_mechanism, wasserstein_mechanism_scale};
use contagion_core::Graph;

use crate::config::{ExperimentConfig, GraphSource};
use crate::edge_list::{dump_to_string, LoadedGraph};
use crate::report::{num, Table};
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Components,
    Sweep,
    Membership,
    Audit,
    Attack,
    Gen,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Components => "components",
            Command::Sweep => "sweep",
            Command::Membership => "membership",
            Command::Audit => "audit",
            Command::Attack => "attack",
            Command::Gen => "gen",
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Tables(Vec<Table>),
    /// A canonical graph dump.
    Graph(String),
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Output, LabError> {
    cfg.validate()?;
    let loaded = cfg.graph.build()?;
    let Cleanup { duplicates, self_loops } = loaded.cleanup;
    if duplicates + self_loops > 0 {
        eprintln!("warning: dropped {duplicates} repeated edges and {self_loops} self-loops");
    }
    if cmd == Command::Gen {
        return Ok(Output::Graph(dump_to_string(&loaded.graph)));
    }
    let tables = match cmd {
        Command::Components => vec![components(cfg, &loaded.graph)?],
        Command::Sweep => vec![sweep(cfg, &loaded.graph)?],
        Command::Membership => membership(cfg, &loaded)?,
        Command::Audit => audit(cfg, &loaded.graph)?,
        Command::Attack => attack(cfg, &loaded.graph)?,
        Command::Gen => unreachable!(),
    };
    Ok(Output::Tables(tables))
}

/// `|C^H_1| / n` predicted by the fixed point when the graph is `G(n, p)`.
fn predicted_fraction(cfg: &ExperimentConfig, g: &Graph, q: f64) -> Option<f64> {
    let GraphSource::ErdosRenyi { n, p, mean_degree, .. } = &cfg.graph else {
        return None;
    };
    let c = match (p, mean_degree) {
        (Some(p), _) => p.0 * *n as f64,
        (None, Some(d)) => d.0,
        _ => return None,
    } * q;
    debug_assert_eq!(g.node_count(), *n);
    Some(if c > 1.0 {
        solve_giant_fraction(c).ok()?.fraction
    } else {
        0.0
    })
}

fn components(cfg: &ExperimentConfig, g: &Graph) -> Result<Table, LabError> {
    let q = cfg.q();
    let trials = cfg.trials_or(1000);
    let stats = component_size_stats(g, q, trials, cfg.seed)?;
    let n = g.node_count() as f64;
    let mut t = Table::new(
        "components",
        vec![
            "network",
            "nodes",
            "edges",
            "q",
            "trials",
            "mean_c1",
            "sd_c1",
            "mean_c2",
            "sd_c2",
            "mean_c1_fraction",
            "mean_c2_fraction",
            "predicted_c1_fraction",
        ],
    );
    t.push(vec![
        cfg.network_label(),
        g.node_count().to_string(),
        g.edge_count().to_string(),
        num(q),
        trials.to_string(),
        num(stats.mean_largest()),
        num(stats.sd_largest()),
        num(stats.mean_second()),
        num(stats.sd_second()),
        num(stats.mean_largest() / n),
        num(stats.mean_second() / n),
        predicted_fraction(cfg, g, q).map_or_else(String::new, num),
    ]);
    Ok(t)
}

/// Every grid point reuses the master seed, so the percolations are coupled:
/// a trial's retained edges at a smaller rate are a subset of those at a
/// larger one.
fn sweep(cfg: &ExperimentConfig, g: &Graph) -> Result<Table, LabError> {
    let trials = cfg.trials_or(50);
    let n = g.node_count() as f64;
    let mut t = Table::new(
        "sweep",
        vec![
            "q",
            "trials",
            "mean_c1_fraction",
            "sd_c1_fraction",
            "mean_c2_fraction",
            "sd_c2_fraction",
        ],
    );
    for q in cfg.q_grid() {
        let s = component_size_stats(g, q, trials, cfg.seed)?;
        t.push(vec![
            num(q),
            trials.to_string(),
            num(s.mean_largest() / n),
            num(s.sd_largest() / n),
            num(s.mean_second() / n),
            num(s.sd_second() / n),
        ]);
    }
    Ok(t)
}

fn membership(cfg: &ExperimentConfig, loaded: &LoadedGraph) -> Result<Vec<Table>, LabError> {
    let g = &loaded.graph;
    let q = cfg.q();
    let trials = cfg.trials_or(1000);
    let est = estimate_giant_membership(g, q, trials, cfg.seed)?;
    let n = g.node_count();
    let mut summary = Table::new(
        "membership",
        vec!["network", "q", "trials", "threshold", "nodes", "percent"],
    );
    for th in cfg.thresholds() {
        let count = est.count_at_least(th);
        summary.push(vec![
            cfg.network_label(),
            num(q),
            trials.to_string(),
            num(th),
            count.to_string(),
            num(100.0 * count as f64 / n as f64),
        ]);
    }
    let mut nodes = Table::new(
        "membership_nodes",
        vec!["node", "label", "degree", "in_giant", "frequency"],
    );
    for v in 0..n {
        nodes.push(vec![
            v.to_string(),
            loaded.labels[v].clone(),
            g.degree(v).to_string(),
            est.counts()[v].to_string(),
            num(est.frequency(v)),
        ]);
    }
    Ok(vec![summary, nodes])
}

fn audit(cfg: &ExperimentConfig, g: &Graph) -> Result<Vec<Table>, LabError> {
    let params = cfg.cascade();
    let trials = cfg.trials_or(2000);
    let epsilon = cfg.epsilon.map_or(1.0, |e| e.0);
    let protected = cfg.protected.clone().unwrap_or_else(|| vec![0]);
    let n = g.node_count();
    let scale = wasserstein_mechanism_scale(g, &params, &protected, trials, cfg.seed)?;
    // Same master seed: the giant split is read off the same simulated worlds.
    let split = conditional_giant_distributions(g, &params, trials, cfg.seed)?;
    let comparison = cfg.mechanism.unwrap_or_default().resolve(n);
    let z0 = push_through_mechanism(&split.inactive, &comparison, n as u64)?;
    let z1 = push_through_mechanism(&split.active, &comparison, n as u64)?;
    let test = hypothesis_test_error(&z0, &z1);

    let mut report = Table::new("audit", vec!["quantity", "value"]);
    let mut row = |k: &str, v: String| report.push(vec![k.to_owned(), v]);
    row("network", cfg.network_label());
    row("nodes", n.to_string());
    row("q", num(params.q));
    row("seed_count", params.seed_count.to_string());
    row("trials", trials.to_string());
    row("epsilon", num(epsilon));
    row("wasserstein_scale", num(scale.sensitivity));
    row("wasserstein_scale_fraction", num(scale.sensitivity / n as f64));
    row("mean_abs_noise", num(scale.mean_abs_noise(epsilon)));
    row("theta_inactive", split.theta_inactive().to_string());
    row("theta_active", split.theta_active().to_string());
    row("theta_midpoint", num(split.midpoint()));
    row("theta_gap", split.gap().to_string());
    row("giant_inactive_samples", split.inactive_samples.to_string());
    row("giant_active_samples", split.active_samples.to_string());
    row("comparison_mechanism", comparison.kind().to_owned());
    row(
        "comparison_scale",
        comparison.noise_scale().map_or_else(String::new, num),
    );
    row("comparison_tvd", num(test.tvd));
    row("comparison_test_error", num(test.test_error));

    let mut nodes = Table::new(
        "audit_nodes",
        vec!["node", "status", "w_inf", "inactive_samples", "active_samples"],
    );
    let mut rows: Vec<(usize, Vec<String>)> = scale
        .per_node
        .iter()
        .map(|d| {
            let r = vec![
                d.node.to_string(),
                "ok".into(),
                num(d.distance),
                d.inactive_samples.to_string(),
                d.active_samples.to_string(),
            ];
            (d.node, r)
        })
        .collect();
    for (v, branch) in &scale.degenerate {
        rows.push((
            *v,
            vec![
                v.to_string(),
                format!("no samples with {branch}"),
                String::new(),
                String::new(),
                String::new(),
            ],
        ));
    }
    rows.sort_by_key(|(v, _)| *v);
    for (_, r) in rows {
        nodes.push(r);
    }
    Ok(vec![report, nodes])
}

fn attack(cfg: &ExperimentConfig, g: &Graph) -> Result<Vec<Table>, LabError> {
    let n = g.node_count();
    let mechanism = cfg.mechanism.unwrap_or_default().resolve(n);
    let setup = AttackSetup::new(cfg.cascade(), mechanism, cfg.floors(), cfg.trials_or(1000));
    let r = evaluate_attack(g, &setup, cfg.seed)?;

    let mut summary = Table::new("attack", vec!["quantity", "value"]);
    let mut row = |k: &str, v: String| summary.push(vec![k.to_owned(), v]);
    row("network", cfg.network_label());
    row("mechanism", mechanism.kind().to_owned());
    row("trials", r.trials.to_string());
    row("threshold", num(r.config.threshold));
    row("max_error", num(r.config.max_error));
    row("giant_active_trials", r.giant_active_trials.to_string());
    row("status_accuracy", num(r.status_accuracy()));
    row("status_baseline", num(r.status_baseline()));

    let mut floors = Table::new(
        "attack_floors",
        vec![
            "floor",
            "predicted_nodes",
            "coverage",
            "predictions",
            "correct",
            "accuracy",
        ],
    );
    for f in &r.floors {
        floors.push(vec![
            num(f.floor),
            f.predicted_nodes.to_string(),
            num(f.coverage(n)),
            f.predictions.to_string(),
            f.correct.to_string(),
            f.precision().map_or_else(String::new, num),
        ]);
    }
    Ok(vec![summary, floors])
}
