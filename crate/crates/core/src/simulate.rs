//! Seeded Monte Carlo for the birth-death level process, the jump process
//! on the graph, and the discrete-time up/down chains, with stationarity
//! diagnostics against exact measures.
//!
//! Stepping is exponential-clock (event-driven): per-state rates are finite
//! sums over covers/cocovers, so event times are exact and there is no
//! discretization error. The generator is ChaCha12, seeded from a `u64`;
//! replicas use independent streams of the same seed, so runs are
//! reproducible byte for byte.

use crate::error::{KerovError, Result};
use crate::graph::VertexId;
use crate::kerov::KerovData;
use crate::measures::{down_kernel, up_kernel, MixedMeasure};
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub params: String,
    /// Jump records `(time, state)`; states are level numbers for the
    /// birth-death process and canonical vertex codes for graph processes.
    pub records: Vec<(f64, String)>,
    pub capped: bool,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn exp_sample(rng: &mut ChaCha12Rng, rate: f64) -> f64 {
    // inverse transform; u in (0,1]
    let u: f64 = 1.0 - rng.random::<f64>();
    -u.ln() / rate
}

fn pick(rng: &mut ChaCha12Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Birth-death process on the level index with rates
/// `q_{n,n-1} = n/(1-xi)`, `q_{n,n+1} = xi(n+t)/(1-xi)`.
pub fn simulate_birth_death(
    t: f64,
    xi: f64,
    t_end: f64,
    seed: u64,
    stream: u64,
    start: u32,
    cap: u32,
) -> Result<Trajectory> {
    if t <= 0.0 || !(0.0..1.0).contains(&xi) || xi == 0.0 || t_end <= 0.0 {
        return Err(KerovError::OutOfRange("need t > 0, xi in (0,1), T > 0".into()));
    }
    let mut rng = rng_for(seed, stream);
    let mut state = start;
    let mut time = 0.0;
    let mut records = vec![(0.0, state.to_string())];
    let mut capped = false;
    loop {
        let down = state as f64 / (1.0 - xi);
        let up = xi * (state as f64 + t) / (1.0 - xi);
        let total = down + up;
        time += exp_sample(&mut rng, total);
        if time > t_end {
            break;
        }
        let u: f64 = rng.random();
        if u < down / total {
            state -= 1;
        } else {
            state += 1;
        }
        records.push((time, state.to_string()));
        if state >= cap {
            capped = true;
            break;
        }
    }
    Ok(Trajectory {
        seed,
        stream,
        params: format!("birth_death(t={t},xi={xi})"),
        records,
        capped,
    })
}

/// Precomputed float kernel tables for the jump process and up/down chains.
pub struct SimTables {
    pub t: f64,
    up_targets: Vec<Vec<VertexId>>,
    up_probs: Vec<Vec<f64>>,
    down_targets: Vec<Vec<VertexId>>,
    down_probs: Vec<Vec<f64>>,
}

impl SimTables {
    pub fn new(k: &KerovData) -> Result<Self> {
        let g = k.graph();
        let mut up_targets = Vec::with_capacity(g.verts.len());
        let mut up_probs = Vec::with_capacity(g.verts.len());
        let mut down_targets = Vec::with_capacity(g.verts.len());
        let mut down_probs = Vec::with_capacity(g.verts.len());
        for v in 0..g.verts.len() as VertexId {
            if g.level(v) < g.depth {
                let row = up_kernel(k, v)?;
                up_targets.push(row.iter().map(|(x, _)| *x).collect());
                up_probs.push(row.iter().map(|(_, p)| p.to_f64()).collect());
            } else {
                up_targets.push(Vec::new());
                up_probs.push(Vec::new());
            }
            let row = down_kernel(&k.wg, v);
            down_targets.push(row.iter().map(|(x, _)| *x).collect());
            down_probs.push(row.iter().map(|(_, p)| p.to_f64()).collect());
        }
        Ok(SimTables {
            t: k.t_param().to_f64(),
            up_targets,
            up_probs,
            down_targets,
            down_probs,
        })
    }
}

/// Jump process on the graph: the level evolves by the birth-death clock;
/// an up move lands by the up kernel, a down move by the down kernel.
pub fn simulate_jump(
    k: &KerovData,
    tables: &SimTables,
    xi: f64,
    t_end: f64,
    seed: u64,
    stream: u64,
    start: VertexId,
) -> Result<(Trajectory, VertexId)> {
    let g = k.graph();
    let mut rng = rng_for(seed, stream);
    let mut state = start;
    let mut time = 0.0;
    let mut records = vec![(0.0, g.vertex(state).code())];
    let mut capped = false;
    loop {
        let n = g.level(state) as f64;
        let down = n / (1.0 - xi);
        let up = xi * (n + tables.t) / (1.0 - xi);
        let total = down + up;
        time += exp_sample(&mut rng, total);
        if time > t_end {
            break;
        }
        let u: f64 = rng.random();
        if u < down / total {
            let i = pick(&mut rng, &tables.down_probs[state as usize]);
            state = tables.down_targets[state as usize][i];
        } else {
            if g.level(state) >= g.depth {
                capped = true;
                break;
            }
            let i = pick(&mut rng, &tables.up_probs[state as usize]);
            state = tables.up_targets[state as usize][i];
        }
        records.push((time, g.vertex(state).code()));
    }
    Ok((
        Trajectory {
            seed,
            stream,
            params: format!("jump({},xi={xi})", k.spec),
            records,
            capped,
        },
        state,
    ))
}

/// Discrete-time up/down chain on one level.
pub fn simulate_updown(
    k: &KerovData,
    tables: &SimTables,
    n: u32,
    steps: u64,
    seed: u64,
    stream: u64,
    start: VertexId,
) -> Result<Vec<VertexId>> {
    let g = k.graph();
    if g.level(start) != n {
        return Err(KerovError::OutOfRange("start vertex not on the requested level".into()));
    }
    if n + 1 > g.depth {
        return Err(KerovError::Truncated { level: n + 1, depth: g.depth });
    }
    let mut rng = rng_for(seed, stream);
    let mut state = start;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(state);
    for _ in 0..steps {
        let i = pick(&mut rng, &tables.up_probs[state as usize]);
        let nu = tables.up_targets[state as usize][i];
        let j = pick(&mut rng, &tables.down_probs[nu as usize]);
        state = tables.down_targets[nu as usize][j];
        out.push(state);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct StationarityReport {
    pub total_variation: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub samples: u64,
    /// `(state, observed count, expected probability)`.
    pub table: Vec<(String, u64, f64)>,
}

/// Compare empirical counts against an exact distribution (both restricted
/// to the listed states; the exact masses are renormalized over them).
pub fn stationarity_report(
    counts: &[(String, u64)],
    exact: &[(String, f64)],
) -> StationarityReport {
    let total: u64 = counts.iter().map(|(_, c)| c).sum();
    let mass: f64 = exact.iter().map(|(_, p)| p).sum();
    let mut tv = 0.0;
    let mut chi = 0.0;
    let mut dof: usize = 0;
    let mut table = Vec::new();
    let count_of = |s: &str| counts.iter().find(|(k, _)| k == s).map(|(_, c)| *c).unwrap_or(0);
    for (state, p) in exact {
        let p = p / mass;
        let c = count_of(state);
        let emp = c as f64 / total as f64;
        tv += (emp - p).abs();
        let expected = p * total as f64;
        if expected > 5.0 {
            chi += (c as f64 - expected).powi(2) / expected;
            dof += 1;
        }
        table.push((state.clone(), c, p));
    }
    // empirical mass on states outside the exact support
    let known: f64 = exact
        .iter()
        .map(|(s, _)| count_of(s) as f64 / total as f64)
        .sum();
    tv += 1.0 - known;
    StationarityReport {
        total_variation: tv / 2.0,
        chi_square: chi,
        dof: dof.saturating_sub(1),
        samples: total,
        table,
    }
}

/// Two-sample chi-square statistic over a common set of categories.
pub fn two_sample_chi_square(a: &[(String, u64)], b: &[(String, u64)]) -> (f64, usize) {
    let mut keys: Vec<&String> = a.iter().map(|(k, _)| k).chain(b.iter().map(|(k, _)| k)).collect();
    keys.sort();
    keys.dedup();
    let na: u64 = a.iter().map(|(_, c)| c).sum();
    let nb: u64 = b.iter().map(|(_, c)| c).sum();
    let get = |xs: &[(String, u64)], k: &String| xs.iter().find(|(s, _)| s == k).map(|(_, c)| *c).unwrap_or(0);
    let mut chi = 0.0;
    let mut dof: usize = 0;
    for k in keys {
        let ca = get(a, k) as f64;
        let cb = get(b, k) as f64;
        let tot = ca + cb;
        if tot < 10.0 {
            continue;
        }
        let ea = tot * na as f64 / (na + nb) as f64;
        let eb = tot * nb as f64 / (na + nb) as f64;
        chi += (ca - ea).powi(2) / ea + (cb - eb).powi(2) / eb;
        dof += 1;
    }
    (chi, dof.saturating_sub(1))
}

/// Export as JSON lines `(time, state-code)`.
pub fn trajectory_jsonl(t: &Trajectory) -> String {
    let mut out = String::new();
    for (time, code) in &t.records {
        out.push_str(&serde_json::json!([time, code]).to_string());
        out.push('\n');
    }
    out
}
