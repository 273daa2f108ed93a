use crate::graph::Graph;
use crate::model::{validate_colored_schedule, validate_schedule, ColoredInstance, Group, Instance, Schedule};

use super::{tree_path, GadgetRegistry, HardnessError, Timeline};

/// Pancake flipping input: a permutation of `1..=n` (one-based values) and a
/// flip budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PancakeInstance {
    pub perm: Vec<usize>,
    pub k: usize,
}

impl PancakeInstance {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn n_plus(&self) -> usize {
        self.n() + 2
    }

    /// Makespan limit `3 (n + 2) k`.
    pub fn horizon(&self) -> usize {
        3 * self.n_plus() * self.k
    }
}

/// Where an auxiliary agent ends up relative to the main paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Push,
    Reverse,
    Pop,
}

fn phase_of(i: usize, n_plus: usize) -> Phase {
    match (i % (3 * n_plus)) / n_plus {
        0 => Phase::Push,
        1 => Phase::Reverse,
        _ => Phase::Pop,
    }
}

struct Skeleton {
    graph: Graph,
    reg: GadgetRegistry,
    /// `(family, start, target)` of every auxiliary agent in construction order.
    aux: Vec<(&'static str, usize, usize)>,
    /// `v^A_0 ..= v^A_n`.
    a_path: Vec<usize>,
}

fn skeleton(n: usize, k: usize) -> Result<Skeleton, HardnessError> {
    if n == 0 || k == 0 {
        return Err(HardnessError::Input("need n >= 1 and k >= 1".into()));
    }
    let n_plus = n + 2;
    let l = 3 * n_plus * k;
    let mut graph = Graph::new(0);
    let mut reg = GadgetRegistry::new();
    let mut vertex = |graph: &mut Graph, name: String| -> Result<usize, HardnessError> {
        let v = graph.add_vertex();
        reg.add_vertex(name, v)?;
        Ok(v)
    };
    let center = vertex(&mut graph, "v*".into())?;
    let mut main_path = |graph: &mut Graph, tag: &str, len: usize| -> Result<Vec<usize>, HardnessError> {
        let mut prev = center;
        let mut path = Vec::with_capacity(len + 1);
        for i in 0..=len {
            let v = vertex(graph, format!("v{tag}{i}"))?;
            graph.add_edge(prev, v).expect("fresh vertex");
            path.push(v);
            prev = v;
        }
        Ok(path)
    };
    let a_path = main_path(&mut graph, "A", n)?;
    let b_path = main_path(&mut graph, "B", l)?;
    let c_path = main_path(&mut graph, "C", l)?;
    // Auxiliary paths indexed -L..=L, stored at offset L.
    let mut aux_path = |graph: &mut Graph, tag: &str, anchor: usize, joint: i64| -> Result<Vec<usize>, HardnessError> {
        let mut path: Vec<usize> = Vec::with_capacity(2 * l + 1);
        for i in -(l as i64)..=l as i64 {
            let v = vertex(graph, format!("{tag}{i}"))?;
            if let Some(&prev) = path.last() {
                graph.add_edge(prev, v).expect("fresh vertex");
            }
            path.push(v);
        }
        graph.add_edge(anchor, path[(joint + l as i64) as usize]).expect("fresh vertex");
        Ok(path)
    };
    let ua = aux_path(&mut graph, "uA", a_path[0], -1)?;
    let wa = aux_path(&mut graph, "wA", a_path[0], 1)?;
    let ub = aux_path(&mut graph, "uB", b_path[0], -1)?;
    let uc = aux_path(&mut graph, "uC", c_path[0], -1)?;
    let at = |path: &[usize], i: i64| path[(i + l as i64) as usize];

    let mut aux = Vec::new();
    for i in 1..=l {
        let t = if phase_of(i, n_plus) == Phase::Pop { b_path[l - i] } else { at(&ub, (l - i) as i64) };
        aux.push(("bB", at(&ub, -(i as i64)), t));
    }
    for i in 1..=l {
        let t = if phase_of(i, n_plus) == Phase::Push { c_path[l - i] } else { at(&uc, (l - i) as i64) };
        aux.push(("bC", at(&uc, -(i as i64)), t));
    }
    for i in 1..=l {
        let t = if phase_of(i, n_plus) == Phase::Reverse { at(&wa, (l - i) as i64) } else { at(&ua, (l - i) as i64) };
        aux.push(("bA1", at(&ua, -(i as i64)), t));
    }
    for i in 1..=l {
        if phase_of(i, n_plus) != Phase::Reverse {
            aux.push(("bA2", at(&wa, -(i as i64)), at(&wa, (l - i) as i64)));
        }
    }
    Ok(Skeleton { graph, reg, aux, a_path })
}

fn check_perm(perm: &[usize]) -> Result<(), HardnessError> {
    let mut seen = vec![false; perm.len() + 1];
    for &p in perm {
        if p == 0 || p > perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(HardnessError::Input(format!("{perm:?} is not a permutation of 1..={}", perm.len())));
        }
    }
    Ok(())
}

/// Largest flip count needed for any permutation of length `n` (rounded up).
fn flip_diameter_bound(n: usize) -> usize {
    (18 * n).div_ceil(11)
}

fn register_aux(
    reg: &mut GadgetRegistry,
    aux: &[(&'static str, usize, usize)],
    first: usize,
) -> Result<(), HardnessError> {
    for family in ["bB", "bC", "bA1", "bA2"] {
        let ids: Vec<usize> = aux.iter().enumerate().filter(|(_, e)| e.0 == family).map(|(i, _)| first + i).collect();
        reg.add_group(family, ids)?;
    }
    Ok(())
}

pub fn build_pancake_instance(p: &PancakeInstance) -> Result<(Instance, GadgetRegistry), HardnessError> {
    check_perm(&p.perm)?;
    let n = p.n();
    let Skeleton { graph, mut reg, aux, a_path } = skeleton(n, p.k)?;
    let mut start: Vec<usize> = p.perm.iter().map(|&v| a_path[v]).collect();
    let mut target: Vec<usize> = (1..=n).map(|i| a_path[i]).collect();
    reg.add_group("primary", (0..n).collect())?;
    register_aux(&mut reg, &aux, n)?;
    start.extend(aux.iter().map(|e| e.1));
    target.extend(aux.iter().map(|e| e.2));
    if p.k > flip_diameter_bound(n) {
        reg.flags.push("trivial-yes".into());
    }
    let inst = Instance::new(graph, start, target, Some(p.horizon()))?;
    Ok((inst, reg))
}

fn parse_bits(s: &str) -> Result<Vec<bool>, HardnessError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(HardnessError::Input(format!("{s:?} is not a binary string"))),
        })
        .collect()
}

/// Six groups: primary agents by symbol (zeros, ones), then the auxiliary
/// B, C and the two kinds of A agents.
pub fn build_colored_pancake_instance(
    alpha: &str,
    beta: &str,
    k: usize,
) -> Result<(ColoredInstance, GadgetRegistry), HardnessError> {
    let a = parse_bits(alpha)?;
    let b = parse_bits(beta)?;
    if a.len() != b.len() || a.iter().filter(|&&x| x).count() != b.iter().filter(|&&x| x).count() {
        return Err(HardnessError::Input("strings differ in length or symbol counts".into()));
    }
    let n = a.len();
    let Skeleton { graph, mut reg, aux, a_path } = skeleton(n, k)?;
    let positions = |bits: &[bool], one: bool| -> Vec<usize> {
        (1..=n).filter(|&i| bits[i - 1] == one).map(|i| a_path[i]).collect()
    };
    let mut groups = vec![
        Group { id: 0, starts: positions(&a, false), targets: positions(&b, false) },
        Group { id: 1, starts: positions(&a, true), targets: positions(&b, true) },
    ];
    let zeros = groups[0].starts.len();
    reg.add_group("primary0", (0..zeros).collect())?;
    reg.add_group("primary1", (zeros..n).collect())?;
    register_aux(&mut reg, &aux, n)?;
    for (id, family) in ["bB", "bC", "bA1", "bA2"].into_iter().enumerate() {
        let members: Vec<&(&str, usize, usize)> = aux.iter().filter(|e| e.0 == family).collect();
        groups.push(Group {
            id: id + 2,
            starts: members.iter().map(|e| e.1).collect(),
            targets: members.iter().map(|e| e.2).collect(),
        });
    }
    let horizon = 3 * (n + 2) * k;
    let inst = ColoredInstance::new(graph, groups, Some(horizon))?;
    Ok((inst, reg))
}

/// One leg of a round: every train member slides `steps` vertices along
/// `corridor`, listed from the tail end, with moves in turns `depart + 1..`.
struct Leg {
    depart: usize,
    corridor: Vec<usize>,
    steps: usize,
}

/// The three legs moving the train on `v^A_1..v^A_len` onto the B path, then
/// onto the C path, then back onto the A path.
fn round_legs(reg: &GadgetRegistry, n_plus: usize, round_start: usize, len: usize) -> Result<[Leg; 3], HardnessError> {
    let v = |name: String| reg.vertex(&name);
    let path = |tag: &str, range: Vec<usize>| -> Result<Vec<usize>, HardnessError> {
        range.into_iter().map(|i| v(format!("v{tag}{i}"))).collect()
    };
    let center = v("v*".into())?;
    let corridor = |from: Vec<usize>, to: Vec<usize>| [from, vec![center], to].concat();

    let push = corridor(path("A", (0..=len).rev().collect())?, path("B", (0..len).collect())?);
    let reverse = corridor(path("B", (0..len).rev().collect())?, path("C", (0..len).collect())?);
    let pop = corridor(path("C", (0..len).rev().collect())?, path("A", (0..=len).collect())?);

    let push_at = round_start + 1;
    let reverse_at = (round_start + n_plus - 1).max(push_at + len + 2);
    let pop_at = (round_start + 2 * n_plus - 1).max(reverse_at + len + 1);
    Ok([
        Leg { depart: push_at - 1, corridor: push, steps: len + 2 },
        Leg { depart: reverse_at - 1, corridor: reverse, steps: len + 1 },
        Leg { depart: pop_at - 1, corridor: pop, steps: len + 2 },
    ])
}

/// Composes the witness: auxiliary agents walk straight to their targets and
/// the agents on the A path perform one prefix reversal per round.
fn drive(
    graph: &Graph,
    reg: &GadgetRegistry,
    start: &[usize],
    target_of: &dyn Fn(usize) -> usize,
    primaries: &[usize],
    aux_agents: &[usize],
    flips: &[usize],
) -> Result<Schedule, HardnessError> {
    let n_plus = primaries.len() + 2;
    let horizon = 3 * n_plus * flips.len();
    let mut tl = Timeline::new(graph.n(), start, horizon);
    for &agent in aux_agents {
        tl.commit(agent, 0, &tree_path(graph, start[agent], target_of(agent)))?;
    }
    // Primary trajectories are simulated in full first so that each agent
    // is committed once with its final route.
    let mut track: Vec<Vec<usize>> = primaries.iter().map(|&a| vec![start[a]; horizon + 1]).collect();
    for (round, &len) in flips.iter().enumerate() {
        for leg in round_legs(reg, n_plus, 3 * n_plus * round, len)? {
            for idx in 0..len {
                let member = track
                    .iter()
                    .position(|tr| tr[leg.depart] == leg.corridor[idx])
                    .expect("train member on the corridor");
                for (t, slot) in track[member].iter_mut().enumerate().skip(leg.depart) {
                    *slot = leg.corridor[idx + (t - leg.depart).min(leg.steps)];
                }
            }
        }
    }
    for (&agent, route) in primaries.iter().zip(&track) {
        tl.commit(agent, 0, route)?;
    }
    Ok(tl.into_schedule())
}

fn check_flips(n: usize, k: usize, flips: &[usize]) -> Result<(), HardnessError> {
    if flips.len() != k {
        return Err(HardnessError::Certificate(format!("expected {k} flips, got {}", flips.len())));
    }
    if let Some(&r) = flips.iter().find(|&&r| r == 0 || r > n) {
        return Err(HardnessError::Certificate(format!("flip length {r} outside 1..={n}")));
    }
    Ok(())
}

/// Witness schedule of makespan `3 (n + 2) k` from prefix reversal lengths
/// `r_1..r_k` that sort the permutation.
///
/// Reversing prefixes of the permutation (agent to start position) in the
/// order `r_1..r_k` corresponds to moving the agents on the A path by the
/// same reversals in the opposite order, which is what the rounds do.
pub fn pancake_forward_schedule(
    inst: &Instance,
    reg: &GadgetRegistry,
    flips: &[usize],
) -> Result<Schedule, HardnessError> {
    let primaries = reg.group("primary")?.to_vec();
    let n = primaries.len();
    let k = inst.limit.unwrap_or(0) / (3 * (n + 2));
    check_flips(n, k, flips)?;
    let a_path: Vec<usize> = (0..=n).map(|i| reg.vertex(&format!("vA{i}"))).collect::<Result<_, _>>()?;
    let mut perm: Vec<usize> =
        primaries.iter().map(|&a| a_path.iter().position(|&v| v == inst.start[a]).expect("on the A path")).collect();
    for &r in flips {
        perm[..r].reverse();
    }
    if perm.iter().enumerate().any(|(i, &p)| p != i + 1) {
        return Err(HardnessError::Certificate("flips do not sort the permutation".into()));
    }
    let aux: Vec<usize> = (n..inst.agents()).collect();
    let physical: Vec<usize> = flips.iter().rev().copied().collect();
    let sched = drive(&inst.graph, reg, &inst.start, &|a| inst.target[a], &primaries, &aux, &physical)?;
    validate_schedule(inst, &sched).map_err(|v| HardnessError::Witness(v.to_string()))?;
    Ok(sched)
}

/// Witness for the colored instance from prefix reversal lengths that turn
/// the start string into the target string, applied in the given order.
pub fn colored_pancake_forward_schedule(
    inst: &ColoredInstance,
    reg: &GadgetRegistry,
    flips: &[usize],
) -> Result<Schedule, HardnessError> {
    let n = inst.groups[0].starts.len() + inst.groups[1].starts.len();
    let k = inst.limit.unwrap_or(0) / (3 * (n + 2));
    check_flips(n, k, flips)?;
    let a_path: Vec<usize> = (0..=n).map(|i| reg.vertex(&format!("vA{i}"))).collect::<Result<_, _>>()?;
    let mut bits: Vec<bool> = vec![false; n + 1];
    for &v in &inst.groups[1].starts {
        bits[a_path.iter().position(|&x| x == v).expect("on the A path")] = true;
    }
    for &r in flips {
        bits[1..=r].reverse();
    }
    for &v in &inst.groups[1].targets {
        let p = a_path.iter().position(|&x| x == v).expect("on the A path");
        if !bits[p] {
            return Err(HardnessError::Certificate("flips do not produce the target string".into()));
        }
    }

    let start = inst.start();
    let primaries: Vec<usize> = (0..n).collect();
    let aux: Vec<usize> = (n..start.len()).collect();
    let mut aux_target = vec![usize::MAX; start.len()];
    let mut offset = n;
    for g in &inst.groups[2..] {
        // Each auxiliary group pairs starts and targets in the listed order.
        for (i, &t) in g.targets.iter().enumerate() {
            aux_target[offset + i] = t;
        }
        offset += g.starts.len();
    }
    let sched = drive(&inst.graph, reg, &start, &|a| aux_target[a], &primaries, &aux, flips)?;
    validate_colored_schedule(inst, &sched).map_err(|v| HardnessError::Witness(v.to_string()))?;
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        for (perm, k) in [(vec![2, 1], 1), (vec![3, 1, 2], 2), (vec![1], 3)] {
            let p = PancakeInstance { perm, k };
            let (inst, reg) = build_pancake_instance(&p).unwrap();
            let g = &inst.graph;
            let (n, l) = (p.n(), p.horizon());
            assert!(g.is_tree());
            assert_eq!(g.leaves().len(), 11);
            assert_eq!(g.n(), (n + 1) + 2 * (l + 1) + 1 + 4 * (2 * l + 1));
            assert_eq!(reg.vertex_count(), g.n());
            assert_eq!(reg.flags.contains(&"trivial-yes".to_string()), p.k > flip_diameter_bound(n));
            assert_eq!(inst.agents(), n + 3 * l + 2 * (n + 2) * p.k);
            for a in n..inst.agents() {
                assert_eq!(g.bfs_distances(inst.start[a])[inst.target[a]], l, "agent {a}");
            }
            let center = reg.vertex("v*").unwrap();
            assert_eq!(g.degree(center), 3);
            let rest: Vec<usize> = (0..g.n()).filter(|&v| v != center).collect();
            assert!(!g.induced(&rest).is_connected());
        }
    }

    #[test]
    fn small_witnesses() {
        for (perm, flips) in
            [(vec![2, 1], vec![2]), (vec![1, 2, 3], vec![1]), (vec![3, 1, 2], vec![3, 2]), (vec![2, 3, 1], vec![2, 3])]
        {
            let p = PancakeInstance { perm: perm.clone(), k: flips.len() };
            let (inst, reg) = build_pancake_instance(&p).unwrap();
            let sched = pancake_forward_schedule(&inst, &reg, &flips).unwrap_or_else(|e| panic!("{perm:?}: {e}"));
            assert_eq!(sched.makespan(), p.horizon());
        }
    }

    /// Prefix reversals sorting `perm`, at most two per element.
    fn pancake_sort(perm: &[usize]) -> Vec<usize> {
        let mut p = perm.to_vec();
        let mut flips = Vec::new();
        for size in (2..=p.len()).rev() {
            let at = p.iter().position(|&x| x == size).unwrap() + 1;
            if at == size {
                continue;
            }
            if at > 1 {
                p[..at].reverse();
                flips.push(at);
            }
            p[..size].reverse();
            flips.push(size);
        }
        flips
    }

    #[test]
    fn sorted_by_any_flip_sequence() {
        for perm in [vec![4, 2, 5, 1, 3], vec![6, 5, 4, 3, 2, 1], vec![1, 3, 2, 4]] {
            let flips = pancake_sort(&perm);
            let p = PancakeInstance { perm: perm.clone(), k: flips.len() };
            let (inst, reg) = build_pancake_instance(&p).unwrap();
            let sched = pancake_forward_schedule(&inst, &reg, &flips).unwrap_or_else(|e| panic!("{perm:?}: {e}"));
            assert_eq!(sched.makespan(), p.horizon());
        }
    }

    #[test]
    fn unsorting_flips_are_rejected() {
        let p = PancakeInstance { perm: vec![2, 1, 3], k: 1 };
        let (inst, reg) = build_pancake_instance(&p).unwrap();
        assert!(matches!(pancake_forward_schedule(&inst, &reg, &[3]), Err(HardnessError::Certificate(_))));
        assert!(matches!(pancake_forward_schedule(&inst, &reg, &[2, 1]), Err(HardnessError::Certificate(_))));
    }

    #[test]
    fn gate_census() {
        let p = PancakeInstance { perm: vec![2, 1], k: 2 };
        let (inst, reg) = build_pancake_instance(&p).unwrap();
        let sched = pancake_forward_schedule(&inst, &reg, &[2, 1]).unwrap();
        let n_plus = p.n_plus();
        let aux: Vec<usize> = (p.n()..inst.agents()).collect();
        for (name, phase) in [("vB0", Phase::Pop), ("vA0", Phase::Reverse), ("vC0", Phase::Push)] {
            let v = reg.vertex(name).unwrap();
            for t in 1..p.horizon() {
                let here = sched.at(&inst.start, t);
                let busy = aux.iter().any(|&a| here[a] == v);
                assert_eq!(busy, phase_of(t, n_plus) == phase, "{name} at turn {t}");
            }
        }
    }

    #[test]
    fn colored_groups() {
        let (inst, reg) = build_colored_pancake_instance("0110", "1100", 1).unwrap();
        assert_eq!(inst.groups.len(), 6);
        assert_eq!(inst.groups[0].starts.len(), 2);
        assert_eq!(inst.groups[0].targets.len(), 2);
        let sched = colored_pancake_forward_schedule(&inst, &reg, &[3]).unwrap();
        assert_eq!(sched.makespan(), 3 * 6);
        assert!(build_colored_pancake_instance("01", "00", 1).is_err());
        assert!(colored_pancake_forward_schedule(&inst, &reg, &[2]).is_err());
    }
}
