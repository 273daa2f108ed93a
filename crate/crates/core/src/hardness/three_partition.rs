use crate::graph::Graph;
use crate::model::{validate_schedule, Instance, Schedule};

use super::{GadgetRegistry, HardnessError, Timeline};

/// Preprocessed 3-Partition input: `3n` sizes summing to `n * phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePartitionInstance {
    pub n: usize,
    pub betas: Vec<usize>,
    pub phi: usize,
}

impl ThreePartitionInstance {
    /// Makespan limit of the generated instance.
    pub fn limit(&self) -> usize {
        self.n * self.phi + 3 * self.n
    }

    fn check(&self) -> Result<(), HardnessError> {
        if self.n < 2 || self.betas.len() != 3 * self.n {
            return Err(HardnessError::Input(format!("need 3n sizes with n >= 2, got {}", self.betas.len())));
        }
        if self.betas.iter().sum::<usize>() != self.n * self.phi {
            return Err(HardnessError::Input("sizes do not sum to n * phi".into()));
        }
        for &b in &self.betas {
            if b % 6 != 0 || 4 * b <= self.phi || 2 * b >= self.phi {
                return Err(HardnessError::Input(format!(
                    "size {b} is not a multiple of 6 strictly between phi/4 and phi/2"
                )));
            }
        }
        Ok(())
    }
}

/// Shifts every size by twice the raw target sum and scales by 6.
pub fn preprocess_three_partition(raw: &[usize]) -> Result<ThreePartitionInstance, HardnessError> {
    if raw.is_empty() || !raw.len().is_multiple_of(3) {
        return Err(HardnessError::Input(format!("{} sizes is not a positive multiple of 3", raw.len())));
    }
    let n = raw.len() / 3;
    if n < 2 {
        return Err(HardnessError::Input("n = 1 is not supported".into()));
    }
    if raw.contains(&0) {
        return Err(HardnessError::Input("sizes must be positive".into()));
    }
    let total: usize = raw.iter().sum();
    if !total.is_multiple_of(n) {
        return Err(HardnessError::Input(format!("sum {total} is not divisible by n = {n}")));
    }
    let phi_raw = total / n;
    let shifted: Vec<usize> = raw.iter().map(|&b| b + 2 * phi_raw).collect();
    let phi_shifted = phi_raw + 6 * phi_raw;
    let tp = ThreePartitionInstance { n, betas: shifted.iter().map(|&b| 6 * b).collect(), phi: 6 * phi_shifted };
    tp.check()?;
    Ok(tp)
}

struct Builder {
    graph: Graph,
    start: Vec<usize>,
    target: Vec<usize>,
    reg: GadgetRegistry,
}

impl Builder {
    fn vertex(&mut self, name: String) -> Result<usize, HardnessError> {
        let v = self.graph.add_vertex();
        self.reg.add_vertex(name, v)?;
        Ok(v)
    }

    fn leaf(&mut self, hub: usize, name: String) -> Result<usize, HardnessError> {
        let v = self.vertex(name)?;
        self.graph.add_edge(hub, v).expect("fresh leaf");
        Ok(v)
    }

    fn agent(&mut self, s: usize, t: usize) -> usize {
        self.start.push(s);
        self.target.push(t);
        self.start.len() - 1
    }

    /// Red star: one rotating edge per size; the first agent of the first
    /// edge starts on the hub and its first leaf starts empty.
    fn red_star(&mut self, hub: usize, tag: &str, sizes: &[usize]) -> Result<(), HardnessError> {
        for (e, &size) in sizes.iter().enumerate() {
            let leaves: Vec<usize> =
                (1..=size).map(|j| self.leaf(hub, format!("{tag}.e{}.v{j}", e + 1))).collect::<Result<_, _>>()?;
            let mut agents = Vec::with_capacity(size);
            for j in 0..size {
                let s = if e == 0 && j == 0 { hub } else { leaves[j] };
                agents.push(self.agent(s, leaves[(j + 1) % size]));
            }
            self.reg.add_group(format!("A({tag}.e{})", e + 1), agents)?;
        }
        Ok(())
    }

    fn bow_tie(&mut self, hub: usize, tag: &str, size: usize) -> Result<(), HardnessError> {
        let leaves: Vec<usize> =
            (1..=2 * size).map(|j| self.leaf(hub, format!("T({tag}).w{j}"))).collect::<Result<_, _>>()?;
        let agents = (0..size).map(|i| self.agent(leaves[i], leaves[size + i])).collect();
        self.reg.add_group(format!("AT({tag})"), agents)
    }

    /// Leaves on `from` and `to`, one agent per pair.
    fn crossing(&mut self, from: usize, to: usize, tag: &str, count: usize) -> Result<(), HardnessError> {
        let near: Vec<usize> = (1..=count).map(|i| self.leaf(from, format!("{tag}{i}"))).collect::<Result<_, _>>()?;
        let far: Vec<usize> =
            (count + 1..=2 * count).map(|i| self.leaf(to, format!("{tag}{i}"))).collect::<Result<_, _>>()?;
        let agents = (0..count).map(|i| self.agent(near[i], far[i])).collect();
        self.reg.add_group(format!("A{}", tag.to_uppercase()), agents)
    }
}

pub fn build_three_partition_instance(
    tp: &ThreePartitionInstance,
) -> Result<(Instance, GadgetRegistry), HardnessError> {
    tp.check()?;
    let n = tp.n;
    let limit = tp.limit();
    let mut b = Builder { graph: Graph::new(0), start: Vec::new(), target: Vec::new(), reg: GadgetRegistry::new() };
    let u: Vec<usize> = (1..=9).map(|i| b.vertex(format!("u{i}"))).collect::<Result<_, _>>()?;
    for (x, y) in [(1, 2), (2, 3), (3, 4), (4, 5), (2, 6), (2, 8), (2, 9), (4, 7)] {
        b.graph.add_edge(u[x - 1], u[y - 1]).expect("base tree");
    }
    b.red_star(u[0], "R1", &tp.betas)?;
    let mut z = vec![tp.phi + 2; n];
    z[0] = tp.phi;
    z[n - 1] = tp.phi + 4;
    b.red_star(u[6], "R7", &z)?;
    b.crossing(u[4], u[5], "x", 2 * n - 2)?;
    b.crossing(u[7], u[8], "y", 4 * n)?;
    for (i, size) in [(8, limit - 1 - 4 * n), (9, limit - 1 - 4 * n)] {
        b.bow_tie(u[i - 1], &format!("u{i}"), size)?;
    }
    for i in [3, 5, 6] {
        b.bow_tie(u[i - 1], &format!("u{i}"), limit - 1 - (2 * n - 2))?;
    }
    let inst = Instance::new(b.graph, b.start, b.target, Some(limit))?;
    Ok((inst, b.reg))
}

/// Routes of one red edge resolved in rotation, first leg at turn `tau + 1`
/// (`tau = -1` when its first agent already waits on the hub).
fn red_edge_routes(
    inst: &Instance,
    agents: &[usize],
    hub: usize,
    gate: usize,
    tau: i64,
) -> Vec<(usize, usize, Vec<usize>)> {
    let c = agents.len();
    let leaf = |j: usize| -> usize {
        // Leaf j (1-based) is the start of agent j, except the first leaf,
        // which is the target of the last agent.
        if j == 1 {
            inst.target[agents[c - 1]]
        } else {
            inst.start[agents[j - 1]]
        }
    };
    let at = |offset: i64| -> usize { (tau + offset) as usize };
    let mut routes = Vec::with_capacity(c);
    let first = agents[0];
    let mut first_route = Vec::with_capacity(c + 3);
    let depart = if tau < 0 {
        0
    } else {
        first_route.push(leaf(1));
        at(0)
    };
    first_route.push(hub);
    first_route.extend(std::iter::repeat_n(gate, c - 1));
    first_route.push(hub);
    first_route.push(inst.target[first]);
    routes.push((first, depart, first_route));
    routes.push((agents[c - 1], at(1), vec![leaf(c), hub, leaf(1)]));
    for i in (2..c).rev() {
        routes.push((agents[i - 1], at(c as i64 - i as i64 + 1), vec![leaf(i), hub, leaf(i + 1)]));
    }
    routes
}

/// Commits a red star resolved edge by edge in `order`, overlapping the last
/// turn of each edge with the first turn of the next.
fn resolve_red_star(
    tl: &mut Timeline,
    inst: &Instance,
    edges: &[&[usize]],
    order: &[usize],
    hub: usize,
    gate: usize,
) -> Result<(), HardnessError> {
    let mut tau: i64 = -1;
    for &e in order {
        for (a, depart, route) in red_edge_routes(inst, edges[e], hub, gate, tau) {
            tl.commit(a, depart, &route)?;
        }
        tau += edges[e].len() as i64 + 1;
    }
    Ok(())
}

/// Witness schedule of makespan exactly `n * phi + 3n` from a 3-partition
/// given as index triples into the sizes.
pub fn three_partition_forward_schedule(
    inst: &Instance,
    reg: &GadgetRegistry,
    partition: &[[usize; 3]],
) -> Result<Schedule, HardnessError> {
    let edges =
        |tag: &str| -> Vec<&[usize]> { (1..).map_while(|e| reg.group(&format!("A({tag}.e{e})")).ok()).collect() };
    let r1 = edges("R1");
    let r7 = edges("R7");
    let n = r1.len() / 3;
    let sizes: Vec<usize> = r1.iter().map(|g| g.len()).collect();
    let phi = sizes.iter().sum::<usize>() / n.max(1);
    let limit = n * phi + 3 * n;

    if partition.len() != n {
        return Err(HardnessError::Certificate(format!("expected {n} triples, got {}", partition.len())));
    }
    let mut seen = vec![false; 3 * n];
    for triple in partition {
        for &i in triple {
            if i >= 3 * n || std::mem::replace(&mut seen[i], true) {
                return Err(HardnessError::Certificate(format!("index {i} is out of range or repeated")));
            }
        }
        let sum: usize = triple.iter().map(|&i| sizes[i]).sum();
        if sum != phi {
            return Err(HardnessError::Certificate(format!("triple {triple:?} sums to {sum}, not {phi}")));
        }
    }
    // The edge whose agent waits on the hub goes first.
    let lead = partition.iter().position(|t| t.contains(&0)).expect("every index is covered");
    let mut order: Vec<usize> = vec![0];
    order.extend(partition[lead].iter().copied().filter(|&i| i != 0));
    for (j, triple) in partition.iter().enumerate() {
        if j != lead {
            order.extend(triple.iter().copied());
        }
    }

    let u = |i: usize| reg.vertex(&format!("u{i}"));
    let mut tl = Timeline::new(inst.graph.n(), &inst.start, limit);
    resolve_red_star(&mut tl, inst, &r1, &order, u(1)?, u(2)?)?;
    let identity: Vec<usize> = (0..r7.len()).collect();
    resolve_red_star(&mut tl, inst, &r7, &identity, u(7)?, u(4)?)?;

    let crossings = [("AX", vec![u(5)?, u(4)?, u(3)?, u(2)?, u(6)?]), ("AY", vec![u(8)?, u(2)?, u(9)?])];
    for (group, corridor) in crossings {
        let mut from = 0;
        for &a in reg.group(group)? {
            let mut route = vec![inst.start[a]];
            route.extend(&corridor);
            route.push(inst.target[a]);
            let depart = tl
                .earliest(a, from, &route)
                .ok_or_else(|| HardnessError::Witness(format!("no slot for agent {a} of {group}")))?;
            tl.commit(a, depart, &route)?;
            from = depart;
        }
    }
    for hub in [8, 9, 3, 5, 6] {
        let gate = u(hub)?;
        let mut from = 0;
        for &a in reg.group(&format!("AT(u{hub})"))? {
            let route = [inst.start[a], gate, inst.target[a]];
            let depart = tl
                .earliest(a, from, &route)
                .ok_or_else(|| HardnessError::Witness(format!("no slot for bow-tie agent {a} on u{hub}")))?;
            tl.commit(a, depart, &route)?;
            from = depart;
        }
    }
    let sched = tl.into_schedule();
    validate_schedule(inst, &sched).map_err(|v| HardnessError::Witness(v.to_string()))?;
    Ok(sched)
}
