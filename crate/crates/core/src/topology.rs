//! Network-scale protection: connectivity, key nodes, isolation, rerouting
//! around a disrupted region and tier-ordered traffic shedding.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::service::SlaTier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// Undirected graph. Nodes are kept sorted by id so that index order and id
/// order agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTopology", into = "RawTopology")]
pub struct Topology {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: BTreeMap<NodeId, usize>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl TryFrom<RawTopology> for Topology {
    type Error = Error;

    fn try_from(raw: RawTopology) -> Result<Self> {
        Topology::new(raw.nodes, raw.edges)
    }
}

impl From<Topology> for RawTopology {
    fn from(t: Topology) -> Self {
        RawTopology { nodes: t.nodes, edges: t.edges }
    }
}

impl Topology {
    pub fn new(mut nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        nodes.sort_by_key(|n| n.id);
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(invalid(format!("duplicate node id {}", n.id)));
            }
        }
        let mut adjacency = vec![BTreeSet::new(); nodes.len()];
        for e in &edges {
            let (Some(&a), Some(&b)) = (index.get(&e.a), index.get(&e.b)) else {
                return Err(invalid(format!("edge {}-{} references an unknown node", e.a, e.b)));
            };
            if a == b {
                return Err(invalid(format!("self-loop on node {}", e.a)));
            }
            if !(e.capacity > 0.0) {
                return Err(invalid(format!("edge {}-{} needs capacity > 0", e.a, e.b)));
            }
            if !adjacency[a].insert(b) {
                return Err(invalid(format!("duplicate edge {}-{}", e.a, e.b)));
            }
            adjacency[b].insert(a);
        }
        Ok(Self { nodes, edges, index, adjacency })
    }

    /// Nodes `0..n` without coordinates and unit-capacity edges.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let nodes = (0..n).map(|i| Node { id: NodeId(i), x: None, y: None }).collect();
        let edges = edges.iter().map(|&(a, b)| Edge { a: NodeId(a), b: NodeId(b), capacity: 1.0 }).collect();
        Self::new(nodes, edges)
    }

    /// `cols × rows` lattice; node `r·cols + c` sits at `(c, r)`.
    pub fn grid(cols: u32, rows: u32) -> Result<Self> {
        let id = |c: u32, r: u32| NodeId(r * cols + c);
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                nodes.push(Node { id: id(c, r), x: Some(c as f64), y: Some(r as f64) });
                if c + 1 < cols {
                    edges.push(Edge { a: id(c, r), b: id(c + 1, r), capacity: 1.0 });
                }
                if r + 1 < rows {
                    edges.push(Edge { a: id(c, r), b: id(c, r + 1), capacity: 1.0 });
                }
            }
        }
        Self::new(nodes, edges)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let i = self.index.get(&id).copied();
        i.into_iter().flat_map(move |i| self.adjacency[i].iter().map(|&j| self.nodes[j].id))
    }

    fn idx(&self, id: NodeId) -> Result<usize> {
        self.index.get(&id).copied().ok_or_else(|| invalid(format!("unknown node {id}")))
    }

    /// Component sizes (descending) of the subgraph on nodes where `alive`.
    fn components(&self, alive: &[bool]) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut sizes = Vec::new();
        for start in 0..self.nodes.len() {
            if !alive[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in &self.adjacency[v] {
                    if alive[w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.components(&vec![true; self.nodes.len()]).len() == 1
    }
}

/// Unit-capacity max-flow on a split-node graph.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn add_arc(&mut self, u: usize, v: usize, cap: u32) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Edmonds–Karp, stopping once the flow reaches `limit`.
    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0;
        while flow < limit {
            let mut parent_arc = vec![usize::MAX; self.head.len()];
            let mut visited = vec![false; self.head.len()];
            visited[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &arc in &self.head[u] {
                    let v = self.to[arc];
                    if self.cap[arc] > 0 && !visited[v] {
                        visited[v] = true;
                        parent_arc[v] = arc;
                        queue.push_back(v);
                    }
                }
            }
            if !visited[t] {
                break;
            }
            // Bottleneck is always 1 through a split vertex; s/t arcs are large.
            let mut v = t;
            let mut bottleneck = u32::MAX;
            while v != s {
                let arc = parent_arc[v];
                bottleneck = bottleneck.min(self.cap[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = t;
            while v != s {
                let arc = parent_arc[v];
                self.cap[arc] -= bottleneck;
                self.cap[arc ^ 1] += bottleneck;
                v = self.to[arc ^ 1];
            }
            flow += bottleneck as usize;
        }
        flow
    }
}

/// Minimum number of internally vertex-disjoint paths between two
/// non-adjacent nodes, i.e. the size of a minimum separating node set.
fn local_connectivity(g: &Topology, s: usize, t: usize, limit: usize) -> usize {
    let n = g.node_count();
    let big = n as u32 + 1;
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let c = if v == s || v == t { big } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, c);
        for &w in &g.adjacency[v] {
            net.add_arc(2 * v + 1, 2 * w, big);
        }
    }
    net.max_flow(2 * s + 1, 2 * t, limit)
}

/// Fewest node removals that disconnect the graph (`n − 1` when complete).
pub fn vertex_connectivity(g: &Topology) -> Result<usize> {
    let n = g.node_count();
    if n < 2 {
        return Err(invalid("vertex connectivity needs at least two nodes"));
    }
    let mut best = n - 1;
    for s in 0..n {
        for t in (s + 1)..n {
            if g.adjacency[s].contains(&t) {
                continue;
            }
            best = best.min(local_connectivity(g, s, t, best));
            if best == 0 {
                return Ok(0);
            }
        }
    }
    Ok(best)
}

/// Articulation points via DFS low-link.
pub fn critical_nodes(g: &Topology) -> Result<BTreeSet<NodeId>> {
    if g.node_count() == 0 || !g.is_connected() {
        return Err(Error::Precondition("critical-node analysis needs a connected graph".into()));
    }
    let n = g.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0;

    // Iterative DFS: (vertex, parent, neighbor iterator position).
    let adj: Vec<Vec<usize>> = g.adjacency.iter().map(|s| s.iter().copied().collect()).collect();
    let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
    disc[0] = timer;
    low[0] = timer;
    timer += 1;
    let mut root_children = 0;
    while let Some(top) = stack.last_mut() {
        let (v, parent) = (top.0, top.1);
        if top.2 < adj[v].len() {
            let w = adj[v][top.2];
            top.2 += 1;
            if disc[w] == usize::MAX {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                if v == 0 {
                    root_children += 1;
                }
                stack.push((w, v, 0));
            } else if w != parent {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if parent != 0 && low[v] >= disc[parent] {
                    is_cut[parent] = true;
                }
            }
        }
    }
    if root_children > 1 {
        is_cut[0] = true;
    }
    Ok((0..n).filter(|&v| is_cut[v]).map(|v| g.nodes[v].id).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub nodes: usize,
    pub connected: bool,
    /// Largest first.
    pub component_sizes: Vec<usize>,
}

/// Drops `remove` and its incident edges.
pub fn isolate(g: &Topology, remove: &[NodeId]) -> Result<(Topology, ConnectivityReport)> {
    let gone: BTreeSet<NodeId> = remove.iter().copied().collect();
    if let Some(bad) = gone.iter().find(|id| !g.contains(**id)) {
        return Err(invalid(format!("cannot remove unknown node {bad}")));
    }
    let nodes: Vec<Node> = g.nodes.iter().filter(|n| !gone.contains(&n.id)).cloned().collect();
    let edges: Vec<Edge> = g.edges.iter().filter(|e| !gone.contains(&e.a) && !gone.contains(&e.b)).cloned().collect();
    let residual = Topology::new(nodes, edges)?;
    let sizes = residual.components(&vec![true; residual.node_count()]);
    let report =
        ConnectivityReport { nodes: residual.node_count(), connected: sizes.len() == 1, component_sizes: sizes };
    Ok((residual, report))
}

/// Area a reroute must avoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DisruptionRegion {
    /// Nodes strictly inside the circle are affected; nodes without
    /// coordinates never are.
    Circle {
        x: f64,
        y: f64,
        radius: f64,
    },
    Nodes(BTreeSet<NodeId>),
}

impl DisruptionRegion {
    pub fn circle(x: f64, y: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("region radius must be > 0"));
        }
        Ok(Self::Circle { x, y, radius })
    }

    pub fn empty() -> Self {
        Self::Nodes(BTreeSet::new())
    }

    pub fn contains(&self, node: &Node) -> bool {
        match self {
            Self::Circle { x, y, radius } => match (node.x, node.y) {
                (Some(nx), Some(ny)) => (nx - x).hypot(ny - y) < *radius,
                _ => false,
            },
            Self::Nodes(set) => set.contains(&node.id),
        }
    }
}

/// Shortest hop-count path avoiding the region; among equally short paths
/// the one with the lexicographically smallest id sequence.
pub fn reroute_avoiding(
    g: &Topology,
    source: NodeId,
    destination: NodeId,
    region: &DisruptionRegion,
) -> Result<Vec<NodeId>> {
    if let DisruptionRegion::Circle { radius, .. } = region {
        if !(*radius > 0.0) {
            return Err(invalid("region radius must be > 0"));
        }
    }
    let (s, t) = (g.idx(source)?, g.idx(destination)?);
    let allowed: Vec<bool> = g.nodes.iter().map(|n| !region.contains(n)).collect();
    if !allowed[s] || !allowed[t] {
        return Err(invalid("route endpoint lies inside the disruption region"));
    }
    // Distances to the destination.
    let mut dist = vec![usize::MAX; g.node_count()];
    dist[t] = 0;
    let mut queue = VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &w in &g.adjacency[v] {
            if allowed[w] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if dist[s] == usize::MAX {
        return Err(Error::NoRoute { source_id: source.0, destination: destination.0 });
    }
    let mut path = vec![g.nodes[s].id];
    let mut v = s;
    while v != t {
        // Adjacency is ordered by index, which follows id order.
        v = *g.adjacency[v]
            .iter()
            .find(|&&w| allowed[w] && dist[w] == dist[v] - 1)
            .expect("BFS layer has a predecessor");
        path.push(g.nodes[v].id);
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRequest {
    pub id: u32,
    pub source: NodeId,
    pub destination: NodeId,
    pub demand: f64,
    pub tier: SlaTier,
}

impl FlowRequest {
    pub fn new(id: u32, source: NodeId, destination: NodeId, demand: f64, tier: SlaTier) -> Result<Self> {
        if source == destination {
            return Err(invalid(format!("flow {id} has identical endpoints")));
        }
        if !(demand > 0.0 && demand.is_finite()) {
            return Err(invalid(format!("flow {id} needs demand > 0")));
        }
        Ok(Self { id, source, destination, demand, tier })
    }
}

/// Admits flows by tier priority (then flow id) until capacity runs out.
/// Returned in input order.
pub fn shed_traffic(flows: &[FlowRequest], available_capacity: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..flows.len()).collect();
    order.sort_by_key(|&i| (flows[i].tier.priority, flows[i].id));
    let mut remaining = available_capacity.max(0.0);
    let mut admitted = vec![0.0; flows.len()];
    for i in order {
        let grant = flows[i].demand.min(remaining);
        admitted[i] = grant;
        remaining -= grant;
    }
    admitted
}
