//! Two independent planarity tests. `lr_planar` (left-right criterion) is
//! the fast check used while building the PMFG; `dmp_planar` (incremental
//! face embedding over biconnected components) is the verification pass.

// ---------------------------------------------------------------------------
// Left-right planarity test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ConflictPair {
    l: Interval,
    r: Interval,
}

struct LrState {
    adj: Vec<Vec<usize>>,
    /// oriented edges created during the orientation phase
    edges: Vec<(usize, usize)>,
    /// (u, v) -> oriented edge id
    edge_index: std::collections::HashMap<(usize, usize), usize>,
    height: Vec<usize>,
    parent_edge: Vec<Option<usize>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    ordered_adj: Vec<Vec<usize>>,
    // testing phase
    s: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<Option<usize>>,
    reff: Vec<Option<usize>>,
}

const UNSET: usize = usize::MAX;

impl LrState {
    fn new(n: usize, edge_list: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edge_list {
            adj[a].push(b);
            adj[b].push(a);
        }
        LrState {
            adj,
            edges: Vec::new(),
            edge_index: std::collections::HashMap::new(),
            height: vec![UNSET; n],
            parent_edge: vec![None; n],
            lowpt: Vec::new(),
            lowpt2: Vec::new(),
            nesting_depth: Vec::new(),
            ordered_adj: vec![Vec::new(); n],
            s: Vec::new(),
            stack_bottom: Vec::new(),
            lowpt_edge: Vec::new(),
            reff: Vec::new(),
        }
    }

    fn new_edge(&mut self, u: usize, v: usize) -> usize {
        let id = self.edges.len();
        self.edges.push((u, v));
        self.edge_index.insert((u, v), id);
        self.lowpt.push(UNSET);
        self.lowpt2.push(UNSET);
        self.nesting_depth.push(0);
        self.stack_bottom.push(0);
        self.lowpt_edge.push(None);
        self.reff.push(None);
        id
    }

    fn orient(&mut self, v: usize) {
        let e = self.parent_edge[v];
        let neighbors = self.adj[v].clone();
        for w in neighbors {
            if self.edge_index.contains_key(&(v, w)) || self.edge_index.contains_key(&(w, v)) {
                continue;
            }
            let vw = self.new_edge(v, w);
            self.lowpt[vw] = self.height[v];
            self.lowpt2[vw] = self.height[v];
            if self.height[w] == UNSET {
                // tree edge
                self.parent_edge[w] = Some(vw);
                self.height[w] = self.height[v] + 1;
                self.orient(w);
            } else {
                // back edge
                self.lowpt[vw] = self.height[w];
            }
            self.nesting_depth[vw] = 2 * self.lowpt[vw] as i64;
            if self.lowpt2[vw] < self.height[v] {
                // chordal: needs to be nested deeper
                self.nesting_depth[vw] += 1;
            }
            if let Some(e) = e {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        !i.is_empty() && self.lowpt[i.high.unwrap()] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.l.low, p.r.low) {
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (Some(l), None) => self.lowpt[l],
            (None, Some(r)) => self.lowpt[r],
            (None, None) => unreachable!("empty conflict pair on stack"),
        }
    }

    fn test(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let ordered = self.ordered_adj[v].clone();
        for (it, &ei) in ordered.iter().enumerate() {
            self.stack_bottom[ei] = self.s.len();
            let w = self.edges[ei].1;
            if self.parent_edge[w] == Some(ei) {
                // tree edge
                if !self.test(w) {
                    return false;
                }
            } else {
                // back edge
                self.lowpt_edge[ei] = Some(ei);
                self.s.push(ConflictPair {
                    l: Interval::default(),
                    r: Interval {
                        low: Some(ei),
                        high: Some(ei),
                    },
                });
            }
            if self.lowpt[ei] < self.height[v] {
                // ei has a return edge past v
                if it == 0 {
                    if let Some(e) = e {
                        self.lowpt_edge[e] = self.lowpt_edge[ei];
                    }
                } else if !self.add_constraints(ei, e.expect("return edge implies parent")) {
                    return false;
                }
            }
        }
        if let Some(e) = e {
            let u = self.edges[e].0;
            self.trim_back_edges(u);
            if self.lowpt[e] < self.height[u] {
                // e has a return edge of its own: side of e is side of a
                // highest return edge
                let top = self.s.last().expect("return edge requires conflict pair");
                let (hl, hr) = (top.l.high, top.r.high);
                self.reff[e] = match (hl, hr) {
                    (Some(hl), Some(hr)) if self.lowpt[hl] > self.lowpt[hr] => Some(hl),
                    (Some(hl), None) => Some(hl),
                    _ => hr,
                };
            }
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair::default();
        // merge return edges of ei into p.r
        while self.s.len() > self.stack_bottom[ei] {
            let mut q = self.s.pop().unwrap();
            if !q.l.is_empty() {
                std::mem::swap(&mut q.l, &mut q.r);
            }
            if !q.l.is_empty() {
                return false;
            }
            let qrl = q.r.low.unwrap();
            if self.lowpt[qrl] > self.lowpt[e] {
                // merge intervals
                if p.r.is_empty() {
                    p.r.high = q.r.high;
                } else {
                    self.reff[p.r.low.unwrap()] = q.r.high;
                }
                p.r.low = q.r.low;
            } else {
                // align with the parent's lowpoint edge
                self.reff[qrl] = self.lowpt_edge[e];
            }
        }
        // merge conflicting return edges of earlier siblings into p.l
        loop {
            let top = match self.s.last() {
                Some(t) => *t,
                None => break,
            };
            if !(self.conflicting(&top.l, ei) || self.conflicting(&top.r, ei)) {
                break;
            }
            let mut q = self.s.pop().unwrap();
            if self.conflicting(&q.r, ei) {
                std::mem::swap(&mut q.l, &mut q.r);
            }
            if self.conflicting(&q.r, ei) {
                return false;
            }
            // interval below lowpt(ei) merges into p.r
            if let Some(prl) = p.r.low {
                self.reff[prl] = q.r.high;
            }
            if q.r.low.is_some() {
                p.r.low = q.r.low;
            }
            if p.l.is_empty() {
                p.l.high = q.l.high;
            } else {
                self.reff[p.l.low.unwrap()] = q.l.high;
            }
            p.l.low = q.l.low;
        }
        if !(p.l.is_empty() && p.r.is_empty()) {
            self.s.push(p);
        }
        true
    }

    fn trim_back_edges(&mut self, u: usize) {
        // drop entire conflict pairs that end at u
        while let Some(top) = self.s.last() {
            if self.lowest(top) == self.height[u] {
                self.s.pop();
            } else {
                break;
            }
        }
        if let Some(mut p) = self.s.pop() {
            // trim left interval
            while let Some(h) = p.l.high {
                if self.edges[h].1 == u {
                    p.l.high = self.reff[h];
                } else {
                    break;
                }
            }
            if p.l.high.is_none() && p.l.low.is_some() {
                self.reff[p.l.low.unwrap()] = p.r.low;
                p.l.low = None;
            }
            // trim right interval
            while let Some(h) = p.r.high {
                if self.edges[h].1 == u {
                    p.r.high = self.reff[h];
                } else {
                    break;
                }
            }
            if p.r.high.is_none() && p.r.low.is_some() {
                self.reff[p.r.low.unwrap()] = p.l.low;
                p.r.low = None;
            }
            self.s.push(p);
        }
    }
}

/// Left-right planarity criterion on a simple undirected graph given as an
/// edge list over nodes 0..n.
pub fn lr_planar(n: usize, edge_list: &[(usize, usize)]) -> bool {
    if n >= 3 && edge_list.len() > 3 * n - 6 {
        return false;
    }
    let mut st = LrState::new(n, edge_list);
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v] == UNSET {
            st.height[v] = 0;
            roots.push(v);
            st.orient(v);
        }
    }
    for v in 0..n {
        let mut out: Vec<usize> = (0..st.edges.len()).filter(|&e| st.edges[e].0 == v).collect();
        out.sort_by_key(|&e| (st.nesting_depth[e], e));
        st.ordered_adj[v] = out;
    }
    roots.into_iter().all(|r| st.test(r))
}

// ---------------------------------------------------------------------------
// Incremental face-embedding test (independent verifier)
// ---------------------------------------------------------------------------

fn norm(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Biconnected components as edge lists (Tarjan).
fn biconnected_components(n: usize, edge_list: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, edge id)
    for (id, &(a, b)) in edge_list.iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    let mut disc = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    let mut estack: Vec<(usize, usize)> = Vec::new();
    let mut comps = Vec::new();

    fn dfs(
        u: usize,
        pe: Option<usize>,
        adj: &[Vec<(usize, usize)>],
        disc: &mut [usize],
        low: &mut [usize],
        timer: &mut usize,
        estack: &mut Vec<(usize, usize)>,
        comps: &mut Vec<Vec<(usize, usize)>>,
    ) {
        disc[u] = *timer;
        low[u] = *timer;
        *timer += 1;
        for &(v, eid) in &adj[u] {
            if Some(eid) == pe {
                continue;
            }
            if disc[v] == UNSET {
                estack.push((u, v));
                dfs(v, Some(eid), adj, disc, low, timer, estack, comps);
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    let mut comp = Vec::new();
                    while let Some(e) = estack.pop() {
                        let done = e == (u, v);
                        comp.push(e);
                        if done {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            } else if disc[v] < disc[u] {
                estack.push((u, v));
                low[u] = low[u].min(disc[v]);
            }
        }
    }

    for v in 0..n {
        if disc[v] == UNSET {
            dfs(
                v, None, &adj, &mut disc, &mut low, &mut timer, &mut estack, &mut comps,
            );
        }
    }
    comps
}

/// Some cycle in a biconnected graph with >= 1 non-bridge edge.
fn find_cycle(adj: &std::collections::BTreeMap<usize, Vec<usize>>) -> Vec<usize> {
    let start = *adj.keys().next().unwrap();
    let mut stack = vec![start];
    let mut on_stack: std::collections::BTreeMap<usize, usize> =
        std::collections::BTreeMap::from([(start, 0)]);
    let mut parent: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    let mut visited = std::collections::BTreeSet::from([start]);
    // iterative DFS that keeps the explicit path
    let mut iters: Vec<usize> = vec![0];
    loop {
        let u = *stack.last().unwrap();
        let idx = *iters.last().unwrap();
        if idx >= adj[&u].len() {
            stack.pop();
            iters.pop();
            on_stack.remove(&u);
            continue;
        }
        *iters.last_mut().unwrap() += 1;
        let v = adj[&u][idx];
        if parent.get(&u) == Some(&v) {
            continue;
        }
        if let Some(&pos) = on_stack.get(&v) {
            return stack[pos..].to_vec();
        }
        if visited.insert(v) {
            parent.insert(v, u);
            on_stack.insert(v, stack.len());
            stack.push(v);
            iters.push(0);
        }
    }
}

/// Incremental embedding of one biconnected component (>= 3 nodes, simple).
fn embed_biconnected(edge_list: &[(usize, usize)]) -> bool {
    let mut adj: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for &(a, b) in edge_list {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let all_edges: std::collections::BTreeSet<(usize, usize)> =
        edge_list.iter().map(|&(a, b)| norm(a, b)).collect();

    let cycle = find_cycle(&adj);
    let mut in_h: std::collections::BTreeSet<usize> = cycle.iter().copied().collect();
    let mut embedded: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();
    for k in 0..cycle.len() {
        embedded.insert(norm(cycle[k], cycle[(k + 1) % cycle.len()]));
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle];

    loop {
        // fragments: chords with both ends in H, and components of G \ H
        // with their attachment vertices
        #[derive(Debug)]
        enum Fragment {
            Chord(usize, usize),
            Component {
                vertices: Vec<usize>,
                attachments: std::collections::BTreeSet<usize>,
            },
        }
        let mut fragments: Vec<Fragment> = Vec::new();
        for &(a, b) in &all_edges {
            if !embedded.contains(&(a, b)) && in_h.contains(&a) && in_h.contains(&b) {
                fragments.push(Fragment::Chord(a, b));
            }
        }
        let outside: Vec<usize> = adj.keys().copied().filter(|v| !in_h.contains(v)).collect();
        let mut seen: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
        for &start in &outside {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            seen.insert(start);
            let mut queue = std::collections::VecDeque::from([start]);
            let mut attachments = std::collections::BTreeSet::new();
            while let Some(u) = queue.pop_front() {
                for &w in &adj[&u] {
                    if in_h.contains(&w) {
                        attachments.insert(w);
                    } else if seen.insert(w) {
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            fragments.push(Fragment::Component {
                vertices: comp,
                attachments,
            });
        }
        if fragments.is_empty() {
            return true;
        }

        // admissible faces contain all attachments of the fragment
        let mut best: Option<(usize, usize, usize)> = None; // (#admissible, fragment, face)
        for (fi, frag) in fragments.iter().enumerate() {
            let attachments: std::collections::BTreeSet<usize> = match frag {
                Fragment::Chord(a, b) => [*a, *b].into_iter().collect(),
                Fragment::Component { attachments, .. } => attachments.clone(),
            };
            let mut admissible = Vec::new();
            for (k, f) in faces.iter().enumerate() {
                let fset: std::collections::BTreeSet<usize> = f.iter().copied().collect();
                if attachments.is_subset(&fset) {
                    admissible.push(k);
                }
            }
            if admissible.is_empty() {
                return false;
            }
            if best.map_or(true, |(count, _, _)| admissible.len() < count) {
                best = Some((admissible.len(), fi, admissible[0]));
            }
        }
        let (_, fi, face_idx) = best.unwrap();

        // path through the fragment between two attachment vertices
        let path: Vec<usize> = match &fragments[fi] {
            Fragment::Chord(a, b) => vec![*a, *b],
            Fragment::Component {
                vertices,
                attachments,
            } => {
                let vset: std::collections::BTreeSet<usize> = vertices.iter().copied().collect();
                let mut iter = attachments.iter();
                let a = *iter.next().unwrap();
                let b = *iter.next().expect("biconnected fragment has >= 2 attachments");
                // BFS from a through the fragment interior to b
                let mut prev: std::collections::BTreeMap<usize, usize> =
                    std::collections::BTreeMap::new();
                let mut queue = std::collections::VecDeque::from([a]);
                let mut found = false;
                let mut visited = std::collections::BTreeSet::from([a]);
                'bfs: while let Some(u) = queue.pop_front() {
                    for &w in &adj[&u] {
                        // b may be entered only from the fragment interior
                        if w == b && vset.contains(&u) {
                            prev.insert(b, u);
                            found = true;
                            break 'bfs;
                        }
                        if vset.contains(&w) && visited.insert(w) {
                            prev.insert(w, u);
                            queue.push_back(w);
                        }
                    }
                }
                assert!(found, "attachments of a fragment are connected through it");
                let mut path = vec![b];
                let mut cur = b;
                while cur != a {
                    cur = prev[&cur];
                    path.push(cur);
                }
                path.reverse();
                path
            }
        };

        // embed the path: interior joins H, face splits in two
        for w in path.windows(2) {
            embedded.insert(norm(w[0], w[1]));
        }
        for &v in &path[1..path.len() - 1] {
            in_h.insert(v);
        }
        let face = faces.swap_remove(face_idx);
        let a = path[0];
        let b = path[path.len() - 1];
        let pa = face.iter().position(|&v| v == a).unwrap();
        let pb = face.iter().position(|&v| v == b).unwrap();
        let len = face.len();
        let mut arc1 = Vec::new(); // a .. b along the face
        let mut k = pa;
        loop {
            arc1.push(face[k]);
            if k == pb {
                break;
            }
            k = (k + 1) % len;
        }
        let mut arc2 = Vec::new(); // b .. a along the face
        let mut k = pb;
        loop {
            arc2.push(face[k]);
            if k == pa {
                break;
            }
            k = (k + 1) % len;
        }
        let interior = &path[1..path.len() - 1];
        let mut face1 = arc1;
        face1.extend(interior.iter().rev());
        let mut face2 = arc2;
        face2.extend(interior.iter());
        faces.push(face1);
        faces.push(face2);
    }
}

/// Planarity via incremental face embedding, run per biconnected component.
pub fn dmp_planar(n: usize, edge_list: &[(usize, usize)]) -> bool {
    if n >= 3 && edge_list.len() > 3 * n - 6 {
        return false;
    }
    for comp in biconnected_components(n, edge_list) {
        if comp.len() < 3 {
            continue; // a single edge or two edges cannot be non-planar
        }
        if !embed_biconnected(&comp) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        e
    }

    fn complete_bipartite(a: usize, b: usize) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for i in 0..a {
            for j in 0..b {
                e.push((i, a + j));
            }
        }
        e
    }

    fn petersen() -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        e.extend((0..5).map(|i| (i, i + 5)));
        e.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        e
    }

    fn grid(rows: usize, cols: usize) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    e.push((v, v + 1));
                }
                if r + 1 < rows {
                    e.push((v, v + cols));
                }
            }
        }
        e
    }

    /// Connectivity of a vertex subset in the host graph.
    fn part_connected(part: &[usize], adj: &[Vec<bool>]) -> bool {
        if part.is_empty() {
            return false;
        }
        let mut seen = std::collections::BTreeSet::from([part[0]]);
        let mut queue = std::collections::VecDeque::from([part[0]]);
        while let Some(u) = queue.pop_front() {
            for &v in part {
                if adj[u][v] && seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen.len() == part.len()
    }

    fn parts_adjacent(a: &[usize], b: &[usize], adj: &[Vec<bool>]) -> bool {
        a.iter().any(|&u| b.iter().any(|&v| adj[u][v]))
    }

    /// Brute-force minor search: assign each vertex to one of k branch sets
    /// (or none), require connected sets and the target adjacency pattern.
    fn has_minor(n: usize, adj: &[Vec<bool>], k: usize, required: &[(usize, usize)]) -> bool {
        let mut assign = vec![0usize; n]; // 0 = unused, 1..=k = branch set
        loop {
            let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
            for v in 0..n {
                if assign[v] > 0 {
                    parts[assign[v] - 1].push(v);
                }
            }
            if parts.iter().all(|p| !p.is_empty() && part_connected(p, adj))
                && required
                    .iter()
                    .all(|&(a, b)| parts_adjacent(&parts[a], &parts[b], adj))
            {
                return true;
            }
            // next assignment
            let mut pos = 0;
            loop {
                if pos == n {
                    return false;
                }
                assign[pos] += 1;
                if assign[pos] <= k {
                    break;
                }
                assign[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Wagner's theorem: planar iff no K5 minor and no K3,3 minor. Only
    /// tractable for tiny graphs.
    fn planar_by_minors(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let k5: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        let k33: Vec<(usize, usize)> = (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect();
        !has_minor(n, &adj, 5, &k5) && !has_minor(n, &adj, 6, &k33)
    }

    #[test]
    fn known_planar_graphs() {
        for edges in [
            complete(4),
            grid(4, 5),
            complete_bipartite(2, 7),
            // K5 minus one edge
            complete(5).into_iter().filter(|&e| e != (3, 4)).collect(),
            Vec::new(),
        ] {
            let n = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(1);
            assert!(lr_planar(n, &edges), "lr failed on {edges:?}");
            assert!(dmp_planar(n, &edges), "dmp failed on {edges:?}");
        }
    }

    #[test]
    fn known_nonplanar_graphs() {
        for (n, edges) in [
            (5, complete(5)),
            (6, complete_bipartite(3, 3)),
            (10, petersen()),
            (7, complete(7)),
        ] {
            assert!(!lr_planar(n, &edges), "lr passed on {edges:?}");
            assert!(!dmp_planar(n, &edges), "dmp passed on {edges:?}");
        }
    }

    #[test]
    fn disconnected_components_tested_separately() {
        // two K4 blocks plus an isolated vertex
        let mut edges = complete(4);
        edges.extend(complete(4).into_iter().map(|(a, b)| (a + 4, b + 4)));
        assert!(lr_planar(9, &edges));
        assert!(dmp_planar(9, &edges));
        // one of them replaced by K5
        let mut edges = complete(4);
        edges.extend(complete(5).into_iter().map(|(a, b)| (a + 4, b + 4)));
        assert!(!lr_planar(9, &edges));
        assert!(!dmp_planar(9, &edges));
    }

    #[test]
    fn agrees_with_minor_oracle_on_small_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in [5usize, 6, 7] {
            let full = complete(n);
            for trial in 0..40 {
                let m = 4 + (trial % (full.len() - 4));
                let mut edges = full.clone();
                edges.shuffle(&mut rng);
                edges.truncate(m);
                let oracle = planar_by_minors(n, &edges);
                assert_eq!(lr_planar(n, &edges), oracle, "lr n={n} edges={edges:?}");
                assert_eq!(dmp_planar(n, &edges), oracle, "dmp n={n} edges={edges:?}");
            }
        }
    }

    #[test]
    fn lr_and_dmp_agree_on_medium_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let n = 24;
        let full = complete(n);
        for trial in 0..120 {
            // densities around the planarity threshold m = 3n - 6
            let m = 20 + (trial * 7) % 60;
            let mut edges = full.clone();
            edges.shuffle(&mut rng);
            edges.truncate(m);
            assert_eq!(
                lr_planar(n, &edges),
                dmp_planar(n, &edges),
                "disagreement at n={n} edges={edges:?}"
            );
        }
    }

    #[test]
    fn maximal_planar_triangulation_is_planar() {
        // fan triangulation of a convex polygon plus one apex on each side
        let k = 20;
        let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        for i in 2..k - 1 {
            edges.push((0, i)); // fan
        }
        let apex1 = k;
        let apex2 = k + 1;
        for i in 0..k {
            edges.push((i, apex1));
        }
        edges.push((0, apex2));
        edges.push((1, apex2));
        edges.push((apex1, apex2));
        let n = k + 2;
        assert_eq!(edges.len(), 3 * n - 6);
        assert!(lr_planar(n, &edges));
        assert!(dmp_planar(n, &edges));
        // any additional edge breaks planarity
        assert!(!lr_planar(n, &[edges.clone(), vec![(2, k - 2)]].concat()));
    }
}
