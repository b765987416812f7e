//! Finite patches of rhombic lattices.
//!
//! A patch is a simply connected collection of unit rhombi with a vertex at
//! the origin. Vertices carry stable integer ids; all graph operations break
//! ties by smallest id so that every derived quantity is reproducible.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::fmt_c;
use crate::C64;

/// Geometric tolerance for lattice invariants (unit lengths, rhombus
/// closure, coordinate identity).
pub const GEOM_TOL: f64 = 1e-9;

/// Stable identifier of a lattice vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lattice family accepted by [`Lattice::generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticeKind {
    /// Unit square lattice, vertices `m + n i`.
    Square,
    /// Rhombic lattice spanned by `1` and `e^{i alpha}`.
    Rhombic { alpha: f64 },
}

/// A path: a sequence of pairwise adjacent vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path(pub Vec<VertexId>);

impl Path {
    /// Checked constructor: consecutive vertices must be adjacent.
    pub fn new(lattice: &Lattice, ids: Vec<VertexId>) -> Result<Self> {
        for w in ids.windows(2) {
            if !lattice.contains_edge(w[0], w[1]) {
                return Err(Error::InvalidPath(format!(
                    "vertices {} and {} are not adjacent",
                    w[0], w[1]
                )));
            }
        }
        for &id in &ids {
            lattice.index_of(id)?;
        }
        Ok(Path(ids))
    }

    /// Number of steps (vertices minus one).
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Edge directions and the derived forbidden/pole sets of a lattice.
///
/// `directions` is closed under negation. `forbidden` is the set
/// `S = { -2 / (1 + d) : d a direction, d != -1 }`; `poles` is
/// `{0}` together with the reciprocals of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionData {
    pub directions: Vec<C64>,
    pub forbidden: Vec<C64>,
    pub poles: Vec<C64>,
}

impl DirectionData {
    pub fn dist_to_forbidden(&self, t: C64) -> f64 {
        self.forbidden
            .iter()
            .map(|s| (t - s).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dist_to_poles(&self, t: C64) -> f64 {
        self.poles
            .iter()
            .map(|p| (t - p).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// One maximal track segment: faces crossed through opposite sides.
#[derive(Debug, Clone)]
pub struct Track {
    /// Face indices in crossing order.
    pub faces: Vec<usize>,
    /// Edges shared by consecutive faces, as normalized id pairs.
    pub ties: Vec<(VertexId, VertexId)>,
    /// Remaining edges of the track's faces.
    pub rails: Vec<(VertexId, VertexId)>,
}

/// Outcome of one validation check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

/// Validation report: structural invariants plus leash coverage.
///
/// `ok` reflects the structural invariants only. Leash coverage is reported
/// per vertex but does not gate `ok`: on any finite patch the vertices of
/// maximal real part cannot have an in-patch leash, so complete coverage is
/// unattainable by construction. Operations relying on leashes (the backward
/// shift) restrict their domain accordingly.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub leashless: Vec<VertexId>,
    pub ok: bool,
}

impl ValidationReport {
    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

/// A finite simply connected patch of a rhombic lattice.
#[derive(Debug)]
pub struct Lattice {
    vertices: Vec<(VertexId, C64)>,
    edges: Vec<(VertexId, VertexId)>,
    faces: Vec<[VertexId; 4]>,
    origin_id: VertexId,

    index: HashMap<u64, usize>,
    adjacency: Vec<Vec<usize>>,
    origin_index: usize,
    bfs_parent: Vec<Option<usize>>,
    bfs_dist: Vec<Option<u32>>,
    bfs_order: Vec<usize>,
    edge_lookup: HashMap<(u64, u64), usize>,
    directions: OnceLock<DirectionData>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.faces == other.faces
            && self.origin_id == other.origin_id
    }
}

impl Lattice {
    /// Builds a lattice from raw parts, performing structural checks only
    /// (unique resolvable ids, origin present, sane edge list). Geometric
    /// and topological invariants are the business of [`Lattice::validate`];
    /// use [`Lattice::new`] to get both.
    pub fn from_parts(
        vertices: Vec<(VertexId, C64)>,
        edges: Vec<(VertexId, VertexId)>,
        faces: Vec<[VertexId; 4]>,
        origin_id: VertexId,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (pos, (id, _)) in vertices.iter().enumerate() {
            if index.insert(id.0, pos).is_some() {
                return Err(Error::ValidationError {
                    invariant: "unique vertex ids".into(),
                    detail: format!("vertex id {id} occurs twice"),
                });
            }
        }
        let origin_index = *index
            .get(&origin_id.0)
            .ok_or_else(|| Error::ValidationError {
                invariant: "origin vertex".into(),
                detail: format!("origin id {origin_id} not in vertex list"),
            })?;

        let mut adjacency = vec![Vec::new(); vertices.len()];
        let mut edge_lookup = HashMap::with_capacity(edges.len());
        for (pos, &(a, b)) in edges.iter().enumerate() {
            let (ia, ib) = (
                *index.get(&a.0).ok_or(Error::UnknownVertex(a))?,
                *index.get(&b.0).ok_or(Error::UnknownVertex(b))?,
            );
            if ia == ib {
                return Err(Error::ValidationError {
                    invariant: "simple edges".into(),
                    detail: format!("edge ({a},{b}) is a loop"),
                });
            }
            let key = normalize(a, b);
            if edge_lookup.insert(key, pos).is_some() {
                return Err(Error::ValidationError {
                    invariant: "simple edges".into(),
                    detail: format!("edge ({a},{b}) occurs twice"),
                });
            }
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        for (face_no, face) in faces.iter().enumerate() {
            for &id in face {
                if !index.contains_key(&id.0) {
                    return Err(Error::ValidationError {
                        invariant: "face vertices".into(),
                        detail: format!("face {face_no} references unknown vertex {id}"),
                    });
                }
            }
        }
        let ids: Vec<VertexId> = vertices.iter().map(|v| v.0).collect();
        for adj in &mut adjacency {
            adj.sort_by_key(|&i| ids[i]);
        }

        let mut lattice = Lattice {
            vertices,
            edges,
            faces,
            origin_id,
            index,
            adjacency,
            origin_index,
            bfs_parent: Vec::new(),
            bfs_dist: Vec::new(),
            bfs_order: Vec::new(),
            edge_lookup,
            directions: OnceLock::new(),
        };
        lattice.compute_bfs_tree();
        Ok(lattice)
    }

    /// Builds a lattice and rejects it unless every structural invariant
    /// holds.
    pub fn new(
        vertices: Vec<(VertexId, C64)>,
        edges: Vec<(VertexId, VertexId)>,
        faces: Vec<[VertexId; 4]>,
        origin_id: VertexId,
    ) -> Result<Self> {
        let lattice = Self::from_parts(vertices, edges, faces, origin_id)?;
        let report = lattice.validate();
        if let Some(check) = report.failing().first() {
            return Err(Error::ValidationError {
                invariant: check.name.into(),
                detail: check.detail.clone(),
            });
        }
        Ok(lattice)
    }

    /// Generates the standard square or rhombic patch of the given radius:
    /// vertices `m + n w` for `|m|, |n| <= radius` with `w = i` or
    /// `w = e^{i alpha}`.
    pub fn generate(kind: LatticeKind, radius: u32) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidParameter("radius must be at least 1".into()));
        }
        let omega = match kind {
            LatticeKind::Square => C64::new(0.0, 1.0),
            LatticeKind::Rhombic { alpha } => {
                if !(0.0..std::f64::consts::PI).contains(&alpha) || alpha.sin() <= GEOM_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "alpha = {alpha} gives degenerate rhombi"
                    )));
                }
                C64::new(alpha.cos(), alpha.sin())
            }
        };
        let r = radius as i64;
        let side = 2 * r + 1;
        let id_of = |m: i64, n: i64| VertexId(((n + r) * side + (m + r)) as u64);
        let coord = |m: i64, n: i64| match kind {
            // exact integer coordinates on the square lattice
            LatticeKind::Square => C64::new(m as f64, n as f64),
            LatticeKind::Rhombic { .. } => omega * (n as f64) + C64::new(m as f64, 0.0),
        };

        let mut vertices = Vec::with_capacity((side * side) as usize);
        for n in -r..=r {
            for m in -r..=r {
                vertices.push((id_of(m, n), coord(m, n)));
            }
        }
        let mut edges = Vec::new();
        for n in -r..=r {
            for m in -r..=r {
                if m < r {
                    edges.push((id_of(m, n), id_of(m + 1, n)));
                }
                if n < r {
                    edges.push((id_of(m, n), id_of(m, n + 1)));
                }
            }
        }
        let mut faces = Vec::new();
        for n in -r..r {
            for m in -r..r {
                faces.push([
                    id_of(m, n),
                    id_of(m + 1, n),
                    id_of(m + 1, n + 1),
                    id_of(m, n + 1),
                ]);
            }
        }
        Self::new(vertices, edges, faces, id_of(0, 0))
    }

    fn compute_bfs_tree(&mut self) {
        let n = self.vertices.len();
        let mut parent = vec![None; n];
        let mut dist = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        dist[self.origin_index] = Some(0);
        order.push(self.origin_index);
        queue.push_back(self.origin_index);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    parent[v] = Some(u);
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
        self.bfs_parent = parent;
        self.bfs_dist = dist;
        self.bfs_order = order;
    }

    // ---- accessors -------------------------------------------------------

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[(VertexId, C64)] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn faces(&self) -> &[[VertexId; 4]] {
        &self.faces
    }

    pub fn origin(&self) -> VertexId {
        self.origin_id
    }

    /// Vertex ids in stored order.
    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().map(|v| v.0)
    }

    pub(crate) fn index_of(&self, id: VertexId) -> Result<usize> {
        self.index
            .get(&id.0)
            .copied()
            .ok_or(Error::UnknownVertex(id))
    }

    pub(crate) fn id_at(&self, index: usize) -> VertexId {
        self.vertices[index].0
    }

    pub(crate) fn pos_at(&self, index: usize) -> C64 {
        self.vertices[index].1
    }

    pub(crate) fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub(crate) fn adjacency(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    /// BFS visit order from the origin (origin first). Unreachable vertices
    /// are absent.
    pub(crate) fn bfs_order(&self) -> &[usize] {
        &self.bfs_order
    }

    pub(crate) fn bfs_parent(&self, index: usize) -> Option<usize> {
        self.bfs_parent[index]
    }

    pub fn coordinate(&self, id: VertexId) -> Result<C64> {
        Ok(self.pos_at(self.index_of(id)?))
    }

    pub fn contains_vertex(&self, id: VertexId) -> bool {
        self.index.contains_key(&id.0)
    }

    pub fn contains_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edge_lookup.contains_key(&normalize(a, b))
    }

    pub fn neighbors(&self, id: VertexId) -> Result<Vec<VertexId>> {
        let i = self.index_of(id)?;
        Ok(self.adjacency[i].iter().map(|&j| self.id_at(j)).collect())
    }

    /// Finds the vertex at a coordinate, within tolerance.
    pub fn vertex_at(&self, pos: C64, tol: f64) -> Option<VertexId> {
        self.vertices
            .iter()
            .find(|(_, p)| (p - pos).norm() <= tol)
            .map(|(id, _)| *id)
    }

    // ---- validation ------------------------------------------------------

    /// Runs every lattice invariant and reports pass/fail per check, plus
    /// leash coverage per vertex.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();

        let mut bad_edges = 0usize;
        let mut first_bad_edge = String::new();
        for &(a, b) in &self.edges {
            let (pa, pb) = (self.pos_of(a), self.pos_of(b));
            if ((pb - pa).norm() - 1.0).abs() > GEOM_TOL {
                bad_edges += 1;
                if first_bad_edge.is_empty() {
                    first_bad_edge = format!("edge ({a},{b}) has length {}", (pb - pa).norm());
                }
            }
        }
        checks.push(Check {
            name: "unit edges",
            ok: bad_edges == 0,
            detail: if bad_edges == 0 {
                format!("{} edges of unit length", self.edges.len())
            } else {
                format!("{bad_edges} non-unit edges; first: {first_bad_edge}")
            },
        });

        let mut bad_faces = 0usize;
        let mut first_bad_face = String::new();
        for (no, face) in self.faces.iter().enumerate() {
            let p: Vec<C64> = face.iter().map(|&id| self.pos_of(id)).collect();
            let closure = (p[0] - p[1] + p[2] - p[3]).norm();
            let sides_unit = (0..4).all(|k| {
                let d = p[(k + 1) % 4] - p[k];
                (d.norm() - 1.0).abs() <= GEOM_TOL
            });
            let sides_are_edges = (0..4).all(|k| self.contains_edge(face[k], face[(k + 1) % 4]));
            if closure > GEOM_TOL || !sides_unit || !sides_are_edges {
                bad_faces += 1;
                if first_bad_face.is_empty() {
                    first_bad_face = format!(
                        "face {no} ({},{},{},{}): closure {closure:.2e}, unit sides {sides_unit}, sides in edge list {sides_are_edges}",
                        face[0], face[1], face[2], face[3]
                    );
                }
            }
        }
        checks.push(Check {
            name: "unit-rhombus faces",
            ok: bad_faces == 0,
            detail: if bad_faces == 0 {
                format!("{} rhombic faces", self.faces.len())
            } else {
                format!("{bad_faces} degenerate faces; first: {first_bad_face}")
            },
        });

        let mut cw_faces = 0usize;
        for face in &self.faces {
            let a = self.pos_of(face[0]);
            let b = self.pos_of(face[1]);
            let c = self.pos_of(face[2]);
            let cross = ((b - a).conj() * (c - b)).im;
            if cross <= 0.0 {
                cw_faces += 1;
            }
        }
        checks.push(Check {
            name: "counterclockwise faces",
            ok: cw_faces == 0,
            detail: if cw_faces == 0 {
                "all faces counterclockwise".into()
            } else {
                format!("{cw_faces} clockwise or degenerate faces")
            },
        });

        let origin_pos = self.pos_at(self.origin_index);
        checks.push(Check {
            name: "origin vertex",
            ok: origin_pos.norm() <= GEOM_TOL,
            detail: format!("origin id {} at {}", self.origin_id, fmt_c(origin_pos)),
        });

        let unreachable = self.bfs_dist.iter().filter(|d| d.is_none()).count();
        checks.push(Check {
            name: "connected",
            ok: unreachable == 0,
            detail: if unreachable == 0 {
                "edge graph connected".into()
            } else {
                format!("{unreachable} vertices unreachable from the origin")
            },
        });

        let euler = self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64;
        checks.push(Check {
            name: "simply connected",
            ok: euler == 1,
            detail: format!("V - E + F = {euler}"),
        });

        let mask = self.leashed_mask();
        let leashless: Vec<VertexId> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| !mask[*i])
            .map(|(_, v)| v.0)
            .collect();
        let ok = checks.iter().all(|c| c.ok);
        ValidationReport {
            checks,
            leashless,
            ok,
        }
    }

    fn pos_of(&self, id: VertexId) -> C64 {
        self.pos_at(self.index[&id.0])
    }

    // ---- direction data ----------------------------------------------------

    /// Edge directions and the sets `S`, `P`, computed once per lattice.
    pub fn direction_data(&self) -> &DirectionData {
        self.directions.get_or_init(|| {
            let mut dirs: Vec<C64> = Vec::new();
            let mut push = |d: C64| {
                if !dirs.iter().any(|e| (e - d).norm() <= GEOM_TOL) {
                    dirs.push(d);
                }
            };
            for &(a, b) in &self.edges {
                let d = self.pos_of(b) - self.pos_of(a);
                push(d);
                push(-d);
            }
            sort_complex(&mut dirs);

            let two = C64::new(2.0, 0.0);
            let mut forbidden: Vec<C64> = Vec::new();
            for &d in &dirs {
                let denom = C64::new(1.0, 0.0) + d;
                if denom.norm() > GEOM_TOL {
                    let t = -two / denom;
                    if !forbidden.iter().any(|s| (s - t).norm() <= GEOM_TOL) {
                        forbidden.push(t);
                    }
                }
            }
            sort_complex(&mut forbidden);

            let mut poles = vec![C64::new(0.0, 0.0)];
            for &t in &forbidden {
                let p = C64::new(1.0, 0.0) / t;
                if !poles.iter().any(|q| (q - p).norm() <= GEOM_TOL) {
                    poles.push(p);
                }
            }
            sort_complex(&mut poles);

            DirectionData {
                directions: dirs,
                forbidden,
                poles,
            }
        })
    }

    // ---- paths ---------------------------------------------------------

    /// Shortest path from `a` to `b` by breadth-first search, ties broken by
    /// smallest next vertex id.
    pub fn find_path(&self, a: VertexId, b: VertexId) -> Result<Path> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        if ia == ib {
            return Ok(Path(vec![a]));
        }
        let dist_b = self.bfs_distances(ib);
        if dist_b[ia].is_none() {
            return Err(Error::Disconnected { from: a, to: b });
        }
        let mut path = vec![a];
        let mut cur = ia;
        while cur != ib {
            let d = dist_b[cur].unwrap();
            // adjacency is sorted by id, so the first eligible neighbor wins
            let next = self.adjacency[cur]
                .iter()
                .copied()
                .find(|&v| dist_b[v] == Some(d - 1))
                .expect("BFS distance field must decrease along some edge");
            path.push(self.id_at(next));
            cur = next;
        }
        Ok(Path(path))
    }

    fn bfs_distances(&self, from: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertices.len()];
        let mut queue = VecDeque::new();
        dist[from] = Some(0);
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Graph distance between two vertices.
    pub fn distance(&self, a: VertexId, b: VertexId) -> Result<u32> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        self.bfs_distances(ia)[ib].ok_or(Error::Disconnected { from: a, to: b })
    }

    /// Enumerates up to `count` distinct simple paths from `a` to `b` with at
    /// most `max_len` steps, in deterministic (id-ordered DFS) order.
    pub fn find_paths(
        &self,
        a: VertexId,
        b: VertexId,
        count: usize,
        max_len: usize,
    ) -> Result<Vec<Path>> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        let mut found = Vec::new();
        let mut on_path = vec![false; self.vertices.len()];
        let mut stack = vec![ia];
        on_path[ia] = true;
        self.dfs_paths(ib, max_len, count, &mut stack, &mut on_path, &mut found);
        Ok(found)
    }

    fn dfs_paths(
        &self,
        target: usize,
        max_len: usize,
        count: usize,
        stack: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        found: &mut Vec<Path>,
    ) {
        if found.len() >= count {
            return;
        }
        let cur = *stack.last().unwrap();
        if cur == target {
            found.push(Path(stack.iter().map(|&i| self.id_at(i)).collect()));
            return;
        }
        if stack.len() > max_len {
            return;
        }
        for &v in &self.adjacency[cur] {
            if on_path[v] || found.len() >= count {
                continue;
            }
            stack.push(v);
            on_path[v] = true;
            self.dfs_paths(target, max_len, count, stack, on_path, found);
            stack.pop();
            on_path[v] = false;
        }
    }

    // ---- leashes -----------------------------------------------------------

    /// Shortest leash of `z` inside the patch: a path whose interior steps
    /// avoid the directions `+1` and `-1` and whose final step is `+1`.
    /// Ties are broken by smallest vertex id.
    pub fn find_leash(&self, z: VertexId) -> Result<Path> {
        let iz = self.index_of(z)?;
        let (dist, parent) = self.non_horizontal_bfs(&[iz]);
        // best seed: reachable vertex with a right neighbor, minimizing
        // (distance, id)
        let mut best: Option<(u32, VertexId, usize, usize)> = None;
        for (u, d) in dist.iter().enumerate() {
            let Some(du) = *d else { continue };
            let Some(r) = self.right_neighbor(u) else {
                continue;
            };
            let candidate = (du, self.id_at(u), u, r);
            if best.is_none_or(|b| (candidate.0, candidate.1) < (b.0, b.1)) {
                best = Some(candidate);
            }
        }
        let Some((_, _, u, r)) = best else {
            return Err(Error::NoLeash(z));
        };
        let mut ids = Vec::new();
        let mut cur = u;
        loop {
            ids.push(self.id_at(cur));
            match parent[cur] {
                Some(p) => cur = p,
                None => break,
            }
        }
        ids.reverse();
        ids.push(self.id_at(r));
        Ok(Path(ids))
    }

    /// Neighbor at direction `+1`, when present.
    pub(crate) fn right_neighbor(&self, u: usize) -> Option<usize> {
        let pu = self.pos_at(u);
        self.adjacency[u]
            .iter()
            .copied()
            .find(|&v| (self.pos_at(v) - pu - C64::new(1.0, 0.0)).norm() <= GEOM_TOL)
    }

    pub(crate) fn is_horizontal_step(&self, u: usize, v: usize) -> bool {
        let d = self.pos_at(v) - self.pos_at(u);
        (d - C64::new(1.0, 0.0)).norm() <= GEOM_TOL || (d + C64::new(1.0, 0.0)).norm() <= GEOM_TOL
    }

    /// BFS over edges that are not `+-1` steps, from the given sources.
    pub(crate) fn non_horizontal_bfs(
        &self,
        sources: &[usize],
    ) -> (Vec<Option<u32>>, Vec<Option<usize>>) {
        let mut dist = vec![None; self.vertices.len()];
        let mut parent = vec![None; self.vertices.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_some() || self.is_horizontal_step(u, v) {
                    continue;
                }
                dist[v] = Some(du + 1);
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
        (dist, parent)
    }

    /// Marks vertices that have an in-patch leash. These are exactly the
    /// vertices from which a seed (a vertex with a right neighbor) is
    /// reachable along non-horizontal edges.
    pub fn leashed_mask(&self) -> Vec<bool> {
        let seeds: Vec<usize> = (0..self.vertices.len())
            .filter(|&u| self.right_neighbor(u).is_some())
            .collect();
        let mut mask = vec![false; self.vertices.len()];
        for &s in &seeds {
            mask[s] = true;
        }
        // reverse reachability: non-horizontal edges are symmetric
        let (dist, _) = self.non_horizontal_bfs(&seeds);
        for (i, d) in dist.iter().enumerate() {
            if d.is_some() {
                mask[i] = true;
            }
        }
        mask
    }

    // ---- tracks ----------------------------------------------------------

    /// Maximal track segments inside the patch. Every face belongs to
    /// exactly two tracks, one per pair of opposite sides.
    pub fn tracks(&self) -> Vec<Track> {
        let mut edge_faces: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
        for (no, face) in self.faces.iter().enumerate() {
            for k in 0..4 {
                let key = normalize(face[k], face[(k + 1) % 4]);
                edge_faces.entry(key).or_default().push(no);
            }
        }
        let face_pair = |no: usize, pair: usize| -> [(u64, u64); 2] {
            let f = &self.faces[no];
            if pair == 0 {
                [normalize(f[0], f[1]), normalize(f[2], f[3])]
            } else {
                [normalize(f[1], f[2]), normalize(f[3], f[0])]
            }
        };
        let pair_of_edge = |no: usize, key: (u64, u64)| -> usize {
            if face_pair(no, 0).contains(&key) {
                0
            } else {
                1
            }
        };
        let other_face = |key: (u64, u64), no: usize| -> Option<usize> {
            edge_faces.get(&key)?.iter().copied().find(|&f| f != no)
        };

        let mut visited = vec![[false; 2]; self.faces.len()];
        let mut tracks = Vec::new();
        for start in 0..self.faces.len() {
            for pair in 0..2 {
                if visited[start][pair] {
                    continue;
                }
                visited[start][pair] = true;
                let [e0, e1] = face_pair(start, pair);

                // march away from `start` across `exit`, collecting faces
                let march = |mut exit: (u64, u64), mut cur: usize, visited: &mut Vec<[bool; 2]>| {
                    let mut faces = Vec::new();
                    let mut ties = Vec::new();
                    while let Some(next) = other_face(exit, cur) {
                        let p = pair_of_edge(next, exit);
                        if visited[next][p] {
                            break;
                        }
                        visited[next][p] = true;
                        ties.push(exit);
                        faces.push(next);
                        let [a, b] = face_pair(next, p);
                        exit = if a == exit { b } else { a };
                        cur = next;
                    }
                    (faces, ties)
                };

                let (back_faces, back_ties) = march(e0, start, &mut visited);
                let (fwd_faces, fwd_ties) = march(e1, start, &mut visited);

                let mut faces: Vec<usize> = back_faces.into_iter().rev().collect();
                faces.push(start);
                faces.extend(fwd_faces);
                let mut ties: Vec<(u64, u64)> = back_ties.into_iter().rev().collect();
                ties.extend(fwd_ties);

                if faces.first() > faces.last() {
                    faces.reverse();
                    ties.reverse();
                }

                let tie_set: std::collections::HashSet<(u64, u64)> = ties.iter().copied().collect();
                let mut rails = Vec::new();
                for &no in &faces {
                    let f = &self.faces[no];
                    for k in 0..4 {
                        let key = normalize(f[k], f[(k + 1) % 4]);
                        if !tie_set.contains(&key) && !rails.contains(&key) {
                            rails.push(key);
                        }
                    }
                }

                tracks.push(Track {
                    faces,
                    ties: ties
                        .into_iter()
                        .map(|(a, b)| (VertexId(a), VertexId(b)))
                        .collect(),
                    rails: rails
                        .into_iter()
                        .map(|(a, b)| (VertexId(a), VertexId(b)))
                        .collect(),
                });
            }
        }
        tracks
    }

    // ---- sub-lattices ------------------------------------------------------

    /// Sub-lattice induced by the kept vertices (ids and coordinates are
    /// preserved). The origin must be kept.
    pub fn induced(&self, keep: &[bool]) -> Result<Lattice> {
        assert_eq!(keep.len(), self.vertices.len());
        if !keep[self.origin_index] {
            return Err(Error::ValidationError {
                invariant: "origin vertex".into(),
                detail: "origin excluded from induced sub-lattice".into(),
            });
        }
        let vertices: Vec<(VertexId, C64)> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(_, v)| *v)
            .collect();
        let kept = |id: VertexId| keep[self.index[&id.0]];
        let edges: Vec<(VertexId, VertexId)> = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| kept(a) && kept(b))
            .collect();
        let faces: Vec<[VertexId; 4]> = self
            .faces
            .iter()
            .copied()
            .filter(|f| f.iter().all(|&id| kept(id)))
            .collect();
        Lattice::from_parts(vertices, edges, faces, self.origin_id)
    }
}

fn normalize(a: VertexId, b: VertexId) -> (u64, u64) {
    if a.0 <= b.0 {
        (a.0, b.0)
    } else {
        (b.0, a.0)
    }
}

fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}
