//! Newton polyhedra, their faces, and the cones `Delta_tau` of weight vectors
//! whose first-meet locus is a given face.
//!
//! Everything here is exact and sized for desk-scale inputs (n <= 4 by
//! default). Faces are found as first-meet loci of sums of facet normals;
//! cones are triangulated without new rays and split into half-open
//! simplicial pieces so that their lattice points are counted exactly once.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::exec::Exec;
use crate::linalg::{
    integer_normal, lex_sign, orthogonal_component, primitive, rank, to_q, IVec, SpanSolver,
};
use crate::series::{Exponent, PolySeries, SeriesSpec};

/// Default ceiling on the number of variables for polyhedral computations.
pub const DEFAULT_MAX_N: usize = 4;

/// Dominance-minimal elements of a set of exponents, sorted.
pub fn minimal_elements(support: &[Exponent]) -> Vec<Exponent> {
    let set: BTreeSet<&Exponent> = support.iter().collect();
    set.iter()
        .filter(|w| !set.iter().any(|o| o != *w && w.dominates(o)))
        .map(|w| (*w).clone())
        .collect()
}

/// Dominance-minimal exponents of `supp(f)`.
pub fn minimal_support(f: &PolySeries) -> Vec<Exponent> {
    minimal_elements(&f.support())
}

/// Dominance-minimal exponents of a series, from all terms of degree at most
/// its declared support bound.
pub fn minimal_support_series(f: &SeriesSpec) -> Result<Vec<Exponent>> {
    let bound = f.support_bound().ok_or(ZetaError::SupportBoundMissing)?;
    if !f.is_polynomial() && f.certificate().is_none() {
        return Err(ZetaError::CertificateMissing);
    }
    Ok(minimal_support(&f.truncate(bound)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Facet {
    /// Primitive inner normal with non-negative entries.
    pub normal: IVec,
    /// `m(normal)`.
    pub offset: i64,
}

/// A face of the Newton polyhedron.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: usize,
    /// Indices into [`NewtonPolyhedron::generators`] of the generators on the face.
    pub generators: Vec<usize>,
    /// Coordinate directions `e_i` in the recession cone of the face.
    pub recession: Vec<usize>,
    pub dimension: usize,
    pub compact: bool,
    /// Indices of the facets containing the face.
    pub facets: Vec<usize>,
    /// A weight vector in the relative interior of `Delta_tau` (zero for the
    /// whole polyhedron).
    pub normal: IVec,
}

impl Face {
    /// True for the face `Gamma(f)` itself.
    pub fn is_whole(&self) -> bool {
        self.facets.is_empty()
    }

    /// Whether the exponent `w` (a point of the polyhedron) lies on the face.
    pub fn contains_point(&self, poly: &NewtonPolyhedron, w: &Exponent) -> bool {
        self.is_whole() || w.dot(&self.normal) == poly.m_value(&self.normal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct FaceKey {
    generators: Vec<usize>,
    recession: Vec<usize>,
}

/// `Gamma(f)`: the convex hull of `supp(f) + R_{>=0}^n`.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonPolyhedron {
    n: usize,
    generators: Vec<Exponent>,
    facets: Vec<Facet>,
    vertices: Vec<usize>,
    faces: Vec<Face>,
    #[serde(skip)]
    face_index: BTreeMap<FaceKey, usize>,
}

impl PartialEq for NewtonPolyhedron {
    /// Structural equality: same dimension, generators and facet list.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.generators == other.generators && self.facets == other.facets
    }
}

impl NewtonPolyhedron {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Exponent] {
        &self.generators
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Indices of the generators that are vertices.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// All faces, `Gamma(f)` first (id 0).
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn proper_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| !f.is_whole())
    }

    /// `m(a) = min_{y in Gamma} a.y`, attained at a generator for `a >= 0`.
    pub fn m_value(&self, a: &[i64]) -> i64 {
        debug_assert!(a.iter().all(|&x| x >= 0));
        self.generators
            .iter()
            .map(|g| g.dot(a))
            .min()
            .expect("non-empty generator set")
    }

    fn locus_key(&self, a: &[i64]) -> FaceKey {
        let m = self.m_value(a);
        FaceKey {
            generators: (0..self.generators.len())
                .filter(|&i| self.generators[i].dot(a) == m)
                .collect(),
            recession: (0..self.n).filter(|&i| a[i] == 0).collect(),
        }
    }

    /// `F(a)`: the face on which `a.y` attains `m(a)`.
    pub fn first_meet_locus(&self, a: &[i64]) -> &Face {
        assert_eq!(a.len(), self.n);
        assert!(a.iter().all(|&x| x >= 0), "weights must be non-negative");
        let key = self.locus_key(a);
        let id = self
            .face_index
            .get(&key)
            .copied()
            .expect("every first-meet locus is an enumerated face");
        &self.faces[id]
    }

    /// The enumerated faces (alias of [`Self::faces`]).
    pub fn enumerate_faces(&self) -> &[Face] {
        &self.faces
    }

    /// Generator exponents lying on a face.
    pub fn face_points(&self, face: &Face) -> Vec<&Exponent> {
        face.generators
            .iter()
            .map(|&i| &self.generators[i])
            .collect()
    }
}

fn affine_dimension(points: &[&Exponent], recession: &[usize], n: usize) -> usize {
    let mut vectors: Vec<IVec> = Vec::new();
    if let Some(base) = points.first() {
        for w in &points[1..] {
            vectors.push(
                w.0.iter()
                    .zip(&base.0)
                    .map(|(&a, &b)| a as i64 - b as i64)
                    .collect(),
            );
        }
    }
    for &i in recession {
        let mut e = vec![0; n];
        e[i] = 1;
        vectors.push(e);
    }
    rank(&vectors)
}

fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, len, k, &mut Vec::new(), &mut out);
    out
}

/// Builds `Gamma` from a support set (dominance-minimal or not).
///
/// Candidate facet normals are the primitive non-negative vectors orthogonal
/// to `n - 1` vectors drawn from generator differences and coordinate
/// directions; a candidate is kept when its first-meet locus has affine
/// dimension `n - 1`.
pub fn build_polyhedron(support: &[Exponent], n: usize, max_n: usize) -> Result<NewtonPolyhedron> {
    if n > max_n {
        return Err(ZetaError::DimensionTooLarge { n, max: max_n });
    }
    if n == 0 {
        return Err(ZetaError::Validation(
            "polyhedron needs at least one variable".into(),
        ));
    }
    if support.is_empty() {
        return Err(ZetaError::Validation("empty support".into()));
    }
    if support.iter().any(|w| w.n() != n) {
        return Err(ZetaError::Validation(
            "support exponents have the wrong arity".into(),
        ));
    }
    let generators = minimal_elements(support);

    let mut directions: Vec<IVec> = Vec::new();
    let mut seen: HashSet<IVec> = HashSet::new();
    let push_dir = |v: IVec, seen: &mut HashSet<IVec>, dirs: &mut Vec<IVec>| {
        let v = primitive(&v);
        let neg: IVec = v.iter().map(|x| -x).collect();
        if v.iter().any(|&x| x != 0) && !seen.contains(&v) && !seen.contains(&neg) {
            seen.insert(v.clone());
            dirs.push(v);
        }
    };
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        push_dir(e, &mut seen, &mut directions);
    }
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            let d: IVec =
                a.0.iter()
                    .zip(&b.0)
                    .map(|(&x, &y)| x as i64 - y as i64)
                    .collect();
            push_dir(d, &mut seen, &mut directions);
        }
    }

    let mut candidates: BTreeSet<IVec> = BTreeSet::new();
    for subset in combinations(directions.len(), n - 1) {
        let vecs: Vec<IVec> = subset.iter().map(|&i| directions[i].clone()).collect();
        let Some(normal) = integer_normal(&vecs, n) else {
            continue;
        };
        let normal = if normal.iter().all(|&x| x <= 0) {
            normal.iter().map(|x| -x).collect()
        } else {
            normal
        };
        if normal.iter().all(|&x| x >= 0) {
            candidates.insert(normal);
        }
    }

    let mut poly = NewtonPolyhedron {
        n,
        generators,
        facets: Vec::new(),
        vertices: Vec::new(),
        faces: Vec::new(),
        face_index: BTreeMap::new(),
    };
    let mut facets: Vec<Facet> = candidates
        .into_iter()
        .filter(|a| {
            let key = poly.locus_key(a);
            let pts: Vec<&Exponent> = key
                .generators
                .iter()
                .map(|&i| &poly.generators[i])
                .collect();
            affine_dimension(&pts, &key.recession, n) == n - 1
        })
        .map(|a| {
            let offset = poly.m_value(&a);
            Facet { normal: a, offset }
        })
        .collect();
    facets.sort();
    poly.facets = facets;
    enumerate_faces_into(&mut poly)?;
    poly.vertices = poly
        .faces
        .iter()
        .filter(|f| f.dimension == 0)
        .map(|f| f.generators[0])
        .collect();
    poly.vertices.sort_unstable();
    Ok(poly)
}

/// Newton polyhedron of a polynomial.
pub fn polyhedron_of(f: &PolySeries, max_n: usize) -> Result<NewtonPolyhedron> {
    build_polyhedron(&minimal_support(f), f.n(), max_n)
}

/// Newton polyhedron of a certified series, from its declared support bound.
pub fn polyhedron_of_series(f: &SeriesSpec, max_n: usize) -> Result<NewtonPolyhedron> {
    build_polyhedron(&minimal_support_series(f)?, f.n(), max_n)
}

fn facets_containing(poly: &NewtonPolyhedron, key: &FaceKey) -> Vec<usize> {
    (0..poly.facets.len())
        .filter(|&j| {
            let fct = &poly.facets[j];
            key.generators
                .iter()
                .all(|&g| poly.generators[g].dot(&fct.normal) == fct.offset)
                && key.recession.iter().all(|&i| fct.normal[i] == 0)
        })
        .collect()
}

fn sum_normals(poly: &NewtonPolyhedron, facets: &[usize]) -> IVec {
    let mut a = vec![0; poly.n];
    for &j in facets {
        for (x, y) in a.iter_mut().zip(&poly.facets[j].normal) {
            *x += y;
        }
    }
    a
}

/// Faces as intersections of facet sets, walked downward from the facets.
fn enumerate_faces_into(poly: &mut NewtonPolyhedron) -> Result<()> {
    let n = poly.n;
    let mut found: BTreeMap<FaceKey, Vec<usize>> = BTreeMap::new();
    let mut queue: VecDeque<FaceKey> = VecDeque::new();
    for j in 0..poly.facets.len() {
        let key = poly.locus_key(&poly.facets[j].normal.clone());
        if !found.contains_key(&key) {
            let fs = facets_containing(poly, &key);
            found.insert(key.clone(), fs);
            queue.push_back(key);
        }
    }
    while let Some(key) = queue.pop_front() {
        let fs = found[&key].clone();
        for j in 0..poly.facets.len() {
            if fs.contains(&j) {
                continue;
            }
            let mut set = fs.clone();
            set.push(j);
            let a = sum_normals(poly, &set);
            let sub = poly.locus_key(&a);
            let sub_facets = facets_containing(poly, &sub);
            // an empty intersection yields some unrelated face: skip it
            if !set.iter().all(|s| sub_facets.contains(s)) {
                continue;
            }
            if !found.contains_key(&sub) {
                found.insert(sub.clone(), sub_facets);
                queue.push_back(sub);
            }
        }
    }

    let mut faces: Vec<(FaceKey, Vec<usize>, usize)> = found
        .into_iter()
        .map(|(key, fs)| {
            let pts: Vec<&Exponent> = key
                .generators
                .iter()
                .map(|&i| &poly.generators[i])
                .collect();
            let dim = affine_dimension(&pts, &key.recession, n);
            (key, fs, dim)
        })
        .collect();
    faces.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));

    let whole = FaceKey {
        generators: (0..poly.generators.len()).collect(),
        recession: (0..n).collect(),
    };
    let mut out = vec![Face {
        id: 0,
        generators: whole.generators.clone(),
        recession: whole.recession.clone(),
        dimension: n,
        compact: false,
        facets: Vec::new(),
        normal: vec![0; n],
    }];
    poly.face_index.clear();
    poly.face_index.insert(whole, 0);
    for (key, fs, dim) in faces {
        let id = out.len();
        let normal = sum_normals(poly, &fs);
        if poly.locus_key(&normal) != key {
            return Err(ZetaError::DegenerateFace(id));
        }
        out.push(Face {
            id,
            generators: key.generators.clone(),
            recession: key.recession.clone(),
            dimension: dim,
            compact: key.recession.is_empty(),
            facets: fs,
            normal,
        });
        poly.face_index.insert(key, id);
    }
    poly.faces = out;
    Ok(())
}

/// A half-open simplicial cone: points `sum lambda_i g_i` with `lambda_i >= 0`
/// where facet `i` is closed and `lambda_i > 0` where it is open.
#[derive(Debug, Clone, Serialize)]
pub struct SimplicialPiece {
    pub rays: Vec<IVec>,
    /// `closed[i]`: whether the facet opposite ray `i` belongs to the piece.
    pub closed: Vec<bool>,
    /// Lattice points of the half-open fundamental parallelepiped.
    pub points: Vec<IVec>,
    #[serde(skip)]
    solver: SpanSolver,
}

impl SimplicialPiece {
    /// Whether the lattice point `k` belongs to this half-open piece.
    pub fn contains(&self, k: &[i64]) -> bool {
        let Some(lambda) = self.solver.solve(k) else {
            return false;
        };
        lambda.iter().zip(&self.closed).all(|(l, &closed)| {
            if l.is_zero() {
                closed
            } else {
                *l > BigRational::zero()
            }
        })
    }

    /// Decomposes a member `k` as `h + sum n_i g_i` with `h` a parallelepiped point.
    pub fn decompose(&self, k: &[i64]) -> Option<(IVec, Vec<i64>)> {
        if !self.contains(k) {
            return None;
        }
        let lambda = self.solver.solve(k)?;
        let mut counts = Vec::with_capacity(lambda.len());
        for (l, &closed) in lambda.iter().zip(&self.closed) {
            // fractional part in [0,1) for closed facets, (0,1] for open ones
            let fl = l.floor();
            let c = if !closed && *l == fl {
                fl - BigRational::one()
            } else {
                fl
            };
            counts.push(i64::try_from(c.to_integer()).ok()?);
        }
        let mut h = k.to_vec();
        for (g, c) in self.rays.iter().zip(&counts) {
            for (x, y) in h.iter_mut().zip(g) {
                *x -= c * y;
            }
        }
        Some((h, counts))
    }
}

/// `Delta_tau` with its half-open simplicial decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct Cone {
    pub face_id: usize,
    /// Primitive normals of the facets containing the face, sorted.
    pub rays: Vec<IVec>,
    pub simplicial_pieces: Vec<SimplicialPiece>,
}

impl Cone {
    pub fn contains(&self, k: &[i64]) -> bool {
        self.simplicial_pieces.iter().any(|s| s.contains(k))
    }

    /// Number of pieces claiming `k` (exactly one for `k` in `Delta_tau`).
    pub fn claims(&self, k: &[i64]) -> usize {
        self.simplicial_pieces
            .iter()
            .filter(|s| s.contains(k))
            .count()
    }
}

/// Facets of the cone spanned by `rays` (indices into `rays`), each given as
/// the sorted list of rays it contains.
fn cone_facets(rays: &[IVec]) -> Vec<Vec<usize>> {
    let d = rank(rays);
    if d <= 1 {
        return vec![Vec::new()];
    }
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for subset in combinations(rays.len(), d - 1) {
        let basis: Vec<IVec> = subset.iter().map(|&i| rays[i].clone()).collect();
        if rank(&basis) != d - 1 {
            continue;
        }
        let Some(outside) = rays.iter().find(|r| {
            let mut b = basis.clone();
            b.push((*r).clone());
            rank(&b) == d
        }) else {
            continue;
        };
        let eta = orthogonal_component(&basis, outside);
        let signs: Vec<i8> = rays
            .iter()
            .map(|r| lex_sign(&[crate::linalg::dot_q(&eta, &to_q(r))]))
            .collect();
        if signs.iter().all(|&s| s >= 0) || signs.iter().all(|&s| s <= 0) {
            out.insert((0..rays.len()).filter(|&i| signs[i] == 0).collect());
        }
    }
    out.into_iter().collect()
}

/// Pulling triangulation of a pointed cone: pull the first ray, recurse into
/// the facets not containing it. Returns index sets into `rays`.
pub fn pulling_triangulation(rays: &[IVec]) -> Vec<Vec<usize>> {
    fn rec(rays: &[IVec], idx: &[usize]) -> Vec<Vec<usize>> {
        let sub: Vec<IVec> = idx.iter().map(|&i| rays[i].clone()).collect();
        let d = rank(&sub);
        if idx.len() == d {
            return vec![idx.to_vec()];
        }
        let apex = idx[0];
        let mut out = Vec::new();
        for facet in cone_facets(&sub) {
            let members: Vec<usize> = facet.iter().map(|&j| idx[j]).collect();
            if members.contains(&apex) {
                continue;
            }
            for simplex in rec(rays, &members) {
                let mut s = vec![apex];
                s.extend(simplex);
                out.push(s);
            }
        }
        out
    }
    let idx: Vec<usize> = (0..rays.len()).collect();
    rec(rays, &idx)
}

/// Lattice points `sum lambda_i g_i` with each `lambda_i` in `[0,1)` (closed
/// facet) or `(0,1]` (open facet), by scanning the bounding box on the
/// solver's pivot coordinates.
fn parallelepiped_points(rays: &[IVec], closed: &[bool], solver: &SpanSolver) -> Vec<IVec> {
    let n = rays[0].len();
    let rows = solver.rows().to_vec();
    let upper: Vec<i64> = rows
        .iter()
        .map(|&r| rays.iter().map(|g| g[r]).sum())
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0i64; rows.len()];
    loop {
        let sub: Vec<BigRational> = cur
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        let lambda = solver.coords_from_rows(&sub);
        let in_range = lambda.iter().zip(closed).all(|(l, &c)| {
            if c {
                *l >= BigRational::zero() && *l < BigRational::one()
            } else {
                *l > BigRational::zero() && *l <= BigRational::one()
            }
        });
        if in_range {
            let full = solver.combine(&lambda);
            if full.iter().all(|x| x.is_integer()) {
                let pt: IVec = full
                    .iter()
                    .map(|x| i64::try_from(x.to_integer()).unwrap())
                    .collect();
                debug_assert_eq!(pt.len(), n);
                out.push(pt);
            }
        }
        // odometer over the box
        let mut i = 0;
        loop {
            if i == cur.len() {
                out.sort();
                return out;
            }
            if cur[i] < upper[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// `Delta_tau` for a proper face, with rays, triangulation and half-open
/// parallelepiped points.
///
/// Boundary bookkeeping: with `y` a lexicographically perturbed interior
/// point (sum of all rays, then each ray in sorted order at decreasing
/// scales), a point `k` is assigned to the piece whose interior contains
/// `k - eps*y`. That excludes the boundary of the cone and splits shared
/// internal facets exactly once.
pub fn cone_of_face(poly: &NewtonPolyhedron, face: &Face) -> Result<Cone> {
    if face.is_whole() {
        return Err(ZetaError::DegenerateFace(face.id));
    }
    let mut rays: Vec<IVec> = face
        .facets
        .iter()
        .map(|&j| poly.facets[j].normal.clone())
        .collect();
    rays.sort();
    rays.dedup();
    if rank(&rays) != poly.n - face.dimension {
        return Err(ZetaError::DegenerateFace(face.id));
    }
    let y0: IVec = (0..poly.n)
        .map(|i| rays.iter().map(|r| r[i]).sum())
        .collect();

    let mut pieces = Vec::new();
    for simplex in pulling_triangulation(&rays) {
        let gens: Vec<IVec> = simplex.iter().map(|&i| rays[i].clone()).collect();
        let solver = SpanSolver::new(&gens).ok_or(ZetaError::DegenerateFace(face.id))?;
        let coords_y0 = solver.solve(&y0).expect("interior point lies in the span");
        let coords_rays: Vec<Vec<BigRational>> = rays
            .iter()
            .map(|r| solver.solve(r).expect("cone rays lie in the span"))
            .collect();
        let closed: Vec<bool> = (0..gens.len())
            .map(|i| {
                let mut seq = vec![coords_y0[i].clone()];
                seq.extend(coords_rays.iter().map(|c| c[i].clone()));
                lex_sign(&seq) < 0
            })
            .collect();
        let points = parallelepiped_points(&gens, &closed, &solver);
        pieces.push(SimplicialPiece {
            rays: gens,
            closed,
            points,
            solver,
        });
    }
    Ok(Cone {
        face_id: face.id,
        rays,
        simplicial_pieces: pieces,
    })
}

/// Cones of every proper face, in face-id order.
pub fn all_cones(poly: &NewtonPolyhedron, exec: Exec) -> Result<Vec<Cone>> {
    let faces: Vec<&Face> = poly.proper_faces().collect();
    exec.map(&faces, |f| cone_of_face(poly, f))
        .into_iter()
        .collect()
}

/// Lattice points `k` with `0 < |k| <= bound`.
pub fn lattice_points_up_to(n: usize, bound: u32) -> Vec<IVec> {
    (1..=bound)
        .flat_map(|d| crate::series::exponents_of_degree(n, d))
        .map(|w| w.as_i64())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionFailure {
    pub point: IVec,
    pub expected_face: usize,
    pub claimed_by: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub pass: bool,
    pub checked: usize,
    /// Face id -> number of lattice points assigned to its cone.
    pub per_face: BTreeMap<usize, usize>,
    pub failures: Vec<PartitionFailure>,
    /// Points where `m(k) != k.w` for some `w` on the claimed face.
    pub m_linearity_failures: Vec<IVec>,
}

/// Checks that every `k` with `0 < |k| <= bound` lies in exactly one cone,
/// namely that of `F(k)`, and that exactly one simplicial piece claims it.
pub fn verify_partition(
    poly: &NewtonPolyhedron,
    bound: u32,
    exec: Exec,
) -> Result<PartitionReport> {
    let cones = all_cones(poly, exec)?;
    let points = lattice_points_up_to(poly.n, bound);
    let results = exec.map(&points, |k| {
        let expected = poly.first_meet_locus(k).id;
        let mut claimed_by = Vec::new();
        for c in &cones {
            for _ in 0..c.claims(k) {
                claimed_by.push(c.face_id);
            }
        }
        let face = poly.face(expected);
        let m = poly.m_value(k);
        let linear = poly.face_points(face).iter().all(|w| w.dot(k) == m);
        (k.clone(), expected, claimed_by, linear)
    });
    let mut report = PartitionReport {
        pass: true,
        checked: results.len(),
        per_face: BTreeMap::new(),
        failures: Vec::new(),
        m_linearity_failures: Vec::new(),
    };
    for (k, expected, claimed_by, linear) in results {
        if claimed_by.len() == 1 && claimed_by[0] == expected {
            *report.per_face.entry(expected).or_default() += 1;
        } else {
            report.pass = false;
            report.failures.push(PartitionFailure {
                point: k.clone(),
                expected_face: expected,
                claimed_by,
            });
        }
        if !linear {
            report.pass = false;
            report.m_linearity_failures.push(k);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(v: &[&[u32]]) -> Vec<Exponent> {
        v.iter().map(|w| Exponent(w.to_vec())).collect()
    }

    fn face_with_points<'a>(poly: &'a NewtonPolyhedron, pts: &[&[u32]]) -> &'a Face {
        let want: Vec<Exponent> = exps(pts);
        poly.faces()
            .iter()
            .find(|f| {
                f.compact && poly.face_points(f).into_iter().cloned().collect::<Vec<_>>() == want
            })
            .expect("face present")
    }

    #[test]
    fn minimal_support_examples() {
        let s = exps(&[&[3, 0], &[1, 1], &[0, 2], &[2, 2]]);
        assert_eq!(minimal_elements(&s), exps(&[&[0, 2], &[1, 1], &[3, 0]]));
        assert_eq!(minimal_elements(&exps(&[&[2], &[5], &[9]])), exps(&[&[2]]));
    }

    #[test]
    fn three_point_polyhedron() {
        let poly = build_polyhedron(&exps(&[&[3, 0], &[1, 1], &[0, 2]]), 2, 4).unwrap();
        let facets: Vec<(IVec, i64)> = poly
            .facets()
            .iter()
            .map(|f| (f.normal.clone(), f.offset))
            .collect();
        assert_eq!(
            facets,
            vec![
                (vec![0, 1], 0),
                (vec![1, 0], 0),
                (vec![1, 1], 2),
                (vec![1, 2], 3)
            ]
        );
        assert_eq!(poly.vertices().len(), 3);
        let count = |dim: usize, compact: bool| {
            poly.proper_faces()
                .filter(|f| f.dimension == dim && f.compact == compact)
                .count()
        };
        assert_eq!(count(0, true), 3);
        assert_eq!(count(1, true), 2);
        assert_eq!(count(1, false), 2);
        assert_eq!(poly.faces().len(), 8);
        assert_eq!(poly.m_value(&[1, 1]), 2);
        assert_eq!(poly.m_value(&[0, 0]), 0);
        let f = poly.first_meet_locus(&[1, 1]);
        assert_eq!(
            poly.face_points(f).into_iter().cloned().collect::<Vec<_>>(),
            exps(&[&[0, 2], &[1, 1]])
        );
        assert!(poly.first_meet_locus(&[0, 0]).is_whole());
        assert_eq!(poly.first_meet_locus(&[7, 5]).dimension, 0);
    }

    #[test]
    fn one_variable_polyhedron() {
        let poly = build_polyhedron(&exps(&[&[2]]), 1, 4).unwrap();
        assert_eq!(
            poly.facets(),
            &[Facet {
                normal: vec![1],
                offset: 2
            }]
        );
        assert_eq!(poly.faces().len(), 2);
        assert_eq!(poly.m_value(&[5]), 10);
        let cone = cone_of_face(&poly, poly.face(1)).unwrap();
        assert_eq!(cone.rays, vec![vec![1]]);
        assert_eq!(cone.simplicial_pieces.len(), 1);
        assert_eq!(cone.simplicial_pieces[0].points, vec![vec![1]]);
        assert!(!cone.contains(&[0]));
        assert!((1..10).all(|k| cone.contains(&[k])));
    }

    #[test]
    fn simplex_edge_cones() {
        let poly = build_polyhedron(&exps(&[&[1, 0], &[0, 1]]), 2, 4).unwrap();
        let compact_facets: Vec<&Facet> = poly
            .facets()
            .iter()
            .filter(|f| f.normal.iter().all(|&x| x > 0))
            .collect();
        assert_eq!(
            compact_facets,
            vec![&Facet {
                normal: vec![1, 1],
                offset: 1
            }]
        );
        // vertices, compact edge, two unbounded edges, Gamma
        assert_eq!(poly.faces().len(), 6);

        let edge = face_with_points(&poly, &[&[0, 1], &[1, 0]]);
        let cone = cone_of_face(&poly, edge).unwrap();
        assert_eq!(cone.rays, vec![vec![1, 1]]);
        for k in lattice_points_up_to(2, 10) {
            assert_eq!(cone.contains(&k), k[0] == k[1], "{k:?}");
        }

        let vertex = face_with_points(&poly, &[&[0, 1]]);
        let cone = cone_of_face(&poly, vertex).unwrap();
        assert_eq!(cone.rays, vec![vec![1, 0], vec![1, 1]]);
        for k in lattice_points_up_to(2, 10) {
            assert_eq!(cone.contains(&k), k[0] > k[1] && k[1] > 0, "{k:?}");
        }
    }

    #[test]
    fn partitions_hold() {
        let cases: Vec<(Vec<Exponent>, usize)> = vec![
            (exps(&[&[2]]), 1),
            (exps(&[&[1, 0], &[0, 1]]), 2),
            (exps(&[&[3, 0], &[1, 1], &[0, 2]]), 2),
            (exps(&[&[1, 1]]), 2),
            (exps(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]), 3),
            (exps(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]), 3),
        ];
        for (supp, n) in cases {
            let poly = build_polyhedron(&supp, n, 4).unwrap();
            let report = verify_partition(&poly, 8, Exec::Sequential).unwrap();
            assert!(report.pass, "{supp:?}: {:?}", report.failures);
        }
    }

    #[test]
    fn three_point_partition_counts() {
        let poly = build_polyhedron(&exps(&[&[3, 0], &[1, 1], &[0, 2]]), 2, 4).unwrap();
        let report = verify_partition(&poly, 8, Exec::Parallel).unwrap();
        assert!(report.pass);
        // #{k in N^2 : 0 < |k| <= 8} = 44
        assert_eq!(report.checked, 44);
        assert_eq!(report.per_face.values().sum::<usize>(), 44);
    }

    #[test]
    fn non_simplicial_cone_is_triangulated() {
        // xy + z^2: the vertex (1,1,0) lies on four facets
        let supp = exps(&[&[1, 1, 0], &[0, 0, 2]]);
        let poly = build_polyhedron(&supp, 3, 4).unwrap();
        let report = verify_partition(&poly, 9, Exec::Parallel).unwrap();
        assert!(report.pass, "{:?}", report.failures);
        let any_multi = all_cones(&poly, Exec::Sequential)
            .unwrap()
            .iter()
            .any(|c| c.simplicial_pieces.len() > 1);
        assert!(any_multi, "expected at least one non-simplicial cone");
    }

    #[test]
    fn parallelepiped_decomposition_is_unique() {
        let supp = exps(&[&[1, 1, 1], &[3, 0, 0], &[0, 3, 0], &[0, 0, 3]]);
        let poly = build_polyhedron(&supp, 3, 4).unwrap();
        for cone in all_cones(&poly, Exec::Sequential).unwrap() {
            for piece in &cone.simplicial_pieces {
                for k in lattice_points_up_to(3, 7) {
                    if let Some((h, counts)) = piece.decompose(&k) {
                        assert!(counts.iter().all(|&c| c >= 0));
                        assert!(piece.points.contains(&h), "{k:?} -> {h:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn dimension_guard() {
        let supp = exps(&[&[1, 0, 0, 0, 0]]);
        assert_eq!(
            build_polyhedron(&supp, 5, 4).unwrap_err(),
            ZetaError::DimensionTooLarge { n: 5, max: 4 }
        );
        assert!(build_polyhedron(&[], 2, 4).is_err());
    }

    #[test]
    fn whole_polyhedron_has_no_cone() {
        let poly = build_polyhedron(&exps(&[&[1, 1]]), 2, 4).unwrap();
        assert!(matches!(
            cone_of_face(&poly, poly.face(0)),
            Err(ZetaError::DegenerateFace(0))
        ));
    }
}
