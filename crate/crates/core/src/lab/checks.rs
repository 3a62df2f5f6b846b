//! Randomized identity tests, spectra, global conjugation and the
//! ungauge/regauge round trip on small lattices.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::operator::{omega_pow, Edge, Exponent, Factor, Operator, Word};
use super::spectrum::spectrum;
use super::stabilizers::{
    a_vertex, a_z3, alpha, b_plaquette, b_plaquette_with, b_z3, beta, build_stabilizer,
    plus_projector, trivial_projector, LabLattice, Site, StabilizerKind,
};
use super::state::{word_identity_residuals, CompiledOperator, SmallState};
use super::LabError;
use crate::algebra::PARAFERMION_F;

pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub id: String,
    pub placement: String,
    pub residual: f64,
    pub pass: bool,
}

fn union_support(ops: &[&Operator]) -> Vec<Edge> {
    let mut edges = BTreeSet::new();
    for op in ops {
        edges.extend(op.support());
    }
    if edges.is_empty() {
        edges.insert(Edge::Horizontal(0, 0));
    }
    edges.into_iter().collect()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Largest ‖(lhs − rhs)ψ‖ over `trials` Haar-random states on the joint
/// support.
pub fn check_identity(lhs: &Operator, rhs: &Operator, trials: usize, seed: u64) -> Result<f64, LabError> {
    let edges = union_support(&[lhs, rhs]);
    let diff = CompiledOperator::new(&lhs.clone().minus(rhs.clone()), &edges)?;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let s = SmallState::random(edges.clone(), &mut trial_rng(seed, t))?;
        worst = worst.max(diff.apply(&s).norm());
    }
    Ok(worst)
}

fn comm(v: &Word, w: &Word) -> Word {
    Word::commutator(v, w)
}

/// ω^{(1 − β_p)/2} as an operator.
fn beta_phase(lat: &LabLattice, p: (i32, i32)) -> Word {
    Word::single(Factor::Omega(Exponent::HalfOneMinus {
        coeff: 1,
        edges: lat.plaquette_edges(p).to_vec(),
    }))
}

/// Haar-random amplitude vectors shared by all checks of the same size.
struct RandomStates {
    seed: u64,
    trials: usize,
    cache: HashMap<usize, Vec<Vec<Complex64>>>,
}

impl RandomStates {
    fn get(&mut self, edges: &[Edge]) -> Result<&[Vec<Complex64>], LabError> {
        let (seed, trials) = (self.seed, self.trials);
        let n = edges.len();
        if !self.cache.contains_key(&n) {
            let states = (0..trials)
                .map(|t| Ok(SmallState::random(edges.to_vec(), &mut trial_rng(seed ^ n as u64, t))?.amps))
                .collect::<Result<Vec<_>, LabError>>()?;
            self.cache.insert(n, states);
        }
        Ok(&self.cache[&n])
    }
}

/// Every commutator relation between the stabilizer words, for each relative
/// placement of the second site on the lattice against a fixed first site
/// (vertex and plaquette at (1, 1)).
pub fn identity_suite(lat: &LabLattice, trials: usize, seed: u64) -> Result<Vec<IdentityResult>, LabError> {
    let v0 = (1, 1);
    let p0 = (1, 1);
    let one = Word::identity();
    let mut cases: Vec<(String, String, Word, Word)> = Vec::new();
    let vname = |v: (i32, i32)| format!("v({},{})", v.0, v.1);
    let pname = |p: (i32, i32)| format!("p({},{})", p.0, p.1);

    for v in lat.vertices() {
        let sw = lat.is_south_west_corner(v, p0);
        let place = format!("{} {}", vname(v), pname(p0));
        let rhs = if sw { beta_phase(lat, p0) } else { one.clone() };
        cases.push(("[A_v,B_p]".into(), place.clone(), comm(&a_vertex(lat, v), &b_plaquette(lat, p0)), rhs));
        let rhs = if sw { b_plaquette(lat, p0)} else { one.clone() };
        cases.push(("[alpha_v,B_p]".into(), place.clone(), comm(&alpha(lat, v), &b_plaquette(lat, p0)), rhs));
        cases.push(("[alpha_v,beta_p]".into(), place.clone(), comm(&alpha(lat, v), &beta(lat, p0)), one.clone()));
        cases.push(("[A_v,beta_p]".into(), place, comm(&a_vertex(lat, v), &beta(lat, p0)), one.clone()));

        let place = format!("{} {}", vname(v), vname(v0));
        let rhs = if v == v0 { a_vertex(lat, v0)} else { one.clone() };
        cases.push(("[alpha_u,A_v]".into(), place.clone(), comm(&alpha(lat, v), &a_vertex(lat, v0)), rhs));
        cases.push(("[A_u,A_v]".into(), place, comm(&a_vertex(lat, v), &a_vertex(lat, v0)), one.clone()));
    }
    for q in lat.plaquettes() {
        let place = format!("{} {}", pname(q), pname(p0));
        cases.push(("[B_q,B_p]".into(), place.clone(), comm(&b_plaquette(lat, q), &b_plaquette(lat, p0)), one.clone()));
        cases.push(("[B_q,beta_p]".into(), place.clone(), comm(&b_plaquette(lat, q), &beta(lat, p0)), one.clone()));
        cases.push(("[beta_q,beta_p]".into(), place, comm(&beta(lat, q), &beta(lat, p0)), one.clone()));
    }
    for p in lat.plaquettes() {
        cases.push((
            "kappa_forms".into(),
            pname(p),
            b_plaquette_with(lat, p, false),
            b_plaquette_with(lat, p, true),
        ));
    }

    let mut states = RandomStates {
        seed,
        trials,
        cache: HashMap::new(),
    };
    cases
        .into_iter()
        .map(|(id, placement, lhs, rhs)| {
            let edges = union_support(&[&lhs.clone().into(), &rhs.clone().into()]);
            let residuals = word_identity_residuals(&lhs, &rhs, &edges, states.get(&edges)?)?;
            let residual = residuals.into_iter().fold(0.0, f64::max);
            Ok(IdentityResult {
                id,
                placement,
                residual,
                pass: residual < IDENTITY_TOL,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    pub kind: String,
    pub site: String,
    /// Distinct eigenvalues with multiplicities.
    pub eigenvalues: Vec<(f64, usize)>,
    pub expected: Vec<f64>,
    pub trace: f64,
    pub pass: bool,
}

pub fn expected_spectrum(kind: StabilizerKind) -> Option<Vec<f64>> {
    match kind {
        StabilizerKind::Alpha | StabilizerKind::Beta | StabilizerKind::SV | StabilizerKind::SP => {
            Some(vec![-1.0, 1.0])
        }
        StabilizerKind::F | StabilizerKind::G | StabilizerKind::FProjector | StabilizerKind::GProjector => {
            Some(vec![0.0, 1.0])
        }
        _ => None,
    }
}

/// Exact eigenvalues of a Hermitian stabilizer term, compared with the
/// expected set.
pub fn check_spectrum(kind: StabilizerKind, site: Site, lat: &LabLattice) -> Result<SpectrumResult, LabError> {
    let expected = expected_spectrum(kind).ok_or(LabError::NotHermitian(kind))?;
    let op = build_stabilizer(kind, site, lat)?;
    let spec = spectrum(&op, 1e-9)?;
    let pass = spec.hermiticity_defect < IDENTITY_TOL && spec.matches(&expected, IDENTITY_TOL);
    Ok(SpectrumResult {
        kind: kind.name().to_string(),
        site: site.to_string(),
        eigenvalues: spec.values,
        expected,
        trace: spec.trace.re,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationReport {
    /// ‖(Π α_u − Π K_e)ψ‖, maximized over random states.
    pub residual: f64,
    /// Largest ‖(C β_p C† − β_p)ψ‖ over plaquettes.
    pub beta_invariance: f64,
}

pub fn global_alpha_product(lat: &LabLattice) -> Word {
    lat.vertices()
        .into_iter()
        .fold(Word::identity(), |w, v| w.then(&alpha(lat, v)))
}

pub fn check_global_conjugation(lat: &LabLattice, trials: usize, seed: u64) -> Result<ConjugationReport, LabError> {
    let product = global_alpha_product(lat);
    let k_all = Word::new(lat.edges().into_iter().map(Factor::K).collect());
    let residual = check_identity(&product.clone().into(), &k_all.into(), trials, seed)?;
    let mut beta_invariance: f64 = 0.0;
    for (i, p) in lat.plaquettes().into_iter().enumerate() {
        let b = beta(lat, p);
        let conj = product.then(&b).then(&product.inverse());
        let r = check_identity(&conj.into(), &b.into(), trials, seed.wrapping_add(1 + i as u64))?;
        beta_invariance = beta_invariance.max(r);
    }
    Ok(ConjugationReport {
        residual,
        beta_invariance,
    })
}

/// Number of σ^X factors per edge in a product of words.
pub fn sigma_x_counts(words: &[Word]) -> Vec<(Edge, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for w in words {
        for f in &w.factors {
            if let Factor::SigmaX(e) = f {
                *counts.entry(*e).or_insert(0) += 1;
            }
        }
    }
    counts.into_iter().collect()
}

/// (1/3) Σ_j ω^{−jk} W^j, the projector onto W = ω^k for W³ = 1.
pub fn eigen_projector(w: &Word, k: i32) -> Operator {
    let mut op = Operator::zero();
    for j in 0..3 {
        op = op.plus(Operator::from_word(w.pow(j as u32)).scaled(omega_pow(-j * k) / 3.0));
    }
    op
}

fn stabilizer_words(lat: &LabLattice) -> Vec<(String, Word)> {
    let mut out = Vec::new();
    for v in lat.vertices() {
        out.push((format!("alpha v({},{})", v.0, v.1), alpha(lat, v)));
        out.push((format!("A v({},{})", v.0, v.1), a_vertex(lat, v)));
    }
    for p in lat.plaquettes() {
        out.push((format!("beta p({},{})", p.0, p.1), beta(lat, p)));
        out.push((format!("B p({},{})", p.0, p.1), b_plaquette(lat, p)));
    }
    out
}

fn apply_normalized(s: &SmallState, op: &Operator) -> Result<(SmallState, f64), LabError> {
    let mut out = s.apply(op)?;
    let n = out.normalize();
    if n < 1e-9 {
        return Err(LabError::EmptyProjection);
    }
    Ok((out, n))
}

/// Ground state of a periodic lattice: a random state projected onto
/// β = α = A = B = +1, sweeping until the projections stop changing it.
pub fn ground_state(lat: &LabLattice, seed: u64) -> Result<SmallState, LabError> {
    let mut projectors: Vec<Operator> = Vec::new();
    for p in lat.plaquettes() {
        projectors.push(plus_projector(&beta(lat, p)));
    }
    for v in lat.vertices() {
        projectors.push(plus_projector(&alpha(lat, v)));
        projectors.push(trivial_projector(&a_vertex(lat, v)));
    }
    for p in lat.plaquettes() {
        projectors.push(trivial_projector(&b_plaquette(lat, p)));
    }
    let mut state = SmallState::random(lat.edges(), &mut trial_rng(seed, 0))?;
    for _ in 0..10 {
        let before = state.clone();
        for proj in &projectors {
            state = apply_normalized(&state, proj)?.0;
        }
        if state.distance(&before) < 1e-12 {
            break;
        }
    }
    Ok(state)
}

/// Largest ‖Wψ − ψ‖ over all α, A, β, B words of the lattice.
pub fn stabilizer_residual(lat: &LabLattice, s: &SmallState) -> Result<f64, LabError> {
    let mut worst: f64 = 0.0;
    for (_, w) in stabilizer_words(lat) {
        worst = worst.max(s.apply_word(&w)?.distance(s));
    }
    Ok(worst)
}

/// Largest ‖(XY − YX)ψ‖ over pairs of stabilizer words.
pub fn pairwise_commutation_residual(lat: &LabLattice, s: &SmallState) -> Result<f64, LabError> {
    let words = stabilizer_words(lat);
    let mut worst: f64 = 0.0;
    for (i, (_, x)) in words.iter().enumerate() {
        for (_, y) in &words[i + 1..] {
            let xy = s.apply_word(&x.then(y))?;
            let yx = s.apply_word(&y.then(x))?;
            worst = worst.max(xy.distance(&yx));
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModifiedStabilizer {
    pub site: String,
    pub form: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UngaugeReport {
    pub probability: f64,
    pub flipped_edges: Vec<String>,
    pub loops_closed: bool,
    pub modified: Vec<ModifiedStabilizer>,
    pub modified_max_residual: f64,
    /// Whether the flipped edges bound a vertex set, so that conjugating by
    /// the α terms inside removes them.
    pub contractible: bool,
    pub conjugated_vertices: Vec<(i32, i32)>,
    pub clean_z3_residual: Option<f64>,
    pub regauge_probability: Option<f64>,
    pub regauge_residual: Option<f64>,
}

impl UngaugeReport {
    pub fn pass(&self) -> bool {
        self.loops_closed
            && self.modified_max_residual < IDENTITY_TOL
            && self.clean_z3_residual.map_or(!self.contractible, |r| r < IDENTITY_TOL)
            && self.regauge_residual.map_or(!self.contractible, |r| r < IDENTITY_TOL)
    }
}

fn edge_endpoints(lat: &LabLattice, e: Edge) -> [(i32, i32); 2] {
    let wrap = |(x, y): (i32, i32)| {
        if lat.periodic {
            (x.rem_euclid(lat.width), y.rem_euclid(lat.height))
        } else {
            (x, y)
        }
    };
    match e {
        Edge::Horizontal(x, y) => [(x, y), wrap((x + 1, y))],
        Edge::Vertical(x, y) => [(x, y), wrap((x, y + 1))],
    }
}

/// Vertex set whose coboundary is exactly `flipped`, if one exists.
fn bounding_vertices(lat: &LabLattice, edges: &[Edge], flipped: &BTreeSet<Edge>) -> Option<Vec<(i32, i32)>> {
    let vertices = lat.vertices();
    assert!(vertices.len() <= 20, "brute-force search over vertex subsets");
    (0u32..1 << vertices.len()).find_map(|mask| {
        let inside = |v: (i32, i32)| {
            let k = vertices.iter().position(|&u| u == v).expect("lattice vertex");
            mask >> k & 1 == 1
        };
        let ok = edges.iter().all(|&e| {
            let [a, b] = edge_endpoints(lat, e);
            (inside(a) != inside(b)) == flipped.contains(&e)
        });
        ok.then(|| {
            vertices
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
    })
}

/// Projects the qubits of `ground` onto the σ^Z pattern `outcomes`
/// (1 = outcome −1, ordered as `lat.edges()`), reports the modified qutrit
/// stabilizers, then conjugates along the loops and regauges.
pub fn check_ungauge_projection(
    lat: &LabLattice,
    ground: &SmallState,
    outcomes: &[u8],
) -> Result<UngaugeReport, LabError> {
    let edges = lat.edges();
    if outcomes.len() != edges.len() {
        return Err(LabError::OutcomeLength {
            got: outcomes.len(),
            expected: edges.len(),
        });
    }
    let flipped: BTreeSet<Edge> = edges
        .iter()
        .zip(outcomes)
        .filter(|(_, &o)| o == 1)
        .map(|(&e, _)| e)
        .collect();
    let odd: Vec<(i32, i32)> = lat
        .plaquettes()
        .into_iter()
        .filter(|&p| lat.plaquette_edges(p).iter().filter(|e| flipped.contains(e)).count() % 2 == 1)
        .collect();
    if !odd.is_empty() {
        return Err(LabError::OddBoundary(odd));
    }

    let mut state = ground.project_qubits(outcomes);
    let norm = state.normalize();
    if norm < 1e-9 {
        return Err(LabError::EmptyProjection);
    }
    let sigma = |e: Edge| if flipped.contains(&e) { -1 } else { 1 };

    let mut modified = Vec::new();
    for v in lat.vertices() {
        let w = a_vertex(lat, v).specialize(sigma);
        let residual = state.apply_word(&w)?.distance(&state);
        modified.push(ModifiedStabilizer {
            site: format!("v({},{})", v.0, v.1),
            form: w.to_string(),
            residual,
        });
    }
    for p in lat.plaquettes() {
        let w = b_plaquette(lat, p).specialize(sigma);
        let residual = state.apply_word(&w)?.distance(&state);
        modified.push(ModifiedStabilizer {
            site: format!("p({},{})", p.0, p.1),
            form: w.to_string(),
            residual,
        });
    }
    let modified_max_residual = modified.iter().map(|m| m.residual).fold(0.0, f64::max);

    let mut report = UngaugeReport {
        probability: norm * norm,
        flipped_edges: flipped.iter().map(|e| e.to_string()).collect(),
        loops_closed: true,
        modified,
        modified_max_residual,
        contractible: false,
        conjugated_vertices: Vec::new(),
        clean_z3_residual: None,
        regauge_probability: None,
        regauge_residual: None,
    };
    let Some(inside) = bounding_vertices(lat, &edges, &flipped) else {
        return Ok(report);
    };
    report.contractible = true;
    let conj = inside
        .iter()
        .fold(Word::identity(), |w, &u| w.then(&alpha(lat, u)));
    let corrected = state.apply_word(&conj)?;
    let mut clean: f64 = (1.0 - corrected.project_qubits(&vec![0; edges.len()]).norm()).abs();
    for v in lat.vertices() {
        clean = clean.max(corrected.apply_word(&a_z3(lat, v))?.distance(&corrected));
    }
    for p in lat.plaquettes() {
        clean = clean.max(corrected.apply_word(&b_z3(lat, p))?.distance(&corrected));
    }
    report.conjugated_vertices = inside;
    report.clean_z3_residual = Some(clean);

    let mut regauged = corrected;
    let mut probability = 1.0;
    for v in lat.vertices() {
        let (s, n) = apply_normalized(&regauged, &plus_projector(&alpha(lat, v)))?;
        regauged = s;
        probability *= n * n;
    }
    report.regauge_probability = Some(probability);
    report.regauge_residual = Some(stabilizer_residual(lat, &regauged)?);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct ParafermionReport {
    /// Microscopic (e, m) values on which the idempotent F projector is 1,
    /// with e read from A_v = ω^e and m from B^{Z3}_p = ω^m.
    pub f_sector: Vec<(u8, u8)>,
    pub g_sector: Vec<(u8, u8)>,
    pub matches_fusion_convention: bool,
    /// max ‖(F + G − 1)ψ‖ on e∧m states, idempotent forms.
    pub two_term_residual: f64,
    /// max ‖(F + G + P[A B† = 1] − 1)ψ‖ on the same states.
    pub three_term_residual: f64,
    /// Distinct eigenvalues of the literal (1 − A†B − AB†)/2.
    pub literal_f_spectrum: Vec<f64>,
}

/// Identifies which e∧m composites the F and G projectors select, on a
/// single plaquette whose south-west corner hosts the vertex charge.
pub fn derive_parafermion_convention(seed: u64) -> Result<ParafermionReport, LabError> {
    let lat = LabLattice::patch(1, 1);
    let (v, p) = ((0, 0), (0, 0));
    let site = Site::Pair { vertex: v, plaquette: p };
    let f = build_stabilizer(StabilizerKind::FProjector, site, &lat)?;
    let g = build_stabilizer(StabilizerKind::GProjector, site, &lat)?;
    let a = a_vertex(&lat, v);
    let b = b_plaquette(&lat, p);
    let same = trivial_projector(&a.then(&b.inverse()));
    let edges = union_support(&[&f, &g]);
    let base = SmallState::random(edges.clone(), &mut trial_rng(seed, 0))?.project_qubits(&vec![0; edges.len()]);

    let mut f_sector = Vec::new();
    let mut g_sector = Vec::new();
    let mut two: f64 = 0.0;
    let mut three: f64 = 0.0;
    for ke in 1..3u8 {
        for km in 1..3u8 {
            let (s, _) = apply_normalized(&base, &eigen_projector(&a, ke as i32))?;
            let (s, _) = apply_normalized(&s, &eigen_projector(&b_z3(&lat, p), km as i32))?;
            let fs = s.apply(&f)?;
            let gs = s.apply(&g)?;
            if s.inner(&fs).re > 0.5 {
                f_sector.push((ke, km));
            }
            if s.inner(&gs).re > 0.5 {
                g_sector.push((ke, km));
            }
            let ps = s.apply(&same)?;
            let mut r2 = fs.clone();
            let mut r3 = fs;
            for i in 0..s.dim() {
                r2.amps[i] += gs.amps[i] - s.amps[i];
                r3.amps[i] += gs.amps[i] + ps.amps[i] - s.amps[i];
            }
            two = two.max(r2.norm());
            three = three.max(r3.norm());
        }
    }
    let literal = spectrum(&build_stabilizer(StabilizerKind::F, site, &lat)?, 1e-9)?;
    Ok(ParafermionReport {
        matches_fusion_convention: f_sector == PARAFERMION_F.to_vec(),
        f_sector,
        g_sector,
        two_term_residual: two,
        three_term_residual: three,
        literal_f_spectrum: literal.distinct(),
    })
}
