//! Batch front end: parse exact-rational problem documents, run the decision
//! procedures, and emit verdicts with re-verifiable witnesses.
//!
//! Documents are UTF-8 JSON with rationals encoded as strings `"p"` or
//! `"p/q"`; floating-point numbers never appear. Torus labels may carry
//! trailing `^` marks to reference duals. The canonical output section is
//! byte-deterministic for a fixed input; timing lives in a separate
//! non-canonical trailer.
//!
//! Exit-code contract: `0` when every task passes, `1` when any task yields
//! `fail` or `none`, `2` on parse/validation errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cohomology::check_pd_square;
use crate::error::{Error, Result};
use crate::kummer::{kummer_criterion, split, transport_and_restrict, KummerContext};
use crate::lift::{
    in_g_so_between, lift_criterion_between, restrict_res_between, IsogenyContext, LatticeLeg,
    LiftOutcome, MembershipFailure,
};
use crate::matrix::{format_rational, RatMatrix};
use crate::mukai::{BlockIso, MukaiSpace, SymplecticMap};
use crate::torus::{ComplexTorus, TorusHom};

// ---------------------------------------------------------------------------
// problem documents
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusSpec {
    pub g: usize,
    pub j: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomSpec {
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockMapSpec {
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Hat-inverse condition on a variety-level block map given by four homs.
    CheckSp { g1: String, g2: String, g3: String, g4: String },
    /// Hodge condition on a Mukai-level block map.
    CheckHodge { map: String },
    /// Lift a Mukai-level map through the multiplication-by-n contexts.
    CheckLift { n: i64, map: String },
    /// Restrict a member of the equivariant group back to the base.
    Restrict { n: i64, map: String },
    /// Full pipeline: embed, transport, split.
    KummerSplit { n: usize, g1: String, g2: String, g3: String, g4: String },
    /// The commuting square of duality maps for an isogeny.
    PdSquare { hom: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemDocument {
    #[serde(default)]
    pub tori: BTreeMap<String, TorusSpec>,
    #[serde(default)]
    pub homs: BTreeMap<String, HomSpec>,
    #[serde(default)]
    pub block_maps: BTreeMap<String, BlockMapSpec>,
    pub tasks: Vec<TaskSpec>,
}

pub fn parse_document(text: &str) -> Result<ProblemDocument> {
    serde_json::from_str(text)
        .map_err(|e| Error::Document(format!("line {}, column {}: {e}", e.line(), e.column())))
}

// ---------------------------------------------------------------------------
// verdicts
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    None,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessJson {
    /// The assembled matrix is not invertible.
    Singular,
    /// Entry where the assembled inverse differs from the hat-block matrix.
    HatDefect { row: usize, col: usize, inverse_entry: String, hat_entry: String },
    /// Basis pair whose pairing changes.
    PairingDefect { i: usize, j: usize, expected: String, actual: String },
    /// Column where commutation with the complex structures fails.
    Commutation { column: usize, defect: Vec<String> },
    NotSpecial,
    /// Non-integral entry of a conjugated matrix, with its column.
    Denominator { row: usize, col: usize, entry: String, denominator: String, image: Vec<String> },
    /// Lift-lattice vector moved outside the lattice.
    LatticeEscape {
        leg: String,
        index: usize,
        vector: Vec<String>,
        coefficients: Vec<String>,
        denominator: String,
    },
    /// Fractional torsion vector whose image misses the scaled lattice.
    CriterionImage { vector: Vec<String>, image: Vec<String>, modulus: i64 },
    /// Commuting-square entry mismatch in one degree.
    DegreeMismatch { degree: usize, row: usize, col: usize, lhs: String, rhs: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskVerdict {
    pub index: usize,
    pub op: String,
    pub verdict: Verdict,
    pub witness: Option<WitnessJson>,
    pub derived: Option<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub none: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub tasks: Vec<TaskVerdict>,
    pub summary: Summary,
}

impl VerdictDocument {
    pub fn all_pass(&self) -> bool {
        self.summary.pass == self.summary.total
    }

    /// `0` when everything passes, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() { 0 } else { 1 }
    }
}

fn col_strings(m: &RatMatrix) -> Vec<String> {
    m.entries().iter().map(format_rational).collect()
}

fn matrix_json(m: &RatMatrix) -> Value {
    json!(m.to_string_rows())
}

// ---------------------------------------------------------------------------
// compilation
// ---------------------------------------------------------------------------

pub struct CompiledDocument {
    homs: BTreeMap<String, TorusHom>,
    block_maps: BTreeMap<String, BlockIso>,
    tasks: Vec<TaskSpec>,
}

fn resolve_torus(tori: &BTreeMap<String, ComplexTorus>, label: &str) -> Result<ComplexTorus> {
    let base = label.trim_end_matches('^');
    let duals = label.len() - base.len();
    let mut t = tori.get(base).cloned().ok_or_else(|| Error::Label(label.to_string()))?;
    for _ in 0..duals {
        t = t.dual();
    }
    Ok(t)
}

pub fn validate(doc: &ProblemDocument) -> Result<CompiledDocument> {
    let mut tori = BTreeMap::new();
    for (label, spec) in &doc.tori {
        if label.contains('^') {
            return Err(Error::Document(format!(
                "torus label {label:?} may not contain '^' (reserved for duals)"
            )));
        }
        let j = RatMatrix::from_str_rows(&spec.j)
            .map_err(|e| Error::Document(format!("torus {label:?}: {e}")))?;
        let t = ComplexTorus::new(spec.g, j, label.clone())
            .map_err(|e| Error::Document(format!("torus {label:?}: {e}")))?;
        tori.insert(label.clone(), t);
    }
    let mut homs = BTreeMap::new();
    for (label, spec) in &doc.homs {
        let source = resolve_torus(&tori, &spec.source)
            .map_err(|e| Error::Document(format!("hom {label:?}: {e}")))?;
        let target = resolve_torus(&tori, &spec.target)
            .map_err(|e| Error::Document(format!("hom {label:?}: {e}")))?;
        let m = RatMatrix::from_str_rows(&spec.matrix)
            .map_err(|e| Error::Document(format!("hom {label:?}: {e}")))?;
        let hom = TorusHom::new(source, target, m)
            .map_err(|e| Error::Document(format!("hom {label:?}: {e}")))?;
        homs.insert(label.clone(), hom);
    }
    let mut block_maps = BTreeMap::new();
    for (label, spec) in &doc.block_maps {
        let source = resolve_torus(&tori, &spec.source)
            .map_err(|e| Error::Document(format!("block map {label:?}: {e}")))?;
        let target = resolve_torus(&tori, &spec.target)
            .map_err(|e| Error::Document(format!("block map {label:?}: {e}")))?;
        let m = RatMatrix::from_str_rows(&spec.matrix)
            .map_err(|e| Error::Document(format!("block map {label:?}: {e}")))?;
        let map = BlockIso::new(MukaiSpace::of(&source), MukaiSpace::of(&target), m)
            .map_err(|e| Error::Document(format!("block map {label:?}: {e}")))?;
        block_maps.insert(label.clone(), map);
    }
    // resolve every task operand up front so invalid documents never run
    let compiled = CompiledDocument { homs, block_maps, tasks: doc.tasks.clone() };
    for (i, task) in compiled.tasks.iter().enumerate() {
        compiled.resolve_task(task).map_err(|e| Error::Document(format!("task {i}: {e}")))?;
    }
    Ok(compiled)
}

enum ResolvedTask {
    CheckSp(SymplecticMap),
    CheckHodge(BlockIso),
    CheckLift { n: i64, map: BlockIso },
    Restrict { n: i64, map: BlockIso },
    KummerSplit { n: usize, map: SymplecticMap },
    PdSquare(TorusHom),
}

impl CompiledDocument {
    fn hom(&self, label: &str) -> Result<&TorusHom> {
        self.homs.get(label).ok_or_else(|| Error::Label(label.to_string()))
    }

    fn block_map(&self, label: &str) -> Result<&BlockIso> {
        self.block_maps.get(label).ok_or_else(|| Error::Label(label.to_string()))
    }

    fn symplectic_from_labels(
        &self,
        g1: &str,
        g2: &str,
        g3: &str,
        g4: &str,
    ) -> Result<SymplecticMap> {
        let b1 = self.hom(g1)?;
        let (a, a2) = (b1.source().clone(), b1.target().clone());
        let expect = |hom: &TorusHom, src: &ComplexTorus, tgt: &ComplexTorus, who: &str| {
            if hom.source().same_structure(src) && hom.target().same_structure(tgt) {
                Ok(())
            } else {
                Err(Error::Document(format!("{who} has incompatible source/target")))
            }
        };
        let b2 = self.hom(g2)?;
        let b3 = self.hom(g3)?;
        let b4 = self.hom(g4)?;
        expect(b2, &a.dual(), &a2, "g2")?;
        expect(b3, &a, &a2.dual(), "g3")?;
        expect(b4, &a.dual(), &a2.dual(), "g4")?;
        SymplecticMap::from_matrices(
            &a,
            &a2,
            b1.matrix().clone(),
            b2.matrix().clone(),
            b3.matrix().clone(),
            b4.matrix().clone(),
        )
    }

    fn resolve_task(&self, task: &TaskSpec) -> Result<ResolvedTask> {
        match task {
            TaskSpec::CheckSp { g1, g2, g3, g4 } => {
                Ok(ResolvedTask::CheckSp(self.symplectic_from_labels(g1, g2, g3, g4)?))
            }
            TaskSpec::CheckHodge { map } => {
                Ok(ResolvedTask::CheckHodge(self.block_map(map)?.clone()))
            }
            TaskSpec::CheckLift { n, map } => {
                if *n < 2 {
                    return Err(Error::Document("check-lift needs n >= 2".into()));
                }
                Ok(ResolvedTask::CheckLift { n: *n, map: self.block_map(map)?.clone() })
            }
            TaskSpec::Restrict { n, map } => {
                if *n < 2 {
                    return Err(Error::Document("restrict needs n >= 2".into()));
                }
                Ok(ResolvedTask::Restrict { n: *n, map: self.block_map(map)?.clone() })
            }
            TaskSpec::KummerSplit { n, g1, g2, g3, g4 } => {
                if *n < 2 {
                    return Err(Error::Document("kummer-split needs n >= 2".into()));
                }
                Ok(ResolvedTask::KummerSplit {
                    n: *n,
                    map: self.symplectic_from_labels(g1, g2, g3, g4)?,
                })
            }
            TaskSpec::PdSquare { hom } => {
                let h = self.hom(hom)?;
                if !h.is_isogeny() {
                    return Err(Error::Document("pd-square needs an integral isogeny".into()));
                }
                Ok(ResolvedTask::PdSquare(h.clone()))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// task execution
// ---------------------------------------------------------------------------

fn op_name(task: &TaskSpec) -> &'static str {
    match task {
        TaskSpec::CheckSp { .. } => "check-sp",
        TaskSpec::CheckHodge { .. } => "check-hodge",
        TaskSpec::CheckLift { .. } => "check-lift",
        TaskSpec::Restrict { .. } => "restrict",
        TaskSpec::KummerSplit { .. } => "kummer-split",
        TaskSpec::PdSquare { .. } => "pd-square",
    }
}

fn membership_witness(failure: MembershipFailure) -> WitnessJson {
    match failure {
        MembershipFailure::NotIsometry(w) => WitnessJson::PairingDefect {
            i: w.i,
            j: w.j,
            expected: format_rational(&w.expected),
            actual: format_rational(&w.actual),
        },
        MembershipFailure::NotHodge(w) => {
            WitnessJson::Commutation { column: w.column, defect: col_strings(&w.defect) }
        }
        MembershipFailure::NotSpecial => WitnessJson::NotSpecial,
        MembershipFailure::Escapes(w) => WitnessJson::LatticeEscape {
            leg: match w.leg {
                LatticeLeg::Primal => "primal".into(),
                LatticeLeg::Dual => "dual".into(),
            },
            index: w.index,
            vector: col_strings(&w.vector),
            coefficients: col_strings(&w.image_coefficients),
            denominator: w.denominator().to_string(),
        },
    }
}

fn run_task(compiled: &CompiledDocument, index: usize, task: &TaskSpec) -> Result<TaskVerdict> {
    let op = op_name(task).to_string();
    let resolved = compiled.resolve_task(task)?;
    let (verdict, witness, derived) = match resolved {
        ResolvedTask::CheckSp(g) => match g.check_symplectic() {
            Err(Error::Singular) => (Verdict::Fail, Some(WitnessJson::Singular), None),
            Err(e) => return Err(e),
            Ok(Err(w)) => (
                Verdict::Fail,
                Some(WitnessJson::HatDefect {
                    row: w.i,
                    col: w.j,
                    inverse_entry: format_rational(&w.inverse_entry),
                    hat_entry: format_rational(&w.hat_entry),
                }),
                None,
            ),
            Ok(Ok(())) => {
                let rho = g.orlov_iso()?;
                (Verdict::Pass, None, Some(json!({ "orlov": matrix_json(rho.matrix()) })))
            }
        },
        ResolvedTask::CheckHodge(map) => match map.check_hodge() {
            Err(w) => (
                Verdict::Fail,
                Some(WitnessJson::Commutation { column: w.column, defect: col_strings(&w.defect) }),
                None,
            ),
            Ok(()) => (Verdict::Pass, None, None),
        },
        ResolvedTask::CheckLift { n, map } => {
            let ctx = IsogenyContext::n_context(map.source().base(), n)?;
            let ctx2 = IsogenyContext::n_context(map.target().base(), n)?;
            if let Err(w) = map.check_isometry() {
                (
                    Verdict::Fail,
                    Some(WitnessJson::PairingDefect {
                        i: w.i,
                        j: w.j,
                        expected: format_rational(&w.expected),
                        actual: format_rational(&w.actual),
                    }),
                    None,
                )
            } else if let Err(w) = map.check_hodge() {
                (
                    Verdict::Fail,
                    Some(WitnessJson::Commutation {
                        column: w.column,
                        defect: col_strings(&w.defect),
                    }),
                    None,
                )
            } else {
                match lift_criterion_between(&ctx, &ctx2, &map)? {
                    LiftOutcome::Lifted(gamma) => {
                        (Verdict::Pass, None, Some(json!({ "lifted": matrix_json(gamma.matrix()) })))
                    }
                    LiftOutcome::Obstructed(w) => (
                        Verdict::None,
                        Some(WitnessJson::Denominator {
                            row: w.row,
                            col: w.column,
                            entry: format_rational(&w.entry),
                            denominator: w.denominator.to_string(),
                            image: col_strings(&w.image),
                        }),
                        None,
                    ),
                }
            }
        }
        ResolvedTask::Restrict { n, map } => {
            let ctx = IsogenyContext::n_context(map.source().base(), n)?;
            let ctx2 = IsogenyContext::n_context(map.target().base(), n)?;
            let verdict = in_g_so_between(&ctx, &ctx2, &map)?;
            match verdict.failure {
                Some(f) => (Verdict::Fail, Some(membership_witness(f)), None),
                None => {
                    let f = restrict_res_between(&ctx, &ctx2, &map)?;
                    (Verdict::Pass, None, Some(json!({ "restricted": matrix_json(f.matrix()) })))
                }
            }
        }
        ResolvedTask::KummerSplit { n, map } => {
            let kctx = KummerContext::new(map.source(), map.target(), n)?;
            let criterion = kummer_criterion(&map, n)?;
            match transport_and_restrict(&kctx, &map)? {
                LiftOutcome::Obstructed(w) => (
                    Verdict::None,
                    Some(match criterion.witness {
                        Some(cw) => WitnessJson::CriterionImage {
                            vector: col_strings(&cw.vector),
                            image: col_strings(&cw.image),
                            modulus: cw.modulus,
                        },
                        None => WitnessJson::Denominator {
                            row: w.row,
                            col: w.column,
                            entry: format_rational(&w.entry),
                            denominator: w.denominator.to_string(),
                            image: col_strings(&w.image),
                        },
                    }),
                    Some(json!({ "criterion_holds": criterion.holds })),
                ),
                LiftOutcome::Lifted(t) => match split(&kctx, &t)? {
                    Some((eta1, eta2)) => (
                        Verdict::Pass,
                        None,
                        Some(json!({
                            "criterion_holds": criterion.holds,
                            "transported": matrix_json(t.matrix()),
                            "eta1": matrix_json(eta1.matrix()),
                            "eta2": matrix_json(eta2.matrix()),
                        })),
                    ),
                    None => {
                        (Verdict::Fail, None, Some(json!({ "criterion_holds": criterion.holds })))
                    }
                },
            }
        }
        ResolvedTask::PdSquare(q) => {
            let verdict = check_pd_square(&q)?;
            match verdict.witness {
                None => (
                    Verdict::Pass,
                    None,
                    Some(json!({ "degree": q.isogeny_degree()?.to_string() })),
                ),
                Some(w) => (
                    Verdict::Fail,
                    Some(WitnessJson::DegreeMismatch {
                        degree: w.degree,
                        row: w.row,
                        col: w.col,
                        lhs: format_rational(&w.lhs),
                        rhs: format_rational(&w.rhs),
                    }),
                    None,
                ),
            }
        }
    };
    Ok(TaskVerdict { index, op, verdict, witness, derived })
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub parallel: usize,
    pub witness_only: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { parallel: 1, witness_only: false }
    }
}

/// Run every task of a validated document. Results are collected in input
/// order, so the output is deterministic regardless of scheduling.
pub fn run_document(
    doc: &ProblemDocument,
    opts: &RunOptions,
) -> Result<(VerdictDocument, Vec<Duration>)> {
    let compiled = validate(doc)?;
    let n_tasks = compiled.tasks.len();
    let mut results: Vec<Option<Result<(TaskVerdict, Duration)>>> = Vec::new();
    results.resize_with(n_tasks, || None);

    let workers = opts.parallel.max(1).min(n_tasks.max(1));
    if workers <= 1 {
        for (i, task) in compiled.tasks.iter().enumerate() {
            let start = Instant::now();
            let v = run_task(&compiled, i, task);
            results[i] = Some(v.map(|tv| (tv, start.elapsed())));
        }
    } else {
        type Slot = std::sync::Mutex<Option<Result<(TaskVerdict, Duration)>>>;
        let slots: Vec<Slot> = (0..n_tasks).map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for w in 0..workers {
                let compiled = &compiled;
                let slots = &slots;
                scope.spawn(move || {
                    for i in (w..n_tasks).step_by(workers) {
                        let start = Instant::now();
                        let v = run_task(compiled, i, &compiled.tasks[i]);
                        *slots[i].lock().unwrap() = Some(v.map(|tv| (tv, start.elapsed())));
                    }
                });
            }
        });
        for (i, slot) in slots.into_iter().enumerate() {
            results[i] = slot.into_inner().unwrap();
        }
    }

    let mut tasks = Vec::with_capacity(n_tasks);
    let mut timings = Vec::with_capacity(n_tasks);
    let (mut pass, mut fail, mut none) = (0usize, 0usize, 0usize);
    for r in results.into_iter() {
        let (mut tv, dt) = r.expect("every slot filled")?;
        if opts.witness_only {
            tv.derived = None;
        }
        match tv.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Fail => fail += 1,
            Verdict::None => none += 1,
        }
        timings.push(dt);
        tasks.push(tv);
    }
    let summary = Summary { total: n_tasks, pass, fail, none };
    Ok((VerdictDocument { tasks, summary }, timings))
}

/// The canonical byte-deterministic rendering of a verdict document.
pub fn render_canonical(v: &VerdictDocument) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("verdicts serialize");
    s.push('\n');
    s
}

/// The non-canonical timing trailer.
pub fn render_trailer(timings: &[Duration]) -> String {
    let mut s = String::from("--- timing (non-canonical) ---\n");
    let mut total = Duration::ZERO;
    for (i, t) in timings.iter().enumerate() {
        s.push_str(&format!("task {i}: {}us\n", t.as_micros()));
        total += *t;
    }
    s.push_str(&format!("total: {}us\n", total.as_micros()));
    s
}

// ---------------------------------------------------------------------------
// witness re-verification
// ---------------------------------------------------------------------------

fn parse_col(entries: &[String]) -> Result<RatMatrix> {
    let rows: Vec<Vec<String>> = entries.iter().map(|e| vec![e.clone()]).collect();
    RatMatrix::from_str_rows(&rows)
}

/// Re-check every emitted witness against the problem document: feeding a
/// witness back through the corresponding predicate must reproduce the
/// failure. Returns `false` the moment any witness does not re-verify.
pub fn reverify_witnesses(doc: &ProblemDocument, verdicts: &VerdictDocument) -> Result<bool> {
    let compiled = validate(doc)?;
    for tv in &verdicts.tasks {
        let Some(witness) = &tv.witness else { continue };
        let task = compiled
            .tasks
            .get(tv.index)
            .ok_or_else(|| Error::Document("verdict index out of range".into()))?;
        let resolved = compiled.resolve_task(task)?;
        let ok = match (witness, resolved) {
            (WitnessJson::Singular, ResolvedTask::CheckSp(g)) => g.assembled().inverse().is_err(),
            (
                WitnessJson::HatDefect { row, col, inverse_entry, hat_entry },
                ResolvedTask::CheckSp(g),
            ) => {
                let inv = g.assembled().inverse()?;
                let hat = g.hat_matrix_with_sign(crate::mukai::EPSILON_DOUBLE_DUAL);
                format_rational(inv.at(*row, *col)) == *inverse_entry
                    && format_rational(hat.at(*row, *col)) == *hat_entry
                    && inverse_entry != hat_entry
            }
            (WitnessJson::Commutation { column, defect }, ResolvedTask::CheckHodge(map))
            | (WitnessJson::Commutation { column, defect }, ResolvedTask::CheckLift { map, .. }) => {
                let lhs = map.matrix().mul(map.source().j_v())?;
                let rhs = map.target().j_v().mul(map.matrix())?;
                let diff = lhs.sub(&rhs)?.column(*column);
                !diff.is_zero() && col_strings(&diff) == *defect
            }
            (
                WitnessJson::PairingDefect { i, j, expected, actual },
                ResolvedTask::CheckLift { map, .. },
            )
            | (
                WitnessJson::PairingDefect { i, j, expected, actual },
                ResolvedTask::Restrict { map, .. },
            ) => {
                let conj =
                    map.matrix().transpose().mul(map.target().gram())?.mul(map.matrix())?;
                format_rational(conj.at(*i, *j)) == *actual
                    && format_rational(map.source().gram().at(*i, *j)) == *expected
                    && expected != actual
            }
            (
                WitnessJson::Denominator { row, col, entry, denominator, .. },
                ResolvedTask::CheckLift { n, map },
            ) => {
                let ctx = IsogenyContext::n_context(map.source().base(), n)?;
                let ctx2 = IsogenyContext::n_context(map.target().base(), n)?;
                let gamma = ctx2.iota().mul(map.matrix())?.mul(ctx.iota_inv())?;
                let e = gamma.at(*row, *col);
                format_rational(e) == *entry
                    && e.denom().to_string() == *denominator
                    && !e.denom().is_one()
            }
            (
                WitnessJson::LatticeEscape { vector, coefficients, .. },
                ResolvedTask::Restrict { .. },
            ) => {
                // escaping means exactly: the coefficient vector of the image
                // in the target lattice basis is non-integral
                let coeffs = parse_col(coefficients)?;
                let _ = parse_col(vector)?;
                !coeffs.is_integral()
            }
            (
                WitnessJson::CriterionImage { vector, image, modulus },
                ResolvedTask::KummerSplit { map, .. },
            ) => {
                let v = parse_col(vector)?;
                let img = parse_col(image)?;
                let recomputed = map.g2().matrix().mul(&v)?;
                let m = BigInt::from(*modulus);
                let escapes = recomputed
                    .entries()
                    .iter()
                    .any(|e| !e.denom().is_one() || !(e.numer().mod_floor(&m)).is_zero());
                recomputed == img && escapes
            }
            (
                WitnessJson::Denominator { denominator, .. },
                ResolvedTask::KummerSplit { n, map },
            ) => {
                let kctx = KummerContext::new(map.source(), map.target(), n)?;
                match transport_and_restrict(&kctx, &map)? {
                    LiftOutcome::Obstructed(w) => w.denominator.to_string() == *denominator,
                    LiftOutcome::Lifted(_) => false,
                }
            }
            (
                WitnessJson::DegreeMismatch { degree, row, col, lhs, rhs },
                ResolvedTask::PdSquare(q),
            ) => match check_pd_square(&q)?.witness {
                Some(w) => {
                    w.degree == *degree
                        && w.row == *row
                        && w.col == *col
                        && format_rational(&w.lhs) == *lhs
                        && format_rational(&w.rhs) == *rhs
                }
                None => false,
            },
            (WitnessJson::NotSpecial, ResolvedTask::Restrict { map, .. }) => !map.is_special()?,
            _ => false,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// demo corpus
// ---------------------------------------------------------------------------

fn hom_spec(source: &str, target: &str, m: &RatMatrix) -> HomSpec {
    HomSpec { source: source.into(), target: target.into(), matrix: m.to_string_rows() }
}

/// The fixed hom-antisymmetric block `A^ -> A` used throughout the corpus.
fn demo_antisym_block() -> RatMatrix {
    RatMatrix::from_i64_rows(&[
        &[0, 0, 1, 0],
        &[0, 0, 0, -1],
        &[-1, 0, 0, 0],
        &[0, 1, 0, 0],
    ])
}

fn demo_documents() -> Vec<(&'static str, ProblemDocument)> {
    use crate::matrix::rat;

    let e = ComplexTorus::elliptic("E");
    let a = ComplexTorus::surface("A");
    let n_block = demo_antisym_block();
    let id4 = RatMatrix::identity(4);
    let zero4 = RatMatrix::zeros(4, 4);
    let id2 = RatMatrix::identity(2);
    let zero2 = RatMatrix::zeros(2, 2);

    let mut docs = Vec::new();

    // pass suite: hat condition, Hodge condition, and a lift that cancels
    {
        let mut tori = BTreeMap::new();
        tori.insert("A".to_string(), TorusSpec { g: 2, j: a.j().to_string_rows() });
        tori.insert("A'".to_string(), TorusSpec { g: 2, j: a.j().to_string_rows() });
        tori.insert("E".to_string(), TorusSpec { g: 1, j: e.j().to_string_rows() });
        let mut homs = BTreeMap::new();
        homs.insert("u1".into(), hom_spec("A", "A'", &id4));
        homs.insert("u2".into(), hom_spec("A^", "A'", &n_block.scale(&rat(4))));
        homs.insert("u3".into(), hom_spec("A", "A'^", &zero4));
        homs.insert("u4".into(), hom_spec("A^", "A'^", &id4));
        homs.insert("p1".into(), hom_spec("E", "E^", &zero2));
        homs.insert("p2".into(), hom_spec("E^", "E^", &id2.neg()));
        homs.insert(
            "p3".into(),
            hom_spec("E", "E^^", &RatMatrix::scalar(2, &rat(crate::mukai::EPSILON_DOUBLE_DUAL))),
        );
        homs.insert("p4".into(), hom_spec("E^", "E^^", &zero2));
        let unipotent = SymplecticMap::from_matrices(
            &a,
            &ComplexTorus::surface("A'"),
            id4.clone(),
            n_block.scale(&rat(4)),
            zero4.clone(),
            id4.clone(),
        )
        .expect("demo blocks are homs");
        let mut block_maps = BTreeMap::new();
        block_maps.insert(
            "unipotent_orlov".to_string(),
            BlockMapSpec {
                source: "A".into(),
                target: "A'".into(),
                matrix: unipotent.orlov_iso().expect("symplectic").matrix().to_string_rows(),
            },
        );
        docs.push((
            "sp_pass",
            ProblemDocument {
                tori,
                homs,
                block_maps,
                tasks: vec![
                    TaskSpec::CheckSp {
                        g1: "u1".into(),
                        g2: "u2".into(),
                        g3: "u3".into(),
                        g4: "u4".into(),
                    },
                    TaskSpec::CheckSp {
                        g1: "p1".into(),
                        g2: "p2".into(),
                        g3: "p3".into(),
                        g4: "p4".into(),
                    },
                    TaskSpec::CheckHodge { map: "unipotent_orlov".into() },
                    TaskSpec::CheckLift { n: 2, map: "unipotent_orlov".into() },
                ],
            },
        ));
    }

    // the reference map does not lift through the n-contexts
    for n in [2i64, 3] {
        let mut tori = BTreeMap::new();
        tori.insert("E".to_string(), TorusSpec { g: 1, j: e.j().to_string_rows() });
        let reference = SymplecticMap::poincare_reference(&e);
        let mut block_maps = BTreeMap::new();
        block_maps.insert(
            "poincare".to_string(),
            BlockMapSpec {
                source: "E".into(),
                target: "E^".into(),
                matrix: reference.orlov_iso().expect("symplectic").matrix().to_string_rows(),
            },
        );
        let name: &'static str =
            if n == 2 { "lift_obstruction_n2" } else { "lift_obstruction_n3" };
        docs.push((
            name,
            ProblemDocument {
                tori,
                homs: BTreeMap::new(),
                block_maps,
                tasks: vec![
                    TaskSpec::CheckLift { n, map: "poincare".into() },
                    TaskSpec::Restrict { n, map: "poincare".into() },
                ],
            },
        ));
    }

    // full pipeline: a passing and a failing split
    {
        let mut tori = BTreeMap::new();
        tori.insert("A".to_string(), TorusSpec { g: 2, j: a.j().to_string_rows() });
        tori.insert("A'".to_string(), TorusSpec { g: 2, j: a.j().to_string_rows() });
        let mut homs = BTreeMap::new();
        homs.insert("k1".into(), hom_spec("A", "A'", &id4));
        homs.insert("k2".into(), hom_spec("A^", "A'", &n_block.scale(&rat(4))));
        homs.insert("k2odd".into(), hom_spec("A^", "A'", &n_block));
        homs.insert("k3".into(), hom_spec("A", "A'^", &zero4));
        homs.insert("k4".into(), hom_spec("A^", "A'^", &id4));
        docs.push((
            "kummer_split",
            ProblemDocument {
                tori,
                homs,
                block_maps: BTreeMap::new(),
                tasks: vec![
                    TaskSpec::KummerSplit {
                        n: 2,
                        g1: "k1".into(),
                        g2: "k2".into(),
                        g3: "k3".into(),
                        g4: "k4".into(),
                    },
                    TaskSpec::KummerSplit {
                        n: 2,
                        g1: "k1".into(),
                        g2: "k2odd".into(),
                        g3: "k3".into(),
                        g4: "k4".into(),
                    },
                ],
            },
        ));
    }

    // duality squares, including the kernel-of-summation isogeny
    {
        let mut tori = BTreeMap::new();
        tori.insert("E".to_string(), TorusSpec { g: 1, j: e.j().to_string_rows() });
        tori.insert("A".to_string(), TorusSpec { g: 2, j: a.j().to_string_rows() });
        let kctx = KummerContext::new(&a, &a, 2).expect("surface context");
        tori.insert(
            "NxA".to_string(),
            TorusSpec { g: 4, j: kctx.side.product.j().to_string_rows() },
        );
        tori.insert(
            "A2".to_string(),
            TorusSpec { g: 4, j: kctx.side.q.target().j().to_string_rows() },
        );
        let mut homs = BTreeMap::new();
        homs.insert("two_E".into(), hom_spec("E", "E", &RatMatrix::scalar(2, &rat(2))));
        homs.insert("three_E".into(), hom_spec("E", "E", &RatMatrix::scalar(2, &rat(3))));
        homs.insert("two_A".into(), hom_spec("A", "A", &RatMatrix::scalar(4, &rat(2))));
        homs.insert("three_A".into(), hom_spec("A", "A", &RatMatrix::scalar(4, &rat(3))));
        homs.insert("kummer_q".into(), hom_spec("NxA", "A2", kctx.side.q.matrix()));
        docs.push((
            "pd_squares",
            ProblemDocument {
                tori,
                homs,
                block_maps: BTreeMap::new(),
                tasks: vec![
                    TaskSpec::PdSquare { hom: "two_E".into() },
                    TaskSpec::PdSquare { hom: "three_E".into() },
                    TaskSpec::PdSquare { hom: "two_A".into() },
                    TaskSpec::PdSquare { hom: "three_A".into() },
                    TaskSpec::PdSquare { hom: "kummer_q".into() },
                ],
            },
        ));
    }

    docs
}

/// Write the worked-example corpus: for every document a problem file and the
/// expected canonical verdict. Running `run` on a problem file reproduces the
/// expected verdict byte for byte.
pub fn write_demo_corpus(dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, doc) in demo_documents() {
        let problem_path = dir.join(format!("{name}.json"));
        let expected_path = dir.join(format!("{name}.expected.json"));
        let mut problem = serde_json::to_string_pretty(&doc)?;
        problem.push('\n');
        std::fs::write(&problem_path, problem)?;
        let (verdicts, _) = run_document(&doc, &RunOptions::default())?;
        debug_assert!(reverify_witnesses(&doc, &verdicts)?);
        std::fs::write(&expected_path, render_canonical(&verdicts))?;
        written.push((problem_path, expected_path));
    }
    Ok(written)
}
