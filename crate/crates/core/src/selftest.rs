//! Randomised and exhaustive check suites, one per acceptance criterion.
//!
//! Every suite is deterministic for a given seed. Reports carry the number
//! of checks, the first few failures and the elapsed time against the
//! suite's time budget.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    is_irreducible, poly, CommRing, FElem, Field, MPoly, TElem, TruncRing, UniversalRing,
};
use crate::bloch::{
    self, dec, evaluate_phi, lift_symbol_to_cycle, phi1_pushforward, phi_rational, rho, ClosedPointCycle,
    DecomposedClass, RhoValue, DEFAULT_PADDING_BUDGET,
};
use crate::cartier::{FunctionField, GrClass, GrLevel, OneForm};
use crate::drw::{DrwElement, DrwSpace};
use crate::forms::{Form, FormSpace};
use crate::milnor::{binomial_unit, ks_improved, relative_tag, SymbolSum};
use crate::oracle::{KPresentation, UnitGroup};
use crate::witt::{LogSign, WittRing, WittVector};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Scales instance counts; `1.0` is the documented count.
    pub scale: f64,
    /// Overrides the largest truncation where a suite has one.
    pub max_m: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            scale: 1.0,
            max_m: None,
        }
    }
}

impl SuiteConfig {
    fn count(&self, n: usize) -> usize {
        ((n as f64) * self.scale).ceil().max(1.0) as usize
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn m(&self, default: usize) -> usize {
        self.max_m.map_or(default, |m| m.min(default).max(1))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: usize,
    pub title: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed_ms: u128,
    #[serde(skip)]
    pub budget_ms: u128,
}

impl SuiteReport {
    pub fn within_budget(&self) -> bool {
        self.elapsed_ms <= self.budget_ms
    }

    pub fn line_without_timing(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} criterion {:>2} [{}] {}: {} checks", self.criterion, self.suite, self.title, self.checks);
        if !self.failures.is_empty() {
            s.push_str(&format!("; first failure: {}", self.failures[0]));
        }
        s
    }

    pub fn line(&self) -> String {
        let status = if self.passed && self.within_budget() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} criterion {:>2} [{}] {}: {} checks, {} ms (budget {} ms)",
            self.criterion,
            self.suite,
            self.title,
            self.checks,
            self.elapsed_ms,
            self.budget_ms
        );
        if !self.failures.is_empty() {
            s.push_str(&format!("; first failure: {}", self.failures[0]));
        }
        if self.passed && !self.within_budget() {
            s.push_str("; over time budget");
        }
        s
    }
}

struct Tally {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 8 {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.checks += 1;
        if self.failures.len() < 8 {
            self.failures.push(what);
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

pub struct SuiteInfo {
    pub name: &'static str,
    pub criterion: usize,
    pub title: &'static str,
    pub budget_ms: u128,
    run: fn(&SuiteConfig, &mut Tally),
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo { name: "ghost", criterion: 1, title: "ghost map is a ring homomorphism on the universal ring", budget_ms: 5_000, run: suite_ghost },
    SuiteInfo { name: "star", criterion: 2, title: "star-rule table and bilinearity", budget_ms: 1_000, run: suite_star },
    SuiteInfo { name: "witt-complex", criterion: 3, title: "Witt-complex axioms in degree 0 and in the char-0 model", budget_ms: 30_000, run: suite_witt_complex },
    SuiteInfo { name: "factorization", criterion: 4, title: "unit series factorization round trip", budget_ms: 5_000, run: suite_factorization },
    SuiteInfo { name: "log-exp", criterion: 5, title: "formal Log and Exp are inverse", budget_ms: 5_000, run: suite_log_exp },
    SuiteInfo { name: "n1-bijection", criterion: 6, title: "length-one pushforwards generate the one-units", budget_ms: 10_000, run: suite_n1 },
    SuiteInfo { name: "filter", criterion: 7, title: "rho of rational points is (1/[a]) dlog[b]", budget_ms: 20_000, run: suite_filter },
    SuiteInfo { name: "dec", criterion: 8, title: "deconcatenation laws", budget_ms: 10_000, run: suite_dec },
    SuiteInfo { name: "oracle", criterion: 9, title: "oracle ground truths", budget_ms: 60_000, run: suite_oracle },
    SuiteInfo { name: "lift", criterion: 10, title: "lifting symbols to 0-cycles", budget_ms: 60_000, run: suite_lift },
    SuiteInfo { name: "cartier", criterion: 11, title: "Cartier operator identities", budget_ms: 10_000, run: suite_cartier },
    SuiteInfo { name: "theta", criterion: 12, title: "theta and gr classes", budget_ms: 10_000, run: suite_theta },
    SuiteInfo { name: "ledger", criterion: 13, title: "relative K2 regression ledger is stable", budget_ms: 60_000, run: suite_ledger },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn find_suite(name: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn run_suite(info: &SuiteInfo, cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    (info.run)(cfg, &mut tally);
    SuiteReport {
        suite: info.name.to_string(),
        criterion: info.criterion,
        title: info.title.to_string(),
        passed: tally.failures.is_empty() && tally.checks > 0,
        checks: tally.checks,
        failures: tally.failures,
        notes: tally.notes,
        elapsed_ms: start.elapsed().as_millis(),
        budget_ms: info.budget_ms,
    }
}

pub fn run_by_name(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    find_suite(name).map(|info| run_suite(info, cfg))
}

// ---------------------------------------------------------------- helpers

fn sparse_mpoly<G: Rng>(r: &UniversalRing, rng: &mut G) -> MPoly {
    let terms = rng.gen_range(1..=2);
    r.random(rng, terms, 2, 3)
}

fn random_witt_universal<G: Rng>(r: &UniversalRing, rng: &mut G, m: usize) -> WittVector<MPoly> {
    WittVector::full((0..m).map(|_| sparse_mpoly(r, rng)).collect())
}

fn random_witt_field<G: Rng>(k: &Field, rng: &mut G, m: usize) -> WittVector<FElem> {
    WittVector::full((0..m).map(|_| k.random(rng, 4)).collect())
}

fn random_one_unit<G: Rng>(k: &Field, rng: &mut G, m: usize) -> Vec<FElem> {
    let mut s = vec![k.one()];
    s.extend((0..m).map(|_| k.random(rng, 4)));
    s
}

fn random_unit_field<G: Rng>(k: &Field, rng: &mut G) -> FElem {
    loop {
        let a = k.random_nonzero(rng, 5);
        if !k.is_one(&a) {
            return a;
        }
    }
}

fn ghost_sum<R: CommRing>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().zip(b).map(|(x, y)| r.add(x, y)).collect()
}

fn ghost_prod<R: CommRing>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().zip(b).map(|(x, y)| r.mul(x, y)).collect()
}

// ---------------------------------------------------------------- 1

fn suite_ghost(cfg: &SuiteConfig, t: &mut Tally) {
    let r = UniversalRing::paired(6);
    let w = WittRing::new(r.clone());
    let max_m = cfg.m(6);
    for m in 1..=max_m {
        // the universal pair itself
        let x = WittVector::full((0..m).map(|i| r.var(i)).collect());
        let y = WittVector::full((0..m).map(|i| r.var(6 + i)).collect());
        ghost_pair(t, &w, &x, &y, m);
    }
    let mut rng = cfg.rng(1);
    for _ in 0..cfg.count(100) {
        let m = rng.gen_range(1..=max_m);
        let x = random_witt_universal(&r, &mut rng, m);
        let y = random_witt_universal(&r, &mut rng, m);
        ghost_pair(t, &w, &x, &y, m);
    }
}

fn ghost_pair(t: &mut Tally, w: &WittRing<UniversalRing>, x: &WittVector<MPoly>, y: &WittVector<MPoly>, m: usize) {
    let r = &w.ring;
    let (gx, gy) = (w.ghost(x), w.ghost(y));
    match (w.add(x, y), w.mul(x, y)) {
        (Ok(s), Ok(p)) => {
            t.check(w.ghost(&s) == ghost_sum(r, &gx, &gy), || format!("ghost(x + y) at m = {m}: {}", w.format(x)));
            t.check(w.ghost(&p) == ghost_prod(r, &gx, &gy), || format!("ghost(x * y) at m = {m}: {}", w.format(x)));
        }
        (a, b) => t.fail(format!("arithmetic failed at m = {m}: {:?} {:?}", a.err(), b.err())),
    }
}

// ---------------------------------------------------------------- 2

fn suite_star(cfg: &SuiteConfig, t: &mut Tally) {
    let r = UniversalRing::new(&["a", "b", "c"]);
    let w = WittRing::new(r.clone());
    let (a, b, c) = (r.var(0), r.var(1), r.var(2));
    let gen = |coef: &MPoly, deg: usize, m: usize| {
        let mut s = vec![r.zero(); m + 1];
        s[0] = r.one();
        if deg <= m {
            s[deg] = r.neg(coef);
        }
        w.from_series(&s, m).expect("one-unit")
    };
    let series_of = |v: &WittVector<MPoly>| w.to_series(v).expect("full");
    // the three worked products
    let one_minus = |coef: MPoly, deg: usize, m: usize| {
        let mut s = vec![r.zero(); m + 1];
        s[0] = r.one();
        s[deg] = r.neg(&coef);
        s
    };
    let m = 6;
    let p1 = w.mul(&gen(&a, 1, m), &gen(&b, 1, m)).expect("mul");
    t.check(series_of(&p1) == one_minus(r.mul(&a, &b), 1, m), || "(1-at)*(1-bt) != 1-abt".into());
    let p2 = w.mul(&gen(&a, 2, m), &gen(&b, 3, m)).expect("mul");
    let want2 = one_minus(r.mul(&r.pow(&a, 3), &r.pow(&b, 2)), 6, m);
    t.check(series_of(&p2) == want2, || "(1-at^2)*(1-bt^3) != 1-a^3b^2t^6".into());
    let p3 = w.mul(&gen(&a, 2, m), &gen(&b, 2, m)).expect("mul");
    let base = one_minus(r.mul(&a, &b), 2, m);
    let want3 = crate::witt::series::mul(&r, &base, &base, m);
    t.check(series_of(&p3) == want3, || "(1-at^2)*(1-bt^2) != (1-abt^2)^2".into());

    // generator table and bilinearity
    let big = cfg.m(12).max(6);
    for rr in 1..=6usize {
        for ss in 1..=6usize {
            let g = num_integer::gcd(rr, ss);
            let lhs = w.mul(&gen(&a, rr, big), &gen(&b, ss, big)).expect("mul");
            let coef = r.mul(&r.pow(&a, (ss / g) as u64), &r.pow(&b, (rr / g) as u64));
            let deg = rr * ss / g;
            let mut want = crate::witt::series::one(&r, big);
            if deg <= big {
                let f = one_minus(coef, deg, big);
                want = crate::witt::series::pow(&r, &f, g as u64, big);
            }
            t.check(series_of(&lhs) == want, || format!("generator pair ({rr}, {ss})"));
            // (x + x') * y = x * y + x' * y with x, x' generators of degree rr
            let x = gen(&a, rr, big);
            let x2 = gen(&c, rr, big);
            let y = gen(&b, ss, big);
            let left = w.mul(&w.add(&x, &x2).expect("add"), &y).expect("mul");
            let right = w
                .add(&w.mul(&x, &y).expect("mul"), &w.mul(&x2, &y).expect("mul"))
                .expect("add");
            t.check(left == right, || format!("bilinearity at ({rr}, {ss})"));
        }
    }
}

// ---------------------------------------------------------------- 3

fn suite_witt_complex(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(3);
    let f7 = Field::prime(7).expect("prime");
    let q = Field::rationals();
    let uni = UniversalRing::new(&["a", "b"]);
    let max_m = cfg.m(6);
    for i in 0..cfg.count(100) {
        match i % 3 {
            0 => degree0_axioms(t, &WittRing::new(f7.clone()), &mut rng, max_m, |rng, m| random_witt_field(&f7, rng, m)),
            1 => degree0_axioms(t, &WittRing::new(q.clone()), &mut rng, max_m, |rng, m| random_witt_field(&q, rng, m)),
            _ => degree0_axioms(t, &WittRing::new(uni.clone()), &mut rng, max_m.min(4), |rng, m| random_witt_universal(&uni, rng, m)),
        }
    }
    let fields = [
        Field::rat_fun(&Field::rationals(), "x"),
        Field::rat_fun(&Field::rat_fun(&Field::rationals(), "x"), "y"),
    ];
    for i in 0..cfg.count(100) {
        let k = &fields[i % 2];
        model_axioms(t, k, &mut rng, max_m);
    }
}

fn degree0_axioms<R, G, F>(t: &mut Tally, w: &WittRing<R>, rng: &mut G, max_m: usize, mut random: F)
where
    R: CommRing,
    G: Rng,
    F: FnMut(&mut G, usize) -> WittVector<R::Elem>,
{
    let m = rng.gen_range(1..=max_m);
    let r = rng.gen_range(1..=3usize);
    let s = rng.gen_range(1..=3usize);
    let big = r * m + r - 1;
    let restrict = |v: &WittVector<R::Elem>, k: usize| w.truncate(v, k).expect("restrict");
    let x = random(rng, m);
    let xb = random(rng, big);

    // (i) R F_r = F_r R^r
    let xb1 = random(rng, r * (m + 1) + r - 1);
    let lhs = restrict(&w.frobenius(r, &xb1).expect("F"), m);
    let rhs = w.frobenius(r, &restrict(&xb1, big)).expect("F");
    t.check(lhs == rhs, || format!("R F_{r} = F_{r} R^{r} at m = {m}"));
    // (i) R^r V_r = V_r R
    let x1 = random(rng, m + 1);
    let lhs = restrict(&w.verschiebung_natural(r, &x1).expect("V"), big);
    let rhs = w.verschiebung_natural(r, &restrict(&x1, m)).expect("V");
    t.check(lhs == rhs, || format!("R^{r} V_{r} = V_{r} R at m = {m}"));
    // (i) F_1 = V_1 = Id
    t.check(w.frobenius(1, &x).expect("F") == x && w.verschiebung_natural(1, &x).expect("V") == x, || "F_1 = V_1 = Id".into());
    // (i) F_r F_s = F_rs and V_r V_s = V_rs
    let long = random(rng, r * s * (m + 1) - 1);
    let lhs = w.frobenius(r, &w.frobenius(s, &long).expect("F")).expect("F");
    let rhs = w.frobenius(r * s, &long).expect("F");
    t.check(lhs == rhs, || format!("F_{r} F_{s} = F_{}", r * s));
    let lhs = w.verschiebung_natural(r, &w.verschiebung_natural(s, &x).expect("V")).expect("V");
    let rhs = w.verschiebung_natural(r * s, &x).expect("V");
    t.check(lhs == rhs, || format!("V_{r} V_{s} = V_{}", r * s));
    // (ii) F_r V_r = r
    let lhs = w.frobenius(r, &w.verschiebung_natural(r, &x).expect("V")).expect("F");
    t.check(lhs == w.scale_int(&x, r as i64).expect("scale"), || format!("F_{r} V_{r} = {r}"));
    // (ii) F_r V_s = V_s F_r for coprime r, s
    if num_integer::gcd(r, s) == 1 {
        let src = random(rng, r * (s * m + s - 1) + r - 1);
        let lhs = restrict(&w.frobenius(r, &w.verschiebung_natural(s, &src).expect("V")).expect("F"), s * m + s - 1);
        let rhs = w.verschiebung_natural(s, &restrict(&w.frobenius(r, &src).expect("F"), m)).expect("V");
        let rhs = restrict(&rhs, s * m + s - 1);
        t.check(lhs == rhs, || format!("F_{r} V_{s} = V_{s} F_{r}"));
    }
    // (iii) V_r(F_r(x) y) = x V_r(y)
    let y = random(rng, m);
    let lhs = w
        .verschiebung_natural(r, &w.mul(&w.frobenius(r, &xb).expect("F"), &y).expect("mul"))
        .expect("V");
    let rhs = w.mul(&xb, &w.verschiebung_natural(r, &y).expect("V")).expect("mul");
    t.check(lhs == rhs, || format!("V_{r}(F_{r}(x) y) = x V_{r}(y) at m = {m}"));
}

/// The transcendental variables of a tower of rational function fields.
fn tower_vars(k: &Field) -> Vec<FElem> {
    match (k.base(), k.generator()) {
        (Some(b), Some(g)) if k.num_vars() > b.num_vars() => {
            let mut v: Vec<FElem> = tower_vars(b).iter().map(|x| k.embed_base(x)).collect();
            v.push(g);
            v
        }
        _ => Vec::new(),
    }
}

/// Small integer polynomials in the variables, sometimes over a linear
/// denominator; keeps long model computations from swelling.
fn sparse_coeff<G: Rng>(k: &Field, vars: &[FElem], rng: &mut G) -> FElem {
    let mut acc = k.zero();
    for _ in 0..rng.gen_range(1..=2) {
        let mut term = k.from_int(rng.gen_range(-3..=3));
        if !vars.is_empty() {
            let v = &vars[rng.gen_range(0..vars.len())];
            term = k.mul(&term, &k.pow(v, rng.gen_range(0..=2)));
        }
        acc = k.add(&acc, &term);
    }
    if !vars.is_empty() && rng.gen_bool(0.25) {
        let v = &vars[rng.gen_range(0..vars.len())];
        let den = k.add(v, &k.from_int(rng.gen_range(1..=3)));
        acc = k.div(&acc, &den).expect("nonzero");
    }
    acc
}

fn random_form<G: Rng>(space: &FormSpace, rng: &mut G, degree: usize) -> Form {
    let k = &space.field;
    let vars = tower_vars(k);
    let nv = space.rank();
    if degree > nv {
        return Form::zero(degree);
    }
    let mut acc = Form::zero(degree);
    for _ in 0..2 {
        let mut idx: Vec<usize> = (0..nv).collect();
        while idx.len() > degree {
            idx.remove(rng.gen_range(0..idx.len()));
        }
        let mono = space.monomial(sparse_coeff(k, &vars, rng), &idx);
        acc = space.add(&acc, &mono);
    }
    acc
}

fn random_drw<G: Rng>(space: &DrwSpace, rng: &mut G, m: usize, degree: usize) -> DrwElement {
    let slots = (0..m).map(|_| random_form(&space.forms, rng, degree)).collect();
    space.from_slots(degree, slots)
}

fn model_axioms<G: Rng>(t: &mut Tally, k: &Field, rng: &mut G, max_m: usize) {
    let space = DrwSpace::new(k.clone()).expect("char 0");
    let m = rng.gen_range(1..=max_m);
    let r = rng.gen_range(1..=3usize);
    let s = rng.gen_range(1..=3usize);
    let deg = rng.gen_range(0..=space.forms.rank().min(2));
    let big = r * m + r - 1;
    let x = random_drw(&space, rng, m, deg);
    let xb = random_drw(&space, rng, big, deg);
    let xb1 = random_drw(&space, rng, r * (m + 1) + r - 1, deg);
    let lhs = space.restrict(&space.frobenius(r, &xb1), m);
    let rhs = space.frobenius(r, &space.restrict(&xb1, big));
    t.check(lhs == rhs, || format!("model: R F_{r} = F_{r} R^{r}"));
    let x1 = random_drw(&space, rng, m + 1, deg);
    let lhs = space.restrict(&space.verschiebung_natural(r, &x1), big);
    let rhs = space.verschiebung_natural(r, &space.restrict(&x1, m));
    t.check(lhs == rhs, || format!("model: R^{r} V_{r} = V_{r} R"));
    t.check(space.frobenius(1, &x) == x && space.verschiebung_natural(1, &x) == x, || "model: F_1 = V_1 = Id".into());
    let long = random_drw(&space, rng, r * s * (m + 1) - 1, deg);
    t.check(
        space.frobenius(r, &space.frobenius(s, &long)) == space.frobenius(r * s, &long),
        || "model: F_r F_s = F_rs".into(),
    );
    t.check(
        space.verschiebung_natural(r, &space.verschiebung_natural(s, &x)) == space.verschiebung_natural(r * s, &x),
        || "model: V_r V_s = V_rs".into(),
    );
    t.check(
        space.frobenius(r, &space.verschiebung_natural(r, &x)) == space.scale_int(&x, r as i64),
        || "model: F_r V_r = r".into(),
    );
    if num_integer::gcd(r, s) == 1 {
        let src = random_drw(&space, rng, r * (s * m + s - 1) + r - 1, deg);
        let lhs = space.restrict(&space.frobenius(r, &space.verschiebung_natural(s, &src)), s * m + s - 1);
        let rhs = space.restrict(&space.verschiebung_natural(s, &space.restrict(&space.frobenius(r, &src), m)), s * m + s - 1);
        t.check(lhs == rhs, || "model: F_r V_s = V_s F_r".into());
    }
    let ydeg = rng.gen_range(0..=1);
    let y = random_drw(&space, rng, m, ydeg);
    let lhs = space.verschiebung_natural(r, &space.mul(&space.frobenius(r, &xb), &y).expect("mul"));
    let rhs = space.mul(&xb, &space.verschiebung_natural(r, &y)).expect("mul");
    t.check(lhs == rhs, || "model: V_r(F_r(x) y) = x V_r(y)".into());
    // (iv) F_r d V_r = d
    t.check(
        space.frobenius(r, &space.d(&space.verschiebung_natural(r, &x))) == space.d(&x),
        || "model: F_r d V_r = d".into(),
    );
    // (v) F_r d[a] = [a]^{r-1} d[a]
    let vars = tower_vars(k);
    let a = loop {
        let a = sparse_coeff(k, &vars, rng);
        if !k.is_zero(&a) {
            break a;
        }
    };
    let lhs = space.frobenius(r, &space.d(&space.teichmuller(&a, big)));
    let rhs = space
        .mul(&space.teichmuller(&k.pow(&a, (r - 1) as u64), m), &space.d(&space.teichmuller(&a, m)))
        .expect("mul");
    t.check(lhs == rhs, || "model: F_r d[a] = [a]^(r-1) d[a]".into());
    // d d = 0 and the Teichmuller lift is compatible with the Witt vector picture
    t.check(space.d(&space.d(&x)).is_zero(), || "model: d d = 0".into());
    let w = WittRing::new(k.clone());
    t.check(
        space.from_witt(&w.teichmuller(&a, m)) == space.teichmuller(&a, m),
        || "model: lambda([a]) = [a]".into(),
    );
}

// ---------------------------------------------------------------- 4

fn suite_factorization(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(4);
    let fields = [
        Field::prime(7).expect("prime"),
        Field::rationals(),
        Field::rat_fun(&Field::prime(3).expect("prime"), "x"),
    ];
    let max_m = cfg.m(10);
    for k in &fields {
        let w = WittRing::new(k.clone());
        for _ in 0..cfg.count(200) {
            let m = rng.gen_range(1..=max_m);
            let u = random_one_unit(k, &mut rng, m);
            let v = w.from_series(&u, m).expect("one-unit");
            t.check(w.to_series(&v).expect("full") == u, || format!("to_series(from_series(u)) over {k}, m = {m}"));
            let x = random_witt_field(k, &mut rng, m);
            let back = w.from_series(&w.to_series(&x).expect("full"), m).expect("one-unit");
            t.check(back == x, || format!("from_series(to_series(x)) over {k}, m = {m}"));
            // independent expansion of the product
            let mut prod = crate::witt::series::one(k, m);
            for (i, c) in v.coords.iter().enumerate() {
                let f = crate::witt::series::binomial(k, c, i + 1, m);
                prod = crate::witt::series::mul(k, &prod, &f, m);
            }
            t.check(prod == u, || format!("product of (1 - a_i t^i) over {k}, m = {m}"));
        }
    }
}

// ---------------------------------------------------------------- 5

fn suite_log_exp(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(5);
    let fields = [Field::rationals(), Field::rat_fun(&Field::rationals(), "x")];
    let max_m = cfg.m(10);
    for k in &fields {
        let w = WittRing::new(k.clone());
        let vars = tower_vars(k);
        let coeff = |rng: &mut ChaCha8Rng| if vars.is_empty() { k.random(rng, 4) } else { sparse_coeff(k, &vars, rng) };
        for i in 0..cfg.count(200) {
            let m = rng.gen_range(1..=max_m);
            let mut u = vec![k.one()];
            u.extend((0..m).map(|_| coeff(&mut rng)));
            let l = w.formal_log(&u, m, LogSign::Printed).expect("char 0");
            t.check(w.formal_exp(&l, m, LogSign::Printed).expect("char 0") == u, || format!("Exp(Log(u)) over {k}, m = {m}"));
            let mut y = vec![k.zero()];
            y.extend((0..m).map(|_| coeff(&mut rng)));
            let e = w.formal_exp(&y, m, LogSign::Printed).expect("char 0");
            t.check(w.formal_log(&e, m, LogSign::Printed).expect("char 0") == y, || format!("Log(Exp(y)) over {k}, m = {m}"));
            if i % 10 == 0 {
                // homomorphism: Log(uv) = Log u + Log v
                let mut v = vec![k.one()];
                v.extend((0..m).map(|_| coeff(&mut rng)));
                let uv = crate::witt::series::mul(k, &u, &v, m);
                let lhs = w.formal_log(&uv, m, LogSign::Printed).expect("char 0");
                let rhs = crate::witt::series::add(k, &l, &w.formal_log(&v, m, LogSign::Printed).expect("char 0"), m);
                t.check(lhs == rhs, || format!("Log(uv) = Log u + Log v over {k}"));
            }
        }
    }
    // Log(1 - t/a) mod t^3 = t/a + t^2/(2a^2)
    let q = Field::rationals();
    let w = WittRing::new(q.clone());
    let a = q.from_int(3);
    let ia = q.inv(&a).expect("nonzero");
    let u = vec![q.one(), q.neg(&ia), q.zero()];
    let want = vec![q.zero(), ia.clone(), q.div(&q.mul(&ia, &ia), &q.from_int(2)).expect("nonzero")];
    t.check(w.formal_log(&u, 2, LogSign::Printed).expect("char 0") == want, || "Log(1 - t/a) mod t^3".into());
}

// ---------------------------------------------------------------- 6

fn monic_polys(k: &Field, deg: usize) -> Vec<Vec<FElem>> {
    let elems = k.elements();
    let q = elems.len();
    let mut out = Vec::new();
    for n in 0..q.pow(deg as u32) {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut x = n;
        for _ in 0..deg {
            coeffs.push(elems[x % q].clone());
            x /= q;
        }
        coeffs.push(k.one());
        out.push(coeffs);
    }
    out
}

fn suite_n1(cfg: &SuiteConfig, t: &mut Tally) {
    for p in [2u64, 3] {
        let k = Field::prime(p).expect("prime");
        for m in 1..=cfg.m(3) {
            let ring = TruncRing::new(k.clone(), m);
            let mut images: Vec<TElem> = Vec::new();
            for d in 1..=3usize {
                for f in monic_polys(&k, d) {
                    if k.is_zero(&f[0]) || !is_irreducible(&k, &f).expect("finite field") {
                        continue;
                    }
                    let (ext, c) = if d == 1 {
                        (k.clone(), k.neg(&f[0]))
                    } else {
                        let e = Field::extension(&k, f.clone(), "c").expect("irreducible");
                        let g = e.generator().expect("extension");
                        (e, g)
                    };
                    let pt = ClosedPointCycle::new(&k, &ext, vec![c], 1).expect("point");
                    let u = phi1_pushforward(&ring, &pt).expect("norm");
                    let inv0 = k.inv(&f[0]).expect("nonzero");
                    let want = ring.from_poly(&poly::scale(&k, &f, &inv0));
                    t.check(u == want, || format!("N(1 - t/c) = f(t)/f(0) for f = {}", poly::format_poly(&k, &f, "x")));
                    images.push(u);
                }
            }
            let group: HashSet<TElem> = ring.one_units().into_iter().collect();
            let image_set: HashSet<TElem> = images.iter().cloned().collect();
            let generated = closure(&ring, &images);
            t.check(generated == group, || format!("generated subgroup over GF({p}), m = {m}"));
            t.note(format!(
                "GF({p}), m = {m}: {} distinct images, {} one-units, generated subgroup {}",
                image_set.len(),
                group.len(),
                if generated == group { "is everything" } else { "is proper" }
            ));
        }
    }
}

fn closure(ring: &TruncRing, gens: &[TElem]) -> HashSet<TElem> {
    let mut seen: HashSet<TElem> = HashSet::from([ring.one()]);
    let mut queue = VecDeque::from([ring.one()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = ring.mul(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

// ---------------------------------------------------------------- 7

fn random_point<G: Rng>(k: &Field, rng: &mut G, n: usize) -> Vec<FElem> {
    (0..n).map(|_| random_unit_field(k, rng)).collect()
}

fn suite_filter(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(7);
    let max_m = cfg.m(4);
    let qx = Field::rat_fun(&Field::rationals(), "x");
    let space = DrwSpace::new(qx.clone()).expect("char 0");
    for _ in 0..cfg.count(100) {
        let m = rng.gen_range(1..=max_m);
        let n = rng.gen_range(1..=3usize);
        let ring = TruncRing::new(qx.clone(), m);
        let pt = random_point(&qx, &mut rng, n);
        let p = ClosedPointCycle::rational(&qx, pt.clone(), 1).expect("point");
        let s = phi_rational(&ring, &p).expect("phi");
        let got = match rho(&ring, &s) {
            Ok(RhoValue::Model(e)) => e,
            other => {
                t.fail(format!("rho over Q(x) returned {other:?}"));
                continue;
            }
        };
        // (1/[a]) dlog[b_1] ... built from Teichmuller lifts and products
        let ia = qx.inv(&pt[0]).expect("nonzero");
        let mut want = space.teichmuller(&ia, m);
        for b in &pt[1..] {
            want = space.mul(&want, &space.dlog_teichmuller(b, m).expect("unit")).expect("mul");
        }
        t.check(got == want, || format!("filter identity over Q(x), n = {n}, m = {m}"));
    }
    let f5x = Field::rat_fun(&Field::prime(5).expect("prime"), "x");
    let w = WittRing::new(f5x.clone());
    for _ in 0..cfg.count(100) {
        let m = rng.gen_range(1..=max_m);
        let n = rng.gen_range(2..=3usize);
        let ring = TruncRing::new(f5x.clone(), m);
        let pt = random_point(&f5x, &mut rng, n);
        let p = ClosedPointCycle::rational(&f5x, pt.clone(), 1).expect("point");
        let s = phi_rational(&ring, &p).expect("phi");
        let got = match rho(&ring, &s) {
            Ok(RhoValue::Decomposed(d)) => d,
            other => {
                t.fail(format!("rho over F5(x) returned {other:?}"));
                continue;
            }
        };
        // the inverse of [a] under the Witt product
        let teich_a = w.teichmuller(&pt[0], m);
        let inv = w.from_series(&series_one_minus(&f5x, &qinv(&f5x, &pt[0]), m), m).expect("one-unit");
        let one = w.one(m);
        t.check(w.mul(&teich_a, &inv).expect("mul") == one, || "[a] * (1 - t/a) = 1".into());
        let mut want = DecomposedClass::zero(m, n);
        want.add_term(&f5x, &inv, pt[1..].to_vec(), 1).expect("witt");
        t.check(got == want, || format!("filter identity over F5(x), n = {n}, m = {m}"));
    }
}

fn qinv(k: &Field, a: &FElem) -> FElem {
    k.inv(a).expect("nonzero")
}

fn series_one_minus(k: &Field, c: &FElem, m: usize) -> Vec<FElem> {
    let mut s = vec![k.zero(); m + 1];
    s[0] = k.one();
    s[1] = k.neg(c);
    s
}

// ---------------------------------------------------------------- 8

fn suite_dec(cfg: &SuiteConfig, t: &mut Tally) {
    let k = Field::prime(3).expect("prime");
    let ring = TruncRing::new(k.clone(), 1);
    let units = ring.units();
    for n in 2..=3usize {
        let total = units.len().pow(n as u32);
        for idx in 0..total {
            let mut x = idx;
            let entries: Vec<TElem> = (0..n)
                .map(|_| {
                    let e = units[x % units.len()].clone();
                    x /= units.len();
                    e
                })
                .collect();
            if relative_tag(&ring, &entries).len() < 2 {
                continue;
            }
            let s = SymbolSum::single(entries);
            t.check(dec(&ring, &s).map(|d| d.is_zero()).unwrap_or(false), || format!("two vanishing slots, n = {n}"));
        }
    }
    let mut rng = cfg.rng(8);
    let fields = [Field::prime(5).expect("prime"), Field::rationals(), Field::rat_fun(&Field::prime(3).expect("prime"), "x")];
    for i in 0..cfg.count(200) {
        let k = &fields[i % fields.len()];
        let m = rng.gen_range(1..=3usize);
        let big_m = m + rng.gen_range(1..=3usize);
        let big = TruncRing::new(k.clone(), big_m);
        let n = rng.gen_range(1..=3usize);
        let j = rng.gen_range(0..n);
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for slot in 0..n {
            let mut c = vec![if slot == j { k.one() } else { random_unit_field(k, &mut rng) }];
            c.extend((0..big_m).map(|_| k.random(&mut rng, 3)));
            let mut c2 = c.clone();
            for coeff in c2.iter_mut().skip(m + 1) {
                *coeff = k.random(&mut rng, 3);
            }
            e1.push(TElem(c));
            e2.push(TElem(c2));
        }
        let (d1, d2) = (dec(&big, &SymbolSum::single(e1)), dec(&big, &SymbolSum::single(e2)));
        match (d1, d2) {
            (Ok(a), Ok(b)) => t.check(truncate_class(k, &a, m) == truncate_class(k, &b, m), || format!("descent mod t^{} over {k}", m + 1)),
            (a, b) => t.fail(format!("dec failed: {:?} {:?}", a.err(), b.err())),
        }
    }
}

fn truncate_class(k: &Field, c: &DecomposedClass, m: usize) -> DecomposedClass {
    let w = WittRing::new(k.clone());
    let mut out = DecomposedClass::zero(m, c.n);
    for (sym, coords) in &c.terms {
        let v = w.truncate(&WittVector::full(coords.clone()), m).expect("truncate");
        out.add_term(k, &v, sym.clone(), 1).expect("witt");
    }
    out
}

// ---------------------------------------------------------------- 9

/// Invariant factors of a finite abelian group from the counts of
/// `p^k`-torsion elements.
pub fn invariant_factors_by_counting(ring: &TruncRing, units: &[TElem]) -> Vec<BigInt> {
    let order = units.len() as u64;
    let mut primes = Vec::new();
    let mut n = order;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    // per prime: multiplicities of cyclic factors of order >= p^k
    let mut factors: Vec<BigInt> = Vec::new();
    let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let mut logs = vec![0u32];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let count = units.iter().filter(|u| ring.pow(u, pk) == ring.one()).count() as u64;
            let mut l = 0;
            let mut c = count;
            while c > 1 {
                c /= p;
                l += 1;
            }
            if l == *logs.last().expect("nonempty") {
                break;
            }
            logs.push(l);
        }
        // exponents of cyclic p-factors, largest first
        let mut exps = Vec::new();
        let depth = logs.len() - 1;
        let at_least: Vec<u32> = (1..=depth).map(|k| logs[k] - logs[k - 1]).collect();
        for k in (1..=depth).rev() {
            let exactly = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
            for _ in 0..exactly {
                exps.push(k as u32);
            }
        }
        per_prime.push((p, exps));
    }
    let width = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    for i in 0..width {
        let mut d = BigInt::one();
        for (p, exps) in &per_prime {
            if let Some(&e) = exps.get(i) {
                d *= BigInt::from(*p).pow(e);
            }
        }
        factors.push(d);
    }
    factors.reverse();
    factors
}

fn prime_powers_upto(n: u64) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for p in 2..=n {
        if !crate::algebra::field::is_prime(p) {
            continue;
        }
        let mut q = p;
        let mut d = 1;
        while q <= n {
            out.push((p, d));
            q *= p;
            d += 1;
        }
    }
    out
}

fn suite_oracle(_cfg: &SuiteConfig, t: &mut Tally) {
    let mut rings = 0;
    for (p, d) in prime_powers_upto(81) {
        let q = p.pow(d as u32);
        let k = Field::galois(p, d).expect("field");
        let mut m = 0;
        while q.pow(m as u32 + 1) <= 81 {
            let ring = TruncRing::new(k.clone(), m);
            rings += 1;
            match KPresentation::new(&ring, 1) {
                Ok(pres) => {
                    let units = ring.units();
                    let want = invariant_factors_by_counting(&ring, &units);
                    t.check(pres.verify_snf(), || format!("SNF certificate for {ring}"));
                    t.check(pres.invariant_factors() == want, || {
                        format!("K1({ring}) = {:?}, unit group {:?}", pres.invariant_factors(), want)
                    });
                    let unit_group = UnitGroup::new(&ring).expect("finite");
                    t.check(unit_group.order() == units.len(), || format!("unit count for {ring}"));
                }
                Err(e) => t.fail(format!("K1({ring}): {e}")),
            }
            m += 1;
        }
    }
    t.note(format!("{rings} finite rings with at most 81 elements"));
    for (p, d) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let k = Field::galois(p, d).expect("field");
        let ring = TruncRing::new(k, 0);
        match KPresentation::new(&ring, 2) {
            Ok(pres) => t.check(pres.group_order().is_one(), || format!("K2({}) = {:?}", ring.base, pres.invariant_factors())),
            Err(e) => t.fail(format!("K2({}): {e}", ring.base)),
        }
    }
}

// ---------------------------------------------------------------- 10

fn suite_lift(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(10);
    for p in [2u64, 3] {
        let k = Field::prime(p).expect("prime");
        let ring = TruncRing::new(k.clone(), 1);
        let pres = match KPresentation::new(&ring, 2) {
            Ok(x) => x,
            Err(e) => {
                t.fail(format!("presentation over {ring}: {e}"));
                continue;
            }
        };
        let one_units: Vec<TElem> = ring.one_units().into_iter().filter(|u| *u != ring.one()).collect();
        let units = ring.units();
        for _ in 0..cfg.count(50) {
            let u = one_units[rng.gen_range(0..one_units.len())].clone();
            let v = units[rng.gen_range(0..units.len())].clone();
            let entries = if rng.gen_bool(0.5) { vec![u, v] } else { vec![v, u] };
            let s = SymbolSum::single(entries);
            lift_and_compare(t, &ring, &pres, &s);
        }
    }
    // worked examples
    let f7 = Field::prime(7).expect("prime");
    let ring = TruncRing::new(f7.clone(), 2);
    let (a, c) = (f7.from_int(3), f7.from_int(2));
    let s = SymbolSum::single(vec![binomial_unit(&ring, &a, 1), ring.constant(c.clone())]);
    match ks_improved(&ring, &s) {
        Ok(ks) => {
            let want = SymbolSum::single(vec![
                binomial_unit(&ring, &a, 1),
                ring.from_poly(&[c.clone(), f7.zero(), f7.zero(), f7.neg(&f7.pow(&a, 3))]),
            ]);
            t.check(ks == want, || "improved representative {1 - at, c - a^3 t^3}".into());
        }
        Err(e) => t.fail(format!("improved representative: {e}")),
    }
    match lift_symbol_to_cycle(&ring, &s, DEFAULT_PADDING_BUDGET) {
        Ok(terms) => {
            let pts: Vec<&ClosedPointCycle> = terms.iter().flat_map(|x| x.cycle.points.iter()).collect();
            let ok = pts.len() == 1 && {
                let p = pts[0];
                let gamma = &p.tuple[1];
                let min = bloch::minimal_poly(&f7, &p.ext, gamma).unwrap_or_default();
                p.ext.as_subfield(&f7, &p.tuple[0]) == f7.inv(&a)
                    && min == vec![f7.neg(&c), f7.zero(), f7.zero(), f7.one()]
            };
            t.check(ok, || "non-cube example: point (1/a, gamma) with gamma^3 = c".into());
        }
        Err(e) => t.fail(format!("non-cube example: {e}")),
    }
    let f5 = Field::prime(5).expect("prime");
    let ring = TruncRing::new(f5.clone(), 2);
    let (a, d) = (f5.from_int(3), f5.from_int(2));
    let c = f5.pow(&d, 3);
    let s = SymbolSum::single(vec![binomial_unit(&ring, &a, 1), ring.constant(c)]);
    match lift_symbol_to_cycle(&ring, &s, DEFAULT_PADDING_BUDGET) {
        Ok(terms) => {
            let pts: Vec<&ClosedPointCycle> = terms.iter().flat_map(|x| x.cycle.points.iter()).collect();
            let rational: Vec<_> = pts.iter().filter(|p| p.is_rational()).collect();
            let ok = rational.len() == 1 && rational[0].tuple == vec![f5.inv(&a).expect("nonzero"), d.clone()];
            t.check(ok, || "split example: rational point (1/a, d)".into());
        }
        Err(e) => t.fail(format!("split example: {e}")),
    }
}

fn lift_and_compare(t: &mut Tally, ring: &TruncRing, pres: &KPresentation, s: &SymbolSum<TElem>) {
    let shown = crate::milnor::format_sum(s, |e| crate::milnor::format_telem(ring, e));
    let terms = match lift_symbol_to_cycle(ring, s, DEFAULT_PADDING_BUDGET) {
        Ok(x) => x,
        Err(e) => {
            t.fail(format!("lift of {shown}: {e}"));
            return;
        }
    };
    let mut total = SymbolSum::zero(2);
    for term in &terms {
        t.check(term.cycle.single_a1, || format!("lift of {shown} has several A^1 coordinates"));
        match evaluate_phi(ring, &term.cycle) {
            Ok(v) if v.is_complete() => total = total.add(&v.sum).expect("same length"),
            Ok(_) => t.fail(format!("lift of {shown} left an unevaluated transfer")),
            Err(e) => t.fail(format!("phi of lift of {shown}: {e}")),
        }
    }
    match (pres.class_coords(s), pres.class_coords(&total)) {
        (Ok(a), Ok(b)) => t.check(a == b, || format!("oracle coordinates of phi(lift({shown}))")),
        (a, b) => t.fail(format!("oracle: {:?} {:?}", a.err(), b.err())),
    }
}

// ---------------------------------------------------------------- 11

fn random_fn<G: Rng>(ff: &FunctionField, rng: &mut G) -> FElem {
    ff.field.random(rng, 3)
}

fn suite_cartier(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(11);
    for p in [2u64, 3, 5] {
        let ff = FunctionField::over(&Field::prime(p).expect("prime")).expect("function field");
        let f = &ff.field;
        for _ in 0..cfg.count(100) {
            let r1 = random_fn(&ff, &mut rng);
            let r2 = random_fn(&ff, &mut rng);
            // C C^{-1} = id on functions and on a db
            let c = ff.cartier(&ff.inverse_cartier_fn(&r1)).expect("cartier");
            t.check(c == ff.d(&r1), || format!("C(C^-1(r)) = dr, p = {p}"));
            let w = OneForm(f.mul(&r1, &ff.derivative(&r2)));
            let c = ff.cartier(&ff.inverse_cartier_form(&r1, &r2)).expect("cartier");
            t.check(c == w, || format!("C(C^-1(a db)) = a db, p = {p}"));
            let c = ff.cartier(&ff.inverse_cartier(&w)).expect("cartier");
            t.check(c == w, || format!("C(C^-1(w)) = w, p = {p}"));
            // additivity defect
            let lhs = ff.sub(
                &ff.inverse_cartier_fn(&f.add(&r1, &r2)),
                &ff.add(&ff.inverse_cartier_fn(&r1), &ff.inverse_cartier_fn(&r2)),
            );
            t.check(lhs == ff.d_p_polynomial(&r1, &r2).expect("prime"), || format!("defect = dP, p = {p}"));
            // kernel of C
            t.check(ff.is_zero(&ff.cartier(&ff.d(&r1)).expect("cartier")), || format!("C(dg) = 0, p = {p}"));
            let pd = ff.p_decompose(&r2).expect("decompose");
            t.check(ff.reassemble(&pd) == r2, || format!("p-decomposition reassembles, p = {p}"));
            let mut comps = pd.components.clone();
            comps[p as usize - 1] = f.zero();
            let closed = ff.reassemble(&crate::cartier::PDecomposition { components: comps });
            let wk = OneForm(closed);
            t.check(ff.is_zero(&ff.cartier(&wk).expect("cartier")), || format!("constructed kernel element, p = {p}"));
            match ff.antiderivative(&wk) {
                Ok(g) => t.check(ff.d(&g) == wk, || format!("antiderivative, p = {p}")),
                Err(e) => t.fail(format!("antiderivative, p = {p}: {e}")),
            }
        }
    }
}

// ---------------------------------------------------------------- 12

fn suite_theta(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(12);
    for p in [2u64, 3] {
        let ff = FunctionField::over(&Field::prime(p).expect("prime")).expect("function field");
        let f = &ff.field;
        for s in 0..=2usize {
            let m_prime = if p == 2 { 3 } else { 2 };
            let level = GrLevel { m_prime, s };
            for _ in 0..cfg.count(50) {
                let alpha = random_fn(&ff, &mut rng);
                let beta = random_fn(&ff, &mut rng);
                let th = match ff.theta(&alpha, level) {
                    Ok(x) => x,
                    Err(e) => {
                        t.fail(format!("theta: {e}"));
                        continue;
                    }
                };
                let zero = GrClass {
                    omega: OneForm(f.zero()),
                    beta: f.zero(),
                    level,
                };
                // well defined: theta is additive modulo B_s
                let sum = ff.theta(&f.add(&alpha, &beta), level).expect("theta");
                let parts = ff.gr_add(&th, &ff.theta(&beta, level).expect("theta"));
                t.check(sum.beta == parts.beta, || format!("theta additive in the second slot, p = {p}, s = {s}"));
                t.check(
                    ff.bs_member(&ff.sub(&sum.omega, &parts.omega), s).expect("bs"),
                    || format!("theta additive mod B_s, p = {p}, s = {s}"),
                );
                t.check(ff.grm_equal(&th, &zero).expect("gr"), || format!("theta(alpha) ~ 0, p = {p}, s = {s}"));
                // invariance and equivalence
                let c1 = GrClass {
                    omega: OneForm(random_fn(&ff, &mut rng)),
                    beta: random_fn(&ff, &mut rng),
                    level,
                };
                let c2 = GrClass {
                    omega: OneForm(random_fn(&ff, &mut rng)),
                    beta: random_fn(&ff, &mut rng),
                    level,
                };
                let e12 = ff.grm_equal(&c1, &c2).expect("gr");
                let shifted = ff.gr_add(&c1, &th);
                t.check(ff.grm_equal(&shifted, &c2).expect("gr") == e12, || format!("invariance under theta, p = {p}, s = {s}"));
                t.check(ff.grm_equal(&shifted, &c1).expect("gr"), || format!("c + theta(alpha) ~ c, p = {p}, s = {s}"));
                t.check(ff.grm_equal(&c1, &c1).expect("gr"), || "reflexive".into());
                t.check(ff.grm_equal(&c2, &c1).expect("gr") == e12, || "symmetric".into());
                let c3 = ff.gr_add(&shifted, &ff.theta(&beta, level).expect("theta"));
                t.check(
                    ff.grm_equal(&c1, &shifted).expect("gr") && ff.grm_equal(&shifted, &c3).expect("gr") && ff.grm_equal(&c1, &c3).expect("gr"),
                    || "transitive".into(),
                );
                // the B_s chain increases
                let w = OneForm(random_fn(&ff, &mut rng));
                if ff.bs_member(&w, s).expect("bs") {
                    t.check(ff.bs_member(&w, s + 1).expect("bs"), || "B_s inside B_{s+1}".into());
                }
            }
        }
    }
}

// ---------------------------------------------------------------- 13

/// Invariant factors of the relative `K^M_2((F_q)_{m+1}, (t))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct LedgerEntry {
    pub q: u64,
    pub m: usize,
    pub ring: String,
    pub invariant_factors: Vec<String>,
}

pub fn ledger_entries() -> Result<Vec<LedgerEntry>, String> {
    let mut out = Vec::new();
    for (p, d) in [(2u64, 1usize), (3, 1), (2, 2), (5, 1)] {
        let k = Field::galois(p, d).map_err(|e| e.to_string())?;
        for m in 1..=2usize {
            let ring = TruncRing::new(k.clone(), m);
            let pres = KPresentation::new(&ring, 2).map_err(|e| format!("{ring}: {e}"))?;
            let rel = pres.relative_subgroup().map_err(|e| format!("{ring}: {e}"))?;
            out.push(LedgerEntry {
                q: p.pow(d as u32),
                m,
                ring: ring.to_string(),
                invariant_factors: rel.invariant_factors.iter().map(|x| x.to_string()).collect(),
            });
        }
    }
    out.sort_by_key(|e| (e.q, e.m));
    Ok(out)
}

pub fn ledger_json(entries: &[LedgerEntry]) -> String {
    let doc = serde_json::json!({
        "schema": 1,
        "group": "K^M_2((F_q)_{m+1}, (t))",
        "entries": entries,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub const LEDGER_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../tests/ledger/kmilnor.json");

fn suite_ledger(_cfg: &SuiteConfig, t: &mut Tally) {
    let first = ledger_entries();
    let second = ledger_entries();
    match (first, second) {
        (Ok(a), Ok(b)) => {
            let (ja, jb) = (ledger_json(&a), ledger_json(&b));
            t.check(ja == jb, || "two runs differ".into());
            match std::fs::read_to_string(LEDGER_PATH) {
                Ok(stored) => t.check(stored == ja, || format!("stored ledger differs from the computed one:\n{ja}")),
                Err(e) => t.fail(format!("cannot read {LEDGER_PATH}: {e}")),
            }
            for e in &a {
                t.note(format!("q = {}, m = {}: [{}]", e.q, e.m, e.invariant_factors.join(", ")));
            }
            // the relative group of a finite ring is a p-group of order q^{...}
            for e in &a {
                let order: BigInt = e.invariant_factors.iter().map(|x| x.parse::<BigInt>().expect("integer")).product();
                let p = BigInt::from(smallest_prime_factor(e.q));
                let mut o = order.clone();
                while !o.is_one() && (&o % &p).is_zero() {
                    o /= &p;
                }
                t.check(o.is_one(), || format!("relative K2 for q = {} has order {order}", e.q));
            }
        }
        (a, b) => t.fail(format!("ledger computation failed: {:?} {:?}", a.err(), b.err())),
    }
}

/// The relative part of a decomposed class as a map, for reporting.
pub fn class_summary(k: &Field, c: &DecomposedClass) -> BTreeMap<String, String> {
    let w = WittRing::new(k.clone());
    c.terms
        .iter()
        .map(|(s, coords)| {
            let sym: Vec<String> = s.iter().map(|x| k.format(x)).collect();
            (format!("{{{}}}", sym.join(", ")), w.format(&WittVector::full(coords.clone())))
        })
        .collect()
}

fn smallest_prime_factor(n: u64) -> u64 {
    (2..=n).find(|p| n % p == 0).unwrap_or(n)
}
