//! Bounded forward saturation under all rules of a dialect.
//!
//! Symbols are interned and every sequence of length `1..=N` over them gets
//! a dense id, as does every atom, so the derived set is a flat array of
//! justifications. Rules are applied semi-naively from a worklist; B3 runs
//! as a separate pass whenever the worklist drains.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::rules::{validate_step, Rule, RuleStep, StepDetail};
use super::trace::{DerivationTrace, Source, TraceStep};
use crate::error::{Error, Result};
use crate::syntax::{Atom, Dialect, Problem, Sequence, Symbol};

/// Default limit on the number of atoms in the bounded universe.
pub const DEFAULT_ATOM_BUDGET: u128 = 1 << 23;

const NONE: u32 = u32::MAX;
const BOT: u16 = 0;
const TOP: u16 = 1;

type Ids = SmallVec<[u32; 2]>;
type Syms = SmallVec<[u16; 6]>;

#[derive(Clone, Debug)]
enum Origin {
    Assumption(usize),
    Rule {
        rule: Rule,
        detail: StepDetail,
        premises: Ids,
    },
}

/// The bounded universe of sequences and atoms.
#[derive(Clone, Debug)]
struct Space {
    symbols: Vec<Symbol>,
    index: FxHashMap<Symbol, u16>,
    bound: usize,
    m: usize,
    /// `pow[k] = m^k`.
    pow: Vec<usize>,
    /// First sequence id of each length.
    seq_start: Vec<usize>,
    seqs: Vec<Syms>,
    atom_start: Vec<usize>,
    atoms: usize,
}

impl Space {
    fn new(symbols: Vec<Symbol>, bound: usize, budget: u128) -> Result<Space> {
        let m = symbols.len();
        let mut total: u128 = 0;
        for k in 1..=bound {
            total = total.saturating_add((m as u128).saturating_pow(2 * k as u32));
        }
        if total > budget {
            return Err(Error::CapExceeded {
                what: "saturation atom universe",
                size: total,
                cap: budget,
            });
        }
        let pow: Vec<usize> = (0..=2 * bound).map(|k| m.pow(k as u32)).collect();
        let mut seq_start = vec![0; bound + 2];
        let mut atom_start = vec![0; bound + 2];
        for k in 1..=bound {
            seq_start[k + 1] = seq_start[k] + pow[k];
            atom_start[k + 1] = atom_start[k] + pow[2 * k];
        }
        let mut seqs = Vec::with_capacity(seq_start[bound + 1]);
        for k in 1..=bound {
            for code in 0..pow[k] {
                let mut s = Syms::new();
                for i in 0..k {
                    s.push((code / pow[k - 1 - i] % m) as u16);
                }
                seqs.push(s);
            }
        }
        let index = symbols.iter().cloned().zip(0u16..).collect();
        let atoms = atom_start[bound + 1];
        Ok(Space {
            symbols,
            index,
            bound,
            m,
            pow,
            seq_start,
            seqs,
            atom_start,
            atoms,
        })
    }

    fn seq_id(&self, s: &[u16]) -> usize {
        let k = s.len();
        self.seq_start[k] + s.iter().fold(0, |acc, &x| acc * self.m + x as usize)
    }

    fn atom_id(&self, l: usize, r: usize) -> u32 {
        let k = self.seqs[l].len();
        let base = self.seq_start[k];
        (self.atom_start[k] + (l - base) * self.pow[k] + (r - base)) as u32
    }

    fn atom_of(&self, l: &[u16], r: &[u16]) -> u32 {
        self.atom_id(self.seq_id(l), self.seq_id(r))
    }

    fn decode(&self, a: u32) -> (usize, usize) {
        let a = a as usize;
        let k = (1..=self.bound)
            .find(|&k| a < self.atom_start[k + 1])
            .expect("atom id in range");
        let rel = a - self.atom_start[k];
        let base = self.seq_start[k];
        (base + rel / self.pow[k], base + rel % self.pow[k])
    }

    fn intern(&self, seq: &Sequence) -> Option<Syms> {
        if seq.is_empty() || seq.len() > self.bound {
            return None;
        }
        seq.iter().map(|s| self.index.get(s).copied()).collect()
    }

    fn encode(&self, atom: &Atom) -> Option<u32> {
        let l = self.intern(&atom.lhs)?;
        let r = self.intern(&atom.rhs)?;
        (l.len() == r.len()).then(|| self.atom_of(&l, &r))
    }

    fn sequence(&self, id: usize) -> Sequence {
        Sequence(
            self.seqs[id]
                .iter()
                .map(|&s| self.symbols[s as usize].clone())
                .collect(),
        )
    }

    fn atom(&self, a: u32) -> Atom {
        let (l, r) = self.decode(a);
        Atom {
            lhs: self.sequence(l),
            rhs: self.sequence(r),
        }
    }
}

/// Limits for a saturation run.
#[derive(Clone, Copy, Debug)]
pub struct SaturationConfig {
    /// Longest sequence considered; `None` picks the smallest admissible bound.
    pub bound: Option<usize>,
    /// Largest admissible number of atoms in the bounded universe.
    pub budget: u128,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        SaturationConfig {
            bound: None,
            budget: DEFAULT_ATOM_BUDGET,
        }
    }
}

/// The smallest bound the saturation accepts for a problem.
pub fn minimal_bound(p: &Problem) -> usize {
    p.max_arity().max(2)
}

/// The closure of a set of assumptions within a bounded universe.
#[derive(Clone, Debug)]
pub struct Saturation {
    dialect: Dialect,
    assumptions: Vec<Atom>,
    space: Space,
    just: Vec<u32>,
    origins: Vec<Origin>,
    /// Id of `#T ⊆ #F` once derived.
    contradiction: Option<u32>,
    queue: VecDeque<u32>,
    by_lhs: Vec<Vec<u32>>,
    by_rhs: Vec<Vec<u32>>,
    by_last_rhs: Vec<Vec<u32>>,
    eq_by_second: Vec<Vec<(u16, u32)>>,
    dirty: Vec<bool>,
}

/// Saturates a problem's assumptions over its own variables.
pub fn saturate(p: &Problem, bound: usize) -> Result<Saturation> {
    Saturation::run(
        p,
        &SaturationConfig {
            bound: Some(bound),
            ..SaturationConfig::default()
        },
    )
}

impl Saturation {
    pub fn run(p: &Problem, config: &SaturationConfig) -> Result<Saturation> {
        let min = minimal_bound(p);
        let bound = config.bound.unwrap_or(min);
        if bound < min {
            return Err(Error::PreconditionViolated(format!(
                "saturation bound {bound} is below the required {min}"
            )));
        }
        Saturation::over(
            p.dialect,
            &p.assumptions,
            &p.variables(),
            bound,
            config.budget,
        )
    }

    /// Saturates `assumptions` over the given variables (plus constants in
    /// the Boolean dialect); the variables must include those of the
    /// assumptions.
    pub fn over(
        dialect: Dialect,
        assumptions: &[Atom],
        vars: &[String],
        bound: usize,
        budget: u128,
    ) -> Result<Saturation> {
        let mut names: Vec<&String> = vars.iter().collect();
        names.sort();
        names.dedup();
        let mut symbols = Vec::new();
        if dialect.has_constants() {
            symbols.push(Symbol::Bot);
            symbols.push(Symbol::Top);
        }
        symbols.extend(names.into_iter().map(|n| Symbol::Var(n.clone())));
        if symbols.len() > u16::MAX as usize {
            return Err(Error::CapExceeded {
                what: "saturation symbols",
                size: symbols.len() as u128,
                cap: u16::MAX as u128,
            });
        }
        let space = Space::new(symbols, bound.max(1), budget)?;
        let nseq = space.seqs.len();
        let nsym = space.m;
        let mut s = Saturation {
            dialect,
            assumptions: assumptions.to_vec(),
            just: vec![NONE; space.atoms],
            origins: Vec::new(),
            contradiction: None,
            queue: VecDeque::new(),
            by_lhs: vec![Vec::new(); nseq],
            by_rhs: vec![Vec::new(); nseq],
            by_last_rhs: vec![Vec::new(); nsym],
            eq_by_second: vec![Vec::new(); nsym],
            dirty: vec![true; nseq],
            space,
        };
        for (k, a) in assumptions.iter().enumerate() {
            if a.arity() == 0 {
                continue;
            }
            let id = s.space.encode(a).ok_or_else(|| {
                Error::PreconditionViolated(format!(
                    "assumption `{a}` is outside the saturation universe"
                ))
            })?;
            s.add(id, Origin::Assumption(k));
        }
        for id in 0..nseq {
            let seq = &s.space.seqs[id];
            let admitted = dialect.has_repetitions()
                || seq.iter().enumerate().all(|(i, x)| !seq[..i].contains(x));
            if admitted {
                let a = s.space.atom_id(id, id);
                s.add(
                    a,
                    Origin::Rule {
                        rule: Rule::I1,
                        detail: StepDetail::None,
                        premises: Ids::new(),
                    },
                );
            }
        }
        s.fixpoint();
        Ok(s)
    }

    fn add(&mut self, a: u32, origin: Origin) {
        let slot = &mut self.just[a as usize];
        if *slot != NONE {
            return;
        }
        *slot = self.origins.len() as u32;
        self.origins.push(origin);
        self.queue.push_back(a);
    }

    fn derive(&mut self, a: u32, rule: Rule, detail: StepDetail, premises: &[u32]) {
        if self.just[a as usize] == NONE {
            self.add(
                a,
                Origin::Rule {
                    rule,
                    detail,
                    premises: premises.iter().copied().collect(),
                },
            );
        }
    }

    fn fixpoint(&mut self) {
        loop {
            while let Some(a) = self.queue.pop_front() {
                self.process(a);
                if self.contradiction.is_some() {
                    self.queue.clear();
                    return;
                }
            }
            if !self.dialect.has_constants() || !self.coverage_pass() {
                return;
            }
        }
    }

    fn process(&mut self, a: u32) {
        let (l, r) = self.space.decode(a);
        let lhs = self.space.seqs[l].clone();
        let rhs = self.space.seqs[r].clone();
        let k = lhs.len();
        let n = self.space.bound;
        if k == 1 && lhs[0] == TOP && rhs[0] == BOT && self.dialect.has_constants() {
            self.contradiction = Some(a);
            return;
        }
        let reps = self.dialect.has_repetitions();
        if l != r {
            // I2 with a as either premise.
            let mut i = 0;
            while i < self.by_lhs[r].len() {
                let y = self.by_lhs[r][i] as usize;
                let b = self.space.atom_id(r, y);
                let c = self.space.atom_id(l, y);
                self.derive(c, Rule::I2, StepDetail::None, &[a, b]);
                i += 1;
            }
            let mut i = 0;
            while i < self.by_rhs[l].len() {
                let x = self.by_rhs[l][i] as usize;
                let b = self.space.atom_id(x, l);
                let c = self.space.atom_id(x, r);
                self.derive(c, Rule::I2, StepDetail::None, &[b, a]);
                i += 1;
            }
            self.by_lhs[l].push(r as u32);
            self.by_rhs[r].push(l as u32);
            self.dirty[r] = true;

            for first in 0..k {
                for second in 1..k - first {
                    let swap = |s: &Syms| -> Syms {
                        let mut out: Syms = s[..first].iter().copied().collect();
                        out.extend_from_slice(&s[first + second..]);
                        out.extend_from_slice(&s[first..first + second]);
                        out
                    };
                    let c = self.space.atom_of(&swap(&lhs), &swap(&rhs));
                    self.derive(c, Rule::I3, StepDetail::Split { first, second }, &[a]);
                }
            }
            for j in 1..k {
                let c = self.space.atom_of(&lhs[..j], &rhs[..j]);
                self.derive(c, Rule::I4, StepDetail::Prefix(j), &[a]);
            }
            if k < n {
                if reps {
                    let mut l2 = lhs.clone();
                    let mut r2 = rhs.clone();
                    l2.push(lhs[k - 1]);
                    r2.push(rhs[k - 1]);
                    let c = self.space.atom_of(&l2, &r2);
                    self.derive(c, Rule::I5, StepDetail::None, &[a]);
                }
                if self.dialect.has_constants() {
                    for (sym, bit) in [(BOT, false), (TOP, true)] {
                        let mut l2 = lhs.clone();
                        let mut r2 = rhs.clone();
                        l2.push(sym);
                        r2.push(sym);
                        let c = self.space.atom_of(&l2, &r2);
                        self.derive(c, Rule::B2, StepDetail::Constant(bit), &[a]);
                    }
                }
            }
        }
        if reps {
            // I6 with a as the substitution target.
            let last = rhs[k - 1] as usize;
            let mut i = 0;
            while i < self.eq_by_second[last].len() {
                let (x1, eq) = self.eq_by_second[last][i];
                let mut r2 = rhs.clone();
                r2[k - 1] = x1;
                let c = self.space.atom_of(&lhs, &r2);
                self.derive(c, Rule::I6, StepDetail::None, &[eq, a]);
                i += 1;
            }
            self.by_last_rhs[last].push(a);
            // I6 with a as the equality premise.
            if k == 2 && rhs[0] == rhs[1] && lhs[0] != lhs[1] {
                let (x1, x2) = (lhs[0], lhs[1] as usize);
                self.eq_by_second[x2].push((x1, a));
                let mut i = 0;
                while i < self.by_last_rhs[x2].len() {
                    let b = self.by_last_rhs[x2][i];
                    let (bl, br) = self.space.decode(b);
                    let mut r2 = self.space.seqs[br].clone();
                    let end = r2.len() - 1;
                    r2[end] = x1;
                    let c = self.space.atom_id(bl, self.space.seq_id(&r2));
                    self.derive(c, Rule::I6, StepDetail::None, &[a, b]);
                    i += 1;
                }
            }
        }
    }

    /// One round of B3 over every right side whose candidates changed.
    fn coverage_pass(&mut self) -> bool {
        let mut added = false;
        for q in 0..self.space.seqs.len() {
            if !std::mem::take(&mut self.dirty[q]) {
                continue;
            }
            let k = self.space.seqs[q].len();
            // A candidate without constants fits a target only by being it.
            let cands: Vec<usize> = std::iter::once(q)
                .chain(self.by_rhs[q].iter().map(|&x| x as usize))
                .filter(|&x| self.space.seqs[x].iter().any(|&s| s == TOP || s == BOT))
                .collect();
            if cands.is_empty() {
                continue;
            }
            let start = self.space.seq_start[k];
            for p in start..start + self.space.pow[k] {
                let target = self.space.atom_id(p, q);
                if self.just[target as usize] != NONE {
                    continue;
                }
                if let Some(cover) = self.cover(p, q, &cands) {
                    self.derive(target, Rule::B3, StepDetail::None, &cover);
                    added = true;
                }
            }
        }
        added
    }

    /// An irredundant covering subset of the candidates for `p ⊆ q`, if any.
    fn cover(&self, p: usize, q: usize, cands: &[usize]) -> Option<Vec<u32>> {
        let ps = &self.space.seqs[p];
        let k = ps.len();
        // (constant-position mask, constant values) per fitting candidate.
        let mut fitting: Vec<(u32, u32, u32)> = Vec::new();
        for &c in cands {
            let cs = &self.space.seqs[c];
            let mut mask = 0u32;
            let mut val = 0u32;
            let mut ok = true;
            for i in 0..k {
                let bit = 1 << (k - 1 - i);
                match cs[i] {
                    TOP => {
                        mask |= bit;
                        val |= bit;
                    }
                    BOT => mask |= bit,
                    s if s == ps[i] => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                fitting.push((mask, val, self.space.atom_id(c, q)));
            }
        }
        if fitting.is_empty() {
            return None;
        }
        let instances = self.instances(ps);
        let covers = |&(mask, val, _): &(u32, u32, u32), x: u32| (x ^ val) & mask == 0;
        if !instances
            .iter()
            .all(|&x| fitting.iter().any(|f| covers(f, x)))
        {
            return None;
        }
        // Keep earlier-derived candidates; drop later ones while coverage holds.
        fitting.sort_by_key(|f| self.just[f.2 as usize]);
        let mut keep = vec![true; fitting.len()];
        for i in (0..fitting.len()).rev() {
            keep[i] = false;
            let still = instances.iter().all(|&x| {
                fitting
                    .iter()
                    .zip(&keep)
                    .any(|(f, &kept)| kept && covers(f, x))
            });
            if !still {
                keep[i] = true;
            }
        }
        Some(
            fitting
                .iter()
                .zip(&keep)
                .filter(|(_, &kept)| kept)
                .map(|(f, _)| f.2)
                .collect(),
        )
    }

    /// Constant instances of a sequence, as bit patterns with position 0 most significant.
    fn instances(&self, ps: &[u16]) -> Vec<u32> {
        let k = ps.len();
        let mut vars: Syms = Syms::new();
        for &s in ps {
            if s != TOP && s != BOT && !vars.contains(&s) {
                vars.push(s);
            }
        }
        let d = vars.len();
        (0..1u32 << d)
            .map(|code| {
                let mut x = 0u32;
                for (i, &s) in ps.iter().enumerate() {
                    let bit = match s {
                        TOP => 1,
                        BOT => 0,
                        _ => {
                            let v = vars.iter().position(|&y| y == s).expect("listed");
                            code >> (d - 1 - v) & 1
                        }
                    };
                    x |= bit << (k - 1 - i);
                }
                x
            })
            .collect()
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn bound(&self) -> usize {
        self.space.bound
    }

    pub fn assumptions(&self) -> &[Atom] {
        &self.assumptions
    }

    /// Interned symbols: `#F`, `#T` (Boolean dialect only), then variables by name.
    pub fn symbols(&self) -> &[Symbol] {
        &self.space.symbols
    }

    pub fn is_contradictory(&self) -> bool {
        self.contradiction.is_some()
    }

    /// Number of atoms derived by explicit rule applications or assumed.
    pub fn derived_count(&self) -> usize {
        self.origins.len()
    }

    /// Whether the atom is derivable within the universe, counting B1.
    pub fn contains(&self, atom: &Atom) -> bool {
        match self.space.encode(atom) {
            Some(id) => self.contradiction.is_some() || self.just[id as usize] != NONE,
            None => false,
        }
    }

    /// Every explicitly derived atom, in derivation order.
    pub fn derived(&self) -> Vec<Atom> {
        let mut ids: Vec<(u32, u32)> = self
            .just
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != NONE)
            .map(|(a, &j)| (j, a as u32))
            .collect();
        ids.sort_unstable();
        ids.into_iter().map(|(_, a)| self.space.atom(a)).collect()
    }

    /// All `w` with `w ⊆ rhs` derivable, in symbol order.
    pub fn with_rhs(&self, rhs: &Sequence) -> Vec<Sequence> {
        let Some(r) = self.space.intern(rhs) else {
            return Vec::new();
        };
        let r = self.space.seq_id(&r);
        let k = rhs.len();
        let start = self.space.seq_start[k];
        (start..start + self.space.pow[k])
            .filter(|&l| {
                self.contradiction.is_some() || self.just[self.space.atom_id(l, r) as usize] != NONE
            })
            .map(|l| self.space.sequence(l))
            .collect()
    }

    /// A replayable derivation of the atom, if it is derivable.
    pub fn trace(&self, atom: &Atom) -> Option<DerivationTrace> {
        let id = self.space.encode(atom)?;
        if self.just[id as usize] != NONE {
            return Some(self.trace_of(id));
        }
        let bottom = self.contradiction?;
        let mut t = self.trace_of(bottom);
        let src = match self.origins[self.just[bottom as usize] as usize] {
            Origin::Assumption(k) => Source::Assumption(k),
            Origin::Rule { .. } => Source::Step(t.steps.len() - 1),
        };
        t.steps.push(TraceStep {
            step: RuleStep::new(
                Rule::B1,
                vec![self.space.atom(bottom)],
                atom.clone(),
                StepDetail::None,
            ),
            sources: vec![src],
        });
        t.target = atom.clone();
        Some(t)
    }

    /// Checks every recorded step of the closure at once: each premise was
    /// derived earlier and each step passes [`validate_step`]. Equivalent to
    /// replaying the traces of all derived atoms. Returns the number of steps.
    pub fn replay_all(&self) -> std::result::Result<usize, String> {
        let mut order: Vec<(u32, u32)> = self
            .just
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != NONE)
            .map(|(a, &j)| (j, a as u32))
            .collect();
        order.sort_unstable();
        let mut steps = 0;
        for &(j, a) in &order {
            match &self.origins[j as usize] {
                Origin::Assumption(k) => {
                    if self.assumptions.get(*k).map(|x| self.space.encode(x)) != Some(Some(a)) {
                        return Err(format!(
                            "atom {} is not assumption A#{k}",
                            self.space.atom(a)
                        ));
                    }
                }
                Origin::Rule {
                    rule,
                    detail,
                    premises,
                } => {
                    if let Some(&p) = premises.iter().find(|&&p| self.just[p as usize] >= j) {
                        return Err(format!(
                            "premise {} of {} is not derived before it",
                            self.space.atom(p),
                            self.space.atom(a)
                        ));
                    }
                    let step = RuleStep::new(
                        *rule,
                        premises.iter().map(|&p| self.space.atom(p)).collect(),
                        self.space.atom(a),
                        *detail,
                    );
                    if !validate_step(&step) {
                        return Err(format!("invalid step {step:?}"));
                    }
                    steps += 1;
                }
            }
        }
        Ok(steps)
    }

    fn trace_of(&self, root: u32) -> DerivationTrace {
        let mut placed: FxHashMap<u32, Source> = FxHashMap::default();
        let mut steps: Vec<TraceStep> = Vec::new();
        let mut stack: Vec<(u32, bool)> = vec![(root, false)];
        while let Some((a, expanded)) = stack.pop() {
            if placed.contains_key(&a) {
                continue;
            }
            match &self.origins[self.just[a as usize] as usize] {
                Origin::Assumption(k) => {
                    placed.insert(a, Source::Assumption(*k));
                }
                Origin::Rule {
                    rule,
                    detail,
                    premises,
                } => {
                    if expanded {
                        let sources = premises.iter().map(|p| placed[p]).collect();
                        let step = RuleStep::new(
                            *rule,
                            premises.iter().map(|&p| self.space.atom(p)).collect(),
                            self.space.atom(a),
                            *detail,
                        );
                        placed.insert(a, Source::Step(steps.len()));
                        steps.push(TraceStep { step, sources });
                    } else {
                        stack.push((a, true));
                        for &p in premises.iter().rev() {
                            if !placed.contains_key(&p) {
                                stack.push((p, false));
                            }
                        }
                    }
                }
            }
        }
        DerivationTrace {
            target: self.space.atom(root),
            steps,
        }
    }
}
