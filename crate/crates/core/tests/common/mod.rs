//! Instance generators and the grid runner shared by the integration suites.
#![allow(dead_code)]

use std::time::{Duration, Instant};

use incdep::decide::Decider;
use incdep::oracle::{models_entail, valued_refutation, TeamIndex};
use incdep::{Atom, Dialect, Error, Problem, Sequence, Symbol};

pub fn vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

/// Every atom of arity 1..=max_arity over the variables (and both constants
/// in the Boolean dialect) that the dialect admits.
pub fn atom_universe(dialect: Dialect, vars: &[String], max_arity: usize) -> Vec<Atom> {
    let mut syms: Vec<Symbol> = vars.iter().map(|v| Symbol::var(v.clone())).collect();
    if dialect.has_constants() {
        syms.splice(0..0, [Symbol::Bot, Symbol::Top]);
    }
    let mut out = Vec::new();
    for k in 1..=max_arity {
        let seqs = sequences(&syms, k);
        for l in &seqs {
            for r in &seqs {
                let a = Atom {
                    lhs: l.clone(),
                    rhs: r.clone(),
                };
                if dialect.admits(&a) {
                    out.push(a);
                }
            }
        }
    }
    out
}

pub fn sequences(syms: &[Symbol], k: usize) -> Vec<Sequence> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|s: Vec<Symbol>| {
                syms.iter().map(move |x| {
                    let mut t = s.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(Sequence).collect()
}

/// Index sets of at most two atoms out of `n`.
pub fn assumption_sets(n: usize) -> Vec<Vec<usize>> {
    let mut sets = vec![vec![]];
    for i in 0..n {
        sets.push(vec![i]);
        for j in i + 1..n {
            sets.push(vec![i, j]);
        }
    }
    sets
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disagreement {
    /// The decider derived the query but some team refutes it.
    Unsound,
    /// No derivation, and the exhaustive search agrees with the oracle that
    /// no team refutes the query.
    /// The flag records whether a three-valued team refutes the query.
    Underivable { three_valued_refutation: bool },
    /// Anything else: errors other than a failed construction.
    Other(String),
}

#[derive(Debug, Default)]
pub struct GridReport {
    pub instances: usize,
    pub assumption_sets: usize,
    pub replayed_steps: usize,
    pub entailed: usize,
    pub refuted: usize,
    pub disagreements: Vec<(Problem, Disagreement)>,
    pub elapsed: Duration,
}

impl GridReport {
    pub fn count(&self, f: impl Fn(&Disagreement) -> bool) -> usize {
        self.disagreements.iter().filter(|(_, d)| f(d)).count()
    }

    pub fn unsound(&self) -> usize {
        self.count(|d| *d == Disagreement::Unsound)
    }

    pub fn other(&self) -> usize {
        self.count(|d| matches!(d, Disagreement::Other(_)))
    }

    pub fn underivable(&self) -> usize {
        self.count(|d| matches!(d, Disagreement::Underivable { .. }))
    }

    pub fn three_valued(&self) -> usize {
        self.count(|d| {
            matches!(
                d,
                Disagreement::Underivable {
                    three_valued_refutation: true
                }
            )
        })
    }

    pub fn summary(&self, dialect: Dialect) -> String {
        format!(
            "{dialect}: {} instances over {} assumption sets, {} entailed, {} refuted by verified teams, \
             {} steps replayed, {} disagreements ({} unsound, {} underivable of which {} have a 3-valued refutation, {} other), {:.1?}",
            self.instances,
            self.assumption_sets,
            self.entailed,
            self.refuted,
            self.replayed_steps,
            self.disagreements.len(),
            self.unsound(),
            self.underivable(),
            self.three_valued(),
            self.other(),
            self.elapsed
        )
    }
}

fn classify(p: &Problem, got: incdep::Result<bool>, want: bool) -> Option<Disagreement> {
    match got {
        Ok(g) if g == want => None,
        Ok(true) => Some(Disagreement::Unsound),
        Err(Error::Underivable(_)) if want => Some(Disagreement::Underivable {
            three_valued_refutation: valued_refutation(p, 3).ok().flatten().is_some(),
        }),
        Ok(false) => Some(Disagreement::Other(
            "verified refutation of an entailed query".into(),
        )),
        Err(e) => Some(Disagreement::Other(e.to_string())),
    }
}

/// Decides every query of the atom universe against every set of at most
/// `max_assumptions` atoms, comparing with the team oracle over the same
/// variables. Each assumption set is saturated once over all variables; the
/// whole closure is replayed step by step.
pub fn run_grid(dialect: Dialect, nvars: usize, max_arity: usize) -> GridReport {
    let start = Instant::now();
    let names = vars(nvars);
    let index = TeamIndex::new(names.clone()).expect("small universe");
    let atoms = atom_universe(dialect, &names, max_arity);
    let models: Vec<Vec<u64>> = atoms.iter().map(|a| index.models(a).unwrap()).collect();
    let mut report = GridReport::default();
    for set in assumption_sets(atoms.len()) {
        let sigma: Vec<Atom> = set.iter().map(|&i| atoms[i].clone()).collect();
        let ms: Vec<&[u64]> = set.iter().map(|&i| models[i].as_slice()).collect();
        let d =
            Decider::new(dialect, &sigma, &names, max_arity.max(2), 1 << 23).expect("saturation");
        report.replayed_steps += d
            .saturation()
            .replay_all()
            .unwrap_or_else(|e| panic!("replay failed for {sigma:?}: {e}"));
        report.assumption_sets += 1;
        for (qi, q) in atoms.iter().enumerate() {
            report.instances += 1;
            let want = models_entail(&ms, &models[qi]);
            let got = d.entails(q);
            match &got {
                Ok(true) => report.entailed += 1,
                Ok(false) => report.refuted += 1,
                Err(_) => {}
            }
            let p = Problem {
                dialect,
                assumptions: sigma.clone(),
                query: q.clone(),
            };
            if let Some(dis) = classify(&p, got, want) {
                report.disagreements.push((p, dis));
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}
