//! Translations between general labellings with plain variables and
//! point-based labellings with regular atoms.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formula::{Formula, FormulaError, FormulaPlus, FormulaRe, Letter};
use crate::regex::{LanguageShape, Regex};
use crate::system::{InterpretedSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("labelling is not point-based: {0}")]
    NotPointBased(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    System(#[from] SystemError),
}

fn require_point_based(sys: &InterpretedSystem) -> Result<(), ReductionError> {
    let bad: Vec<&str> = (0..sys.num_vars())
        .filter(|&v| sys.shape(v) != LanguageShape::PointBased && !is_empty_language(sys, v))
        .map(|v| sys.var_name(v))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(ReductionError::NotPointBased(bad.join(", ")))
    }
}

// An empty labelling denotes no words at all, so it is trivially point-based.
fn is_empty_language(sys: &InterpretedSystem, v: usize) -> bool {
    sys.dfa(v).accepting_states().is_empty()
}

/// Configurations matched by a letter predicate.
fn letter_configs(sys: &InterpretedSystem, letter: &Letter) -> Vec<usize> {
    let names: Vec<String> = (0..sys.num_vars())
        .map(|v| sys.var_name(v).to_string())
        .collect();
    (0..sys.num_configs())
        .filter(|&g| {
            let val = sys.valuation(g);
            letter.matches(|p| sys.var_index(p).is_some_and(|v| val[v]), &names)
        })
        .collect()
}

/// Replaces every letter of `r` by the union of the configurations it
/// matches under the point-based labelling of `sys`.
pub fn lambda_compose(
    sys: &InterpretedSystem,
    r: &Regex<Letter>,
) -> Result<Regex<usize>, ReductionError> {
    require_point_based(sys)?;
    for letter in r.symbols() {
        for p in letter.variables() {
            if sys.var_index(p).is_none() {
                return Err(FormulaError::UnknownVariable(p.to_string()).into());
            }
        }
    }
    Ok(r.map(&mut |l: &Letter| Regex::sum(letter_configs(sys, l).into_iter().map(Regex::Symbol))))
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Relabels `sys` with one variable `v_<config>` per reachable configuration
/// (true exactly at that configuration's point interval) and rewrites each
/// variable of `f` into the regular atom of its labelling.
pub fn to_point_based(
    sys: &InterpretedSystem,
    f: &FormulaPlus,
) -> Result<(InterpretedSystem, FormulaRe), ReductionError> {
    f.bind(sys)?;
    let mut var_of: BTreeMap<usize, String> = BTreeMap::new();
    for g in sys.reachable_configs() {
        let base = format!("v_{}", sanitize(sys.config_name(g)));
        let mut name = base.clone();
        let mut k = 1;
        while var_of.values().any(|n| *n == name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        var_of.insert(g, name);
    }
    let mut def = sys.def().clone();
    def.labels = var_of
        .iter()
        .map(|(&g, name)| (name.clone(), Regex::Symbol(g)))
        .collect();
    let out = InterpretedSystem::new(def)?;
    let formula = f.map_atoms(&mut |p: &String| {
        let v = sys.var_index(p).expect("bound above");
        sys.label(v).map(&mut |g: &usize| match var_of.get(g) {
            Some(name) => Regex::Symbol(Letter::Var(name.clone())),
            None => Regex::Empty,
        })
    });
    Ok((out, formula))
}

/// Deterministic variable name for a regular atom.
pub fn atom_variable(r: &Regex<Letter>) -> String {
    let digest = Sha256::digest(r.to_string().as_bytes());
    let hex: String = digest.iter().take(4).map(|b| format!("{b:02x}")).collect();
    format!("q_{hex}")
}

/// Replaces each distinct regular atom of `f` by a fresh variable labelled
/// with the atom composed with the point-based labelling of `sys`.
pub fn to_regular_labelling(
    sys: &InterpretedSystem,
    f: &FormulaRe,
) -> Result<(InterpretedSystem, FormulaPlus), ReductionError> {
    require_point_based(sys)?;
    f.bind(sys)?;
    let mut names: Vec<(Regex<Letter>, String)> = Vec::new();
    let mut labels = Vec::new();
    for atom in f.atoms() {
        if names.iter().any(|(r, _)| r == atom) {
            continue;
        }
        let base = atom_variable(atom);
        let mut name = base.clone();
        let mut k = 1;
        while names.iter().any(|(_, n)| *n == name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        labels.push((name.clone(), lambda_compose(sys, atom)?));
        names.push((atom.clone(), name));
    }
    let mut def = sys.def().clone();
    def.labels = labels;
    let out = InterpretedSystem::new(def)?;
    let formula: Formula<String> = f.map_atoms(&mut |r: &Regex<Letter>| {
        names
            .iter()
            .find(|(a, _)| a == r)
            .map(|(_, n)| n.clone())
            .expect("collected above")
    });
    Ok((out, formula))
}
