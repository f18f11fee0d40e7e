//! Ground programs as facts `atom/1`, `rule/1`, `head/2`, `pos/2`, `neg/2`.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

use crate::ast::{Term, Value};
use crate::error::{Error, Result};
use crate::ground::{GroundAtom, GroundProgram, GroundRule};
use crate::parse::program::parse_program_unchecked;

/// Symbolic ids for the atoms of `gp`: a 0-ary atom keeps its name, others
/// get a mangled name (`p(a,1)` becomes `p_a_1`), made unique with a numeric
/// suffix if needed.
pub fn atom_ids(gp: &GroundProgram) -> Vec<String> {
    let props: BTreeSet<&str> = gp
        .atoms
        .iter()
        .filter(|a| a.args.is_empty())
        .map(|a| a.predicate.as_str())
        .collect();
    let mut used: BTreeSet<String> = props.iter().map(|s| s.to_string()).collect();
    gp.atoms
        .iter()
        .map(|a| {
            if a.args.is_empty() {
                return a.predicate.clone();
            }
            let mut base = a.predicate.clone();
            for v in &a.args {
                base.push('_');
                match v {
                    Value::Int(i) if *i < 0 => base.push_str(&format!("m{}", i.unsigned_abs())),
                    v => base.push_str(&v.to_string()),
                }
            }
            let mut name = base.clone();
            let mut k = 1;
            while used.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            used.insert(name.clone());
            name
        })
        .collect()
}

pub fn emit_reified(gp: &GroundProgram) -> String {
    let ids = atom_ids(gp);
    let mut out = String::new();
    for id in &ids {
        out.push_str(&format!("atom({id}).\n"));
    }
    for (ri, r) in gp.rules.iter().enumerate() {
        out.push_str(&format!("rule(r{ri}).\n"));
        for (kind, list) in [("head", &r.head), ("pos", &r.pos), ("neg", &r.neg)] {
            for &a in list {
                out.push_str(&format!("{kind}(r{ri},{}).\n", ids[a]));
            }
        }
    }
    out
}

fn id_of(t: &Term) -> Option<String> {
    match t {
        Term::Sym(s) => Some(s.clone()),
        Term::Int(i) => Some(i.to_string()),
        _ => None,
    }
}

/// Parses reified facts. Atoms become 0-ary atoms named by their ids; atom
/// and rule order follow the `atom/1` and `rule/1` declarations.
pub fn parse_reified(text: &str) -> Result<GroundProgram> {
    let program = parse_program_unchecked(text)?;
    if let Some(r) = program.rules.first() {
        return Err(Error::syntax(
            0,
            0,
            format!("reified input must contain only facts, found `{r}`"),
        ));
    }
    let mut atoms: IndexMap<String, ()> = IndexMap::new();
    let mut rules: IndexMap<String, GroundRule> = IndexMap::new();
    let mut refs = Vec::new();
    for f in &program.facts {
        let ids: Option<Vec<String>> = f.args.iter().map(id_of).collect();
        let ids = ids.ok_or_else(|| Error::syntax(0, 0, format!("malformed fact `{f}`")))?;
        match (f.predicate.as_str(), ids.as_slice()) {
            ("atom", [a]) => {
                if atoms.insert(a.clone(), ()).is_some() {
                    return Err(Error::DuplicateId { id: a.clone() });
                }
            }
            ("rule", [r]) => {
                if rules.insert(r.clone(), GroundRule::default()).is_some() {
                    return Err(Error::DuplicateId { id: r.clone() });
                }
            }
            ("head" | "pos" | "neg", [r, a]) => refs.push((f.predicate.as_str(), r.clone(), a.clone())),
            _ => return Err(Error::syntax(0, 0, format!("unexpected fact `{f}`"))),
        }
    }
    for (kind, r, a) in refs {
        let ai = atoms
            .get_index_of(&a)
            .ok_or_else(|| Error::DanglingReference { id: a.clone() })?;
        let rule = rules
            .get_mut(&r)
            .ok_or_else(|| Error::DanglingReference { id: r.clone() })?;
        match kind {
            "head" => rule.head.push(ai),
            "pos" => rule.pos.push(ai),
            _ => rule.neg.push(ai),
        }
    }
    let mut gp = GroundProgram::new();
    for a in atoms.keys() {
        gp.intern(GroundAtom::prop(a.clone()));
    }
    gp.rules = rules.into_values().collect();
    Ok(gp)
}

/// Reads a whitespace-separated list of atom ids (a trailing `.` on each id
/// is tolerated) and resolves them against `gp`.
pub fn parse_atom_list(text: &str, gp: &GroundProgram) -> Result<Vec<usize>> {
    let by_name: BTreeMap<String, usize> = atom_ids(gp).into_iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut out = Vec::new();
    for w in text
        .lines()
        .map(|l| l.split('%').next().unwrap())
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
    {
        let w = w.trim_end_matches('.');
        if w.is_empty() {
            continue;
        }
        let i = *by_name
            .get(w)
            .ok_or_else(|| Error::DanglingReference { id: w.to_owned() })?;
        if !out.contains(&i) {
            out.push(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjunctive_fact() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["a", "b"], &[], &[]);
        let text = emit_reified(&gp);
        assert_eq!(
            text.split_whitespace().collect::<Vec<_>>().join(" "),
            "atom(a). atom(b). rule(r0). head(r0,a). head(r0,b)."
        );
        assert_eq!(parse_reified(&text).unwrap(), gp);
    }

    #[test]
    fn dangling_and_duplicate() {
        assert_eq!(
            parse_reified("rule(r0). pos(r0,a)."),
            Err(Error::DanglingReference { id: "a".into() })
        );
        assert_eq!(
            parse_reified("atom(a). atom(a)."),
            Err(Error::DuplicateId { id: "a".into() })
        );
        assert_eq!(
            parse_reified("atom(a). head(r1,a)."),
            Err(Error::DanglingReference { id: "r1".into() })
        );
    }

    #[test]
    fn mangled_ids_are_unique() {
        let mut gp = GroundProgram::new();
        gp.intern(GroundAtom::prop("p_a"));
        gp.intern(GroundAtom::new("p", vec![Value::sym("a")]));
        gp.intern(GroundAtom::new("p", vec![Value::Int(-1)]));
        assert_eq!(atom_ids(&gp), vec!["p_a", "p_a_1", "p_m1"]);
    }

    #[test]
    fn atom_lists() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["m"], &["h"], &[]);
        assert_eq!(parse_atom_list("h.\n m\n", &gp).unwrap(), vec![1, 0]);
        assert!(parse_atom_list("z", &gp).is_err());
    }
}
