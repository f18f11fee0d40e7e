//! Answer-set enumeration for ground disjunctive programs.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ground::{GroundAtom, GroundProgram, GroundRule, Interpretation};

#[derive(Clone, Copy, Debug)]
pub struct SolveLimits {
    /// Upper bound on atoms left undecided after initial propagation.
    pub max_atoms: usize,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_atoms: 24 }
    }
}

const UNKNOWN: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

struct Search<'a> {
    gp: &'a GroundProgram,
    occurs: Vec<Vec<usize>>,
    heads: Vec<Vec<usize>>,
    val: Vec<i8>,
    trail: Vec<usize>,
    order: Vec<usize>,
    found: Vec<Interpretation>,
}

enum Conflict {
    Conflict,
}

impl<'a> Search<'a> {
    fn new(gp: &'a GroundProgram) -> Self {
        let n = gp.atoms.len();
        let mut occurs = vec![Vec::new(); n];
        let mut heads = vec![Vec::new(); n];
        let mut branch_first = vec![false; n];
        for (ri, r) in gp.rules.iter().enumerate() {
            for &a in r.head.iter().chain(&r.pos).chain(&r.neg) {
                if occurs[a].last() != Some(&ri) {
                    occurs[a].push(ri);
                }
            }
            for &a in &r.head {
                if heads[a].last() != Some(&ri) {
                    heads[a].push(ri);
                }
                if r.head.len() > 1 {
                    branch_first[a] = true;
                }
            }
            for &a in &r.neg {
                branch_first[a] = true;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| (!branch_first[a], a));
        Search {
            gp,
            occurs,
            heads,
            val: vec![UNKNOWN; n],
            trail: Vec::new(),
            order,
            found: Vec::new(),
        }
    }

    fn assign(&mut self, a: usize, v: i8, queue: &mut Vec<usize>) -> std::result::Result<(), Conflict> {
        match self.val[a] {
            UNKNOWN => {
                self.val[a] = v;
                self.trail.push(a);
                queue.push(a);
                Ok(())
            }
            x if x == v => Ok(()),
            _ => Err(Conflict::Conflict),
        }
    }

    fn check_rule(&mut self, ri: usize, queue: &mut Vec<usize>) -> std::result::Result<(), Conflict> {
        let r: &GroundRule = &self.gp.rules[ri];
        let mut open_lit: Option<(usize, i8)> = None;
        let mut open_lits = 0;
        for &p in &r.pos {
            match self.val[p] {
                FALSE => return Ok(()),
                UNKNOWN => {
                    open_lits += 1;
                    open_lit = Some((p, FALSE));
                }
                _ => {}
            }
        }
        for &n in &r.neg {
            match self.val[n] {
                TRUE => return Ok(()),
                UNKNOWN => {
                    open_lits += 1;
                    open_lit = Some((n, TRUE));
                }
                _ => {}
            }
        }
        let mut open_head = None;
        let mut open_heads = 0;
        for &h in &r.head {
            match self.val[h] {
                TRUE => return Ok(()),
                UNKNOWN => {
                    open_heads += 1;
                    open_head = Some(h);
                }
                _ => {}
            }
        }
        match (open_lits, open_heads) {
            (0, 0) => Err(Conflict::Conflict),
            (0, 1) => self.assign(open_head.unwrap(), TRUE, queue),
            (1, 0) => {
                let (a, v) = open_lit.unwrap();
                self.assign(a, v, queue)
            }
            _ => Ok(()),
        }
    }

    /// An atom can only be true if some rule with a possibly true body has
    /// it as the only possibly true head atom.
    fn check_support(&mut self, a: usize, queue: &mut Vec<usize>) -> std::result::Result<(), Conflict> {
        if self.val[a] == FALSE {
            return Ok(());
        }
        let supported = self.heads[a].iter().any(|&ri| {
            let r = &self.gp.rules[ri];
            r.pos.iter().all(|&p| self.val[p] != FALSE)
                && r.neg.iter().all(|&n| self.val[n] != TRUE)
                && r.head.iter().all(|&h| h == a || self.val[h] != TRUE)
        });
        if supported {
            Ok(())
        } else {
            self.assign(a, FALSE, queue)
        }
    }

    fn propagate(&mut self, mut queue: Vec<usize>) -> std::result::Result<(), Conflict> {
        while let Some(a) = queue.pop() {
            for i in 0..self.occurs[a].len() {
                let ri = self.occurs[a][i];
                self.check_rule(ri, &mut queue)?;
                for j in 0..self.gp.rules[ri].head.len() {
                    let h = self.gp.rules[ri].head[j];
                    self.check_support(h, &mut queue)?;
                }
            }
        }
        Ok(())
    }

    fn initial(&mut self) -> std::result::Result<(), Conflict> {
        let mut queue = Vec::new();
        for ri in 0..self.gp.rules.len() {
            self.check_rule(ri, &mut queue)?;
        }
        for a in 0..self.gp.atoms.len() {
            self.check_support(a, &mut queue)?;
        }
        self.propagate(queue)
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().unwrap();
            self.val[a] = UNKNOWN;
        }
    }

    fn run(&mut self) {
        let Some(&a) = self.order.iter().find(|&&a| self.val[a] == UNKNOWN) else {
            let m: Interpretation = (0..self.val.len()).filter(|&a| self.val[a] == TRUE).collect();
            if is_answer_set(self.gp, &m) {
                self.found.push(m);
            }
            return;
        };
        for v in [TRUE, FALSE] {
            let mark = self.trail.len();
            let mut queue = Vec::new();
            if self.assign(a, v, &mut queue).is_ok() && self.propagate(queue).is_ok() {
                self.run();
            }
            self.undo(mark);
        }
    }
}

/// Least model of a negation-free normal program; `None` if a constraint is
/// violated along the way is not reported, constraints are ignored.
fn least_model(gp: &GroundProgram) -> Interpretation {
    let mut m = Interpretation::new();
    loop {
        let mut changed = false;
        for r in &gp.rules {
            if let [h] = r.head.as_slice() {
                if !m.contains(h) && r.pos.iter().all(|p| m.contains(p)) {
                    m.insert(*h);
                    changed = true;
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

/// `m` is a model of `gp` and no proper subset of `m` is a model of the
/// reduct of `gp` by `m`.
pub fn is_answer_set(gp: &GroundProgram, m: &Interpretation) -> bool {
    if !gp.is_model(m) {
        return false;
    }
    let red = gp.reduct(m);
    if red.is_normal() {
        return least_model(&red) == *m;
    }
    !has_smaller_model(&red, m)
}

/// Is there a model `n ⊊ m` of the positive program `red`? Atoms outside `m`
/// are false in any such `n`, which leaves a propositional satisfiability
/// problem over `m`.
fn has_smaller_model(red: &GroundProgram, m: &Interpretation) -> bool {
    let vars: Vec<usize> = m.iter().copied().collect();
    let index = |a: usize| vars.binary_search(&a).ok();
    // Literals are (variable index, polarity).
    let mut clauses: Vec<Vec<(usize, bool)>> = Vec::new();
    for r in &red.rules {
        if r.pos.iter().any(|&p| index(p).is_none()) {
            continue;
        }
        let mut c: Vec<(usize, bool)> = r.head.iter().filter_map(|&h| index(h)).map(|i| (i, true)).collect();
        c.extend(r.pos.iter().map(|&p| (index(p).unwrap(), false)));
        clauses.push(c);
    }
    clauses.push((0..vars.len()).map(|i| (i, false)).collect());
    let mut assign = vec![UNKNOWN; vars.len()];
    sat(&clauses, &mut assign)
}

fn sat(clauses: &[Vec<(usize, bool)>], assign: &mut Vec<i8>) -> bool {
    let lit_val = |assign: &[i8], (v, pos): (usize, bool)| -> i8 {
        match assign[v] {
            UNKNOWN => UNKNOWN,
            x if (x == TRUE) == pos => TRUE,
            _ => FALSE,
        }
    };
    // Unit propagation to a fixpoint.
    let mut trail = Vec::new();
    loop {
        let mut unit = None;
        for c in clauses {
            let mut open = None;
            let mut open_count = 0;
            let mut satisfied = false;
            for &l in c {
                match lit_val(assign, l) {
                    TRUE => {
                        satisfied = true;
                        break;
                    }
                    UNKNOWN => {
                        open_count += 1;
                        open = Some(l);
                    }
                    _ => {}
                }
            }
            if satisfied {
                continue;
            }
            match open_count {
                0 => {
                    for v in trail {
                        assign[v] = UNKNOWN;
                    }
                    return false;
                }
                1 => {
                    unit = open;
                    break;
                }
                _ => {}
            }
        }
        match unit {
            Some((v, pos)) => {
                assign[v] = if pos { TRUE } else { FALSE };
                trail.push(v);
            }
            None => break,
        }
    }
    let result = match assign.iter().position(|&x| x == UNKNOWN) {
        None => true,
        Some(v) => [TRUE, FALSE].iter().any(|&x| {
            assign[v] = x;
            let ok = sat(clauses, assign);
            assign[v] = UNKNOWN;
            ok
        }),
    };
    for v in trail {
        assign[v] = UNKNOWN;
    }
    result
}

/// All answer sets, sorted. Fails with `TooManyAtoms` if more than
/// `limits.max_atoms` atoms remain undecided after initial propagation.
pub fn answer_sets(gp: &GroundProgram, limits: &SolveLimits) -> Result<Vec<Interpretation>> {
    let mut s = Search::new(gp);
    if s.initial().is_err() {
        return Ok(Vec::new());
    }
    let open = s.val.iter().filter(|&&v| v == UNKNOWN).count();
    if open > limits.max_atoms {
        return Err(Error::TooManyAtoms {
            count: open,
            limit: limits.max_atoms,
        });
    }
    s.run();
    let mut found = s.found;
    found.sort();
    found.dedup();
    Ok(found)
}

/// Definition-level enumeration: every subset of the atoms, by increasing
/// size then lexicographically, is tested for being a model whose reduct
/// has no smaller model (checked over all proper subsets).
pub fn answer_sets_naive(gp: &GroundProgram, max_atoms: usize) -> Result<Vec<Interpretation>> {
    let n = gp.atoms.len();
    if n > max_atoms {
        return Err(Error::TooManyAtoms {
            count: n,
            limit: max_atoms,
        });
    }
    let mut out = Vec::new();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    let to_set = |mask: u32| -> Interpretation { (0..n).filter(|&i| mask >> i & 1 == 1).collect() };
    for &mask in &masks {
        let m = to_set(mask);
        if !gp.is_model(&m) {
            continue;
        }
        let red = gp.reduct(&m);
        // Proper submasks of `mask`.
        let mut sub = mask;
        let mut minimal = true;
        while sub != 0 {
            sub = (sub - 1) & mask;
            if red.is_model(&to_set(sub)) {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push(m);
        }
    }
    Ok(out)
}

/// Answer sets as sets of atoms.
pub fn atom_sets(gp: &GroundProgram, sets: &[Interpretation]) -> BTreeSet<BTreeSet<GroundAtom>> {
    sets.iter().map(|m| gp.atoms_of(m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(gp: &GroundProgram, sets: &[Interpretation]) -> Vec<Vec<String>> {
        sets.iter()
            .map(|m| m.iter().map(|&a| gp.atoms[a].to_string()).collect())
            .collect()
    }

    fn both(gp: &GroundProgram) -> Vec<Vec<String>> {
        let fast = answer_sets(gp, &SolveLimits::default()).unwrap();
        let mut naive = answer_sets_naive(gp, 16).unwrap();
        naive.sort();
        assert_eq!(fast, naive);
        names(gp, &fast)
    }

    #[test]
    fn disjunctive_fact() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["a", "b"], &[], &[]);
        assert_eq!(both(&gp), vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn even_loop() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["a"], &[], &["b"]);
        gp.add_named(&["b"], &[], &["a"]);
        assert_eq!(both(&gp), vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn odd_loop() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["a"], &[], &["a"]);
        assert!(both(&gp).is_empty());
    }

    #[test]
    fn positive_loop_is_unfounded() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["a"], &["b"], &[]);
        gp.add_named(&["b"], &["a"], &[]);
        gp.add_named(&["c"], &[], &["a"]);
        assert_eq!(both(&gp), vec![vec!["c"]]);
    }

    #[test]
    fn saturation() {
        // a | b. a :- sat. b :- sat. sat :- a. sat :- b.  -- unique answer set {a,b,sat}
        let mut gp = GroundProgram::new();
        gp.add_named(&["a", "b"], &[], &[]);
        gp.add_named(&["a"], &["sat"], &[]);
        gp.add_named(&["b"], &["sat"], &[]);
        gp.add_named(&["sat"], &["a"], &[]);
        gp.add_named(&["sat"], &["b"], &[]);
        assert_eq!(both(&gp), vec![vec!["a", "b", "sat"]]);
    }

    #[test]
    fn disjunctive_minimality_beyond_supportedness() {
        // {a, b} is supported but not minimal for its reduct.
        let mut gp = GroundProgram::new();
        gp.add_named(&["a", "b"], &[], &[]);
        gp.add_named(&["a"], &["b"], &[]);
        gp.add_named(&["b"], &["a"], &[]);
        assert_eq!(both(&gp), vec![vec!["a", "b"]]);
    }

    #[test]
    fn constraint_kills_everything() {
        let mut gp = GroundProgram::new();
        gp.add_named(&[], &[], &[]);
        assert!(both(&gp).is_empty());
    }

    #[test]
    fn too_many_atoms() {
        let mut gp = GroundProgram::new();
        for i in 0..30 {
            let a = format!("a{i}");
            let b = format!("b{i}");
            gp.add_named(&[&a, &b], &[], &[]);
        }
        assert!(matches!(
            answer_sets(&gp, &SolveLimits::default()),
            Err(Error::TooManyAtoms { count: 60, limit: 24 })
        ));
    }
}
