//! CNF formulas, the three-category restriction, and exhaustive SAT search.

use serde::Serialize;

use crate::error::{AuctionError, Result};

/// Variable category; a categorized clause has at most one literal of each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    X,
    Y,
    Z,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::X, Category::Y, Category::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Literal over a 1-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, positive: false }
    }

    pub fn eval(self, value: bool) -> bool {
        value == self.positive
    }
}

/// Clause with one optional literal per category.
pub type CatClause = [Option<Lit>; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatFormula {
    /// Variable counts `n_x, n_y, n_z`.
    pub vars: [usize; 3],
    pub clauses: Vec<CatClause>,
}

/// Truth values per category, indexed by `var - 1`.
pub type CatAssignment = [Vec<bool>; 3];

impl CatFormula {
    pub fn new(vars: [usize; 3], clauses: Vec<CatClause>) -> Result<Self> {
        for (l, clause) in clauses.iter().enumerate() {
            for (c, lit) in clause.iter().enumerate() {
                if let Some(lit) = lit {
                    if lit.var == 0 || lit.var > vars[c] {
                        return Err(AuctionError::InvalidFormula(format!(
                            "clause {} uses variable {} of category {} with only {} variables",
                            l + 1,
                            lit.var,
                            c,
                            vars[c]
                        )));
                    }
                }
            }
        }
        Ok(Self { vars, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Total number of variables.
    pub fn n(&self) -> usize {
        self.vars.iter().sum()
    }

    /// Total number of literal occurrences.
    pub fn occurrences(&self) -> usize {
        self.clauses.iter().map(|c| c.iter().flatten().count()).sum()
    }

    /// Largest category size.
    pub fn n_hat(&self) -> usize {
        self.vars.iter().copied().max().unwrap_or(0)
    }

    pub fn satisfied(&self, assignment: &CatAssignment) -> usize {
        self.clauses
            .iter()
            .filter(|clause| {
                clause
                    .iter()
                    .enumerate()
                    .any(|(c, lit)| lit.is_some_and(|l| l.eval(assignment[c][l.var - 1])))
            })
            .count()
    }

    /// Best assignment by exhaustive search, with the number of satisfied
    /// clauses. Fails above 24 variables.
    pub fn max_satisfied(&self) -> Result<(usize, CatAssignment)> {
        let n = self.n();
        if n > 24 {
            return Err(AuctionError::SizeGuard(format!("{n} variables is too many for exhaustive search")));
        }
        let mut best: Option<(usize, CatAssignment)> = None;
        for bits in 0u32..(1u32 << n) {
            let mut k = 0;
            let assignment: CatAssignment = std::array::from_fn(|c| {
                (0..self.vars[c])
                    .map(|_| {
                        let v = bits >> k & 1 == 1;
                        k += 1;
                        v
                    })
                    .collect()
            });
            let s = self.satisfied(&assignment);
            if best.as_ref().map_or(true, |(b, _)| s > *b) {
                best = Some((s, assignment));
                if s == self.m() {
                    break;
                }
            }
        }
        Ok(best.expect("at least the empty assignment"))
    }

    pub fn is_satisfiable(&self) -> Result<bool> {
        Ok(self.max_satisfied()?.0 == self.m())
    }
}

/// Plain CNF over variables `1..=vars`; literals are signed integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn new(vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for c in &clauses {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > vars {
                    return Err(AuctionError::InvalidFormula(format!("literal {lit} out of range")));
                }
            }
        }
        Ok(Self { vars, clauses })
    }

    pub fn satisfied(&self, values: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|&l| values[l.unsigned_abs() as usize - 1] == (l > 0)))
            .count()
    }
}

/// Parses DIMACS CNF: `c` comment lines, one `p cnf V C` header, clauses
/// terminated by `0`.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(AuctionError::Parse(format!("line {}: bad header {line:?}", lineno + 1)));
            }
            let v = parts[2].parse().map_err(|_| AuctionError::Parse(format!("bad variable count {:?}", parts[2])))?;
            let c = parts[3].parse().map_err(|_| AuctionError::Parse(format!("bad clause count {:?}", parts[3])))?;
            header = Some((v, c));
            continue;
        }
        if header.is_none() {
            return Err(AuctionError::Parse(format!("line {}: clause before header", lineno + 1)));
        }
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| AuctionError::Parse(format!("line {}: bad literal {tok:?}", lineno + 1)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let (vars, count) = header.ok_or_else(|| AuctionError::Parse("missing p cnf header".into()))?;
    if count != clauses.len() {
        return Err(AuctionError::Parse(format!(
            "header announces {count} clauses, found {}",
            clauses.len()
        )));
    }
    Cnf::new(vars, clauses)
}

/// Makes every literal occurrence its own variable in each category.
///
/// Occurrence `o` gets copies `x_o, y_o, z_o`; the literal at clause
/// position `p` uses the copy of category `p`. The clauses
/// `(!x_o | y_o), (!y_o | z_o), (!z_o | x_o')`, with `o'` the next occurrence
/// of the same variable (cyclically), force all copies of a variable to be
/// equal in any satisfying assignment. Adds exactly `3 * occurrences` clauses.
pub fn max3sat_to_catsat(cnf: &Cnf) -> Result<CatFormula> {
    let mut occ_of_var: Vec<Vec<usize>> = vec![Vec::new(); cnf.vars];
    let mut clauses: Vec<CatClause> = Vec::with_capacity(cnf.clauses.len());
    let mut occ = 0;
    for (l, c) in cnf.clauses.iter().enumerate() {
        if c.len() > 3 {
            return Err(AuctionError::InvalidFormula(format!(
                "clause {} has {} literals; at most 3 allowed",
                l + 1,
                c.len()
            )));
        }
        let mut clause: CatClause = [None; 3];
        for (p, &lit) in c.iter().enumerate() {
            occ += 1;
            occ_of_var[lit.unsigned_abs() as usize - 1].push(occ);
            clause[p] = Some(Lit { var: occ, positive: lit > 0 });
        }
        clauses.push(clause);
    }
    for occs in &occ_of_var {
        for (k, &o) in occs.iter().enumerate() {
            let next = occs[(k + 1) % occs.len()];
            clauses.push([Some(Lit::neg(o)), Some(Lit::pos(o)), None]);
            clauses.push([None, Some(Lit::neg(o)), Some(Lit::pos(o))]);
            clauses.push([Some(Lit::pos(next)), None, Some(Lit::neg(o))]);
        }
    }
    CatFormula::new([occ; 3], clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round() {
        let cnf = parse_dimacs("c demo\np cnf 3 2\n1 -2 3 0\n-1 0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, -2, 3], vec![-1]]);
        assert!(parse_dimacs("1 2 0").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
    }

    #[test]
    fn single_clause_copies() {
        let cnf = Cnf::new(3, vec![vec![1, 2, 3]]).unwrap();
        let f = max3sat_to_catsat(&cnf).unwrap();
        assert_eq!(f.m(), 1 + 9);
        assert_eq!(f.vars, [3, 3, 3]);
        assert!(f.is_satisfiable().unwrap());
    }

    #[test]
    fn empty_and_oversized() {
        let f = max3sat_to_catsat(&Cnf::new(0, vec![]).unwrap()).unwrap();
        assert_eq!((f.m(), f.n()), (0, 0));
        assert!(max3sat_to_catsat(&Cnf::new(4, vec![vec![1, 2, 3, 4]]).unwrap()).is_err());
    }

    #[test]
    fn unsatisfiable_stays_unsatisfiable() {
        let cnf = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        let f = max3sat_to_catsat(&cnf).unwrap();
        assert!(!f.is_satisfiable().unwrap());
        assert_eq!(f.max_satisfied().unwrap().0, f.m() - 1);
    }

    #[test]
    fn category_bounds_checked() {
        assert!(CatFormula::new([1, 0, 0], vec![[Some(Lit::pos(2)), None, None]]).is_err());
    }
}
