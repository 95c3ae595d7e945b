//! Matroid descriptions for the four supported classes and their text form.

use std::fmt;
use std::str::FromStr;

use crate::error::{input_err, Error, Result};

use super::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatroidKind {
    Uniform,
    Partition,
    Graphical,
    Transversal,
}

impl fmt::Display for MatroidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatroidKind::Uniform => "uniform",
            MatroidKind::Partition => "partition",
            MatroidKind::Graphical => "graphical",
            MatroidKind::Transversal => "transversal",
        })
    }
}

/// Class-specific structural data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Uniform,
    /// `part_of[k]` is the part containing arm `k`; parts are `0..rank`.
    Partition { part_of: Vec<usize> },
    /// Arm `k` is the edge `edges[k]` over vertices `0..vertices`.
    Graphical {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// `adjacency[k]` lists the right vertices (in `0..right`) adjacent to arm `k`.
    Transversal {
        right: usize,
        adjacency: Vec<Vec<usize>>,
    },
}

/// A matroid over the ground set of arms `0..ground_size`, validated at
/// construction so that `rank` is the true size of every basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatroidSpec {
    ground_size: usize,
    rank: usize,
    structure: Structure,
}

impl MatroidSpec {
    pub fn uniform(ground_size: usize, rank: usize) -> Result<Self> {
        if rank == 0 || rank > ground_size {
            return Err(input_err!(
                "uniform matroid needs 1 <= D <= K, got K={ground_size} D={rank}"
            ));
        }
        Ok(Self {
            ground_size,
            rank,
            structure: Structure::Uniform,
        })
    }

    /// Partition matroid; the rank is the number of parts. Part ids must be
    /// exactly `0..D` with every id used.
    pub fn partition(part_of: Vec<usize>) -> Result<Self> {
        if part_of.is_empty() {
            return Err(input_err!("partition matroid needs K >= 1"));
        }
        let parts = part_of.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; parts];
        for &p in &part_of {
            seen[p] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(input_err!("partition part id {missing} has no arm"));
        }
        Ok(Self {
            ground_size: part_of.len(),
            rank: parts,
            structure: Structure::Partition { part_of },
        })
    }

    /// Graphical matroid; the rank is `|V|` minus the number of connected
    /// components.
    pub fn graphical(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(input_err!("graphical matroid needs at least one edge"));
        }
        if let Some((i, &(u, v))) = edges
            .iter()
            .enumerate()
            .find(|(_, &(u, v))| u >= vertices || v >= vertices)
        {
            return Err(input_err!(
                "edge {i} = ({u},{v}) references a vertex outside 0..{vertices}"
            ));
        }
        let mut uf = UnionFind::new(vertices);
        let mut rank = 0;
        for &(u, v) in &edges {
            if uf.union(u, v) {
                rank += 1;
            }
        }
        if rank == 0 {
            return Err(input_err!("graphical matroid has rank 0 (only self-loops)"));
        }
        Ok(Self {
            ground_size: edges.len(),
            rank,
            structure: Structure::Graphical { vertices, edges },
        })
    }

    /// Transversal matroid; the rank is the size of a maximum matching.
    pub fn transversal(right: usize, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let k = adjacency.len();
        if k == 0 {
            return Err(input_err!("transversal matroid needs K >= 1"));
        }
        if right > k {
            return Err(input_err!("transversal matroid needs |V| <= K, got |V|={right} K={k}"));
        }
        let mut adjacency = adjacency;
        for (i, adj) in adjacency.iter_mut().enumerate() {
            if let Some(&v) = adj.iter().find(|&&v| v >= right) {
                return Err(input_err!("arm {i} adjacent to right vertex {v} outside 0..{right}"));
            }
            adj.sort_unstable();
            adj.dedup();
        }
        let rank = maximum_matching_size(right, &adjacency);
        if rank == 0 {
            return Err(input_err!("transversal matroid has rank 0 (no edges)"));
        }
        Ok(Self {
            ground_size: k,
            rank,
            structure: Structure::Transversal { right, adjacency },
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> MatroidKind {
        match self.structure {
            Structure::Uniform => MatroidKind::Uniform,
            Structure::Partition { .. } => MatroidKind::Partition,
            Structure::Graphical { .. } => MatroidKind::Graphical,
            Structure::Transversal { .. } => MatroidKind::Transversal,
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub(crate) fn check_arm(&self, k: usize) -> Result<()> {
        if k >= self.ground_size {
            return Err(input_err!("arm {k} out of range 0..{}", self.ground_size));
        }
        Ok(())
    }
}

// Kuhn's algorithm; used once at construction to pin the rank.
fn maximum_matching_size(right: usize, adjacency: &[Vec<usize>]) -> usize {
    fn try_augment(
        u: usize,
        adjacency: &[Vec<usize>],
        match_right: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &v in &adjacency[u] {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            let free = match match_right[v] {
                None => true,
                Some(w) => try_augment(w, adjacency, match_right, visited),
            };
            if free {
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut match_right = vec![None; right];
    let mut size = 0;
    for u in 0..adjacency.len() {
        let mut visited = vec![false; right];
        if try_augment(u, adjacency, &mut match_right, &mut visited) {
            size += 1;
        }
    }
    size
}

impl fmt::Display for MatroidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.structure {
            Structure::Uniform => write!(f, "uniform {} {}", self.ground_size, self.rank),
            Structure::Partition { part_of } => {
                let ids: Vec<String> = part_of.iter().map(|p| p.to_string()).collect();
                write!(f, "partition {} \"{}\"", self.ground_size, ids.join(","))
            }
            Structure::Graphical { vertices, edges } => {
                let es: Vec<String> = edges.iter().map(|(u, v)| format!("{u},{v}")).collect();
                write!(f, "graphical {} \"{}\"", vertices, es.join(";"))
            }
            Structure::Transversal { right, adjacency } => {
                let adj: Vec<String> = adjacency
                    .iter()
                    .map(|a| a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "transversal {} {} \"{}\"", self.ground_size, right, adj.join(";"))
            }
        }
    }
}

fn tokenize(s: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' || c == '\'' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    Some(q) if q == c => break,
                    Some(x) => tok.push(x),
                    None => return Err(input_err!("unterminated quote in matroid text {s:?}")),
                }
            }
            tokens.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&x) = chars.peek() {
                if x.is_whitespace() {
                    break;
                }
                tok.push(x);
                chars.next();
            }
            tokens.push(tok);
        }
    }
    Ok(tokens)
}

fn parse_usize(tok: &str, what: &str) -> Result<usize> {
    tok.trim()
        .parse()
        .map_err(|_| input_err!("{what}: expected a non-negative integer, got {tok:?}"))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_usize(t, what))
        .collect()
}

impl FromStr for MatroidSpec {
    type Err = Error;

    /// Accepts `uniform K D`, `partition K "ids"`, `graphical V "u,v;u,v"`
    /// and `transversal K V "adj;adj"` (one comma list of right vertices per
    /// arm, `;`-separated, possibly empty).
    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let arity = |n: usize| -> Result<()> {
            if tokens.len() != n {
                return Err(input_err!(
                    "matroid text {s:?}: expected {} fields after the kind, got {}",
                    n - 1,
                    tokens.len().saturating_sub(1)
                ));
            }
            Ok(())
        };
        let kind = tokens.first().map(|t| t.to_ascii_lowercase());
        match kind.as_deref() {
            Some("uniform") => {
                arity(3)?;
                MatroidSpec::uniform(parse_usize(&tokens[1], "K")?, parse_usize(&tokens[2], "D")?)
            }
            Some("partition") => {
                arity(3)?;
                let k = parse_usize(&tokens[1], "K")?;
                let ids = parse_list(&tokens[2], "part id")?;
                if ids.len() != k {
                    return Err(input_err!("partition lists {} part ids but K={k}", ids.len()));
                }
                MatroidSpec::partition(ids)
            }
            Some("graphical") => {
                arity(3)?;
                let v = parse_usize(&tokens[1], "V")?;
                let edges = tokens[2]
                    .split(';')
                    .filter(|e| !e.trim().is_empty())
                    .map(|e| {
                        let ends = parse_list(e, "edge endpoint")?;
                        match ends.as_slice() {
                            [a, b] => Ok((*a, *b)),
                            _ => Err(input_err!("edge {e:?} must be \"u,v\"")),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                MatroidSpec::graphical(v, edges)
            }
            Some("transversal") => {
                arity(4)?;
                let k = parse_usize(&tokens[1], "K")?;
                let right = parse_usize(&tokens[2], "V")?;
                let adjacency = tokens[3]
                    .split(';')
                    .map(|a| parse_list(a, "right vertex"))
                    .collect::<Result<Vec<_>>>()?;
                if adjacency.len() != k {
                    return Err(input_err!(
                        "transversal lists {} adjacency rows but K={k}",
                        adjacency.len()
                    ));
                }
                MatroidSpec::transversal(right, adjacency)
            }
            _ => Err(input_err!(
                "unknown matroid kind in {s:?}; expected uniform, partition, graphical or transversal"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_are_derived_from_structure() {
        assert_eq!(MatroidSpec::uniform(5, 2).unwrap().rank(), 2);
        assert_eq!(MatroidSpec::partition(vec![0, 0, 1, 1, 2]).unwrap().rank(), 3);
        // triangle plus a disjoint edge: 5 vertices, 2 components
        let g = MatroidSpec::graphical(5, vec![(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert_eq!(g.rank(), 3);
        let t = MatroidSpec::transversal(2, vec![vec![0], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn rejects_bad_structures() {
        assert!(MatroidSpec::uniform(3, 0).is_err());
        assert!(MatroidSpec::uniform(3, 4).is_err());
        assert!(MatroidSpec::partition(vec![0, 2]).is_err());
        assert!(MatroidSpec::graphical(2, vec![(0, 2)]).is_err());
        assert!(MatroidSpec::graphical(2, vec![(1, 1)]).is_err());
        assert!(MatroidSpec::transversal(3, vec![vec![0], vec![1]]).is_err());
        assert!(MatroidSpec::transversal(1, vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn text_form_round_trips() {
        for text in [
            "uniform 8 3",
            "partition 4 \"0,0,1,1\"",
            "graphical 3 \"0,1;1,2;0,2\"",
            "transversal 3 2 \"0;0,1;\"",
        ] {
            let spec: MatroidSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.to_string().parse::<MatroidSpec>().unwrap(), spec);
        }
        let spaced: MatroidSpec = "partition 4 \"0 0 1 1\"".parse().unwrap();
        assert_eq!(spaced.rank(), 2);
    }

    #[test]
    fn text_form_errors_name_the_problem() {
        let err = "uniform 8".parse::<MatroidSpec>().unwrap_err();
        assert!(err.to_string().contains("expected 2 fields"));
        assert!("matrix 3 3".parse::<MatroidSpec>().is_err());
        assert!("partition 3 \"0,1\"".parse::<MatroidSpec>().is_err());
        assert!("graphical 3 \"0,1,2\"".parse::<MatroidSpec>().is_err());
        assert!("uniform 4 \"2".parse::<MatroidSpec>().is_err());
    }
}
