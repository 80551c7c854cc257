use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FreeAbelian, FreeGroup, Group, GroupError, Perm, PermGroup, TableGroup};
use crate::subgroup_space::FiniteGroup;

/// Serializable description of a group family with its generating set.
///
/// JSON form: `{"family": "free", "params": {"rank": 2}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum FamilySpec {
    Free {
        rank: usize,
    },
    Abelian {
        rank: usize,
    },
    Perm {
        degree: usize,
        generators: Vec<Perm>,
    },
    Table {
        table: Vec<Vec<usize>>,
        generators: Vec<usize>,
    },
}

/// Generic continuation over the concrete group type of a [`FamilySpec`].
pub trait FamilyVisitor {
    type Output;
    fn visit<G: Group + 'static>(self, group: G) -> Self::Output;
}

impl FamilySpec {
    pub fn visit<V: FamilyVisitor>(&self, visitor: V) -> Result<V::Output, GroupError> {
        Ok(match self {
            FamilySpec::Free { rank } => visitor.visit(FreeGroup::new(*rank)?),
            FamilySpec::Abelian { rank } => visitor.visit(FreeAbelian::new(*rank)?),
            FamilySpec::Perm { degree, generators } => {
                visitor.visit(PermGroup::new(*degree, generators)?)
            }
            FamilySpec::Table { table, generators } => {
                let group = FiniteGroup::from_table(table.clone())
                    .map_err(|e| GroupError::InvalidGroup(e.to_string()))?;
                visitor.visit(TableGroup::new(Arc::new(group), generators)?)
            }
        })
    }

    /// Short textual form, inverse of [`FromStr`] for non-table families.
    pub fn label(&self) -> String {
        match self {
            FamilySpec::Free { rank } => format!("free:{rank}"),
            FamilySpec::Abelian { rank } => format!("abelian:{rank}"),
            FamilySpec::Perm { degree, generators } => {
                let gens: Vec<String> = generators
                    .iter()
                    .map(|g| g.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                format!("perm:{degree}:{}", gens.join(";"))
            }
            FamilySpec::Table { table, .. } => format!("table:{}", table.len()),
        }
    }
}

fn cycle(n: usize, points: &[usize]) -> Perm {
    let mut p: Perm = (0..n as u32).collect();
    for (i, &x) in points.iter().enumerate() {
        p[x] = points[(i + 1) % points.len()] as u32;
    }
    p
}

/// Generating permutations of the named groups `sN`, `aN`, `zN`, `dN`,
/// `v4` and `q8`.
pub fn named_permutation_group(name: &str) -> Option<(usize, Vec<Perm>)> {
    let name = name.to_ascii_lowercase();
    match name.as_str() {
        "v4" | "klein" => return Some((4, vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]])),
        // right multiplication by i and j on (1, -1, i, -i, j, -j, k, -k)
        "q8" => {
            return Some((
                8,
                vec![vec![2, 3, 1, 0, 7, 6, 4, 5], vec![4, 5, 6, 7, 1, 0, 3, 2]],
            ))
        }
        _ => {}
    }
    let (kind, n) = name.split_at(1);
    let n: usize = n.parse().ok()?;
    let all: Vec<usize> = (0..n).collect();
    match kind {
        "z" if n >= 2 => Some((n, vec![cycle(n, &all)])),
        "s" if n >= 2 => {
            let mut gens = vec![cycle(n, &[0, 1])];
            if n > 2 {
                gens.push(cycle(n, &all));
            }
            Some((n, gens))
        }
        "a" if n >= 3 => {
            let gens = (2..n).map(|k| cycle(n, &[0, 1, k])).collect();
            Some((n, gens))
        }
        "d" if n >= 3 => {
            let reflection: Perm = (0..n).map(|i| ((n - i) % n) as u32).collect();
            Some((n, vec![cycle(n, &all), reflection]))
        }
        _ => None,
    }
}

impl FromStr for FamilySpec {
    type Err = GroupError;

    /// `free:K`, `abelian:D`, `perm:N:i,j,..;i,j,..`, or a named group.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| GroupError::Parse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.splitn(3, ':').collect();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| err("expected an integer"));
        match parts.as_slice() {
            ["free", k] => Ok(FamilySpec::Free { rank: num(k)? }),
            ["abelian", d] => Ok(FamilySpec::Abelian { rank: num(d)? }),
            ["perm", n, gens] => {
                let degree = num(n)?;
                let generators = gens
                    .split(';')
                    .map(|g| {
                        g.split(',')
                            .map(|x| x.trim().parse::<u32>().map_err(|_| err("bad permutation")))
                            .collect::<Result<Perm, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FamilySpec::Perm { degree, generators })
            }
            [name] => named_permutation_group(name)
                .map(|(degree, generators)| FamilySpec::Perm { degree, generators })
                .ok_or_else(|| err("unknown group family")),
            _ => Err(err("expected free:K, abelian:D, perm:N:<gens> or a named group")),
        }
    }
}
