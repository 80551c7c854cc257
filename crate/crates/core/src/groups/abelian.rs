use super::{paired_names, Group, GroupError};

/// `Z^d` with generators `±e_i`, named `a, A, b, B, ...`.
#[derive(Clone, Debug)]
pub struct FreeAbelian {
    rank: usize,
    gens: Vec<Vec<i64>>,
    names: Vec<String>,
}

impl FreeAbelian {
    pub fn new(rank: usize) -> Result<Self, GroupError> {
        if !(1..=26).contains(&rank) {
            return Err(GroupError::InvalidGroup(format!(
                "free abelian rank must be in 1..=26, got {rank}"
            )));
        }
        let gens = (0..2 * rank)
            .map(|s| {
                let mut v = vec![0; rank];
                v[s / 2] = if s % 2 == 0 { 1 } else { -1 };
                v
            })
            .collect();
        Ok(FreeAbelian {
            rank,
            gens,
            names: paired_names(rank),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl Group for FreeAbelian {
    type Elem = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.rank]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn generators(&self) -> &[Vec<i64>] {
        &self.gens
    }

    fn inverse_generator(&self, s: usize) -> usize {
        s ^ 1
    }

    fn generator_names(&self) -> &[String] {
        &self.names
    }

    // normal-form word a^x b^y ...; so in Z the order is 0, 1, -1, 2, -2, ...
    fn sort_key(&self, e: &Vec<i64>) -> Vec<i64> {
        self.word(e).into_iter().map(|s| s as i64).collect()
    }

    fn word(&self, e: &Vec<i64>) -> Vec<usize> {
        e.iter()
            .enumerate()
            .flat_map(|(i, &x)| {
                let s = if x >= 0 { 2 * i } else { 2 * i + 1 };
                std::iter::repeat(s).take(x.unsigned_abs() as usize)
            })
            .collect()
    }

    fn check_action(&self, perms: &[Vec<usize>]) -> Result<(), GroupError> {
        for i in (0..perms.len()).step_by(2) {
            for j in (i + 2..perms.len()).step_by(2) {
                let commute = (0..perms[i].len()).all(|x| perms[j][perms[i][x]] == perms[i][perms[j][x]]);
                if !commute {
                    return Err(GroupError::InvalidAction(format!(
                        "generators {} and {} do not commute",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_and_keys() {
        let z2 = FreeAbelian::new(2).unwrap();
        assert_eq!(z2.word(&vec![2, -1]), vec![0, 0, 3]);
        assert_eq!(z2.from_word(&[0, 0, 3]), vec![2, -1]);
        assert_eq!(z2.format(&vec![0, 0]), "1");
        assert_eq!(z2.parse_word("aaB").unwrap(), vec![2, -1]);
        assert!(z2.sort_key(&vec![1, 0]) < z2.sort_key(&vec![-1, 0]));
    }

    #[test]
    fn non_commuting_action_rejected() {
        let z2 = FreeAbelian::new(2).unwrap();
        // a = (0 1), b = (1 2) on 3 points
        let a = vec![1, 0, 2];
        let b = vec![0, 2, 1];
        let perms = vec![a.clone(), a, b.clone(), b];
        assert!(z2.check_action(&perms).is_err());
    }
}
