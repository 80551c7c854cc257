use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LllError;

/// Default bound on the number of support assignments enumerated by
/// [`event_probability`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// What a bad event asserts about its (ordered) support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// Support is a path `(x_1..x_2n)`; occurs iff `x_i == x_{n+i}` for all `i`.
    PathRepetition,
    /// Support is a left window followed by the order-matched right window;
    /// occurs iff the two halves agree cell by cell.
    BlockEquality,
    /// Explicit truth table over support assignments in mixed radix,
    /// first support variable least significant.
    CustomTable(Vec<bool>),
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::PathRepetition => "path_repetition",
            EventKind::BlockEquality => "block_equality",
            EventKind::CustomTable(_) => "custom_table",
        }
    }

    fn is_half_equality(&self) -> bool {
        matches!(self, EventKind::PathRepetition | EventKind::BlockEquality)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadEvent {
    pub id: usize,
    /// 1-based class index.
    pub class: usize,
    pub support: Vec<usize>,
    pub kind: EventKind,
}

impl BadEvent {
    /// Evaluates the event on a full assignment.
    pub fn occurs(&self, assignment: &[u32], domains: &[u32]) -> bool {
        match &self.kind {
            EventKind::PathRepetition | EventKind::BlockEquality => {
                let half = self.support.len() / 2;
                let (left, right) = self.support.split_at(half);
                left.iter()
                    .zip(right)
                    .all(|(&u, &v)| assignment[u] == assignment[v])
            }
            EventKind::CustomTable(table) => {
                let mut index = 0usize;
                let mut radix = 1usize;
                for &v in &self.support {
                    index += assignment[v] as usize * radix;
                    radix *= domains[v] as usize;
                }
                table[index]
            }
        }
    }
}

/// Finitely many variables with uniform finite domains, plus bad events.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    domains: Vec<u32>,
    events: Vec<BadEvent>,
    var_events: Vec<Vec<usize>>,
}

impl ConstraintSystem {
    pub fn new(domains: Vec<u32>, events: Vec<BadEvent>) -> Result<Self, LllError> {
        let invalid = |reason: String| Err(LllError::InvalidSystem(reason));
        if let Some(v) = domains.iter().position(|&d| d < 2) {
            return invalid(format!("variable {v} has domain size {} < 2", domains[v]));
        }
        let mut var_events = vec![Vec::new(); domains.len()];
        for (pos, ev) in events.iter().enumerate() {
            if ev.id != pos {
                return invalid(format!("event at position {pos} has id {}", ev.id));
            }
            if ev.class == 0 {
                return invalid(format!("event {pos} has class 0; classes start at 1"));
            }
            if ev.support.is_empty() {
                return invalid(format!("event {pos} has empty support"));
            }
            let mut seen = ev.support.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != ev.support.len() {
                return invalid(format!("event {pos} repeats a support variable"));
            }
            if let Some(&v) = seen.iter().find(|&&v| v >= domains.len()) {
                return invalid(format!("event {pos} references unknown variable {v}"));
            }
            match &ev.kind {
                k if k.is_half_equality() && ev.support.len() % 2 != 0 => {
                    return invalid(format!(
                        "event {pos} of kind {} needs an even support",
                        k.name()
                    ));
                }
                EventKind::CustomTable(table) => {
                    let size = ev
                        .support
                        .iter()
                        .try_fold(1usize, |acc, &v| acc.checked_mul(domains[v] as usize));
                    if size != Some(table.len()) {
                        return invalid(format!(
                            "event {pos} truth table has {} entries, support needs {size:?}",
                            table.len()
                        ));
                    }
                }
                _ => {}
            }
            for &v in &seen {
                var_events[v].push(pos);
            }
        }
        Ok(ConstraintSystem {
            domains,
            events,
            var_events,
        })
    }

    pub fn domains(&self) -> &[u32] {
        &self.domains
    }

    pub fn num_variables(&self) -> usize {
        self.domains.len()
    }

    pub fn events(&self) -> &[BadEvent] {
        &self.events
    }

    /// Events whose support contains `var`, in id order.
    pub fn events_on(&self, var: usize) -> &[usize] {
        &self.var_events[var]
    }

    /// Number of event classes (largest class index present).
    pub fn num_classes(&self) -> usize {
        self.events.iter().map(|e| e.class).max().unwrap_or(0)
    }

    pub fn occurs(&self, event: usize, assignment: &[u32]) -> bool {
        self.events[event].occurs(assignment, &self.domains)
    }

    /// Ids of all events occurring under `assignment`, ascending.
    pub fn violated(&self, assignment: &[u32]) -> Vec<usize> {
        self.events
            .par_iter()
            .filter(|e| e.occurs(assignment, &self.domains))
            .map(|e| e.id)
            .collect()
    }

    /// Events other than `event` sharing a support variable with it, ascending.
    pub fn neighbors(&self, event: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.events[event]
            .support
            .iter()
            .flat_map(|&v| self.var_events[v].iter().copied())
            .filter(|&e| e != event)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Exact probability of `event` under the uniform product distribution.
///
/// Enumerates support assignments when there are at most `cap` of them.
/// Equality-type events beyond the cap are counted through the components
/// of their pairing graph, which is exact; custom tables beyond the cap fail.
pub fn event_probability(
    event: &BadEvent,
    system: &ConstraintSystem,
    cap: u64,
) -> Result<BigRational, LllError> {
    match enumerate_probability(event, system, cap) {
        Err(LllError::CapExceeded { .. }) if event.kind.is_half_equality() => {
            Ok(paired_equality_probability(event, system.domains()))
        }
        other => other,
    }
}

/// Brute-force probability: enumerate every support assignment.
pub fn enumerate_probability(
    event: &BadEvent,
    system: &ConstraintSystem,
    cap: u64,
) -> Result<BigRational, LllError> {
    let domains = system.domains();
    let size = event
        .support
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(domains[v] as u64));
    let size = match size {
        Some(s) if s <= cap => s,
        _ => {
            return Err(LllError::CapExceeded {
                event: event.id,
                cap,
            })
        }
    };
    let mut assignment = vec![0u32; system.num_variables()];
    let mut hits = 0u64;
    for _ in 0..size {
        if event.occurs(&assignment, domains) {
            hits += 1;
        }
        // odometer increment over the support
        for &v in &event.support {
            assignment[v] += 1;
            if assignment[v] < domains[v] {
                break;
            }
            assignment[v] = 0;
        }
    }
    Ok(BigRational::new(hits.into(), size.into()))
}

/// Probability that all pairs `(left_i, right_i)` agree, via union-find:
/// each component contributes `min(domain) / Π domain`.
fn paired_equality_probability(event: &BadEvent, domains: &[u32]) -> BigRational {
    let support = &event.support;
    let n = support.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let half = n / 2;
    for i in 0..half {
        let (a, b) = (find(&mut parent, i), find(&mut parent, half + i));
        if a != b {
            parent[a] = b;
        }
    }
    let mut min_dom = vec![u32::MAX; n];
    let mut prod = vec![BigUint::one(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let d = domains[support[i]];
        min_dom[root] = min_dom[root].min(d);
        prod[root] *= d;
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..n {
        if parent[i] == i {
            num *= min_dom[i];
            den *= &prod[i];
        }
    }
    BigRational::new(num.into(), den.into())
}

/// `Δ[i][j]` = max over class-`i+1` events of the number of other
/// class-`j+1` events sharing a support variable.
pub fn dependency_degrees(system: &ConstraintSystem) -> Vec<Vec<u64>> {
    let r = system.num_classes();
    let zero = || vec![vec![0u64; r]; r];
    system
        .events()
        .par_iter()
        .fold(zero, |mut acc, ev| {
            let mut counts = vec![0u64; r];
            for nb in system.neighbors(ev.id) {
                counts[system.events[nb].class - 1] += 1;
            }
            let row = &mut acc[ev.class - 1];
            for (slot, c) in row.iter_mut().zip(counts) {
                *slot = (*slot).max(c);
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x = (*x).max(y);
                }
            }
            a
        })
}

/// Converts an exact probability to `ln` for comparison with certificates.
pub fn rational_ln(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    let ln_big = |x: &num_bigint::BigInt| {
        let bits = x.bits();
        let shift = bits.saturating_sub(64);
        let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(q.numer()) - ln_big(q.denom())
}

// ---- JSON document -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct VariableDoc {
    id: usize,
    domain_size: u32,
}

#[derive(Serialize, Deserialize, Default)]
struct EventParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct EventDoc {
    id: usize,
    class: usize,
    support: Vec<usize>,
    kind: String,
    #[serde(default)]
    params: EventParams,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    variables: Vec<VariableDoc>,
    events: Vec<EventDoc>,
}

impl Serialize for ConstraintSystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let doc = SystemDoc {
            variables: self
                .domains
                .iter()
                .enumerate()
                .map(|(id, &domain_size)| VariableDoc { id, domain_size })
                .collect(),
            events: self
                .events
                .iter()
                .map(|e| EventDoc {
                    id: e.id,
                    class: e.class,
                    support: e.support.clone(),
                    kind: e.kind.name().to_string(),
                    params: EventParams {
                        table: match &e.kind {
                            EventKind::CustomTable(t) => Some(t.clone()),
                            _ => None,
                        },
                    },
                })
                .collect(),
        };
        doc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConstraintSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = SystemDoc::deserialize(d)?;
        let mut domains = vec![0u32; doc.variables.len()];
        for (pos, v) in doc.variables.iter().enumerate() {
            if v.id != pos {
                return Err(D::Error::custom(format!(
                    "variable at position {pos} has id {}",
                    v.id
                )));
            }
            domains[pos] = v.domain_size;
        }
        let events = doc
            .events
            .into_iter()
            .map(|e| {
                let kind = match (e.kind.as_str(), e.params.table) {
                    ("path_repetition", _) => EventKind::PathRepetition,
                    ("block_equality", _) => EventKind::BlockEquality,
                    ("custom_table", Some(t)) => EventKind::CustomTable(t),
                    ("custom_table", None) => {
                        return Err(D::Error::custom(format!(
                            "event {} of kind custom_table lacks params.table",
                            e.id
                        )))
                    }
                    (other, _) => {
                        return Err(D::Error::custom(format!("unknown event kind '{other}'")))
                    }
                };
                Ok(BadEvent {
                    id: e.id,
                    class: e.class,
                    support: e.support,
                    kind,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ConstraintSystem::new(domains, events).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn equality(id: usize, class: usize, support: Vec<usize>) -> BadEvent {
        BadEvent {
            id,
            class,
            support,
            kind: EventKind::BlockEquality,
        }
    }

    #[test]
    fn rejects_malformed_systems() {
        assert!(ConstraintSystem::new(vec![1], vec![]).is_err());
        assert!(ConstraintSystem::new(vec![2, 2], vec![equality(1, 1, vec![0, 1])]).is_err());
        assert!(ConstraintSystem::new(vec![2, 2], vec![equality(0, 0, vec![0, 1])]).is_err());
        assert!(ConstraintSystem::new(vec![2, 2], vec![equality(0, 1, vec![])]).is_err());
        assert!(ConstraintSystem::new(vec![2, 2], vec![equality(0, 1, vec![0, 0])]).is_err());
        assert!(ConstraintSystem::new(vec![2, 2], vec![equality(0, 1, vec![0, 2])]).is_err());
        assert!(ConstraintSystem::new(vec![2, 2, 2], vec![equality(0, 1, vec![0, 1, 2])]).is_err());
        let bad_table = BadEvent {
            id: 0,
            class: 1,
            support: vec![0, 1],
            kind: EventKind::CustomTable(vec![true; 3]),
        };
        assert!(ConstraintSystem::new(vec![2, 2], vec![bad_table]).is_err());
    }

    #[test]
    fn always_false_event_has_probability_zero() {
        let ev = BadEvent {
            id: 0,
            class: 1,
            support: vec![0, 1],
            kind: EventKind::CustomTable(vec![false; 6]),
        };
        let sys = ConstraintSystem::new(vec![2, 3], vec![ev.clone()]).unwrap();
        let p = event_probability(&ev, &sys, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn custom_table_uses_first_variable_as_low_digit() {
        // true only at x0 = 1, x1 = 0  -> index 1
        let ev = BadEvent {
            id: 0,
            class: 1,
            support: vec![0, 1],
            kind: EventKind::CustomTable(vec![false, true, false, false]),
        };
        let sys = ConstraintSystem::new(vec![2, 2], vec![ev.clone()]).unwrap();
        assert!(sys.occurs(0, &[1, 0]));
        assert!(!sys.occurs(0, &[0, 1]));
        assert_eq!(
            event_probability(&ev, &sys, DEFAULT_ENUMERATION_CAP).unwrap(),
            ratio(1, 4)
        );
    }

    #[test]
    fn cap_is_enforced_for_tables() {
        let ev = BadEvent {
            id: 0,
            class: 1,
            support: vec![0, 1, 2, 3, 4],
            kind: EventKind::CustomTable(vec![true; 32]),
        };
        let sys = ConstraintSystem::new(vec![2; 5], vec![ev.clone()]).unwrap();
        assert!(matches!(
            event_probability(&ev, &sys, 16),
            Err(LllError::CapExceeded { event: 0, cap: 16 })
        ));
        assert_eq!(event_probability(&ev, &sys, 32).unwrap(), ratio(1, 1));
    }

    #[test]
    fn paired_route_agrees_with_enumeration() {
        // mixed domains exercise the min-domain rule
        let domains = vec![2, 3, 3, 4, 2, 5];
        let ev = equality(0, 1, vec![0, 1, 2, 3, 4, 5]);
        let sys = ConstraintSystem::new(domains.clone(), vec![ev.clone()]).unwrap();
        let brute = enumerate_probability(&ev, &sys, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(brute, paired_equality_probability(&ev, &domains));
        // cap 1 forces the structural route
        assert_eq!(event_probability(&ev, &sys, 1).unwrap(), brute);
    }

    #[test]
    fn disjoint_supports_give_zero_degrees() {
        let sys = ConstraintSystem::new(
            vec![2; 4],
            vec![equality(0, 1, vec![0, 1]), equality(1, 2, vec![2, 3])],
        )
        .unwrap();
        assert_eq!(dependency_degrees(&sys), vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn degrees_count_other_events_by_class() {
        let sys = ConstraintSystem::new(
            vec![2; 5],
            vec![
                equality(0, 1, vec![0, 1]),
                equality(1, 1, vec![1, 2]),
                equality(2, 2, vec![2, 3]),
                equality(3, 2, vec![0, 4]),
            ],
        )
        .unwrap();
        // event 0 meets 1 (class 1) and 3 (class 2); event 1 meets 0 and 2
        assert_eq!(dependency_degrees(&sys), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(sys.neighbors(1), vec![0, 2]);
    }

    #[test]
    fn json_document_roundtrip() {
        let sys = ConstraintSystem::new(
            vec![2, 3, 2],
            vec![
                BadEvent {
                    id: 0,
                    class: 1,
                    support: vec![0, 2],
                    kind: EventKind::PathRepetition,
                },
                BadEvent {
                    id: 1,
                    class: 2,
                    support: vec![1],
                    kind: EventKind::CustomTable(vec![true, false, false]),
                },
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&sys).unwrap();
        assert!(text.contains("\"kind\":\"custom_table\""));
        assert!(text.contains("\"domain_size\":3"));
        let back: ConstraintSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sys);
        let bad = r#"{"variables":[{"id":0,"domain_size":2}],"events":[{"id":0,"class":1,"support":[0],"kind":"nope"}]}"#;
        assert!(serde_json::from_str::<ConstraintSystem>(bad).is_err());
    }

    #[test]
    fn rational_ln_handles_huge_denominators() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(2).pow(3400));
        assert!((rational_ln(&q) + 3400.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(rational_ln(&ratio(1, 561)), (1.0f64 / 561.0).ln());
    }
}
