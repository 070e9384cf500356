use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallOutcome {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Binary,
    Linear,
}

/// One DCGBS entry as it stood after a call: `(B_i, LB_i, mid_i, UB_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySnapshot {
    pub softs: BTreeSet<usize>,
    pub lb: i128,
    pub mid: i128,
    pub ub: i128,
}

/// Algorithm-specific detail attached to an iteration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Note {
    #[default]
    None,
    HardCheck,
    Mode(SearchMode),
    Bit {
        bit: i64,
        cost: i128,
    },
    Stratum {
        w_max: i128,
    },
    /// WPM1 weight split: the core minimum and the working soft-weight sum
    /// after the split.
    Split {
        w_min: i128,
        working_sum: i128,
    },
    /// Exactly-one constraint over this many fresh blocking variables.
    ExactlyOne(usize),
    Cover {
        softs: BTreeSet<usize>,
        k: i128,
    },
    ReadOnce {
        steps: usize,
        derived_empty: bool,
    },
    Entries(Vec<EntrySnapshot>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    /// 0 is the up-front hard-clause check.
    pub call: usize,
    pub outcome: CallOutcome,
    /// Bounds after the call was processed.
    pub lb: Option<i128>,
    pub ub: Option<i128>,
    /// The bound the call's cardinality constraint enforced.
    pub mid: Option<i128>,
    pub model_cost: Option<i128>,
    /// Soft clauses (or clause copies) in the returned core.
    pub core_size: Option<usize>,
    /// Blocking variables added while processing the call.
    pub relaxed: usize,
    pub notes: Vec<Note>,
}

impl IterationRecord {
    pub fn new(call: usize, outcome: CallOutcome) -> Self {
        IterationRecord {
            call,
            outcome,
            lb: None,
            ub: None,
            mid: None,
            model_cost: None,
            core_size: None,
            relaxed: 0,
            notes: Vec::new(),
        }
    }

    pub fn note(&self, pred: impl Fn(&Note) -> bool) -> Option<&Note> {
        self.notes.iter().find(|n| pred(n))
    }

    pub fn to_line(&self) -> String {
        fn opt(v: Option<impl fmt::Display>) -> String {
            v.map_or_else(|| "-".to_string(), |x| x.to_string())
        }
        let mut s = format!(
            "call={} {} lb={} ub={} mid={} cost={} core={} relaxed={}",
            self.call,
            match self.outcome {
                CallOutcome::Sat => "SAT",
                CallOutcome::Unsat => "UNSAT",
            },
            opt(self.lb),
            opt(self.ub),
            opt(self.mid),
            opt(self.model_cost),
            opt(self.core_size),
            self.relaxed
        );
        for n in &self.notes {
            if *n != Note::None {
                write!(s, " {n}").expect("string write");
            }
        }
        s
    }
}

// Soft-clause indices print 1-based, as in WCNF files.
fn set(out: &mut fmt::Formatter<'_>, xs: &BTreeSet<usize>) -> fmt::Result {
    out.write_char('{')?;
    for (j, i) in xs.iter().enumerate() {
        if j > 0 {
            out.write_char(',')?;
        }
        write!(out, "{}", i + 1)?;
    }
    out.write_char('}')
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Note::None => Ok(()),
            Note::HardCheck => f.write_str("hard-check"),
            Note::Mode(SearchMode::Binary) => f.write_str("mode=binary"),
            Note::Mode(SearchMode::Linear) => f.write_str("mode=linear"),
            Note::Bit { bit, cost } => write!(f, "bit={bit} bitcost={cost}"),
            Note::Stratum { w_max } => write!(f, "wmax={w_max}"),
            Note::Split { w_min, working_sum } => write!(f, "wmin={w_min} working={working_sum}"),
            Note::ExactlyOne(n) => write!(f, "eo={n}"),
            Note::Cover { softs, k } => {
                f.write_str("cover=")?;
                set(f, softs)?;
                write!(f, " k={k}")
            }
            Note::ReadOnce { steps, derived_empty } => {
                write!(f, "ror={steps}")?;
                if *derived_empty {
                    f.write_str(" empty")?;
                }
                Ok(())
            }
            Note::Entries(es) => {
                f.write_str("entries=")?;
                for (j, e) in es.iter().enumerate() {
                    if j > 0 {
                        f.write_char(';')?;
                    }
                    set(f, &e.softs)?;
                    write!(f, ":{}/{}/{}", e.lb, e.mid, e.ub)?;
                }
                Ok(())
            }
        }
    }
}
