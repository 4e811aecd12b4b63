//! Rewriting an OBDA specification into DL-Lite_R, and the two per-TBox
//! approximation baselines.

mod compose;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::datalog::TranslateOptions;
use crate::dl::{
    dllite_closure_over, norm_and, norm_exists, saturate_existential_cis, Axiom, DlLiteTBox,
    Provenance, RhsConcept, Signature, StepReport, TBox,
};
use crate::error::{Error, Result};
use crate::expansion::{et_mapping_cut, BoundednessOracle, Verdict, DEFAULT_CAP, DEFAULT_K};
use crate::mapping::Mapping;
use crate::name::Name;
use crate::verify::INCONSISTENT_MARKER;

pub use compose::{compose_lowlevel, ComposedAssertion};

/// `⟨T, M, S⟩` plus optional source-query texts for the views.
#[derive(Debug, Clone, Default)]
pub struct ObdaSpec {
    pub tbox: TBox,
    pub mapping: Mapping,
    pub schema: Signature,
    pub lowlevel: Option<BTreeMap<Name, String>>,
}

impl ObdaSpec {
    pub fn new(tbox: TBox, mapping: Mapping, schema: Signature) -> Self {
        ObdaSpec {
            tbox,
            mapping,
            schema,
            lowlevel: None,
        }
    }

    /// Mapping heads are concept or role names of the TBox with the right
    /// arity, and mapping bodies use declared views only.
    pub fn validate(&self) -> Result<()> {
        self.tbox.validate()?;
        self.mapping.validate()?;
        for a in &self.mapping.assertions {
            let arity = if self.tbox.sig.concepts.contains(&a.target) {
                1
            } else if self.tbox.sig.roles.contains(&a.target) {
                2
            } else {
                return Err(Error::validation(format!(
                    "mapping target `{}` is not a concept or role name of the TBox",
                    a.target
                )));
            };
            if a.head_vars.len() != arity {
                return Err(Error::validation(format!(
                    "mapping target `{}` used with arity {}",
                    a.target,
                    a.head_vars.len()
                )));
            }
        }
        for (v, n) in self.mapping.source_predicates() {
            match self.schema.views.get(&v) {
                None => {
                    return Err(Error::validation(format!(
                        "source predicate `{v}` is not a view of the schema"
                    )))
                }
                Some(&m) if m != n => {
                    return Err(Error::validation(format!(
                        "view `{v}` has arity {m} but is used with arity {n}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Rewriting,
    SoundApproximation,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Rewriting => "rewriting",
            Label::SoundApproximation => "sound approximation",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RewriteOptions {
    pub k: usize,
    /// Largest left-hand side conjunction considered when saturating
    /// existential CIs and when collecting consequences for the Datalog
    /// translation.
    pub max_lhs: usize,
    /// Chase depth for entailment checks; `None` picks one from the TBox.
    pub depth: Option<usize>,
    pub cap: usize,
}

impl Default for RewriteOptions {
    fn default() -> Self {
        RewriteOptions {
            k: DEFAULT_K,
            max_lhs: 3,
            depth: None,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RewriteResult {
    pub tbox_r: DlLiteTBox,
    pub mapping_c: Mapping,
    /// The normalized TBox after the existential and conjunction steps.
    pub t3: TBox,
    pub k: usize,
    pub max_lhs: usize,
    pub exhaustive: bool,
    pub verdicts: BTreeMap<Name, Verdict>,
    pub label: Label,
    pub warnings: Vec<String>,
}

fn needs_marker(t3: &TBox) -> bool {
    t3.axioms.iter().any(|a| match a {
        Axiom::Ci {
            rhs: RhsConcept::AtMost1(..),
            ..
        } => true,
        Axiom::Ci {
            lhs,
            rhs: RhsConcept::Bottom,
        } => lhs.is_empty() || lhs.len() >= 3,
        _ => false,
    })
}

/// The TBox after saturation, fresh roles and conjunction names, with the
/// inconsistency marker added when some ⊥-producing axiom has no DL-Lite_R
/// counterpart.
pub fn normalize_for_rewriting(
    t: &TBox,
    max_lhs: usize,
    depth: Option<usize>,
) -> (TBox, StepReport) {
    let (t1, report) = saturate_existential_cis(t, max_lhs, depth);
    let mut t3 = norm_and(&norm_exists(&t1));
    if needs_marker(&t3) {
        let m = Name::from(INCONSISTENT_MARKER);
        t3.declare_concept(m.clone());
        t3.register_fresh(m, Provenance::Marker);
    }
    (t3, report)
}

/// Rewrites `spec` into a DL-Lite_R TBox and a mapping over the same views.
/// The result is labeled a rewriting only when the saturation considered
/// every left-hand side, every entailment check was decided, every
/// predicate was found bounded and the TBox has no at-most restriction.
pub fn rew_obda(
    spec: &ObdaSpec,
    opts: &RewriteOptions,
    omega: &dyn BoundednessOracle,
) -> Result<RewriteResult> {
    if opts.k == 0 || opts.max_lhs == 0 {
        return Err(Error::validation("k and max_lhs must be positive"));
    }
    spec.validate()?;
    let t = &spec.tbox;
    let (t3, mut report) = normalize_for_rewriting(t, opts.max_lhs, opts.depth);
    let (tbox_r, closure_report) = dllite_closure_over(&t3, &t3.sig, opts.depth);
    report.merge(closure_report);
    let topts = TranslateOptions {
        closure_lhs: opts.max_lhs,
        depth: opts.depth,
    };
    let etm = et_mapping_cut(&t3, &spec.mapping, opts.k, omega, opts.cap, &topts)?;

    let user_concepts = t.sig.concepts.iter().filter(|c| !c.is_reserved()).count();
    // Without existential right-hand sides no anonymous successor exists, so
    // small left-hand sides already cover every consequence.
    let no_exists = !t.axioms.iter().any(|a| {
        matches!(
            a,
            Axiom::Ci {
                rhs: RhsConcept::Exists(..),
                ..
            }
        )
    });
    let exhaustive = opts.max_lhs >= user_concepts.max(1) || no_exists;
    let mut warnings = report.warnings;
    if report.undecided > 0 {
        warnings.push(format!(
            "{} entailment checks were undecided",
            report.undecided
        ));
    }
    if !exhaustive {
        warnings.push(format!(
            "left-hand sides were limited to {} of {} concept names",
            opts.max_lhs, user_concepts
        ));
    }
    for (n, v) in &etm.verdicts {
        if *v != Verdict::Bounded {
            warnings.push(format!(
                "`{n}` is not known to be bounded; expansions cut at depth {}",
                opts.k
            ));
        }
    }
    let at_most = t3.has_at_most();
    if at_most {
        warnings.push("at-most restrictions are only approximated".into());
    }
    let bounded = etm.verdicts.values().all(|v| *v == Verdict::Bounded);
    let label = if exhaustive && bounded && report.undecided == 0 && !at_most {
        Label::Rewriting
    } else {
        Label::SoundApproximation
    };
    Ok(RewriteResult {
        tbox_r,
        mapping_c: etm.mapping,
        t3,
        k: opts.k,
        max_lhs: opts.max_lhs,
        exhaustive,
        verdicts: etm.verdicts,
        label,
        warnings,
    })
}

/// The DL-Lite_R axioms over `sig(α)` entailed by `{α}`, over all `α ∈ t`.
pub fn approximate_lsa(t: &TBox) -> (DlLiteTBox, StepReport) {
    let mut out = DlLiteTBox::new();
    let mut report = StepReport::default();
    for ax in &t.axioms {
        let single = TBox::from_axioms([ax.clone()]);
        let (c, r) = dllite_closure_over(&single, &single.sig, None);
        out.axioms.extend(c.axioms);
        report.merge(r);
    }
    for c in t.sig.concepts.iter().filter(|c| !c.is_reserved()) {
        let single = {
            let mut s = TBox::new();
            s.declare_concept(c.clone());
            s
        };
        out.axioms
            .extend(dllite_closure_over(&single, &single.sig, None).0.axioms);
    }
    (out, report)
}

/// The DL-Lite_R closure of `t` over its user names.
pub fn approximate_gsa(t: &TBox) -> (DlLiteTBox, StepReport) {
    let keep = |s: &BTreeSet<Name>| s.iter().filter(|n| !n.is_reserved()).cloned().collect();
    let sig = Signature {
        concepts: keep(&t.sig.concepts),
        roles: keep(&t.sig.roles),
        views: BTreeMap::new(),
    };
    dllite_closure_over(t, &sig, None)
}
