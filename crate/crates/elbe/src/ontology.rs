//! Normalized EL++ axiom sets: parsing, the ABox rewrite, dataset splits,
//! and the built-in corpora generators.
//!
//! Axioms arrive pre-normalized in one of the seven normal forms. The file
//! format is one axiom per line, whitespace-separated, `#` starting a
//! comment:
//!
//! ```text
//! nf1 C D        # C ⊑ D
//! nf2 C D E      # C ⊓ D ⊑ E
//! nf3 C R D      # C ⊑ ∃R.D
//! nf4 R C D      # ∃R.C ⊑ D
//! nf5 C D        # C ⊓ D ⊑ ⊥
//! nf6 R C        # ∃R.C ⊑ ⊥
//! nf7 C          # C ⊑ ⊥
//! inst a C       # C(a), rewritten to {a} ⊑ C
//! role r a b     # r(a,b), rewritten to {a} ⊑ ∃r.{b}
//! ```
//!
//! Identifiers are arbitrary non-whitespace tokens (IRIs pass through
//! verbatim). Individuals are registered as singleton concepts, so after
//! parsing an axiom set contains only the seven normal forms.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense index of a concept symbol in a [`Vocabulary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId(pub usize);

/// Dense index of a relation symbol in a [`Vocabulary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub usize);

/// Symbol table mapping concept and relation names to dense indices,
/// in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    concepts: Vec<String>,
    relations: Vec<String>,
    concept_index: HashMap<String, usize>,
    relation_index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    /// Registers a concept name, returning its existing id if already known.
    pub fn intern_concept(&mut self, name: &str) -> ConceptId {
        if let Some(&i) = self.concept_index.get(name) {
            return ConceptId(i);
        }
        let i = self.concepts.len();
        self.concepts.push(name.to_string());
        self.concept_index.insert(name.to_string(), i);
        ConceptId(i)
    }

    pub fn intern_relation(&mut self, name: &str) -> RelationId {
        if let Some(&i) = self.relation_index.get(name) {
            return RelationId(i);
        }
        let i = self.relations.len();
        self.relations.push(name.to_string());
        self.relation_index.insert(name.to_string(), i);
        RelationId(i)
    }

    pub fn concept(&self, name: &str) -> Option<ConceptId> {
        self.concept_index.get(name).copied().map(ConceptId)
    }

    pub fn relation(&self, name: &str) -> Option<RelationId> {
        self.relation_index.get(name).copied().map(RelationId)
    }

    pub fn concept_name(&self, id: ConceptId) -> Result<&str> {
        self.concepts
            .get(id.0)
            .map(String::as_str)
            .ok_or(Error::UnknownId {
                kind: "concept",
                index: id.0,
            })
    }

    pub fn relation_name(&self, id: RelationId) -> Result<&str> {
        self.relations
            .get(id.0)
            .map(String::as_str)
            .ok_or(Error::UnknownId {
                kind: "relation",
                index: id.0,
            })
    }

    pub fn concept_names(&self) -> &[String] {
        &self.concepts
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relations
    }

    pub fn concept_ids(&self) -> impl Iterator<Item = ConceptId> {
        (0..self.concepts.len()).map(ConceptId)
    }
}

/// One of the seven EL++ TBox normal forms.
///
/// NF3 is `C ⊑ ∃R.D` and NF4 is `∃R.C ⊑ D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizedAxiom {
    Nf1 { c: ConceptId, d: ConceptId },
    Nf2 { c: ConceptId, d: ConceptId, e: ConceptId },
    Nf3 { c: ConceptId, r: RelationId, d: ConceptId },
    Nf4 { r: RelationId, c: ConceptId, d: ConceptId },
    Nf5 { c: ConceptId, d: ConceptId },
    Nf6 { r: RelationId, c: ConceptId },
    Nf7 { c: ConceptId },
}

/// Normal-form discriminant, used to pick the split target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    Nf1,
    Nf2,
    Nf3,
    Nf4,
    Nf5,
    Nf6,
    Nf7,
}

impl NormalizedAxiom {
    pub fn kind(&self) -> AxiomKind {
        match self {
            NormalizedAxiom::Nf1 { .. } => AxiomKind::Nf1,
            NormalizedAxiom::Nf2 { .. } => AxiomKind::Nf2,
            NormalizedAxiom::Nf3 { .. } => AxiomKind::Nf3,
            NormalizedAxiom::Nf4 { .. } => AxiomKind::Nf4,
            NormalizedAxiom::Nf5 { .. } => AxiomKind::Nf5,
            NormalizedAxiom::Nf6 { .. } => AxiomKind::Nf6,
            NormalizedAxiom::Nf7 { .. } => AxiomKind::Nf7,
        }
    }
}

/// An ABox assertion prior to the TBox rewrite. Never reaches the trainer;
/// the parser eliminates these immediately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AboxAssertion {
    Instantiation {
        individual: ConceptId,
        concept: ConceptId,
    },
    RoleAssertion {
        relation: RelationId,
        individual_a: ConceptId,
        individual_b: ConceptId,
    },
}

/// Rewrites ABox assertions into TBox normal forms over singleton concepts:
/// `C(a)` becomes `{a} ⊑ C` (NF1) and `r(a,b)` becomes `{a} ⊑ ∃r.{b}` (NF3).
/// Input order is preserved.
pub fn rewrite_abox(assertions: &[AboxAssertion]) -> Vec<NormalizedAxiom> {
    assertions
        .iter()
        .map(|a| match *a {
            AboxAssertion::Instantiation {
                individual,
                concept,
            } => NormalizedAxiom::Nf1 {
                c: individual,
                d: concept,
            },
            AboxAssertion::RoleAssertion {
                relation,
                individual_a,
                individual_b,
            } => NormalizedAxiom::Nf3 {
                c: individual_a,
                r: relation,
                d: individual_b,
            },
        })
        .collect()
}

/// A deduplicated list of normalized axioms plus the vocabulary covering
/// exactly the symbols they mention.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomSet {
    pub axioms: Vec<NormalizedAxiom>,
    pub vocabulary: Vocabulary,
}

impl AxiomSet {
    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// Renders the set back into the line format. Comments and blank lines
    /// of the original file are not preserved.
    pub fn serialize(&self) -> Result<String> {
        let mut out = String::new();
        for ax in &self.axioms {
            out.push_str(&self.format_axiom(ax)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn format_axiom(&self, ax: &NormalizedAxiom) -> Result<String> {
        let v = &self.vocabulary;
        Ok(match *ax {
            NormalizedAxiom::Nf1 { c, d } => {
                format!("nf1 {} {}", v.concept_name(c)?, v.concept_name(d)?)
            }
            NormalizedAxiom::Nf2 { c, d, e } => format!(
                "nf2 {} {} {}",
                v.concept_name(c)?,
                v.concept_name(d)?,
                v.concept_name(e)?
            ),
            NormalizedAxiom::Nf3 { c, r, d } => format!(
                "nf3 {} {} {}",
                v.concept_name(c)?,
                v.relation_name(r)?,
                v.concept_name(d)?
            ),
            NormalizedAxiom::Nf4 { r, c, d } => format!(
                "nf4 {} {} {}",
                v.relation_name(r)?,
                v.concept_name(c)?,
                v.concept_name(d)?
            ),
            NormalizedAxiom::Nf5 { c, d } => {
                format!("nf5 {} {}", v.concept_name(c)?, v.concept_name(d)?)
            }
            NormalizedAxiom::Nf6 { r, c } => {
                format!("nf6 {} {}", v.relation_name(r)?, v.concept_name(c)?)
            }
            NormalizedAxiom::Nf7 { c } => format!("nf7 {}", v.concept_name(c)?),
        })
    }
}

fn parse_error(path: &str, line: usize, msg: impl fmt::Display) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.to_string(),
    }
}

enum SymbolLookup<'a> {
    /// Register unknown names in first-appearance order.
    Intern(&'a mut Vocabulary),
    /// Resolve against a fixed vocabulary; unknown names are an error.
    Fixed(&'a Vocabulary),
}

impl SymbolLookup<'_> {
    fn concept(&mut self, name: &str) -> Result<ConceptId> {
        match self {
            SymbolLookup::Intern(v) => Ok(v.intern_concept(name)),
            SymbolLookup::Fixed(v) => v.concept(name).ok_or_else(|| {
                Error::VocabMismatch(format!("concept `{name}` not in vocabulary"))
            }),
        }
    }

    fn relation(&mut self, name: &str) -> Result<RelationId> {
        match self {
            SymbolLookup::Intern(v) => Ok(v.intern_relation(name)),
            SymbolLookup::Fixed(v) => v.relation(name).ok_or_else(|| {
                Error::VocabMismatch(format!("relation `{name}` not in vocabulary"))
            }),
        }
    }
}

fn parse_lines(content: &str, path: &str, mut lookup: SymbolLookup) -> Result<Vec<NormalizedAxiom>> {
    let mut axioms = Vec::new();
    let mut seen: HashSet<NormalizedAxiom> = HashSet::new();
    for (lineno, raw) in content.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let tag = tok[0];
        let args = &tok[1..];
        let expect = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_error(
                    path,
                    lineno,
                    format!("`{tag}` expects {n} arguments, got {}", args.len()),
                ))
            }
        };
        let ax = match tag {
            "nf1" => {
                expect(2)?;
                NormalizedAxiom::Nf1 {
                    c: lookup.concept(args[0])?,
                    d: lookup.concept(args[1])?,
                }
            }
            "nf2" => {
                expect(3)?;
                NormalizedAxiom::Nf2 {
                    c: lookup.concept(args[0])?,
                    d: lookup.concept(args[1])?,
                    e: lookup.concept(args[2])?,
                }
            }
            "nf3" => {
                expect(3)?;
                NormalizedAxiom::Nf3 {
                    c: lookup.concept(args[0])?,
                    r: lookup.relation(args[1])?,
                    d: lookup.concept(args[2])?,
                }
            }
            "nf4" => {
                expect(3)?;
                NormalizedAxiom::Nf4 {
                    r: lookup.relation(args[0])?,
                    c: lookup.concept(args[1])?,
                    d: lookup.concept(args[2])?,
                }
            }
            "nf5" => {
                expect(2)?;
                NormalizedAxiom::Nf5 {
                    c: lookup.concept(args[0])?,
                    d: lookup.concept(args[1])?,
                }
            }
            "nf6" => {
                expect(2)?;
                NormalizedAxiom::Nf6 {
                    r: lookup.relation(args[0])?,
                    c: lookup.concept(args[1])?,
                }
            }
            "nf7" => {
                expect(1)?;
                NormalizedAxiom::Nf7 {
                    c: lookup.concept(args[0])?,
                }
            }
            // ABox assertions are rewritten on the spot; individuals become
            // singleton concepts named by their token.
            "inst" => {
                expect(2)?;
                let assertion = AboxAssertion::Instantiation {
                    individual: lookup.concept(args[0])?,
                    concept: lookup.concept(args[1])?,
                };
                rewrite_abox(&[assertion])[0]
            }
            "role" => {
                expect(3)?;
                let assertion = AboxAssertion::RoleAssertion {
                    relation: lookup.relation(args[0])?,
                    individual_a: lookup.concept(args[1])?,
                    individual_b: lookup.concept(args[2])?,
                };
                rewrite_abox(&[assertion])[0]
            }
            other => {
                return Err(parse_error(
                    path,
                    lineno,
                    format!("unknown normal-form tag `{other}`"),
                ))
            }
        };
        if seen.insert(ax) {
            axioms.push(ax);
        } else {
            log::warn!("{path}:{lineno}: duplicate axiom `{line}` dropped");
        }
    }
    Ok(axioms)
}

/// Parses axiom text, building the vocabulary in first-appearance order.
pub fn parse_axioms(content: &str, path: &str) -> Result<AxiomSet> {
    let mut vocabulary = Vocabulary::new();
    let axioms = parse_lines(content, path, SymbolLookup::Intern(&mut vocabulary))?;
    Ok(AxiomSet {
        axioms,
        vocabulary,
    })
}

/// Parses axiom text against a fixed vocabulary; names absent from it are a
/// vocabulary-mismatch error.
pub fn parse_axioms_with_vocab(
    content: &str,
    path: &str,
    vocabulary: &Vocabulary,
) -> Result<Vec<NormalizedAxiom>> {
    parse_lines(content, path, SymbolLookup::Fixed(vocabulary))
}

pub fn parse_axiom_file(path: impl AsRef<Path>) -> Result<AxiomSet> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path)?;
    parse_axioms(&content, &path.display().to_string())
}

/// How to partition an axiom set. Only axioms of `split_target` are
/// partitioned; all other axioms always go to train.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub valid_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
    pub split_target: AxiomKind,
}

impl SplitSpec {
    fn validate(&self) -> Result<()> {
        let fr = [
            self.train_fraction,
            self.valid_fraction,
            self.test_fraction,
        ];
        if fr.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::Config(format!("split fractions out of [0,1]: {fr:?}")));
        }
        let sum: f64 = fr.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Seeded partition of the target axioms into train/valid/test. Valid and
/// test sizes are floor-rounded; the remainder stays in train together with
/// every non-target axiom. Deterministic for a fixed seed.
pub fn split_axioms(set: &AxiomSet, spec: &SplitSpec) -> Result<(AxiomSet, AxiomSet, AxiomSet)> {
    spec.validate()?;
    let target: Vec<usize> = set
        .axioms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind() == spec.split_target)
        .map(|(i, _)| i)
        .collect();
    let mut shuffled = target.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    shuffled.shuffle(&mut rng);
    let n = shuffled.len();
    let n_valid = (spec.valid_fraction * n as f64).floor() as usize;
    let n_test = (spec.test_fraction * n as f64).floor() as usize;
    let valid_idx: HashSet<usize> = shuffled[..n_valid].iter().copied().collect();
    let test_idx: HashSet<usize> = shuffled[n_valid..n_valid + n_test].iter().copied().collect();

    let pick = |member: &dyn Fn(usize) -> bool| AxiomSet {
        axioms: set
            .axioms
            .iter()
            .enumerate()
            .filter(|(i, _)| member(*i))
            .map(|(_, a)| *a)
            .collect(),
        vocabulary: set.vocabulary.clone(),
    };
    let train = pick(&|i| !valid_idx.contains(&i) && !test_idx.contains(&i));
    let valid = pick(&|i| valid_idx.contains(&i));
    let test = pick(&|i| test_idx.contains(&i));
    Ok((train, valid, test))
}

/// The twelve-axiom family knowledge base over
/// {Person, Male, Female, Father, Mother, Parent, Top} and hasChild.
pub fn generate_family_domain() -> AxiomSet {
    let text = "\
nf1 Male Person
nf1 Female Person
nf1 Father Male
nf1 Mother Female
nf1 Father Parent
nf1 Mother Parent
nf5 Female Male
nf2 Female Parent Mother
nf2 Male Parent Father
nf4 hasChild Person Parent
nf1 Parent Person
nf3 Parent hasChild Top
";
    parse_axioms(text, "<family-domain>").expect("family domain is well-formed")
}

/// Corpus for the equivalence-entailment task.
///
/// Samples `n_triples` NF2 axioms `C ⊓ D ⊑ E` without replacement and adds
/// `C ⊑ E` and `D ⊑ E` for each. The first `n_heldout` sampled triples are
/// held out for evaluation: their NF2 axiom is removed from train while the
/// two added NF1 axioms stay.
pub fn generate_equivalence_corpus(
    base: &AxiomSet,
    n_triples: usize,
    n_heldout: usize,
    seed: u64,
) -> Result<(AxiomSet, Vec<(ConceptId, ConceptId, ConceptId)>)> {
    let mut nf2: Vec<(ConceptId, ConceptId, ConceptId)> = base
        .axioms
        .iter()
        .filter_map(|a| match *a {
            NormalizedAxiom::Nf2 { c, d, e } => Some((c, d, e)),
            _ => None,
        })
        .collect();
    if nf2.len() < n_triples {
        return Err(Error::Config(format!(
            "need {n_triples} NF2 axioms, base has {}",
            nf2.len()
        )));
    }
    if n_heldout > n_triples {
        return Err(Error::Config(format!(
            "n_heldout {n_heldout} exceeds n_triples {n_triples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    nf2.shuffle(&mut rng);
    let sampled = &nf2[..n_triples];
    let heldout: Vec<_> = sampled[..n_heldout].to_vec();
    let heldout_nf2: HashSet<NormalizedAxiom> = heldout
        .iter()
        .map(|&(c, d, e)| NormalizedAxiom::Nf2 { c, d, e })
        .collect();

    let mut axioms = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |ax: NormalizedAxiom, axioms: &mut Vec<NormalizedAxiom>| {
        if seen.insert(ax) {
            axioms.push(ax);
        }
    };
    for ax in &base.axioms {
        if !heldout_nf2.contains(ax) {
            push(*ax, &mut axioms);
        }
    }
    for &(c, d, e) in sampled {
        push(NormalizedAxiom::Nf1 { c, d: e }, &mut axioms);
        push(NormalizedAxiom::Nf1 { c: d, d: e }, &mut axioms);
    }
    Ok((
        AxiomSet {
            axioms,
            vocabulary: base.vocabulary.clone(),
        },
        heldout,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cid(set: &AxiomSet, name: &str) -> ConceptId {
        set.vocabulary.concept(name).unwrap()
    }

    #[test]
    fn parse_basic_forms() {
        let set = parse_axioms(
            "nf1 Male Person\nnf2 Female Parent Mother\nnf3 Parent hasChild Top\n",
            "<t>",
        )
        .unwrap();
        assert_eq!(
            set.axioms[0],
            NormalizedAxiom::Nf1 {
                c: cid(&set, "Male"),
                d: cid(&set, "Person")
            }
        );
        assert_eq!(
            set.axioms[1],
            NormalizedAxiom::Nf2 {
                c: cid(&set, "Female"),
                d: cid(&set, "Parent"),
                e: cid(&set, "Mother")
            }
        );
        assert_eq!(
            set.axioms[2],
            NormalizedAxiom::Nf3 {
                c: cid(&set, "Parent"),
                r: set.vocabulary.relation("hasChild").unwrap(),
                d: cid(&set, "Top")
            }
        );
        // first-appearance vocabulary order
        assert_eq!(
            set.vocabulary.concept_names(),
            &["Male", "Person", "Female", "Parent", "Mother", "Top"]
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_axioms("nf1 A B\nnf2 A B\n", "<t>").unwrap_err();
        assert!(err.to_string().contains("<t>:2"), "{err}");
        let err = parse_axioms("\n\nnfX A B\n", "<t>").unwrap_err();
        assert!(err.to_string().contains("unknown normal-form tag"), "{err}");
        assert!(err.to_string().contains(":3"), "{err}");
    }

    #[test]
    fn duplicates_are_dropped() {
        let set = parse_axioms("nf1 A B\nnf1 A B\nnf1 A B # again\n", "<t>").unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let set = parse_axioms("# header\n\nnf7 A # trailing\n", "<t>").unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.axioms[0], NormalizedAxiom::Nf7 { c: cid(&set, "A") });
    }

    #[test]
    fn abox_lines_are_rewritten() {
        let set = parse_axioms("inst alice Person\nrole knows alice bob\n", "<t>").unwrap();
        assert_eq!(
            set.axioms[0],
            NormalizedAxiom::Nf1 {
                c: cid(&set, "alice"),
                d: cid(&set, "Person")
            }
        );
        assert_eq!(
            set.axioms[1],
            NormalizedAxiom::Nf3 {
                c: cid(&set, "alice"),
                r: set.vocabulary.relation("knows").unwrap(),
                d: cid(&set, "bob")
            }
        );
        // only NF1/NF3 come out of the rewrite
        assert!(set
            .axioms
            .iter()
            .all(|a| matches!(a.kind(), AxiomKind::Nf1 | AxiomKind::Nf3)));
    }

    #[test]
    fn rewrite_abox_empty() {
        assert!(rewrite_abox(&[]).is_empty());
    }

    #[test]
    fn roundtrip_serialize_parse() {
        let text = "nf1 A B\nnf2 A B C\nnf3 A r B\nnf4 r A B\nnf5 A B\nnf6 r A\nnf7 A\n";
        let set = parse_axioms(text, "<t>").unwrap();
        let out = set.serialize().unwrap();
        assert_eq!(out, text);
        let reparsed = parse_axioms(&out, "<t>").unwrap();
        assert_eq!(reparsed.axioms, set.axioms);
    }

    #[test]
    fn parse_with_fixed_vocab_rejects_unknowns() {
        let set = parse_axioms("nf1 A B\n", "<t>").unwrap();
        assert!(parse_axioms_with_vocab("nf1 A B\n", "<t>", &set.vocabulary).is_ok());
        let err = parse_axioms_with_vocab("nf1 A Z\n", "<t>", &set.vocabulary).unwrap_err();
        assert!(matches!(err, Error::VocabMismatch(_)));
    }

    fn numbered_nf1_set(n: usize) -> AxiomSet {
        let text: String = (0..n).map(|i| format!("nf1 C{i} D{i}\n")).collect();
        parse_axioms(&text, "<t>").unwrap()
    }

    #[test]
    fn split_exact_fractions() {
        let set = numbered_nf1_set(10);
        let spec = SplitSpec {
            train_fraction: 0.8,
            valid_fraction: 0.1,
            test_fraction: 0.1,
            seed: 7,
            split_target: AxiomKind::Nf1,
        };
        let (train, valid, test) = split_axioms(&set, &spec).unwrap();
        assert_eq!((train.len(), valid.len(), test.len()), (8, 1, 1));
        // partition: disjoint and covering
        let mut all: Vec<_> = train
            .axioms
            .iter()
            .chain(&valid.axioms)
            .chain(&test.axioms)
            .copied()
            .collect();
        all.sort_by_key(|a| format!("{a:?}"));
        let mut orig = set.axioms.clone();
        orig.sort_by_key(|a| format!("{a:?}"));
        assert_eq!(all, orig);
    }

    #[test]
    fn split_no_target_all_in_train() {
        let set = numbered_nf1_set(5);
        let spec = SplitSpec {
            train_fraction: 0.8,
            valid_fraction: 0.1,
            test_fraction: 0.1,
            seed: 7,
            split_target: AxiomKind::Nf3,
        };
        let (train, valid, test) = split_axioms(&set, &spec).unwrap();
        assert_eq!(train.len(), 5);
        assert!(valid.is_empty() && test.is_empty());
    }

    #[test]
    fn split_is_deterministic() {
        let set = numbered_nf1_set(50);
        let spec = SplitSpec {
            train_fraction: 0.8,
            valid_fraction: 0.1,
            test_fraction: 0.1,
            seed: 11,
            split_target: AxiomKind::Nf1,
        };
        let a = split_axioms(&set, &spec).unwrap();
        let b = split_axioms(&set, &spec).unwrap();
        assert_eq!(a.0.axioms, b.0.axioms);
        assert_eq!(a.1.axioms, b.1.axioms);
        assert_eq!(a.2.axioms, b.2.axioms);
    }

    #[test]
    fn split_rejects_bad_fractions() {
        let set = numbered_nf1_set(4);
        let spec = SplitSpec {
            train_fraction: 0.8,
            valid_fraction: 0.3,
            test_fraction: 0.1,
            seed: 0,
            split_target: AxiomKind::Nf1,
        };
        assert!(split_axioms(&set, &spec).is_err());
    }

    #[test]
    fn family_domain_contents() {
        let fam = generate_family_domain();
        assert_eq!(fam.len(), 12);
        assert_eq!(fam.vocabulary.num_concepts(), 7);
        assert_eq!(fam.vocabulary.num_relations(), 1);
        let female = cid(&fam, "Female");
        let male = cid(&fam, "Male");
        let person = cid(&fam, "Person");
        let parent = cid(&fam, "Parent");
        let has_child = fam.vocabulary.relation("hasChild").unwrap();
        assert!(fam
            .axioms
            .contains(&NormalizedAxiom::Nf5 { c: female, d: male }));
        assert!(fam.axioms.contains(&NormalizedAxiom::Nf4 {
            r: has_child,
            c: person,
            d: parent
        }));
    }

    #[test]
    fn equivalence_corpus_minimal() {
        let base = parse_axioms("nf2 A B C\n", "<t>").unwrap();
        let (train, heldout) = generate_equivalence_corpus(&base, 1, 0, 3).unwrap();
        assert!(heldout.is_empty());
        // keeps the NF2 and gains the two NF1 axioms
        assert_eq!(train.len(), 3);
        let a = cid(&base, "A");
        let b = cid(&base, "B");
        let c = cid(&base, "C");
        assert!(train.axioms.contains(&NormalizedAxiom::Nf2 { c: a, d: b, e: c }));
        assert!(train.axioms.contains(&NormalizedAxiom::Nf1 { c: a, d: c }));
        assert!(train.axioms.contains(&NormalizedAxiom::Nf1 { c: b, d: c }));
    }

    #[test]
    fn equivalence_corpus_heldout_structure() {
        let text: String = (0..20).map(|i| format!("nf2 A{i} B{i} E{i}\n")).collect();
        let base = parse_axioms(&text, "<t>").unwrap();
        let (train, heldout) = generate_equivalence_corpus(&base, 10, 4, 5).unwrap();
        assert_eq!(heldout.len(), 4);
        for &(c, d, e) in &heldout {
            assert!(!train.axioms.contains(&NormalizedAxiom::Nf2 { c, d, e }));
            assert!(train.axioms.contains(&NormalizedAxiom::Nf1 { c, d: e }));
            assert!(train.axioms.contains(&NormalizedAxiom::Nf1 { c: d, d: e }));
        }
        // determinism
        let again = generate_equivalence_corpus(&base, 10, 4, 5).unwrap();
        assert_eq!(again.0.axioms, train.axioms);
        assert_eq!(again.1, heldout);
    }

    #[test]
    fn equivalence_corpus_insufficient_nf2() {
        let base = parse_axioms("nf1 A B\n", "<t>").unwrap();
        assert!(generate_equivalence_corpus(&base, 1, 0, 0).is_err());
    }
}
