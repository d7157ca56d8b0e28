use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Dictionary, Field, FunctionalLocationEntry, Record};
use crate::eval::{fuse_votes, FeedbackEvent, Level, QrelSet};
use crate::preprocess::NormalizationConfig;

/// Canonical form, inflected form, and an optional compound split used for
/// multi-part shortenings such as `Temp.Schwank.`.
const CONCEPTS: &[(&str, &str, &str)] = &[
    ("Temperaturschwankung", "Temperaturschwankungen", "Temperatur|schwankung"),
    ("Leckage", "Leckagen", ""),
    ("Druckabfall", "Druckabfälle", "Druck|abfall"),
    ("Dichtung", "Dichtungen", ""),
    ("Ventil", "Ventile", ""),
    ("Vibration", "Vibrationen", ""),
    ("Korrosion", "Korrosionen", ""),
    ("Verstopfung", "Verstopfungen", ""),
    ("Filterwechsel", "Filterwechsels", "Filter|wechsel"),
    ("Kühlwasser", "Kühlwassers", "Kühl|wasser"),
    ("Förderband", "Förderbänder", "Förder|band"),
    ("Sensorausfall", "Sensorausfälle", "Sensor|ausfall"),
    ("Kalibrierung", "Kalibrierungen", ""),
    ("Überhitzung", "Überhitzungen", ""),
    ("Schmierung", "Schmierungen", ""),
    ("Lagerschaden", "Lagerschäden", "Lager|schaden"),
    ("Verschleiß", "Verschleißes", ""),
    ("Störmeldung", "Störmeldungen", "Stör|meldung"),
    ("Füllstand", "Füllstände", "Füll|stand"),
    ("Durchfluss", "Durchflusses", ""),
    ("Kupplung", "Kupplungen", ""),
    ("Getriebe", "Getrieben", ""),
    ("Rohrleitung", "Rohrleitungen", "Rohr|leitung"),
    ("Schweißnaht", "Schweißnähte", "Schweiß|naht"),
    ("Isolierung", "Isolierungen", ""),
    ("Sicherung", "Sicherungen", ""),
    ("Abschaltung", "Abschaltungen", ""),
    ("Probenahme", "Probenahmen", "Probe|nahme"),
    ("Reinigung", "Reinigungen", ""),
    ("Geräusch", "Geräusche", ""),
    ("Ablagerung", "Ablagerungen", ""),
    ("Motorstrom", "Motorströme", "Motor|strom"),
    ("Stellungsregler", "Stellungsreglern", "Stellungs|regler"),
    ("Drehzahl", "Drehzahlen", "Dreh|zahl"),
];

const FILLERS: &[&str] = &[
    "festgestellt", "geprüft", "Schicht", "Kollege", "informiert", "Meister", "erneut",
    "Nachtschicht", "Frühschicht", "kontrolliert", "behoben", "gemeldet", "beobachtet",
    "Rundgang", "Anlage", "Betrieb", "Instandhaltung", "Auftrag", "erledigt", "offen",
    "Rücksprache", "Elektriker", "Schlosser", "Messwert", "Hinweis", "weiterhin",
    "ausgetauscht", "nachgezogen", "dokumentiert", "Freigabe", "ist", "wurde", "keine",
    "leicht", "stark", "sofort", "später", "Spätschicht",
];

const FILLER_STOPWORDS: &[&str] = &["der", "die", "das", "am", "im", "bei", "und", "an", "mit", "nach"];

const UNITS: &[&str] = &["bar", "Grad", "mm", "Ampere", "Liter"];

const AREAS: &[&str] = &["", "Ost", "West", "Nord", "Süd"];
const PREFIXES: &[&str] = &["Haupt", "Neben", "Kühl", "Speise", "Vor", "Nach", "Rück", "Zwischen"];
const BASES: &[&str] = &[
    "pumpe", "reaktor", "kessel", "behälter", "verdichter", "kolonne", "tank", "wärmetauscher",
    "trockner", "mischer",
];

const ID_LETTERS: &[char] = &['R', 'P', 'V', 'K', 'B', 'T', 'W', 'M'];

/// Prefix of synthetic long functional-location IDs.
pub const LONG_ID_PREFIX: &str = "PLANT1-";

const ASSESSORS: [&str; 2] = ["assessor-a", "assessor-b"];

/// A generated collection with queries and graded relevance by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBenchmark {
    pub records: Vec<Record>,
    pub dictionary: Vec<FunctionalLocationEntry>,
    /// `(query_id, query_text)` pairs.
    pub queries: Vec<(String, String)>,
    /// Fused grades: two simulated assessors, each voting on the term and the
    /// phrase level, so grades range from 0 to 4.
    pub truth: QrelSet,
    /// The simulated votes `truth` was fused from.
    pub judgments: Vec<FeedbackEvent>,
    /// Inflected form to canonical form for every concept word.
    pub lemmas: BTreeMap<String, String>,
}

impl SyntheticBenchmark {
    pub fn dictionary(&self) -> Dictionary {
        Dictionary::new(self.dictionary.clone())
    }

    /// Default German stopwords plus the generated lemma table.
    pub fn normalization(&self) -> NormalizationConfig {
        NormalizationConfig::default().with_lemmas(self.lemmas.clone())
    }

    pub fn query_text(&self, query_id: &str) -> Option<&str> {
        self.queries
            .iter()
            .find(|(id, _)| id == query_id)
            .map(|(_, text)| text.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LocForm {
    Short,
    Long,
    Desc,
}

#[derive(Debug, Clone)]
enum Slot {
    Concept(usize, String),
    Loc(usize, LocForm),
    Word(String),
}

#[derive(Debug, Clone, Default)]
struct Draft {
    attributes: Vec<usize>,
    /// Title, "befund" and "massnahme".
    fields: [Vec<Slot>; 3],
}

impl Draft {
    fn has_concept(&self, c: usize) -> bool {
        self.slots().any(|s| matches!(s, Slot::Concept(x, _) if *x == c))
    }

    fn has_loc_text(&self, loc: usize, forms: &[LocForm]) -> bool {
        self.slots()
            .any(|s| matches!(s, Slot::Loc(l, f) if *l == loc && forms.contains(f)))
    }

    fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.fields.iter().flatten()
    }

    /// All `concepts` in consecutive slots of a single field.
    fn has_phrase(&self, concepts: &[usize]) -> bool {
        let want: BTreeSet<usize> = concepts.iter().copied().collect();
        let k = concepts.len();
        self.fields.iter().any(|f| {
            f.windows(k).any(|w| {
                let got: BTreeSet<usize> = w
                    .iter()
                    .filter_map(|s| match s {
                        Slot::Concept(c, _) => Some(*c),
                        _ => None,
                    })
                    .collect();
                got == want && w.iter().all(|s| matches!(s, Slot::Concept(..)))
            })
        })
    }

    fn insert_random(&mut self, rng: &mut ChaCha8Rng, field: usize, slot: Slot) {
        let f = &mut self.fields[field];
        let pos = rng.random_range(0..=f.len());
        f.insert(pos, slot);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QueryLoc {
    Desc,
    Short,
}

#[derive(Debug, Clone)]
struct QuerySpec {
    id: String,
    concepts: Vec<usize>,
    loc: Option<(usize, QueryLoc)>,
    text: String,
}

struct Vocabulary {
    shortenings: Vec<Vec<String>>,
    locations: Vec<FunctionalLocationEntry>,
}

impl Vocabulary {
    fn concept_surface(&self, rng: &mut ChaCha8Rng, c: usize) -> String {
        let roll: f64 = rng.random();
        if roll < 0.35 {
            CONCEPTS[c].0.to_string()
        } else if roll < 0.65 {
            CONCEPTS[c].1.to_string()
        } else {
            self.shortenings[c].choose(rng).expect("non-empty").clone()
        }
    }

    fn loc_surface(&self, loc: usize, form: LocForm) -> &str {
        let e = &self.locations[loc];
        match form {
            LocForm::Short => &e.short_id,
            LocForm::Long => &e.long_id,
            LocForm::Desc => &e.description,
        }
    }
}

fn truncate_chars(word: &str, len: usize) -> String {
    word.chars().take(len).collect()
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Truncation plus trailing dot, keeping between 40% and 70% of the word
/// (at least four characters).
fn shorten(rng: &mut ChaCha8Rng, word: &str) -> String {
    let n = word.chars().count();
    let lo = 4.max(n * 2 / 5).min(n.saturating_sub(1).max(1));
    let hi = (n * 7 / 10).clamp(lo, n.saturating_sub(1).max(lo));
    let len = rng.random_range(lo..=hi);
    format!("{}.", truncate_chars(word, len))
}

fn concept_shortenings(rng: &mut ChaCha8Rng, c: usize) -> Vec<String> {
    let (canonical, _, parts) = CONCEPTS[c];
    let mut out = BTreeSet::new();
    out.insert(shorten(rng, canonical));
    if let Some((head, tail)) = parts.split_once('|') {
        let h = rng.random_range(3..=4.min(head.chars().count()));
        let t = rng.random_range(3..=5.min(tail.chars().count()));
        out.insert(format!(
            "{}.{}.",
            truncate_chars(head, h),
            truncate_chars(&capitalize(tail), t)
        ));
    } else {
        out.insert(shorten(rng, canonical));
    }
    out.into_iter().collect()
}

fn make_locations(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<FunctionalLocationEntry>, CorpusError> {
    let mut descriptions: Vec<String> = AREAS
        .iter()
        .flat_map(|a| {
            PREFIXES
                .iter()
                .flat_map(move |p| BASES.iter().map(move |b| capitalize(&format!("{a}{p}{b}"))))
        })
        .collect();
    if n > descriptions.len() {
        return Err(CorpusError::InvalidArgument(format!(
            "at most {} synthetic locations are supported, got {n}",
            descriptions.len()
        )));
    }
    // Plain names first so small dictionaries stay readable.
    let plain = PREFIXES.len() * BASES.len();
    descriptions[..plain].shuffle(rng);
    descriptions[plain..].shuffle(rng);

    let mut short_ids = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    for description in descriptions.into_iter().take(n) {
        let short_id = loop {
            let letter = *ID_LETTERS.choose(rng).expect("non-empty");
            let id = if rng.random_bool(0.5) {
                format!("{letter}{}.{:02}", rng.random_range(100..1000), rng.random_range(1..100))
            } else {
                format!("{letter}{}", rng.random_range(1000..10000))
            };
            if short_ids.insert(id.clone()) {
                break id;
            }
        };
        out.push(FunctionalLocationEntry::new(
            format!("{LONG_ID_PREFIX}{short_id}"),
            short_id,
            description,
        ));
    }
    Ok(out)
}

fn make_queries(rng: &mut ChaCha8Rng, n: usize, vocab: &Vocabulary) -> Vec<QuerySpec> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = match rng.random::<f64>() {
            x if x < 0.15 => 1,
            x if x < 0.65 => 2,
            _ => 3,
        };
        let mut concepts: Vec<usize> = (0..CONCEPTS.len()).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
        let loc = match rng.random::<f64>() {
            x if x < 0.4 => Some((rng.random_range(0..vocab.locations.len()), QueryLoc::Desc)),
            x if x < 0.7 => Some((rng.random_range(0..vocab.locations.len()), QueryLoc::Short)),
            _ => None,
        };
        let mut key = concepts.clone();
        key.sort_unstable();
        if !seen.insert((key, loc.map(|(l, _)| l))) {
            continue;
        }
        concepts.shuffle(rng);

        let mut words: Vec<String> = Vec::new();
        for (i, &c) in concepts.iter().enumerate() {
            if i > 0 && rng.random_bool(0.15) {
                words.push("und".into());
            }
            words.push(CONCEPTS[c].0.into());
        }
        if let Some((l, kind)) = loc {
            let e = &vocab.locations[l];
            let surface = match kind {
                QueryLoc::Desc => e.description.clone(),
                QueryLoc::Short => e.short_id.clone(),
            };
            if rng.random_bool(0.5) {
                words.insert(0, surface);
            } else {
                if rng.random_bool(0.3) {
                    words.push(["am", "an der", "im", "bei"].choose(rng).expect("non-empty").to_string());
                }
                words.push(surface);
            }
        }
        out.push(QuerySpec {
            id: format!("q{:03}", out.len() + 1),
            concepts,
            loc,
            text: words.join(" "),
        });
    }
    out
}

fn add_noise(rng: &mut ChaCha8Rng, d: &mut Draft) {
    for _ in 0..rng.random_range(1..=3) {
        let w = FILLERS.choose(rng).expect("non-empty").to_string();
        d.insert_random(rng, 0, Slot::Word(w));
    }
    for _ in 0..rng.random_range(2..=9) {
        let w = if rng.random_bool(0.25) {
            FILLER_STOPWORDS.choose(rng)
        } else {
            FILLERS.choose(rng)
        };
        d.insert_random(rng, 1, Slot::Word(w.expect("non-empty").to_string()));
    }
    if rng.random_bool(0.5) {
        for _ in 0..rng.random_range(1..=5) {
            let w = FILLERS.choose(rng).expect("non-empty").to_string();
            d.insert_random(rng, 2, Slot::Word(w));
        }
    }
    if rng.random_bool(0.4) {
        let value = if rng.random_bool(0.5) {
            rng.random_range(1..200).to_string()
        } else {
            format!("{}.{}", rng.random_range(0..20), rng.random_range(0..10))
        };
        let field = rng.random_range(1..=2);
        let unit = UNITS.choose(rng).expect("non-empty").to_string();
        let f = &mut d.fields[field];
        let pos = rng.random_range(0..=f.len());
        f.insert(pos, Slot::Word(unit));
        f.insert(pos, Slot::Word(value));
    }
}

fn place_location(rng: &mut ChaCha8Rng, d: &mut Draft, loc: usize, form: Option<LocForm>) {
    match form {
        None => d.attributes.push(loc),
        Some(form) => {
            if rng.random_bool(0.3) {
                d.attributes.push(loc);
            }
            let field = rng.random_range(0..=1);
            d.insert_random(rng, field, Slot::Loc(loc, form));
        }
    }
}

fn query_loc_form(rng: &mut ChaCha8Rng, kind: QueryLoc) -> Option<LocForm> {
    let roll: f64 = rng.random();
    match kind {
        QueryLoc::Desc if roll < 0.4 => None,
        QueryLoc::Desc if roll < 0.65 => Some(LocForm::Short),
        QueryLoc::Desc if roll < 0.85 => Some(LocForm::Desc),
        QueryLoc::Desc => Some(LocForm::Long),
        QueryLoc::Short if roll < 0.5 => None,
        QueryLoc::Short if roll < 0.85 => Some(LocForm::Short),
        QueryLoc::Short => Some(LocForm::Long),
    }
}

/// A record holding `concepts`, contiguous in one field half of the time.
fn concept_draft(rng: &mut ChaCha8Rng, vocab: &Vocabulary, concepts: &[usize]) -> Draft {
    let mut d = Draft::default();
    add_noise(rng, &mut d);
    let slots: Vec<Slot> = concepts
        .iter()
        .map(|&c| Slot::Concept(c, vocab.concept_surface(rng, c)))
        .collect();
    if rng.random_bool(0.5) {
        let field = if rng.random_bool(0.4) { 0 } else { 1 };
        let f = &mut d.fields[field];
        let pos = rng.random_range(0..=f.len());
        f.splice(pos..pos, slots);
    } else {
        for s in slots {
            let field = rng.random_range(0..=2);
            d.insert_random(rng, field, s);
        }
    }
    d
}

fn planted(rng: &mut ChaCha8Rng, vocab: &Vocabulary, q: &QuerySpec) -> Draft {
    let mut d = concept_draft(rng, vocab, &q.concepts);
    match q.loc {
        Some((loc, kind)) => {
            let form = query_loc_form(rng, kind);
            place_location(rng, &mut d, loc, form);
        }
        None => {
            if rng.random_bool(0.85) {
                d.attributes.push(rng.random_range(0..vocab.locations.len()));
            }
        }
    }
    d
}

/// Almost relevant: one concept missing, or the right concepts at another
/// location.
fn near_miss(rng: &mut ChaCha8Rng, vocab: &Vocabulary, q: &QuerySpec) -> Draft {
    let n_loc = vocab.locations.len();
    let drop_concept = q.concepts.len() > 1 && (q.loc.is_none() || rng.random_bool(0.5));
    if drop_concept {
        let mut concepts = q.concepts.clone();
        concepts.remove(rng.random_range(0..concepts.len()));
        let mut d = concept_draft(rng, vocab, &concepts);
        match q.loc {
            Some((loc, kind)) => {
                let form = query_loc_form(rng, kind);
                place_location(rng, &mut d, loc, form);
            }
            None => d.attributes.push(rng.random_range(0..n_loc)),
        }
        d
    } else {
        let mut d = concept_draft(rng, vocab, &q.concepts);
        let other = match q.loc {
            Some((loc, _)) => (loc + rng.random_range(1..n_loc)) % n_loc,
            None => rng.random_range(0..n_loc),
        };
        d.attributes.push(other);
        d
    }
}

fn background(rng: &mut ChaCha8Rng, vocab: &Vocabulary) -> Draft {
    let k = match rng.random::<f64>() {
        x if x < 0.1 => 0,
        x if x < 0.7 => 1,
        _ => 2,
    };
    let concepts: Vec<usize> = (0..CONCEPTS.len()).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
    let mut d = concept_draft(rng, vocab, &concepts);
    let loc = rng.random_range(0..vocab.locations.len());
    match rng.random::<f64>() {
        x if x < 0.7 => d.attributes.push(loc),
        x if x < 0.85 => place_location(rng, &mut d, loc, Some(LocForm::Short)),
        x if x < 0.9 => place_location(rng, &mut d, loc, Some(LocForm::Desc)),
        _ => {}
    }
    d
}

fn render(vocab: &Vocabulary, slots: &[Slot]) -> String {
    slots
        .iter()
        .map(|s| match s {
            Slot::Concept(_, surface) | Slot::Word(surface) => surface.as_str(),
            Slot::Loc(l, form) => vocab.loc_surface(*l, *form),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Term-level and phrase-level votes of one assessor. Assessor A accepts a
/// location that is only attached as an attribute for description queries;
/// assessor B wants it mentioned in the text. Short-ID queries need the ID
/// itself (attribute, short or long form), not the description.
fn votes(d: &Draft, q: &QuerySpec, lenient: bool) -> (bool, bool) {
    let concepts_ok = q.concepts.iter().all(|&c| d.has_concept(c));
    let loc_ok = match q.loc {
        None => true,
        Some((loc, QueryLoc::Short)) => {
            d.attributes.contains(&loc) || d.has_loc_text(loc, &[LocForm::Short, LocForm::Long])
        }
        Some((loc, QueryLoc::Desc)) => {
            d.has_loc_text(loc, &[LocForm::Short, LocForm::Long, LocForm::Desc])
                || (lenient && d.attributes.contains(&loc))
        }
    };
    let term = concepts_ok && loc_ok;
    (term, term && d.has_phrase(&q.concepts))
}

fn in_pool(d: &Draft, q: &QuerySpec) -> bool {
    q.concepts.iter().any(|&c| d.has_concept(c))
        || q.loc.is_some_and(|(loc, _)| {
            d.attributes.contains(&loc) || d.has_loc_text(loc, &[LocForm::Short, LocForm::Long, LocForm::Desc])
        })
}

/// Generates a benchmark of `n_records` records over `n_locations`
/// functional locations with `n_records / 10` queries. The output is a pure
/// function of the arguments.
pub fn generate_synthetic_corpus(
    seed: u64,
    n_records: usize,
    n_locations: usize,
) -> Result<SyntheticBenchmark, CorpusError> {
    if n_records < 10 {
        return Err(CorpusError::InvalidArgument(format!(
            "synthetic corpora need at least 10 records, got {n_records}"
        )));
    }
    if n_locations < 2 {
        return Err(CorpusError::InvalidArgument(format!(
            "synthetic corpora need at least 2 locations, got {n_locations}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shortenings = (0..CONCEPTS.len()).map(|c| concept_shortenings(&mut rng, c)).collect();
    let locations = make_locations(&mut rng, n_locations)?;
    let vocab = Vocabulary {
        shortenings,
        locations,
    };
    let queries = make_queries(&mut rng, n_records / 10, &vocab);

    let mut drafts = Vec::with_capacity(n_records);
    for q in &queries {
        for _ in 0..rng.random_range(3..=6) {
            drafts.push(planted(&mut rng, &vocab, q));
        }
        for _ in 0..rng.random_range(2..=3) {
            drafts.push(near_miss(&mut rng, &vocab, q));
        }
    }
    while drafts.len() < n_records {
        drafts.push(background(&mut rng, &vocab));
    }
    drafts.shuffle(&mut rng);

    const START: i64 = 1_546_300_800;
    const SPAN: i64 = 3 * 365 * 86_400;
    let width = n_records.to_string().len().max(4);
    let records: Vec<Record> = drafts
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let [title, befund, massnahme] = &d.fields;
            let mut body = vec![Field::new("befund", render(&vocab, befund))];
            body.push(Field::new("massnahme", render(&vocab, massnahme)));
            Record {
                id: format!("r{:0width$}", i + 1),
                timestamp: START + rng.random_range(0..SPAN),
                attributes: d
                    .attributes
                    .iter()
                    .map(|&l| vocab.locations[l].long_id.clone())
                    .collect(),
                title: render(&vocab, title),
                body,
            }
        })
        .collect();

    let mut judgments = Vec::new();
    let mut clock: i64 = 1_700_000_000_000;
    for q in &queries {
        for (d, r) in drafts.iter().zip(&records) {
            if !in_pool(d, q) {
                continue;
            }
            for (assessor, lenient) in [(ASSESSORS[0], true), (ASSESSORS[1], false)] {
                let (term, phrase) = votes(d, q, lenient);
                for (level, relevant) in [(Level::Term, term), (Level::Phrase, phrase)] {
                    let mut vote = |relevant: bool| {
                        clock += 1000;
                        judgments.push(FeedbackEvent {
                            assessor_id: assessor.to_string(),
                            query_id: q.id.clone(),
                            record_id: r.id.clone(),
                            level,
                            relevant,
                            timestamp: clock,
                            plan_id: Some("synthetic".into()),
                        });
                    };
                    // Occasionally a vote is corrected later.
                    if rng.random_bool(0.03) {
                        vote(!relevant);
                    }
                    vote(relevant);
                }
            }
        }
    }
    let truth = fuse_votes(&judgments);

    let lemmas = CONCEPTS
        .iter()
        .map(|&(canonical, inflected, _)| (inflected.to_string(), canonical.to_string()))
        .collect();
    Ok(SyntheticBenchmark {
        records,
        dictionary: vocab.locations,
        queries: queries.into_iter().map(|q| (q.id, q.text)).collect(),
        truth,
        judgments,
        lemmas,
    })
}

/// A word, a truncation-plus-dot shortening of it, and an unrelated word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShorteningPair {
    pub full: String,
    pub shortening: String,
    pub unrelated: String,
}

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w", "z", "st", "sch", "br",
    "kr", "pf", "tr", "gr", "fl",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ä", "ö", "ü", "ei", "au"];
const CODAS: &[&str] = &["", "", "n", "r", "l", "s", "t", "ng", "ch", "ck", "nd"];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(3..=5);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS.choose(rng).expect("non-empty"));
        w.push_str(NUCLEI.choose(rng).expect("non-empty"));
        w.push_str(CODAS.choose(rng).expect("non-empty"));
    }
    capitalize(&w)
}

/// `n` random German-like compounds with a shortening and an unrelated word
/// each. Deterministic for a fixed seed.
pub fn shortening_pairs(seed: u64, n: usize) -> Vec<ShorteningPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let full = pseudo_word(&mut rng);
            let shortening = shorten(&mut rng, &full);
            let unrelated = loop {
                let w = pseudo_word(&mut rng);
                if w != full {
                    break w;
                }
            };
            ShorteningPair {
                full,
                shortening,
                unrelated,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = generate_synthetic_corpus(7, 100, 10).unwrap();
        let b = generate_synthetic_corpus(7, 100, 10).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(8, 100, 10).unwrap();
        assert_ne!(
            a.records.iter().map(Record::text).collect::<Vec<_>>(),
            c.records.iter().map(Record::text).collect::<Vec<_>>()
        );
    }

    #[test]
    fn every_query_has_a_relevant_record() {
        let b = generate_synthetic_corpus(3, 300, 12).unwrap();
        assert_eq!(b.records.len(), 300);
        assert_eq!(b.queries.len(), 30);
        assert_eq!(b.dictionary.len(), 12);
        let ids: BTreeSet<&str> = b.records.iter().map(|r| r.id.as_str()).collect();
        for (qid, _) in &b.queries {
            let grades = b.truth.query(qid).expect("judged");
            assert!(grades.values().any(|&g| g > 0), "{qid}");
            assert!(grades.keys().all(|d| ids.contains(d.as_str())));
            assert!(grades.values().all(|&g| g <= 4));
        }
    }

    #[test]
    fn mixes_surface_forms() {
        let b = generate_synthetic_corpus(7, 200, 8).unwrap();
        let text: String = b.records.iter().map(|r| r.text() + "\n").collect();
        assert!(text.contains("Leckage") || text.contains("Ventil"));
        assert!(text.contains(LONG_ID_PREFIX));
        assert!(b.lemmas.keys().any(|inflected| text.contains(inflected.as_str())));
        assert!(text.split_whitespace().any(|w| w.ends_with('.') && w.len() > 3));
        assert!(text.split_whitespace().any(|w| w.chars().all(|c| c.is_ascii_digit())));
    }

    #[test]
    fn preconditions() {
        assert!(generate_synthetic_corpus(1, 9, 5).is_err());
        assert!(generate_synthetic_corpus(1, 10, 1).is_err());
        assert!(generate_synthetic_corpus(1, 10, 2).is_ok());
        assert!(generate_synthetic_corpus(1, 1000, 401).is_err());
    }

    #[test]
    fn shortenings_are_prefixes() {
        for p in shortening_pairs(11, 50) {
            let stem = p.shortening.trim_end_matches('.');
            assert!(p.full.starts_with(stem));
            assert!(stem.chars().count() >= 4);
            assert_ne!(p.full, p.unrelated);
        }
    }
}
