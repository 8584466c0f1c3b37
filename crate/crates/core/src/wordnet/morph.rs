//! Rule-based morphology: WordNet-style suffix detachment for lookups and
//! inflection of replacement verbs to match an original surface form.

use super::PosCategory;

/// (suffix, replacement) pairs tried in order, as in WordNet's morphy.
pub(crate) fn detachment_rules(pos: PosCategory) -> &'static [(&'static str, &'static str)] {
    match pos {
        PosCategory::Noun => &[
            ("s", ""),
            ("ses", "s"),
            ("xes", "x"),
            ("zes", "z"),
            ("ches", "ch"),
            ("shes", "sh"),
            ("men", "man"),
            ("ies", "y"),
        ],
        PosCategory::Verb => &[
            ("s", ""),
            ("ies", "y"),
            ("es", "e"),
            ("es", ""),
            ("ed", "e"),
            ("ed", ""),
            ("ing", "e"),
            ("ing", ""),
        ],
        PosCategory::Adjective => &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
        PosCategory::Adverb => &[],
    }
}

/// Candidate base forms for `word` under `pos`, most specific first. The
/// word itself is always the first candidate. Stems left with a doubled
/// final consonant ("runn" from "running") also yield the undoubled stem.
pub(crate) fn detach(word: &str, pos: PosCategory) -> Vec<String> {
    let mut out = vec![word.to_string()];
    for &(suffix, replacement) in detachment_rules(pos) {
        if let Some(stem) = word.strip_suffix(suffix) {
            if stem.is_empty() {
                continue;
            }
            let base = format!("{stem}{replacement}");
            push_unique(&mut out, base);
            if replacement.is_empty() && pos == PosCategory::Verb && has_doubled_final_consonant(stem) {
                push_unique(&mut out, stem[..stem.len() - 1].to_string());
            }
        }
    }
    out
}

fn push_unique(out: &mut Vec<String>, s: String) {
    if !out.contains(&s) {
        out.push(s);
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn has_doubled_final_consonant(stem: &str) -> bool {
    let b = stem.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] && !is_vowel(b[b.len() - 1] as char) && b[b.len() - 1] != b's'
}

/// Whether a surface form carries verbal inflection (-s, -ed, -ing) or is a
/// known irregular past form.
pub fn has_verbal_morphology(surface: &str) -> bool {
    let w = surface.to_lowercase();
    w.ends_with("ing") || w.ends_with("ed") || (w.ends_with('s') && !w.ends_with("ss")) || irregular_by_past(&w).is_some()
}

/// base, past, past participle
pub(crate) const IRREGULAR_VERBS: &[(&str, &str, &str)] = &[
    ("arise", "arose", "arisen"),
    ("awake", "awoke", "awoken"),
    ("be", "was", "been"),
    ("bear", "bore", "borne"),
    ("beat", "beat", "beaten"),
    ("become", "became", "become"),
    ("begin", "began", "begun"),
    ("bend", "bent", "bent"),
    ("bet", "bet", "bet"),
    ("bid", "bid", "bid"),
    ("bind", "bound", "bound"),
    ("bite", "bit", "bitten"),
    ("bleed", "bled", "bled"),
    ("blow", "blew", "blown"),
    ("break", "broke", "broken"),
    ("breed", "bred", "bred"),
    ("bring", "brought", "brought"),
    ("broadcast", "broadcast", "broadcast"),
    ("build", "built", "built"),
    ("burn", "burnt", "burnt"),
    ("burst", "burst", "burst"),
    ("buy", "bought", "bought"),
    ("cast", "cast", "cast"),
    ("catch", "caught", "caught"),
    ("choose", "chose", "chosen"),
    ("cling", "clung", "clung"),
    ("come", "came", "come"),
    ("cost", "cost", "cost"),
    ("creep", "crept", "crept"),
    ("cut", "cut", "cut"),
    ("deal", "dealt", "dealt"),
    ("dig", "dug", "dug"),
    ("dive", "dove", "dived"),
    ("do", "did", "done"),
    ("draw", "drew", "drawn"),
    ("dream", "dreamt", "dreamt"),
    ("drink", "drank", "drunk"),
    ("drive", "drove", "driven"),
    ("dwell", "dwelt", "dwelt"),
    ("eat", "ate", "eaten"),
    ("fall", "fell", "fallen"),
    ("feed", "fed", "fed"),
    ("feel", "felt", "felt"),
    ("fight", "fought", "fought"),
    ("find", "found", "found"),
    ("flee", "fled", "fled"),
    ("fling", "flung", "flung"),
    ("fly", "flew", "flown"),
    ("forbid", "forbade", "forbidden"),
    ("forecast", "forecast", "forecast"),
    ("forget", "forgot", "forgotten"),
    ("forgive", "forgave", "forgiven"),
    ("freeze", "froze", "frozen"),
    ("get", "got", "gotten"),
    ("give", "gave", "given"),
    ("go", "went", "gone"),
    ("grind", "ground", "ground"),
    ("grow", "grew", "grown"),
    ("hang", "hung", "hung"),
    ("have", "had", "had"),
    ("hear", "heard", "heard"),
    ("hide", "hid", "hidden"),
    ("hit", "hit", "hit"),
    ("hold", "held", "held"),
    ("hurt", "hurt", "hurt"),
    ("keep", "kept", "kept"),
    ("kneel", "knelt", "knelt"),
    ("know", "knew", "known"),
    ("lay", "laid", "laid"),
    ("lead", "led", "led"),
    ("lean", "leant", "leant"),
    ("leap", "leapt", "leapt"),
    ("learn", "learnt", "learnt"),
    ("leave", "left", "left"),
    ("lend", "lent", "lent"),
    ("let", "let", "let"),
    ("lie", "lay", "lain"),
    ("light", "lit", "lit"),
    ("lose", "lost", "lost"),
    ("make", "made", "made"),
    ("mean", "meant", "meant"),
    ("meet", "met", "met"),
    ("mislead", "misled", "misled"),
    ("mistake", "mistook", "mistaken"),
    ("overcome", "overcame", "overcome"),
    ("overtake", "overtook", "overtaken"),
    ("pay", "paid", "paid"),
    ("prove", "proved", "proven"),
    ("put", "put", "put"),
    ("quit", "quit", "quit"),
    ("read", "read", "read"),
    ("rid", "rid", "rid"),
    ("ride", "rode", "ridden"),
    ("ring", "rang", "rung"),
    ("rise", "rose", "risen"),
    ("run", "ran", "run"),
    ("say", "said", "said"),
    ("see", "saw", "seen"),
    ("seek", "sought", "sought"),
    ("sell", "sold", "sold"),
    ("send", "sent", "sent"),
    ("set", "set", "set"),
    ("sew", "sewed", "sewn"),
    ("shake", "shook", "shaken"),
    ("shed", "shed", "shed"),
    ("shine", "shone", "shone"),
    ("shoot", "shot", "shot"),
    ("show", "showed", "shown"),
    ("shrink", "shrank", "shrunk"),
    ("shut", "shut", "shut"),
    ("sing", "sang", "sung"),
    ("sink", "sank", "sunk"),
    ("sit", "sat", "sat"),
    ("slay", "slew", "slain"),
    ("sleep", "slept", "slept"),
    ("slide", "slid", "slid"),
    ("sling", "slung", "slung"),
    ("slit", "slit", "slit"),
    ("smell", "smelt", "smelt"),
    ("sow", "sowed", "sown"),
    ("speak", "spoke", "spoken"),
    ("speed", "sped", "sped"),
    ("spell", "spelt", "spelt"),
    ("spend", "spent", "spent"),
    ("spill", "spilt", "spilt"),
    ("spin", "spun", "spun"),
    ("spit", "spat", "spat"),
    ("split", "split", "split"),
    ("spoil", "spoilt", "spoilt"),
    ("spread", "spread", "spread"),
    ("spring", "sprang", "sprung"),
    ("stand", "stood", "stood"),
    ("steal", "stole", "stolen"),
    ("stick", "stuck", "stuck"),
    ("sting", "stung", "stung"),
    ("stink", "stank", "stunk"),
    ("stride", "strode", "stridden"),
    ("strike", "struck", "struck"),
    ("string", "strung", "strung"),
    ("strive", "strove", "striven"),
    ("swear", "swore", "sworn"),
    ("sweep", "swept", "swept"),
    ("swell", "swelled", "swollen"),
    ("swim", "swam", "swum"),
    ("swing", "swung", "swung"),
    ("take", "took", "taken"),
    ("teach", "taught", "taught"),
    ("tear", "tore", "torn"),
    ("tell", "told", "told"),
    ("think", "thought", "thought"),
    ("throw", "threw", "thrown"),
    ("thrust", "thrust", "thrust"),
    ("tread", "trod", "trodden"),
    ("understand", "understood", "understood"),
    ("undertake", "undertook", "undertaken"),
    ("undo", "undid", "undone"),
    ("upset", "upset", "upset"),
    ("wake", "woke", "woken"),
    ("wear", "wore", "worn"),
    ("weave", "wove", "woven"),
    ("weep", "wept", "wept"),
    ("win", "won", "won"),
    ("wind", "wound", "wound"),
    ("withdraw", "withdrew", "withdrawn"),
    ("withhold", "withheld", "withheld"),
    ("withstand", "withstood", "withstood"),
    ("wring", "wrung", "wrung"),
    ("write", "wrote", "written"),
    ("abide", "abode", "abode"),
    ("behold", "beheld", "beheld"),
    ("beset", "beset", "beset"),
    ("bestride", "bestrode", "bestridden"),
    ("foresee", "foresaw", "foreseen"),
    ("foretell", "foretold", "foretold"),
    ("mow", "mowed", "mown"),
    ("outdo", "outdid", "outdone"),
    ("overhear", "overheard", "overheard"),
    ("oversee", "oversaw", "overseen"),
    ("rebuild", "rebuilt", "rebuilt"),
    ("redo", "redid", "redone"),
    ("rewrite", "rewrote", "rewritten"),
    ("shear", "sheared", "shorn"),
    ("shoe", "shod", "shod"),
    ("slink", "slunk", "slunk"),
    ("stave", "stove", "stove"),
    ("uphold", "upheld", "upheld"),
];

fn irregular(base: &str) -> Option<&'static (&'static str, &'static str, &'static str)> {
    IRREGULAR_VERBS.iter().find(|(b, _, _)| *b == base)
}

fn irregular_by_past(surface: &str) -> Option<&'static (&'static str, &'static str, &'static str)> {
    IRREGULAR_VERBS
        .iter()
        .find(|(b, past, part)| (*past == surface || *part == surface) && *b != surface)
}

/// Base forms for a known irregular past or participle ("took" -> "take").
pub(crate) fn irregular_bases(surface: &str) -> Vec<&'static str> {
    IRREGULAR_VERBS
        .iter()
        .filter(|(b, past, part)| (*past == surface || *part == surface) && *b != surface)
        .map(|(b, _, _)| *b)
        .collect()
}

/// Consonant-vowel-consonant ending on a one-syllable word, where the final
/// consonant doubles before a vowel suffix (run -> running, stop -> stopped).
fn doubles_final(word: &str) -> bool {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    if n < 3 {
        return false;
    }
    let (c1, v, c2) = (chars[n - 3], chars[n - 2], chars[n - 1]);
    let syllables = chars
        .iter()
        .enumerate()
        .filter(|&(i, &c)| is_vowel(c) && (i == 0 || !is_vowel(chars[i - 1])))
        .count();
    syllables == 1 && !is_vowel(c1) && is_vowel(v) && !is_vowel(c2) && !matches!(c2, 'w' | 'x' | 'y')
}

fn gerund(base: &str) -> String {
    if base == "be" {
        return "being".into();
    }
    if let Some(stem) = base.strip_suffix("ie") {
        return format!("{stem}ying");
    }
    if base.ends_with('e') && !base.ends_with("ee") && !base.ends_with("ye") && !base.ends_with("oe") && base.len() > 2 {
        return format!("{}ing", &base[..base.len() - 1]);
    }
    if doubles_final(base) {
        let last = base.chars().last().unwrap_or_default();
        return format!("{base}{last}ing");
    }
    format!("{base}ing")
}

fn regular_past(base: &str) -> String {
    if base.ends_with('e') {
        return format!("{base}d");
    }
    if let Some(stem) = base.strip_suffix('y') {
        if !stem.ends_with(is_vowel) && !stem.is_empty() {
            return format!("{stem}ied");
        }
    }
    if doubles_final(base) {
        let last = base.chars().last().unwrap_or_default();
        return format!("{base}{last}ed");
    }
    format!("{base}ed")
}

fn third_person(base: &str) -> String {
    match base {
        "be" => return "is".into(),
        "have" => return "has".into(),
        _ => {}
    }
    if let Some(stem) = base.strip_suffix('y') {
        if !stem.ends_with(is_vowel) && !stem.is_empty() {
            return format!("{stem}ies");
        }
    }
    if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| base.ends_with(s)) {
        return format!("{base}es");
    }
    format!("{base}s")
}

/// Inflects a base-form verb lemma to the tense and person of
/// `original_surface`. Multiword lemmas ("pour_out" or "pour out") inflect
/// their first word; underscores become spaces.
pub fn inflect_like(replacement_lemma: &str, original_surface: &str) -> String {
    let lemma = replacement_lemma.replace('_', " ");
    let (head, rest) = match lemma.split_once(' ') {
        Some((h, r)) => (h.to_string(), format!(" {r}")),
        None => (lemma.clone(), String::new()),
    };
    let original = original_surface.to_lowercase();
    let head_lower = head.to_lowercase();

    let inflected = if original == head_lower {
        head
    } else if original.ends_with("ing") && original.len() > 4 {
        gerund(&head_lower)
    } else if let Some(&(_, past, participle)) = irregular_by_past(&original) {
        // Keep the participle when the original was an unambiguous participle.
        let _ = past;
        let is_participle = IRREGULAR_VERBS.iter().any(|(_, p, pp)| *pp == original && *p != original);
        form_past(&head_lower, is_participle && participle == original)
    } else if original.ends_with("ed") {
        form_past(&head_lower, false)
    } else if original.ends_with('s') && !original.ends_with("ss") && original.len() > 2 {
        third_person(&head_lower)
    } else {
        head
    };
    format!("{inflected}{rest}")
}

fn form_past(base: &str, participle: bool) -> String {
    match irregular(base) {
        Some(&(_, past, part)) => (if participle { part } else { past }).to_string(),
        None => regular_past(base),
    }
}
