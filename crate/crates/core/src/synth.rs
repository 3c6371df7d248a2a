//! Deterministic synthetic prompt corpora: short, under-specified user
//! prompts and longer descriptor-rich expert captions.

use crate::alignment::AudioneseLexicon;
use crate::corpus::{Origin, Prompt, PromptCorpus};
use crate::rng::SplitMix64;

const USER_ADJECTIVES: &[&str] = &["bumpy", "happy", "chill", "fun", "cool", "nice"];
const USER_NOUNS: &[&str] = &["song", "music", "beat"];
const USER_TOPICS: &[&str] = &["birthday", "party", "summer", "study", "workout", "night"];
/// Descriptor words casual users sometimes reach for.
const USER_DESCRIPTORS: &[&str] = &[
    "jazz", "pop", "rock", "piano", "guitar", "upbeat", "calm", "sad", "harp", "violin", "dreamy",
    "funk", "slow", "fast", "warm", "lofi", "drums", "groovy", "blues", "folk",
];
const EXPERT_WORDS: &[&str] = &[
    "chordal",
    "barbershop",
    "harmonies",
    "layered",
    "reverb",
    "arpeggiated",
    "polyrhythmic",
    "modal",
    "timbre",
    "legato",
    "crescendo",
    "ostinato",
    "falsetto",
    "vibrato",
    "counterpoint",
    "cadence",
    "riff",
    "bridge",
    "chorus",
    "verse",
    "sidechain",
    "filtered",
    "distorted",
    "glissando",
    "tremolo",
    "pizzicato",
    "syncopation",
    "backbeat",
    "walking",
    "bassline",
    "hook",
    "overdriven",
    "panned",
    "stereo",
    "lowpass",
    "sustained",
    "plucked",
    "bowed",
    "muted",
    "brushed",
    "rimshot",
    "hihat",
    "snare",
    "kick",
    "pads",
    "drone",
    "harmonic",
    "dissonant",
    "consonant",
    "minor",
    "major",
    "key",
    "chords",
    "progression",
    "neo",
    "centric",
    "texture",
    "dynamics",
    "intro",
    "outro",
    "fingerpicked",
    "strummed",
    "slapped",
    "fretless",
    "upright",
    "tenor",
    "alto",
    "soprano",
    "baritone",
    "contralto",
    "vocoder",
    "talkbox",
    "wah",
    "fuzz",
    "chorused",
    "flanged",
    "phased",
    "delayed",
    "gated",
    "compressed",
    "saturated",
    "tape",
    "vinyl",
    "crackle",
    "hiss",
    "shimmer",
    "swell",
    "fade",
    "breakdown",
    "buildup",
    "drop",
    "interlude",
    "refrain",
    "motif",
    "theme",
    "variation",
    "fugue",
    "canon",
    "suite",
    "overture",
    "coda",
    "downbeat",
    "offbeat",
    "triplet",
    "dotted",
    "polymeter",
    "rubato",
    "accelerando",
    "ritardando",
    "fermata",
    "pianissimo",
    "fortissimo",
    "mezzo",
    "sforzando",
    "portamento",
    "trill",
    "mordent",
    "appoggiatura",
    "suspension",
    "pedal",
    "inversion",
    "voicing",
    "extension",
    "ninth",
    "eleventh",
    "thirteenth",
    "diminished",
    "augmented",
    "mixolydian",
    "dorian",
    "phrygian",
    "lydian",
    "pentatonic",
    "chromatic",
    "microtonal",
    "timpani",
    "celesta",
    "marimba",
    "vibraphone",
    "glockenspiel",
    "harpsichord",
    "clavinet",
    "rhodes",
    "wurlitzer",
    "theremin",
    "sitar",
    "koto",
    "tabla",
    "djembe",
    "conga",
    "bongo",
    "cajon",
    "kalimba",
];

fn pick<'a>(rng: &mut SplitMix64, pool: &[&'a str]) -> &'a str {
    pool[rng.below(pool.len())]
}

fn pick_owned(rng: &mut SplitMix64, pool: &[String]) -> String {
    pool[rng.below(pool.len())].clone()
}

/// One short user prompt of two or three words.
pub fn user_prompt(rng: &mut SplitMix64) -> String {
    let adj = |r: &mut SplitMix64| pick(r, USER_ADJECTIVES);
    let noun = |r: &mut SplitMix64| pick(r, USER_NOUNS);
    let topic = |r: &mut SplitMix64| pick(r, USER_TOPICS);
    let desc = |r: &mut SplitMix64| pick(r, USER_DESCRIPTORS);
    match rng.below(8) {
        0 => format!("{} {}", desc(rng), noun(rng)),
        1 => format!("{} {}", adj(rng), desc(rng)),
        2 => format!("{} {} {}", adj(rng), desc(rng), noun(rng)),
        3 => format!("{} {} {}", adj(rng), adj(rng), noun(rng)),
        4 => format!("{} for {}", noun(rng), topic(rng)),
        5 => format!("{} {} {}", adj(rng), topic(rng), noun(rng)),
        6 => format!("{} {}", topic(rng), noun(rng)),
        _ => format!("{} {}", adj(rng), noun(rng)),
    }
}

/// One expert-style caption built mostly from lexicon terms and technical words.
pub fn expert_prompt(rng: &mut SplitMix64, lexicon: &AudioneseLexicon) -> String {
    let cat = |name: &str| lexicon.category(name).to_vec();
    let (inst, tone, rhythm, atmo, style) = (
        cat("instrument"),
        cat("tone"),
        cat("rhythm"),
        cat("atmosphere"),
        cat("style"),
    );
    let ex = |r: &mut SplitMix64| pick(r, EXPERT_WORDS);
    match rng.below(3) {
        0 => format!(
            "{} {} and {} centric {} featuring {} {} {}, {} {} {}",
            pick_owned(rng, &tone),
            pick_owned(rng, &inst),
            pick_owned(rng, &inst),
            pick_owned(rng, &style),
            ex(rng),
            ex(rng),
            ex(rng),
            pick_owned(rng, &atmo),
            ex(rng),
            ex(rng),
        ),
        1 => format!(
            "{} {} {}, {} {} {}, {} {} {} {}",
            pick_owned(rng, &atmo),
            pick_owned(rng, &style),
            pick_owned(rng, &inst),
            pick_owned(rng, &rhythm),
            ex(rng),
            ex(rng),
            pick_owned(rng, &tone),
            pick_owned(rng, &inst),
            ex(rng),
            ex(rng),
        ),
        _ => format!(
            "{} {} {} {} {}, {} {} {} {} {}",
            pick_owned(rng, &rhythm),
            pick_owned(rng, &tone),
            pick_owned(rng, &style),
            ex(rng),
            pick_owned(rng, &inst),
            ex(rng),
            pick_owned(rng, &atmo),
            pick_owned(rng, &inst),
            ex(rng),
            ex(rng),
        ),
    }
}

/// `n` user prompts with ids `p0001..`.
pub fn user_corpus(n: usize, seed: u64) -> PromptCorpus {
    let mut rng = SplitMix64::new(seed);
    let prompts = (0..n)
        .map(|i| {
            Prompt::new(
                format!("p{:04}", i + 1),
                user_prompt(&mut rng),
                Origin::User,
            )
        })
        .collect();
    PromptCorpus::from_prompts(prompts).expect("generated ids are unique")
}

/// `n` expert captions with ids `e0001..`.
pub fn expert_corpus(n: usize, seed: u64, lexicon: &AudioneseLexicon) -> PromptCorpus {
    let mut rng = SplitMix64::derive(seed, 1);
    let prompts = (0..n)
        .map(|i| {
            Prompt::new(
                format!("e{:04}", i + 1),
                expert_prompt(&mut rng, lexicon),
                Origin::Expert,
            )
        })
        .collect();
    PromptCorpus::from_prompts(prompts).expect("generated ids are unique")
}

/// User prompts followed by expert captions.
pub fn mixed_corpus(
    n_user: usize,
    n_expert: usize,
    seed: u64,
    lexicon: &AudioneseLexicon,
) -> PromptCorpus {
    user_corpus(n_user, seed)
        .merge(expert_corpus(n_expert, seed, lexicon))
        .expect("p/e id prefixes are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize_basic;

    #[test]
    fn deterministic_and_sized() {
        assert_eq!(user_corpus(300, 42), user_corpus(300, 42));
        assert_eq!(user_corpus(300, 42).len(), 300);
        let lex = AudioneseLexicon::default_music();
        let mixed = mixed_corpus(20, 10, 1, &lex);
        assert_eq!(mixed.len(), 30);
        assert_eq!(mixed.prompts()[25].origin, Origin::Expert);
    }

    #[test]
    fn experts_are_longer_and_richer() {
        let lex = AudioneseLexicon::default_music();
        let users = user_corpus(200, 3);
        let experts = expert_corpus(200, 3, &lex);
        let mean = |c: &PromptCorpus, f: &dyn Fn(&str) -> usize| {
            c.prompts().iter().map(|p| f(&p.text)).sum::<usize>() as f64 / c.len() as f64
        };
        let len = |t: &str| tokenize_basic(t).len();
        let hits = |t: &str| lex.distinct_hits(t);
        assert!(mean(&experts, &len) > mean(&users, &len) + 5.0);
        assert!(mean(&experts, &hits) > mean(&users, &hits) + 3.0);
    }
}
