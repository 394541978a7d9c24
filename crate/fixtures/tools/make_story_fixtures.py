"""Regenerate the 40-story fixture corpus, its CoNLL-U parses and the toy
emotion lexicon. Output is deterministic; the committed files are the
reference and tests never call this script."""

import csv
import os
import random

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

PROMPTS = [
    ("stamp", "letter", "send"),
    ("gloom", "payment", "exist"),
    ("organ", "empire", "comply"),
    ("statement", "stealth", "detect"),
    ("belief", "faith", "sing"),
    ("petrol", "diesel", "pump"),
    ("year", "week", "embark"),
]

LEXICON = {
    "joy": ["happy", "smile", "celebrate", "sing", "gift"],
    "trust": ["faith", "friend", "belief", "promise", "honest"],
    "fear": ["dark", "danger", "scream", "hide", "stealth"],
    "surprise": ["sudden", "discover", "shock", "wonder", "detect"],
    "sadness": ["gloom", "cry", "lonely", "lose", "grief"],
    "disgust": ["rotten", "filth", "vomit", "mud", "foul"],
    "anger": ["rage", "shout", "fight", "payment", "storm"],
    "anticipation": ["embark", "plan", "hope", "journey", "await"],
}
POSITIVE = {"joy", "trust", "anticipation"}
EMOTIONS = ["anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust"]

VERBS = {
    "send": "sent", "exist": "existed", "comply": "complied", "detect": "detected",
    "sing": "sang", "pump": "pumped", "embark": "embarked", "see": "saw",
    "find": "found", "love": "loved", "hate": "hated", "celebrate": "celebrated",
    "hide": "hid", "fight": "fought", "discover": "discovered", "lose": "lost",
    "shout": "shouted", "await": "awaited", "promise": "promised", "carry": "carried",
    "open": "opened", "watch": "watched", "plan": "planned", "cry": "cried",
}
PLAIN_NOUNS = ["town", "village", "dog", "river", "house", "road", "market", "night",
               "garden", "king", "child", "teacher", "ship", "window", "box", "lamp"]
RICH_NOUNS = ["friend", "gift", "danger", "storm", "mud", "grief", "journey", "plan",
              "hope", "filth", "shock", "wonder", "rage", "smile", "scream"]
PLAIN_ADJ = ["old", "small", "quiet", "red", "bright", "long"]
RICH_ADJ = ["happy", "dark", "lonely", "rotten", "foul", "honest", "sudden"]
PLAIN_VERBS = ["see", "find", "open", "watch", "carry", "send"]
RICH_VERBS = ["love", "hate", "celebrate", "hide", "fight", "discover", "lose", "shout",
              "await", "promise", "plan", "cry"]
ADVERBS = ["quickly", "slowly", "suddenly", "quietly", "happily", "finally"]
NAMES = ["Anna", "Peter", "Maria", "Tom", "Lena", "Omar"]
NEGATABLE = ["love", "hate", "find", "lose", "open"]


def tok(form, lemma, upos, head, rel):
    return [form, lemma, upos, head, rel]


def pick(rng, plain, rich, q):
    return rng.choice(rich if rng.random() < q else plain)


def pattern_a(rng, q, subj=None, obj=None, verb=None):
    """The ADJ NOUN VERBed the NOUN ."""
    subj = subj or pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    obj = obj or pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    verb = verb or pick(rng, PLAIN_VERBS, RICH_VERBS, q)
    adj = pick(rng, PLAIN_ADJ, RICH_ADJ, q)
    return [
        tok("the", "the", "DET", 3, "det"),
        tok(adj, adj, "ADJ", 3, "amod"),
        tok(subj, subj, "NOUN", 4, "nsubj"),
        tok(VERBS[verb], verb, "VERB", 0, "root"),
        tok("the", "the", "DET", 6, "det"),
        tok(obj, obj, "NOUN", 4, "obj"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]


def pattern_b(rng, q, obj=None, verb=None):
    """NAME VERBed the NOUN with a ADJ NOUN ."""
    name = rng.choice(NAMES)
    obj = obj or pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    verb = verb or pick(rng, PLAIN_VERBS, RICH_VERBS, q)
    adj = pick(rng, PLAIN_ADJ, RICH_ADJ, q)
    noun = pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    return [
        tok(name, name, "PROPN", 2, "nsubj"),
        tok(VERBS[verb], verb, "VERB", 0, "root"),
        tok("the", "the", "DET", 4, "det"),
        tok(obj, obj, "NOUN", 2, "obj"),
        tok("with", "with", "ADP", 8, "case"),
        tok("a", "a", "DET", 8, "det"),
        tok(adj, adj, "ADJ", 8, "amod"),
        tok(noun, noun, "NOUN", 2, "obl"),
        tok(".", ".", "PUNCT", 2, "punct"),
    ]


def pattern_c(rng, q):
    """NAME did not VERB the ADJ NOUN ."""
    name = rng.choice(NAMES)
    verb = rng.choice(NEGATABLE)
    adj = pick(rng, PLAIN_ADJ, RICH_ADJ, q)
    noun = pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    return [
        tok(name, name, "PROPN", 4, "nsubj"),
        tok("did", "do", "AUX", 4, "aux"),
        tok("not", "not", "PART", 4, "advmod"),
        tok(verb, verb, "VERB", 0, "root"),
        tok("the", "the", "DET", 7, "det"),
        tok(adj, adj, "ADJ", 7, "amod"),
        tok(noun, noun, "NOUN", 4, "obj"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]


def pattern_d(rng, q, subj=None):
    """The NOUN VERBed ADV in the ADJ NOUN ."""
    subj = subj or pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    verb = pick(rng, PLAIN_VERBS, RICH_VERBS, q)
    adv = rng.choice(ADVERBS)
    adj = pick(rng, PLAIN_ADJ, RICH_ADJ, q)
    noun = pick(rng, PLAIN_NOUNS, RICH_NOUNS, q)
    return [
        tok("the", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 3, "nsubj"),
        tok(VERBS[verb], verb, "VERB", 0, "root"),
        tok(adv, adv, "ADV", 3, "advmod"),
        tok("in", "in", "ADP", 8, "case"),
        tok("the", "the", "DET", 8, "det"),
        tok(adj, adj, "ADJ", 8, "amod"),
        tok(noun, noun, "NOUN", 3, "obl"),
        tok(".", ".", "PUNCT", 3, "punct"),
    ]


def render(tokens):
    out = ""
    for i, t in enumerate(tokens):
        form = t[0]
        if i == 0:
            form = form[0].upper() + form[1:]
        if i > 0 and t[2] != "PUNCT":
            out += " "
        out += form
    return out


def story(rng, n_sentences, q, triplet):
    a, b, c = triplet
    sents = [pattern_b(rng, q, obj=a, verb=c), pattern_a(rng, q, obj=b)]
    makers = [pattern_a, pattern_b, pattern_c, pattern_d]
    while len(sents) < n_sentences:
        sents.append(rng.choice(makers)(rng, q))
    return sents


def conllu(story_id, sents):
    lines = []
    for k, toks in enumerate(sents, 1):
        lines.append(f"# sent_id = {story_id}-{k}")
        lines.append(f"# text = {render(toks)}")
        for i, (form, lemma, upos, head, rel) in enumerate(toks, 1):
            if i == 1:
                form = form[0].upper() + form[1:]
            lines.append(f"{i}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
        lines.append("")
    return "\n".join(lines) + "\n"


def ratings(rng, q, author):
    out = []
    for _ in range(4):
        s = round(1 + 4 * q + rng.gauss(0, 0.6))
        lo = 3 if author == "llm" else 1
        out.append(max(lo, min(5, s)))
    return out


def main():
    rng = random.Random(20240617)
    rows = []
    parse_dir = os.path.join(ROOT, "corpus", "conllu")
    os.makedirs(parse_dir, exist_ok=True)
    for i in range(40):
        author = "human" if i < 20 else "llm"
        sid = f"{'h' if author == 'human' else 'g'}{i % 20 + 1:02d}"
        triplet = PROMPTS[i % 7]
        q = (i % 20) / 19
        n = rng.choice([4, 5]) if author == "human" else rng.choice([6, 7])
        sents = story(rng, n, q, triplet)
        text = " ".join(render(s) for s in sents)
        with open(os.path.join(parse_dir, f"{sid}.conllu"), "w") as f:
            f.write(conllu(sid, sents))
        rows.append([sid, author, *triplet, text, *ratings(rng, q, author)])
    with open(os.path.join(ROOT, "corpus", "stories.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["story_id", "author", "prompt1", "prompt2", "prompt3", "text",
                    "rater1", "rater2", "rater3", "rater4"])
        w.writerows(rows)
    with open(os.path.join(ROOT, "lexicon", "toy_emotions.tsv"), "w") as f:
        f.write("# word<TAB>category<TAB>flag; 40 words, 5 per emotion, every prior 1/8\n")
        for emotion in EMOTIONS:
            for word in LEXICON[emotion]:
                for cat in EMOTIONS:
                    f.write(f"{word}\t{cat}\t{int(cat == emotion)}\n")
                f.write(f"{word}\tpositive\t{int(emotion in POSITIVE)}\n")
                f.write(f"{word}\tnegative\t{int(emotion not in POSITIVE)}\n")


if __name__ == "__main__":
    main()
