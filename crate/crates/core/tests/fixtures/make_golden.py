"""Regenerate golden.json from scratch, independently of the Rust code.

    python3 make_golden.py > golden.json
"""
import json
import math
import string

MASK = (1 << 64) - 1
OFFSET = 0xCBF29CE484222325
PRIME = 0x100000001B3
BUCKETS = 16384


def fnv(data, h=OFFSET):
    for b in data:
        h ^= b
        h = (h * PRIME) & MASK
    return h


def tokenize(text):
    out = []
    for t in text.lower().split():
        t = t.strip(string.punctuation)
        if t:
            out.append(t)
    return out


def unigram_bucket(tok):
    return fnv(tok.encode()) % BUCKETS


def bigram_bucket(a, b):
    return fnv(a.encode() + b"\x1f" + b.encode()) % BUCKETS


def hashed_counts(text):
    toks = tokenize(text)
    counts = {}
    for t in toks:
        k = unigram_bucket(t)
        counts[k] = counts.get(k, 0) + 1
    for a, b in zip(toks, toks[1:]):
        k = bigram_bucket(a, b)
        counts[k] = counts.get(k, 0) + 1
    return sorted(counts.items())


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def shuffle(self, items):
        for i in range(len(items) - 1, 0, -1):
            j = self.next() % (i + 1)
            items[i], items[j] = items[j], items[i]


def load_lexicon(path):
    terms = []
    for line in open(path, encoding="utf-8"):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("@version") or line.startswith("["):
            continue
        if line not in terms:
            terms.append(line)
    return terms


def oracle(lexicon, text):
    h = len(set(t for t in tokenize(text) if t in lexicon))
    return 0.02 + 0.13 * (1.0 - math.exp(-h / 4.0))


def projection(seed, i, j):
    h = fnv(seed.to_bytes(8, "little") + i.to_bytes(8, "little") + j.to_bytes(8, "little"))
    return ((h % 2001) - 1000) / 1000.0


def project(seed, text):
    out = [0.0] * 64
    for idx, c in hashed_counts(text):
        for j in range(64):
            out[j] += c * projection(seed, idx, j)
    return out


def embed(seed, anchor, text):
    v = project(seed, text)
    dot = sum(a * b for a, b in zip(v, anchor))
    na = sum(a * a for a in v)
    nb = sum(b * b for b in anchor)
    cos = 0.0 if na == 0 or nb == 0 else max(-1.0, min(1.0, dot / math.sqrt(na * nb)))
    return (1.0 + cos) / 2.0


TEXTS = [
    "pop song",
    "sad harp solo",
    "The music is bumpy and jazzy",
    "warm piano with a groovy, syncopated rhythm!",
    "Moody keyboard and drum centric pop song featuring neo-R&B chordal information",
    "cupcake",
    "",
    "a a a a",
    "jazz jazz piano",
    "(dreamy) ambient synth pads -- slow",
]


def main():
    lexicon = load_lexicon("../../resources/lexicon.txt")
    anchor = project(0, " ".join(lexicon))
    tokens = sorted(set(t for text in TEXTS for t in tokenize(text)))
    rng = SplitMix64(42)
    seq = [rng.next() for _ in range(8)]
    perm = list(range(20))
    SplitMix64(7).shuffle(perm)
    ids = ["p%04d" % (i + 1) for i in range(10)]
    SplitMix64(42).shuffle(ids)
    golden = {
        "fnv1a64": {t: fnv(t.encode()) for t in ["", "a", "foobar", "audionese"]},
        "unigram_buckets": {t: unigram_bucket(t) for t in tokens},
        "bigram_buckets": [
            [a, b, bigram_bucket(a, b)] for a, b in [("pop", "song"), ("sad", "harp"), ("harp", "solo"), ("warm", "piano")]
        ],
        "hashed_counts": [{"text": t, "counts": hashed_counts(t)} for t in TEXTS],
        "splitmix64_seed42": [str(x) for x in seq],
        "shuffle_seed7_range20": perm,
        "split_seed42_10ids_3train": {"train": ids[:3], "test": ids[3:]},
        "lexicon_terms": len(lexicon),
        "oracle": [{"text": t, "score": oracle(set(lexicon), t)} for t in TEXTS],
        "projection_seed0": [[i, j, projection(0, i, j)] for i, j in [(0, 0), (1, 2), (16383, 63), (777, 5)]],
        "embedding_seed0": [{"text": t, "score": embed(0, anchor, t)} for t in TEXTS],
    }
    print(json.dumps(golden, indent=1, ensure_ascii=False))


if __name__ == "__main__":
    main()
