#!/usr/bin/env python3
"""Regenerate tests/fixtures/normalization_cases.json (200 cases, seeded).

The fixture drives the idempotence suite: every case is applied twice and
the two results must agree. Inputs mix hand-picked values with seeded
random decorations (whitespace, case, prefixes) so the file stays stable
across regenerations.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "normalization_cases.json"

rng = random.Random(20260824)

AUTHORS = [
    "Julian J. McAuley and Jure Leskovec",
    "Vaswani, Ashish and Shazeer, Noam",
    "Sánchez, María",
    "Julian McAuley, Jure Leskovec",
    "{van der Berg}, J.",
    "Smith, John and Doe, Jane and Roe, Richard",
    "Müller, Jürgen",
    "O'Brien, Patrick",
    "Li, Wei and Zhang, San",
    "Einstein, Albert et al.",
    "A. Smith and B. Jones",
    "Curie, Marie",
    "Nakamura, Shuji and Akasaki, Isamu and Amano, Hiroshi",
    "García Márquez, Gabriel",
    "de la Cruz, Juan",
    "Yamashita, Shinichi and Ito, Akihiro",
]
TITLES = [
    "Learning to Discover Social Circles in Ego Networks",
    "Attention {I}s {A}ll {Y}ou {N}eed",
    "\\textit{Deep} Learning",
    "{Learning} to {Discover} Social Circles",
    "A {Survey} of \\emph{Graph} Neural Networks",
    "Impact of relapse site on oncological outcomes",
    "Clinical implications of intravesical recurrence",
    "On the   Measure of    Intelligence",
    "BERT: Pre-training of Deep Bidirectional Transformers",
    "Quantum supremacy using a programmable superconducting processor",
    "ImageNet Classification with Deep Convolutional Neural Networks",
    "The {GAN} Zoo: {A} List of Generative Models",
]
VENUES = [
    "Proc. NeurIPS",
    "Advances in Neural Information Processing Systems",
    "NeurIPS",
    "International Journal of Urology",
    "Journal of Clinical Oncology",
    "BMJ: British Medical Journal",
    "Proceedings of the 38th International Conference on Machine Learning",
    "ICML",
    "Nature",
    "Transactions of the Association for Computational Linguistics",
    "CVPR",
    "J. Mach. Learn. Res.",
]
DOIS = [
    "10.48550/arXiv.2510.16227",
    "https://doi.org/10.1162/TACL.a.611",
    "10.1038/s41586-020-1234-5",
    "doi:10.1000/X",
    "https://dx.doi.org/10.1111/IJU.13054",
    "10.1200/jco.2016.34.2_suppl.426",
    "DOI: 10.1021/acs.chemmater.5c02918",
    "10.26434/chemrxiv-2025-90rl2",
    "http://doi.org/10.1002/adma.202001234",
    "10.1234/fake.5678",
]
PAGES = [
    "539-547",
    "548 – 556",
    "426",
    "539--547",
    "378—384",
    "1 - 10",
    "e0112358",
    "102--103",
    "426--426",
    "S12-S19",
]
YEARS = ["2012", " 2016 ", "2017", "1998", "2025", "2020 ", " 1969"]


def decorate(value: str) -> str:
    kind = rng.randrange(4)
    pad = " " * rng.randint(1, 4)
    if kind == 0:
        return f"{pad}{value}"
    if kind == 1:
        return f"{value}{pad}"
    if kind == 2:
        return value.upper() if rng.random() < 0.5 else value.lower()
    return f"{pad}{value}{pad}"


def main() -> None:
    cases = []
    pools = [
        ("author", AUTHORS),
        ("title", TITLES),
        ("venue", VENUES),
        ("doi", DOIS),
        ("pages", PAGES),
        ("year", YEARS),
    ]
    quota = {"author": 34, "title": 34, "venue": 34, "doi": 34, "pages": 34, "year": 30}
    for op, pool in pools:
        seen = set()
        for value in pool:
            cases.append({"op": op, "input": value})
            seen.add(value)
        while sum(1 for c in cases if c["op"] == op) < quota[op]:
            candidate = decorate(rng.choice(pool))
            if op == "author" and candidate != candidate.strip() and candidate.strip() == "":
                continue
            if candidate in seen:
                continue
            seen.add(candidate)
            cases.append({"op": op, "input": candidate})
    assert len(cases) == 200, len(cases)
    OUT.write_text(json.dumps({"format_version": 1, "cases": cases}, indent=1, ensure_ascii=False) + "\n", "utf-8")
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
