#!/usr/bin/env python3
"""Regenerate the golden benchmark fixtures under tests/fixtures/.

Three files are produced:

  golden_corpus.jsonl     20 candidate entries over 8 papers
  golden_labels.json      hand-assigned expected label for every slot
  golden_aggregate.json   aggregate table tallied from the hand labels
                          by plain counting, independent of the package

The labels were assigned by hand while constructing each candidate and
are the oracle the pipeline is tested against; the aggregate is derived
from them with the simple counting below, never from the package.
"""

import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SLOTS = ["entry_type", "entry_key", "author", "title", "year", "venue", "volume", "number", "pages", "doi"]


def bib(entry_type, key, **fields):
    lines = [f"@{entry_type}{{{key},"]
    for name, value in fields.items():
        lines.append(f"  {name} = {{{value}}},")
    lines.append("}")
    return "\n".join(lines)


def labels(**kw):
    """Hand-assigned labels; unspecified slots are C, entry_key is X."""
    out = {s: "C" for s in SLOTS}
    out["entry_key"] = "X"
    out.update(kw)
    return out


PAPERS = []


def paper(paper_id, domain, tier, description, versions, candidates, aliases=(), meta=None):
    PAPERS.append(
        {
            "paper_id": paper_id,
            "domain": domain,
            "tier": tier,
            "description": description,
            "locations": [],
            "ground_truth": {
                "versions": versions,
                "canonical": {},
                "known_aliases": list(aliases),
            },
            "candidates": [
                {"tag": tag, "model": model, "bibtex": bibtex} for tag, model, bibtex, _, _, _ in candidates
            ],
            "meta": meta,
        }
    )
    for tag, model, _, lab, mode, stage2 in candidates:
        GOLDEN.append(
            {
                "paper_id": paper_id,
                "tag": tag,
                "model": model,
                "tier": tier,
                "domain": domain,
                "labels": lab,
                "error_mode": mode,
                "stage2_slots": sorted(stage2),
            }
        )


GOLDEN = []

# -- paper 1: proceedings paper, page-range error ----------------------------

MCAULEY_TITLE = "Learning to Discover Social Circles in Ego Networks"
MCAULEY_VENUE = "Advances in Neural Information Processing Systems 25"
paper(
    "mcauley2012",
    "ai",
    "popular",
    "the NeurIPS 2012 paper on discovering social circles in ego networks",
    versions=[
        {
            "version_type": "proceedings",
            "fields": {
                "entry_type": "inproceedings",
                "author": "Julian J. McAuley, Jure Leskovec",
                "title": MCAULEY_TITLE,
                "year": "2012",
                "venue": MCAULEY_VENUE,
                "pages": "548--556",
            },
        }
    ],
    candidates=[
        (
            "gemini-1",
            "gemini-3-flash",
            bib(
                "inproceedings",
                "mcauley2012",
                author="Julian McAuley, Jure Leskovec",
                title=MCAULEY_TITLE,
                booktitle=MCAULEY_VENUE,
                year="2012",
                pages="539--547",
            ),
            labels(volume="X", number="X", pages="F", doi="X"),
            "isolated",
            ["pages"],
        ),
        (
            "gpt-1",
            "gpt-5",
            bib(
                "inproceedings",
                "mcauley2012sc",
                author="McAuley, Julian J. and Leskovec, Jure",
                title=MCAULEY_TITLE,
                booktitle=MCAULEY_VENUE,
                year="2012",
                pages="548--556",
            ),
            labels(volume="X", number="X", doi="X"),
            "none",
            [],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "inproceedings",
                "mcauley12",
                author="McAuley, Julian J. and Leskovec, Jure",
                title=MCAULEY_TITLE,
                year="2012",
                pages="548--556",
            ),
            labels(venue="M", volume="X", number="X", doi="X"),
            "isolated",
            [],
        ),
    ],
    meta={"title": MCAULEY_TITLE},
)

# -- paper 2: wholesale substitution ------------------------------------------

YAMA_TITLE = "Impact of relapse site on oncological outcomes after radical nephroureterectomy"
ALIAS_TITLE = "Clinical implications of intravesical recurrence after radical nephroureterectomy"
paper(
    "yamashita2016",
    "medicine",
    "low_citation",
    "the 2016 JCO abstract on relapse site after radical nephroureterectomy",
    versions=[
        {
            "version_type": "journal",
            "fields": {
                "entry_type": "article",
                "author": "Yamashita, Shinichi and Ito, Akihiro",
                "title": YAMA_TITLE,
                "year": "2016",
                "venue": "Journal of Clinical Oncology",
                "volume": "34",
                "number": "2_suppl",
                "pages": "426--426",
                "doi": "10.1200/jco.2016.34.2_suppl.426",
            },
        }
    ],
    aliases=[
        {
            "title": ALIAS_TITLE,
            "venue": "International Journal of Urology",
            "doi": "10.1111/iju.13054",
        }
    ],
    candidates=[
        (
            "gpt-1",
            "gpt-5",
            bib(
                "article",
                "yamashita2016",
                author="Yamashita, Shinichi and Ito, Akihiro",
                title=ALIAS_TITLE,
                journal="International Journal of Urology",
                year="2016",
                volume="23",
                number="5",
                pages="378--384",
                doi="10.1111/iju.13054",
            ),
            labels(title="S", venue="S", volume="F", number="F", pages="F", doi="S"),
            "wholesale",
            ["title", "venue", "volume", "number", "pages", "doi"],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "article",
                "yamashita2016impact",
                author="Yamashita, Shinichi and Ito, Akihiro",
                title=YAMA_TITLE,
                journal="Journal of Clinical Oncology",
                year="2016",
                volume="34",
                number="2_suppl",
                pages="426",
                doi="10.1200/JCO.2016.34.2_suppl.426",
            ),
            labels(),
            "none",
            [],
        ),
    ],
    meta={"title": YAMA_TITLE},
)

# -- paper 3: two-version paper (arXiv + journal) ------------------------------

ATTN_TITLE = "Attention Is All You Need"
ATTN_AUTHORS = "Vaswani, Ashish and Shazeer, Noam"
paper(
    "attention2017",
    "ai",
    "popular",
    "the transformer architecture paper",
    versions=[
        {
            "version_type": "arxiv",
            "fields": {
                "entry_type": "misc",
                "author": ATTN_AUTHORS,
                "title": ATTN_TITLE,
                "year": "2017",
                "venue": "arXiv",
                "doi": "10.48550/arXiv.1706.03762",
                "eprint": "1706.03762",
            },
        },
        {
            "version_type": "journal",
            "fields": {
                "entry_type": "article",
                "author": ATTN_AUTHORS,
                "title": ATTN_TITLE,
                "year": "2018",
                "venue": "Journal of Machine Learning Research",
                "volume": "21",
                "number": "1",
                "pages": "1--15",
                "doi": "10.5555/3295222.3295349",
            },
        },
    ],
    candidates=[
        (
            "gemini-1",
            "gemini-3-flash",
            bib(
                "misc",
                "vaswani2017",
                author=ATTN_AUTHORS,
                title=ATTN_TITLE,
                year="2017",
                journal="arXiv",
                doi="10.48550/arXiv.1706.03762",
            ),
            labels(volume="X", number="X", pages="X"),
            "none",
            [],
        ),
        (
            "gpt-1",
            "gpt-5",
            bib(
                "article",
                "vaswani2018",
                author=ATTN_AUTHORS,
                title=ATTN_TITLE,
                year="2018",
                journal="Journal of Machine Learning Research",
                volume="21",
                number="1",
                pages="1--15",
                doi="10.5555/3295222.3295349",
            ),
            labels(),
            "none",
            [],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "article",
                "vaswani18",
                author=ATTN_AUTHORS,
                title=ATTN_TITLE,
                year="2018",
                journal="Journal of Machine Learning Research",
                volume="21",
                number="1",
                pages="1--15",
            ),
            labels(doi="M"),
            "isolated",
            [],
        ),
    ],
    meta={"title": ATTN_TITLE},
)

# -- paper 4: year slack and entry-type relatedness ---------------------------

BERT_TITLE = "BERT: Pre-training of Deep Bidirectional Transformers for Language Understanding"
BERT_VENUE = "Proceedings of NAACL-HLT"
BERT_AUTHORS = "Devlin, Jacob and Chang, Ming-Wei"
paper(
    "bert2019",
    "nlp",
    "popular",
    "the BERT pre-training paper from NAACL 2019",
    versions=[
        {
            "version_type": "proceedings",
            "fields": {
                "entry_type": "inproceedings",
                "author": BERT_AUTHORS,
                "title": BERT_TITLE,
                "year": "2019",
                "venue": BERT_VENUE,
                "pages": "4171--4186",
            },
        }
    ],
    candidates=[
        (
            "gpt-1",
            "gpt-5",
            bib(
                "inproceedings",
                "devlin2019",
                author=BERT_AUTHORS,
                title=BERT_TITLE,
                booktitle=BERT_VENUE,
                year="2019",
                pages="4171--4186",
            ),
            labels(volume="X", number="X", doi="X"),
            "none",
            [],
        ),
        (
            "gemini-1",
            "gemini-3-flash",
            bib(
                "inproceedings",
                "devlin2018",
                author=BERT_AUTHORS,
                title=BERT_TITLE,
                booktitle=BERT_VENUE,
                year="2018",
                pages="4171--4186",
            ),
            labels(year="P", volume="X", number="X", doi="X"),
            "isolated",
            ["year"],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "misc",
                "devlin19bert",
                author=BERT_AUTHORS,
                title=BERT_TITLE,
                booktitle=BERT_VENUE,
                year="2019",
            ),
            labels(entry_type="P", volume="X", number="X", pages="X", doi="X"),
            "isolated",
            ["entry_type"],
        ),
    ],
    meta={"title": BERT_TITLE},
)

# -- paper 5: venue synonym and missing fields ---------------------------------

GAN_TITLE = "Generative Adversarial Nets"
GAN_AUTHORS = "Goodfellow, Ian and Pouget-Abadie, Jean"
GAN_VENUE = "Advances in Neural Information Processing Systems"
paper(
    "goodfellow2014",
    "ai",
    "recent",
    "the original generative adversarial networks paper",
    versions=[
        {
            "version_type": "proceedings",
            "fields": {
                "entry_type": "inproceedings",
                "author": GAN_AUTHORS,
                "title": GAN_TITLE,
                "year": "2014",
                "venue": GAN_VENUE,
                "pages": "2672--2680",
            },
        }
    ],
    candidates=[
        (
            "gemini-1",
            "gemini-3-flash",
            bib(
                "inproceedings",
                "goodfellow2014",
                author=GAN_AUTHORS,
                title="{Generative} Adversarial Nets",
                booktitle="Proc. NeurIPS",
                year="2014",
                pages="2672--2680",
            ),
            labels(volume="X", number="X", doi="X"),
            "none",
            [],
        ),
        (
            "gpt-1",
            "gpt-5",
            bib(
                "inproceedings",
                "gan2014",
                title=GAN_TITLE,
                booktitle=GAN_VENUE,
                year="2014",
            ),
            labels(author="M", pages="M", volume="X", number="X", doi="X"),
            "isolated",
            [],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "inproceedings",
                "goodfellow14",
                author=GAN_AUTHORS,
                title=GAN_TITLE,
                booktitle=GAN_VENUE,
                year="2014",
                pages="2672--2680",
            ),
            labels(volume="X", number="X", doi="X"),
            "none",
            [],
        ),
    ],
    meta={"title": GAN_TITLE},
)

# -- paper 6: exact-only numeric fields and fabricated DOI ----------------------

SATO_TITLE = "Renal outcomes in elderly hypertension cohorts"
paper(
    "sato2018",
    "medicine",
    "low_citation",
    "a 2018 nephrology journal study of renal outcomes in elderly cohorts",
    versions=[
        {
            "version_type": "journal",
            "fields": {
                "entry_type": "article",
                "author": "Sato, Kenji",
                "title": SATO_TITLE,
                "year": "2018",
                "venue": "Nephrology Letters",
                "volume": "12",
                "number": "4",
                "pages": "200--210",
                "doi": "10.6666/nl.12.4.200",
            },
        }
    ],
    candidates=[
        (
            "gpt-1",
            "gpt-5",
            bib(
                "article",
                "sato2018",
                author="Sato, Kenji",
                title=SATO_TITLE,
                journal="Nephrology Letters",
                year="2018",
                volume="13",
                number="4",
                pages="200--210",
                doi="10.6666/nl.12.4.200",
            ),
            labels(volume="F"),
            "isolated",
            ["volume"],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "article",
                "sato18renal",
                author="Sato, Kenji",
                title=SATO_TITLE,
                journal="Nephrology Letters",
                year="2018",
                volume="12",
                number="4",
                pages="200--210",
                doi="10.9876/made.up.1",
            ),
            labels(doi="F"),
            "isolated",
            ["doi"],
        ),
    ],
    meta={"title": SATO_TITLE},
)

# -- paper 7: preprint DOI as a version variant ---------------------------------

CHEN_TITLE = "Electrolyte Design for Solid State Batteries"
paper(
    "chen2025",
    "chemistry",
    "recent",
    "the 2025 solid-state battery electrolyte design paper",
    versions=[
        {
            "version_type": "arxiv",
            "fields": {
                "entry_type": "misc",
                "author": "Chen, Li",
                "title": CHEN_TITLE,
                "year": "2025",
                "venue": "arXiv",
                "doi": "10.48550/arXiv.2510.16227",
                "eprint": "2510.16227",
            },
        },
        {
            "version_type": "journal",
            "fields": {
                "entry_type": "article",
                "author": "Chen, Li",
                "title": CHEN_TITLE,
                "year": "2025",
                "venue": "Nature Materials",
                "volume": "24",
                "number": "3",
                "pages": "300--310",
                "doi": "10.1038/s41563-025-0001-2",
            },
        },
    ],
    candidates=[
        (
            "gemini-1",
            "gemini-3-flash",
            bib(
                "article",
                "chen2025",
                author="Chen, Li",
                title=CHEN_TITLE,
                journal="Nature Materials",
                year="2025",
                volume="24",
                number="3",
                pages="305--315",
                doi="10.48550/arXiv.2510.16227",
            ),
            labels(pages="P"),
            "isolated",
            ["pages"],
        ),
        (
            "gpt-1",
            "gpt-5",
            bib(
                "misc",
                "chen2025electrolyte",
                author="Chen, Li",
                title=CHEN_TITLE,
                year="2025",
                journal="arXiv",
                doi="10.48550/arXiv.2510.16227",
            ),
            labels(volume="X", number="X", pages="X"),
            "none",
            [],
        ),
    ],
    meta={"title": CHEN_TITLE},
)

# -- paper 8: mixed error mode ----------------------------------------------------

KUMAR_TITLE = "Topological Phases in Driven Lattices"
KUMAR_AUTHORS = "Kumar, Anil and Rossi, Elena"
paper(
    "kumar2021",
    "physics",
    "popular",
    "the 2021 PRL paper on topological phases in driven lattices",
    versions=[
        {
            "version_type": "journal",
            "fields": {
                "entry_type": "article",
                "author": KUMAR_AUTHORS,
                "title": KUMAR_TITLE,
                "year": "2021",
                "venue": "Physical Review Letters",
                "volume": "126",
                "number": "7",
                "pages": "070401--070406",
                "doi": "10.1103/physrevlett.126.070401",
            },
        }
    ],
    candidates=[
        (
            "gpt-1",
            "gpt-5",
            bib(
                "article",
                "kumar2021",
                author=KUMAR_AUTHORS,
                title=KUMAR_TITLE,
                journal="Phys. Rev. Lett.",
                year="2022",
                volume="126",
                number="7",
                pages="070501--070506",
            ),
            labels(year="P", pages="F", doi="M"),
            "mixed",
            ["year", "pages"],
        ),
        (
            "claude-1",
            "claude",
            bib(
                "article",
                "kumar21topo",
                author=KUMAR_AUTHORS,
                title=KUMAR_TITLE,
                journal="PRL",
                year="2021",
                volume="126",
                number="7",
                pages="070401--070406",
                doi="10.1103/PhysRevLett.126.070401",
            ),
            labels(),
            "none",
            [],
        ),
    ],
    meta={"title": KUMAR_TITLE},
)


def tally(golden):
    """Plain counting over the hand labels; no package code involved."""
    eval_slots = [s for s in SLOTS if s != "entry_key"]
    per_field = {s: {"evaluable": 0, "correct": 0} for s in eval_slots}
    buckets = {"model": {}, "tier": {}, "domain": {}}
    dist = {"C": 0, "M": 0, "F": 0, "P": 0, "S": 0}
    fully = 0
    modes = {}
    for row in golden:
        entry_ok = True
        for s in eval_slots:
            lab = row["labels"][s]
            if lab == "X":
                continue
            dist[lab] += 1
            per_field[s]["evaluable"] += 1
            for kind, key in (("model", row["model"]), ("tier", row["tier"]), ("domain", row["domain"])):
                b = buckets[kind].setdefault(key, {"evaluable": 0, "correct": 0})
                b["evaluable"] += 1
                if lab == "C":
                    b["correct"] += 1
            if lab == "C":
                per_field[s]["correct"] += 1
            else:
                entry_ok = False
        if entry_ok:
            fully += 1
        modes[row["error_mode"]] = modes.get(row["error_mode"], 0) + 1

    def pct(b):
        p = round(100.0 * b["correct"] / b["evaluable"], 1) if b["evaluable"] else None
        return {**b, "pct_c": p}

    evaluable = sum(b["evaluable"] for b in per_field.values())
    correct = sum(b["correct"] for b in per_field.values())
    report = {
        "format_version": 1,
        "entries": len(golden),
        "overall": pct({"evaluable": evaluable, "correct": correct}),
        "fully_correct": {
            "count": fully,
            "pct": round(100.0 * fully / len(golden), 1),
        },
        "label_distribution": dist,
        "per_field": {s: pct(b) for s, b in sorted(per_field.items())},
    }
    for kind, bs in buckets.items():
        report[f"per_{kind}"] = {k: pct(b) for k, b in sorted(bs.items())}
    return report, dict(sorted(modes.items()))


def main():
    lines = [json.dumps({"format_version": 1, "kind": "bibkit-corpus"})]
    lines += [json.dumps(p, ensure_ascii=False) for p in PAPERS]
    (FIXTURES / "golden_corpus.jsonl").write_text("\n".join(lines) + "\n", "utf-8")

    (FIXTURES / "golden_labels.json").write_text(
        json.dumps({"format_version": 1, "entries": GOLDEN}, indent=1, ensure_ascii=False) + "\n",
        "utf-8",
    )

    aggregate, modes = tally(GOLDEN)
    doc = {"aggregate": aggregate, "error_modes": modes}
    (FIXTURES / "golden_aggregate.json").write_text(
        json.dumps(doc, indent=1, sort_keys=True) + "\n", "utf-8"
    )
    total = sum(1 for _ in GOLDEN)
    print(f"wrote golden corpus ({len(PAPERS)} papers, {total} entries)")
    print(f"overall: {aggregate['overall']}, modes: {modes}")


if __name__ == "__main__":
    main()
