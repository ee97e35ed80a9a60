#!/usr/bin/env python3
"""Independent oracle for the bundled fixture.

Recomputes, from the raw fixture files only, everything the `full` pipeline
reports under the reference scorer: gate decisions, discrimination gaps,
experiment summaries, Kendall tau-b convergence rows, and vendor preference.
Uses numpy/scipy so none of the engine's code paths are shared.

Writes tests/expected/fixture_bundle.json.
"""

import glob
import json
import math
import os
from collections import defaultdict

import numpy as np
from scipy import stats

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURE = os.path.join(HERE, "..", "data", "fixture")
OUT = os.path.join(HERE, "..", "tests", "expected", "fixture_bundle.json")

VALIDATION_RUNS = 3
EXPERIMENT_RUNS = 2
EXPERIMENTS = ["control-baseline", "model-updates"]
VENDORS = ["openai", "anthropic", "other"]


def load_jsonl(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def satisfaction(content, evidence):
    low = content.lower()
    return sum(1 for e in evidence if e.lower() in low) / len(evidence)


def normalized(content, rubric):
    w = np.array([c["weight"] for c in rubric["criteria"]], dtype=float)
    s = np.array([satisfaction(content, c["evidence"]) for c in rubric["criteria"]])
    return float(np.dot(w, s) / w.sum() * 100.0)


def q(values, p):
    return float(np.quantile(np.asarray(values, dtype=float), p))


def sample_sd(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(np.asarray(values, dtype=float), ddof=1))


def median_or_none(values):
    return float(np.median(values)) if values else None


def main():
    cases = {c["case_id"]: c for c in load_jsonl(os.path.join(FIXTURE, "cases.jsonl"))}
    notes = load_jsonl(os.path.join(FIXTURE, "notes.jsonl"))
    notes_by_id = {n["note_id"]: n for n in notes}
    rubrics = {}
    for p in glob.glob(os.path.join(FIXTURE, "rubrics", "*.json")):
        with open(p) as f:
            r = json.load(f)
        rubrics[r["rubric_id"]] = r

    # Validation gate.
    validation = []
    status = {}
    for rid in sorted(rubrics):
        r = rubrics[rid]
        if r["source"] != "clinician":
            status[rid] = r["status"]
            continue
        case_notes = [n for n in notes if n["case_id"] == r["case_id"]]
        best = [n for n in case_notes if {"label": "best", "labeler_id": r["author_id"]} in n["labels"]]
        worst = [n for n in case_notes if {"label": "worst", "labeler_id": r["author_id"]} in n["labels"]]
        assert len(best) == 1 and len(worst) == 1
        b = [normalized(best[0]["content"], r)] * VALIDATION_RUNS
        w = [normalized(worst[0]["content"], r)] * VALIDATION_RUNS
        accepted = max(w) < min(b)
        status[rid] = "validated" if accepted else "rejected"
        validation.append({
            "rubric_id": rid,
            "best_note_id": best[0]["note_id"],
            "worst_note_id": worst[0]["note_id"],
            "accepted": accepted,
            "min_best": min(b),
            "max_worst": max(w),
            "separation_margin": min(b) - max(w),
            "discrimination_gap": float(np.mean(b) - np.mean(w)),
        })
    gaps = [v["discrimination_gap"] for v in validation]
    validation_summary = {
        "created": len(validation),
        "accepted": sum(v["accepted"] for v in validation),
        "rejected": sum(not v["accepted"] for v in validation),
        "gap_mean": float(np.mean(gaps)),
        "gap_median": float(np.median(gaps)),
        "gap_q1": q(gaps, 0.25),
        "gap_q3": q(gaps, 0.75),
    }

    # Experiment scoring: every note against every validated rubric of its case.
    scores = defaultdict(list)  # (note_id, rubric_id) -> [runs]
    for n in notes:
        for rid, r in rubrics.items():
            if r["case_id"] != n["case_id"] or status[rid] != "validated":
                continue
            s = normalized(n["content"], r)
            scores[(n["note_id"], rid)] = [s] * EXPERIMENT_RUNS

    table2 = []
    for exp in EXPERIMENTS:
        vals = [s for (nid, _), runs in scores.items() if notes_by_id[nid]["experiment_id"] == exp for s in runs]
        table2.append({
            "experiment_id": exp,
            "n_records": len(vals),
            "median": float(np.median(vals)),
            "q1": q(vals, 0.25),
            "q3": q(vals, 0.75),
            "stddev": sample_sd(vals),
        })

    # Agreement.
    table3 = []
    for exp in EXPERIMENTS:
        cc, cl, cc_rd, cl_rd = [], [], [], []
        excl_cc = excl_cl = 0
        missing = 0
        for cid in sorted(cases):
            exp_notes = sorted(n["note_id"] for n in notes if n["case_id"] == cid and n["experiment_id"] == exp)
            clin = sorted(rid for rid, r in rubrics.items()
                          if r["case_id"] == cid and r["source"] == "clinician" and status[rid] == "validated")
            llm = sorted(rid for rid, r in rubrics.items()
                         if r["case_id"] == cid and r["source"] == "llm" and status[rid] == "validated")
            if len(clin) < 2 or not llm:
                missing += 1

            def mean_scores(rid):
                return np.array([np.mean(scores[(nid, rid)]) for nid in exp_notes])

            def ranks(rid):
                return stats.rankdata(-mean_scores(rid), method="average")

            def pair(a, b):
                sa, sb = mean_scores(a), mean_scores(b)
                tau = stats.kendalltau(sa, sb, variant="b").statistic
                rd = float(np.mean(np.abs(ranks(a) - ranks(b))))
                return tau, rd

            pairs_cc = [(clin[i], clin[j]) for i in range(len(clin)) for j in range(i + 1, len(clin))]
            pairs_cl = [(a, b) for a in clin for b in llm]
            for a, b in pairs_cc:
                tau, rd = pair(a, b)
                cc_rd.append(rd)
                if math.isnan(tau):
                    excl_cc += 1
                else:
                    cc.append(float(tau))
            for a, b in pairs_cl:
                tau, rd = pair(a, b)
                cl_rd.append(rd)
                if math.isnan(tau):
                    excl_cl += 1
                else:
                    cl.append(float(tau))
        m_cc, m_cl = median_or_none(cc), median_or_none(cl)
        table3.append({
            "experiment_id": exp,
            "clin_clin_median_tau": m_cc,
            "clin_llm_median_tau": m_cl,
            "delta": (m_cl - m_cc) if m_cc is not None and m_cl is not None else None,
            "n_clin_clin": len(cc),
            "n_clin_llm": len(cl),
            "excluded_clin_clin": excl_cc,
            "excluded_clin_llm": excl_cl,
            "clin_clin_median_rank_diff": median_or_none(cc_rd),
            "clin_llm_median_rank_diff": median_or_none(cl_rd),
            "cases_missing_rankings": missing,
        })

    # Vendor preference over best/worst labelings.
    labelings = []
    for cid in sorted(cases):
        case_notes = [n for n in notes if n["case_id"] == cid]
        labelers = sorted({l["labeler_id"] for n in case_notes for l in n["labels"]})
        for lab in labelers:
            best = [n for n in case_notes if {"label": "best", "labeler_id": lab} in n["labels"]][0]
            worst = [n for n in case_notes if {"label": "worst", "labeler_id": lab} in n["labels"]][0]
            cands = {n["vendor"] for n in case_notes if n["experiment_id"] == best["experiment_id"]}
            labelings.append((best["vendor"], worst["vendor"], cands))

    def prefs(subset):
        out = []
        for v in VENDORS:
            ev = [l for l in subset if v in l[2]]
            if not ev:
                continue
            pb = 100.0 * sum(1 for l in ev if l[0] == v) / len(ev)
            pw = 100.0 * sum(1 for l in ev if l[1] == v) / len(ev)
            out.append({"vendor": v, "times_evaluated": len(ev), "pct_best": pb,
                        "pct_worst": pw, "net_rate": pb - pw})
        return out

    both = [l for l in labelings if "openai" in l[2] and "anthropic" in l[2]]
    bundle = {
        "counts": {"cases": len(cases),
                   "clinician_rubrics": sum(r["source"] == "clinician" for r in rubrics.values()),
                   "llm_rubrics": sum(r["source"] == "llm" for r in rubrics.values()),
                   "notes": len(notes)},
        "validation": validation,
        "validation_summary": validation_summary,
        "table2": table2,
        "table3": table3,
        "vendor_preference": {"inclusive": prefs(labelings), "both_present": prefs(both)},
    }
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w") as f:
        json.dump(bundle, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
