#!/usr/bin/env python3
"""Builds the bundled 12-case synthetic fixture under data/fixture/.

The output is committed; rerunning this script with the same seed rewrites
byte-identical files. Notes are assembled from per-case fact phrases so the
offline reference scorer (case-insensitive substring matching against
criterion evidence) produces a spread of scores, ties, two rubric
rejections, and one fully-tied ranking.
"""

import json
import os
import random
import sys

SEED = 20251014
ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "fixture")

EXPERIMENTS = ["control-baseline", "model-updates"]
CLINICIANS = ["clin-a", "clin-b", "clin-c", "clin-d", "clin-e", "clin-f"]
LLM_MODEL = "o3"

# Shared phrases for the two mandated criteria.
COMPLETENESS_EVIDENCE_TAIL = ["follow-up interval"]
NON_REPETITION_EVIDENCE = ["interval update", "unchanged from prior note"]

FILLER = [
    "Patient seen today for the visit described below.",
    "Discussed the findings with the patient.",
    "Questions were answered.",
    "Patient agrees with the approach.",
]

# (specialty, encounter_type, length, problem_count, acuity, conditions,
#  medications, allergies, facts)
CASES = [
    ("primary care", "follow-up", "short", "single", "low",
     ["type 2 diabetes"], ["metformin"], ["penicillin"],
     ["hba1c of 8.2", "increase metformin to 1000 mg", "monofilament foot exam",
      "retinal screening referral", "fasting glucose log", "dietitian consult",
      "statin continued", "urine albumin ordered"]),
    ("psychiatry", "medication management", "medium", "single", "moderate",
     ["major depressive disorder"], ["sertraline"], [],
     ["phq-9 score of 16", "sertraline titrated to 100 mg", "denies suicidal ideation",
      "safety plan reviewed", "sleep onset insomnia", "weekly psychotherapy",
      "gi side effects resolved", "return in four weeks"]),
    ("oncology", "consultation", "long", "multi", "high",
     ["stage ii breast cancer", "hypertension"], ["letrozole", "lisinopril"], ["sulfa"],
     ["neutropenic fever precautions", "anc of 900", "filgrastim started",
      "blood pressure 148/92", "lisinopril held", "oncology nurse callback",
      "port site clean", "cycle three delayed"]),
    ("primary care", "acute visit", "short", "single", "low",
     [], [], [],
     ["sore throat for three days", "rapid strep negative", "centor score of 1",
      "supportive care advised", "salt water gargles", "no antibiotics indicated",
      "return if fever persists", "tonsillar exudate absent"]),
    ("behavioral health", "intake", "long", "multi", "moderate",
     ["generalized anxiety disorder", "alcohol use disorder"], ["buspirone"], [],
     ["gad-7 score of 14", "audit-c score of 7", "naltrexone discussed",
      "buspirone continued", "motivational interviewing", "liver panel ordered",
      "sponsor contact encouraged", "cbt referral placed"]),
    ("cardiology", "follow-up", "medium", "multi", "moderate",
     ["atrial fibrillation", "heart failure"], ["apixaban", "metoprolol"], ["aspirin"],
     ["chads-vasc of 4", "apixaban 5 mg twice daily", "ejection fraction 35 percent",
      "metoprolol increased", "daily weights", "two-pound weight gain",
      "echocardiogram in six months", "sodium restriction"]),
    ("pediatrics", "well child", "short", "single", "low",
     ["asthma"], ["albuterol"], [],
     ["growth at 60th percentile", "albuterol spacer technique", "asthma action plan",
      "influenza vaccine given", "night cough twice monthly", "school form completed",
      "peak flow teaching", "secondhand smoke counseling"]),
    ("primary care", "annual exam", "medium", "multi", "low",
     ["hyperlipidemia", "osteopenia"], ["atorvastatin", "vitamin d"], [],
     ["ldl of 142", "atorvastatin increased to 40 mg", "dexa scan ordered",
      "colonoscopy due", "calcium intake reviewed", "shingles vaccine offered",
      "weight-bearing exercise", "fasting lipid recheck"]),
    ("psychiatry", "follow-up", "long", "multi", "high",
     ["bipolar i disorder"], ["lithium", "quetiapine"], [],
     ["lithium level of 1.1", "tsh and creatinine ordered", "quetiapine reduced at night",
      "hypomanic symptoms absent", "hydration counseling", "tremor mild",
      "crisis line provided", "family meeting scheduled"]),
    ("endocrinology", "consultation", "medium", "single", "moderate",
     ["hypothyroidism"], ["levothyroxine"], ["iodine contrast"],
     ["tsh of 7.8", "levothyroxine increased to 88 mcg", "take on empty stomach",
      "repeat tsh in six weeks", "fatigue improving", "biotin stopped",
      "thyroid nodule absent", "pregnancy test negative"]),
    ("oncology", "survivorship", "short", "single", "low",
     ["colon cancer in remission"], [], [],
     ["cea of 2.1", "surveillance ct scheduled", "neuropathy grade 1",
      "colonoscopy in one year", "exercise program", "duloxetine declined",
      "fear of recurrence", "survivorship care plan"]),
    ("medication management", "follow-up", "medium", "multi", "moderate",
     ["chronic kidney disease", "gout"], ["allopurinol", "losartan"], ["nsaids"],
     ["egfr of 42", "allopurinol dose adjusted", "uric acid of 7.9",
      "losartan continued", "nsaid avoidance", "colchicine as needed",
      "nephrology referral", "potassium of 5.1"]),
]

# Cases with no point-in-time note.
NO_PIT_NOTE = {3, 10}
# (case index, clinician slot) pairs whose rubric is built to fail the gate.
REJECTED = {(3, 1), (8, 0)}
# Case whose experiment-2 notes all satisfy every LLM-rubric criterion.
DEGENERATE_LLM = 6


def note_text(facts, include_nonrep, include_followup, rng):
    parts = [rng.choice(FILLER)]
    for f in facts:
        parts.append(f"Documented {f}.")
    if include_followup:
        parts.append("Follow-up interval agreed.")
    if include_nonrep:
        parts.append("Interval update: history unchanged from prior note.")
    else:
        parts.append("Past history restated in full.")
    parts.append(rng.choice(FILLER))
    return " ".join(parts)


def contains(text, term):
    return term.lower() in text.lower()


def ref_score(text, criteria):
    num = 0.0
    den = 0
    for c in criteria:
        hits = sum(1 for e in c["evidence"] if contains(text, e))
        num += c["weight"] * hits / len(c["evidence"])
        den += c["weight"]
    return 100.0 * num / den


def make_rubric(rid, case_id, source, author, facts, rng, fixed_evidence=None):
    if source == "llm":
        k = rng.choice([4, 5, 6])
    else:
        k = rng.choice([3, 4, 5, 6])
    other_n = k - 2
    pool = list(facts)
    rng.shuffle(pool)
    criteria = []
    comp_ev = pool[:3] + COMPLETENESS_EVIDENCE_TAIL
    criteria.append({
        "text": "Reward for overall completeness of the encounter relative to the transcript",
        "weight": rng.randint(2, 5),
        "kind": "completeness",
        "evidence": comp_ev,
    })
    criteria.append({
        "text": "Reward for not repeating information already documented in the chart",
        "weight": rng.randint(1, 3),
        "kind": "non_repetition",
        "evidence": list(NON_REPETITION_EVIDENCE),
    })
    rest = pool[3:]
    for i in range(other_n):
        ev = fixed_evidence[i] if fixed_evidence else [rest[i % len(rest)], rest[(i + 2) % len(rest)]]
        criteria.append({
            "text": f"Reward for documenting {ev[0]}",
            "weight": rng.randint(1, 5),
            "kind": "other",
            "evidence": ev,
        })
    rng.shuffle(criteria)
    return {
        "rubric_id": rid,
        "case_id": case_id,
        "source": source,
        "author_id": author,
        "criteria": criteria,
        "status": "validated" if source == "llm" else "draft",
    }


def main():
    rng = random.Random(SEED)
    os.makedirs(os.path.join(ROOT, "rubrics"), exist_ok=True)
    os.makedirs(os.path.join(ROOT, "llm_responses"), exist_ok=True)

    cases, notes, rubrics = [], [], []
    for ci, spec in enumerate(CASES):
        (specialty, enc, length, problems, acuity, conds, meds, allergies, facts) = spec
        for a in facts:
            for b in facts:
                assert a == b or a.lower() not in b.lower(), (a, b)
            for f in FILLER:
                assert a.lower() not in f.lower()
        case_id = f"case-{ci + 1:03d}"
        turns = []
        for fi, f in enumerate(facts):
            turns.append({"speaker": "clinician" if fi % 2 == 0 else "patient",
                          "text": f"We talked about {f}."})
        turns.append({"speaker": "clinician", "text": "Anything else before we finish?"})
        case = {
            "case_id": case_id,
            "transcript": turns,
            "context": {
                "conditions": conds,
                "medications": meds,
                "allergies": allergies,
                "surgical_history": ["appendectomy"] if ci % 4 == 0 else [],
                "family_history": ["father with coronary disease"] if ci % 3 == 0 else [],
            },
            "tags": {"specialty": specialty, "encounter_type": enc, "length": length,
                     "problem_count": problems, "acuity": acuity},
            "provenance": "synthetic",
        }
        if ci not in NO_PIT_NOTE:
            case["point_in_time_note"] = (
                f"Prior note: {', '.join(conds) if conds else 'no active problems'}. "
                f"Medications: {', '.join(meds) if meds else 'none'}.")
        cases.append(case)

        # Notes: experiment 1 spans a wide quality range, experiment 2 is compressed high.
        case_notes = []
        vendor_cycle = ["anthropic", "openai"]
        for ei, exp in enumerate(EXPERIMENTS):
            for ni in range(5):
                idx = ei * 5 + ni
                if ei == 0:
                    keep = [0.9, 0.7, 0.5, 0.35, 0.15][ni]
                    nonrep = ni < 3
                    followup = ni < 2
                else:
                    keep = [1.0, 0.95, 0.9, 0.85, 0.8][ni]
                    nonrep = ni != 4
                    followup = ni < 4
                included = [f for f in facts if rng.random() < keep]
                if ei == 0 and ni == 0:
                    included = facts[:-1]
                if ei == 0 and ni == 4:
                    included = facts[-2:]
                if ei == 0:
                    vendor = ["anthropic", "openai", "anthropic", "openai", "openai"][ni]
                    if ni == 0 and ci in (2, 7, 10):
                        vendor = "openai"
                    if ni == 4 and ci in (1, 5):
                        vendor = "anthropic"
                    if ni == 4 and ci % 3 == 0:
                        vendor = "other"
                else:
                    vendor = vendor_cycle[(ci + ni) % 2]
                case_notes.append({
                    "note_id": f"{case_id}-n{idx + 1:02d}",
                    "case_id": case_id,
                    "experiment_id": exp,
                    "vendor": vendor,
                    "generator_config": f"{exp}/cfg-{ni + 1}",
                    "content": note_text(included, nonrep, followup, rng),
                    "labels": [],
                    "_facts": included,
                })

        if ci == DEGENERATE_LLM:
            for n in case_notes[5:]:
                n["_facts"] = list(facts)
                n["content"] = note_text(facts, True, True, rng)

        # Clinician rubrics and their best/worst labels over experiment-1 notes.
        exp1 = case_notes[:5]
        best, worst = exp1[0], exp1[4]
        for slot in range(2):
            author = CLINICIANS[(2 * ci + slot) % len(CLINICIANS)]
            rid = f"{case_id}-clin-{slot + 1}"
            fixed = None
            if (ci, slot) in REJECTED:
                only_worst = [f for f in worst["_facts"] if f not in best["_facts"]]
                assert only_worst, (ci, slot)
                fixed = [[only_worst[0]] for _ in range(4)]
            r = make_rubric(rid, case_id, "clinician", author, facts, rng, fixed)
            if fixed:
                # Completeness criterion keyed on the worst note's facts as well.
                for c in r["criteria"]:
                    if c["kind"] == "completeness":
                        c["evidence"] = [only_worst[0]]
                    if c["kind"] == "non_repetition":
                        c["weight"] = 1
                for c in r["criteria"]:
                    if c["kind"] == "other":
                        c["weight"] = 5
            sb, sw = ref_score(best["content"], r["criteria"]), ref_score(worst["content"], r["criteria"])
            if (ci, slot) in REJECTED:
                assert sb <= sw, (ci, slot, sb, sw)
            else:
                assert sb > sw, (ci, slot, sb, sw)
            rubrics.append(r)
            best["labels"].append({"label": "best", "labeler_id": author})
            worst["labels"].append({"label": "worst", "labeler_id": author})

        llm = make_rubric(f"{case_id}-llm-{LLM_MODEL}", case_id, "llm", LLM_MODEL, facts, rng)
        if ci == DEGENERATE_LLM:
            assert all(ref_score(n["content"], llm["criteria"]) == 100.0 for n in case_notes[5:])
        rubrics.append(llm)

        # Canned generation responses reproduce the shipped LLM rubric. One case
        # answers with a malformed rubric first to exercise the retry path.
        payload = {"criteria": [{k: c[k] for k in ("text", "weight", "kind", "evidence")}
                                for c in llm["criteria"]]}
        attempts = []
        if ci == 4:
            bad = {"criteria": [c for c in payload["criteria"] if c["kind"] != "non_repetition"]}
            attempts.append("Here is the rubric:\n```json\n" + json.dumps(bad, indent=2) + "\n```\n")
        attempts.append("```json\n" + json.dumps(payload, indent=2) + "\n```\n")
        for ai, text in enumerate(attempts):
            with open(os.path.join(ROOT, "llm_responses", f"{case_id}.{ai + 1}.txt"), "w") as f:
                f.write(text)

        for n in case_notes:
            del n["_facts"]
        notes.extend(case_notes)

    with open(os.path.join(ROOT, "cases.jsonl"), "w") as f:
        for c in cases:
            f.write(json.dumps(c, sort_keys=False) + "\n")
    with open(os.path.join(ROOT, "notes.jsonl"), "w") as f:
        for n in notes:
            f.write(json.dumps(n, sort_keys=False) + "\n")
    for r in rubrics:
        with open(os.path.join(ROOT, "rubrics", r["rubric_id"] + ".json"), "w") as f:
            json.dump(r, f, indent=2)
            f.write("\n")

    effort = [
        {"evaluator_id": c, "hours": 1.5 + 0.25 * i, "period": {"start": "2025-03-03", "end": "2025-03-09"}}
        for i, c in enumerate(CLINICIANS)
    ]
    with open(os.path.join(ROOT, "effort.jsonl"), "w") as f:
        for e in effort:
            f.write(json.dumps(e) + "\n")

    print(f"{len(cases)} cases, {len(rubrics)} rubrics, {len(notes)} notes", file=sys.stderr)


if __name__ == "__main__":
    main()
