"""Trial summary tables: problem-type mix, section times, posttest performance and prior-knowledge gaps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .records import SessionLog
from .scoring import PROBLEM_TYPES, nlg
from .sim.session import CONDITIONS
from .stats import (
    ZeroPreGap,
    bonferroni,
    chi_square,
    effect_size_a,
    gap_metrics,
    kruskal_wallis,
    mann_whitney,
    median_split,
)

SECTION_NAMES = (("pretest", "Pretest"), ("training", "Training"), ("level_end", "Level-end tests"), ("posttest", "Posttest"))
POSTTEST_MEASURES = ("score", "nlg", "accuracy", "time", "steps")
ATTEMPTS_PER_SESSION = 30


class IncompleteTrial(ValueError):
    pass


def stars(p_adj: float) -> str:
    if p_adj < 0.05:
        return "*"
    if p_adj < 0.10:
        return "†"
    return ""


@dataclass(frozen=True)
class Summary:
    mean: float
    sd: float
    n: int

    @classmethod
    def of(cls, xs: Sequence[float]) -> "Summary":
        a = np.asarray(xs, dtype=np.float64)
        if a.size == 0:
            return cls(math.nan, math.nan, 0)
        return cls(float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0, int(a.size))

    def text(self, digits: int = 2) -> str:
        return f"{self.mean:.{digits}f} ({self.sd:.{digits}f}) n={self.n}"


@dataclass(frozen=True)
class Pairwise:
    metric: str
    a: str
    b: str
    u: float
    p: float
    p_adj: float
    effect: float
    ci: tuple[float, float]


@dataclass
class ExperimentReport:
    header: str
    type_counts: dict[str, dict[str, int]]
    type_tests: list[tuple[str, str, float, int, float, float]]
    section_times: dict[str, dict[str, Summary]]
    posttest: dict[str, dict[str, Summary]]
    omnibus: dict[str, tuple[float, float]]
    pairwise: list[Pairwise]
    subgroups: dict[str, dict[str, Summary]]
    gaps: dict[str, Optional[tuple[float, float, float]]]
    notes: list[str] = field(default_factory=list)

    def type_percentages(self, condition: str) -> dict[str, float]:
        counts = self.type_counts[condition]
        total = sum(counts.values())
        return {t: 100.0 * c / total for t, c in counts.items()}


def _check(logs: Sequence[SessionLog]) -> dict[str, list[SessionLog]]:
    by = {c: [log for log in logs if log.condition == c] for c in CONDITIONS}
    missing = [c for c, ls in by.items() if not ls]
    if missing:
        raise IncompleteTrial(f"no sessions for condition(s) {', '.join(missing)}")
    for log in logs:
        if len(log.attempts) != ATTEMPTS_PER_SESSION:
            raise IncompleteTrial(f"{log.student_id} has {len(log.attempts)} attempts, expected {ATTEMPTS_PER_SESSION}")
        if log.posttest_score is None or log.pretest_score is None:
            raise IncompleteTrial(f"{log.student_id} is missing scored tests")
    return by


def _posttest_measures(log: SessionLog) -> dict[str, float]:
    post = log.section("posttest")
    out = {
        "score": log.posttest_score,
        "accuracy": 100.0 * float(np.mean([r.attempt.accuracy for r in post])),
        "time": float(np.mean([r.attempt.duration_seconds for r in post])),
        "steps": float(np.mean([r.attempt.steps_in_final_solution for r in post])),
    }
    if log.pretest_score < 100:
        out["nlg"] = nlg(log.pretest_score, log.posttest_score)
    return out


def build_report(logs: Sequence[SessionLog], header: str = "", bootstrap: int = 2000, seed: int = 0) -> ExperimentReport:
    by = _check(logs)
    pairs = list(combinations(CONDITIONS, 2))

    counts = {c: {t: sum(r.type == t for log in ls for r in log.decisions()) for t in PROBLEM_TYPES} for c, ls in by.items()}
    raw = []
    for a, b in pairs:
        table = [[counts[a][t] for t in PROBLEM_TYPES], [counts[b][t] for t in PROBLEM_TYPES]]
        # drop types neither condition used so the test stays defined
        cols = [j for j in range(len(PROBLEM_TYPES)) if table[0][j] + table[1][j] > 0]
        if len(cols) >= 2:
            res = chi_square([[row[j] for j in cols] for row in table])
            raw.append((a, b, res.chi2, res.df, res.p))
        else:
            raw.append((a, b, 0.0, 0, 1.0))
    adj = bonferroni([r[4] for r in raw], len(raw))
    type_tests = [(*r, pa) for r, pa in zip(raw, adj)]

    section_times = {
        c: {
            name: Summary.of([sum(r.attempt.duration_seconds for r in log.section(name)) / 60.0 for log in ls])
            for name, _ in SECTION_NAMES
        }
        for c, ls in by.items()
    }

    measures = {c: [_posttest_measures(log) for log in ls] for c, ls in by.items()}
    posttest = {c: {m: Summary.of([x[m] for x in ms if m in x]) for m in POSTTEST_MEASURES} for c, ms in measures.items()}
    omnibus = {}
    pairwise: list[Pairwise] = []
    for metric in ("score", "nlg"):
        samples = {c: [x[metric] for x in ms if metric in x] for c, ms in measures.items()}
        kw = kruskal_wallis([samples[c] for c in CONDITIONS])
        omnibus[metric] = (kw.h, kw.p)
        tests = [mann_whitney(samples[a], samples[b]) for a, b in pairs]
        adj = bonferroni([t.p for t in tests], len(tests))
        for (a, b), t, pa in zip(pairs, tests, adj):
            es = effect_size_a(samples[b], samples[a], bootstrap, seed)
            pairwise.append(Pairwise(metric, a, b, t.u, t.p, pa, es.a, (es.ci_low, es.ci_high)))

    pre = {log.student_id: log.pretest_score for log in logs}
    high, low = median_split(pre)
    high, low = set(high), set(low)
    subgroups, gaps = {}, {}
    for c, ls in by.items():
        groups = {"High": [l for l in ls if l.student_id in high], "Low": [l for l in ls if l.student_id in low]}
        subgroups[c] = {}
        for g, members in groups.items():
            subgroups[c][f"{g} pre"] = Summary.of([l.pretest_score for l in members])
            subgroups[c][f"{g} post"] = Summary.of([l.posttest_score for l in members])
        s = subgroups[c]
        try:
            gm = gap_metrics(s["High pre"].mean, s["Low pre"].mean, s["High post"].mean, s["Low post"].mean)
            gaps[c] = (gm.pre_gap, gm.post_gap, gm.reduction_percent)
        except ZeroPreGap:
            gaps[c] = None
        if any(s[k].n == 0 for k in s):
            gaps[c] = None

    notes = [
        "Pairwise p-values are Bonferroni-adjusted over the three condition pairs (m = 3).",
        "* adjusted p < .05; † adjusted p < .10.",
        "A is the probability that a random student of the second condition outscores one of the first "
        f"(ties count half); 95% CI from a seeded percentile bootstrap ({bootstrap} resamples).",
        "Chi-square tests of homogeneity use no continuity correction for tables larger than 2 x 2.",
        "Median split on pretest score across all conditions; students at the median are placed in Low.",
        "Mixed-effects regression with problem random intercepts is not performed; the nonparametric suite above substitutes for it.",
    ]
    return ExperimentReport(header, counts, type_tests, section_times, posttest, omnibus, pairwise, subgroups, gaps, notes)


def _fmt_p(p: float) -> str:
    return f"{p:.3f}"


def render_text(rep: ExperimentReport) -> str:
    out: list[str] = []
    w = out.append
    if rep.header:
        w(rep.header)
    w("")
    w("Table 1a. Training problem types served")
    w(f"{'condition':<10}" + "".join(f"{t:>18}" for t in PROBLEM_TYPES) + f"{'total':>8}")
    for c in CONDITIONS:
        pct = rep.type_percentages(c)
        cells = "".join(f"{rep.type_counts[c][t]:>8} ({pct[t]:5.1f}%)" for t in PROBLEM_TYPES)
        w(f"{c:<10}{cells}{sum(rep.type_counts[c].values()):>8}")
    w("")
    w("Type distribution, pairwise chi-square")
    for a, b, chi, df, p, pa in rep.type_tests:
        w(f"  {a} vs {b}: chi2({df}) = {chi:.2f}, p = {_fmt_p(p)}, adjusted p = {_fmt_p(pa)}{stars(pa)}")
    w("")
    w("Table 1b. Time by tutor section, minutes per student, Mean (SD)")
    w(f"{'section':<18}" + "".join(f"{c:>26}" for c in CONDITIONS))
    for name, label in SECTION_NAMES:
        w(f"{label:<18}" + "".join(f"{rep.section_times[c][name].text():>26}" for c in CONDITIONS))
    w("")
    w("Table 2. Average per-problem posttest performance, Mean (SD)")
    labels = {"score": "Score", "nlg": "NLG", "accuracy": "Accuracy (%)", "time": "Time (s)", "steps": "Steps"}
    w(f"{'measure':<14}" + "".join(f"{c:>26}" for c in CONDITIONS))
    for m in POSTTEST_MEASURES:
        w(f"{labels[m]:<14}" + "".join(f"{rep.posttest[c][m].text():>26}" for c in CONDITIONS))
    w("")
    for metric in ("score", "nlg"):
        h, p = rep.omnibus[metric]
        w(f"{labels[metric]}: Kruskal-Wallis H(2) = {h:.2f}, p = {_fmt_p(p)}")
        for pw in (x for x in rep.pairwise if x.metric == metric):
            w(
                f"  {pw.a} vs {pw.b}: U = {pw.u:.1f}, p = {_fmt_p(pw.p)}, adjusted p = {_fmt_p(pw.p_adj)}{stars(pw.p_adj)}, "
                f"A = {pw.effect:.2f} [{pw.ci[0]:.2f}, {pw.ci[1]:.2f}]"
            )
    w("")
    w("Prior-knowledge subgroups (median split on pretest), Mean (SD)")
    keys = ("High pre", "Low pre", "High post", "Low post")
    w(f"{'group':<12}" + "".join(f"{c:>26}" for c in CONDITIONS))
    for k in keys:
        w(f"{k:<12}" + "".join(f"{rep.subgroups[c][k].text():>26}" for c in CONDITIONS))
    w("")
    w("Achievement gap (High minus Low)")
    for c in CONDITIONS:
        g = rep.gaps[c]
        if g is None:
            w(f"  {c}: undefined")
        else:
            w(f"  {c}: pretest gap {g[0]:.2f}, posttest gap {g[1]:.2f}, reduction {g[2]:.1f}%")
    w("")
    w("Notes")
    for n in rep.notes:
        w(f"  {n}")
    return "\n".join(out) + "\n"


def render_delimited(rep: ExperimentReport, sep: str = "\t") -> str:
    rows = [("table", "row", "column", "statistic", "value")]

    def add(*cells):
        rows.append(tuple(str(c) for c in cells))

    for c in CONDITIONS:
        pct = rep.type_percentages(c)
        for t in PROBLEM_TYPES:
            add("types", c, t, "count", rep.type_counts[c][t])
            add("types", c, t, "percent", f"{pct[t]:.4f}")
    for a, b, chi, df, p, pa in rep.type_tests:
        add("type_tests", f"{a}|{b}", "chi2", "value", f"{chi:.6f}")
        add("type_tests", f"{a}|{b}", "chi2", "df", df)
        add("type_tests", f"{a}|{b}", "chi2", "p_adj", f"{pa:.6f}")
    for c in CONDITIONS:
        for name, _ in SECTION_NAMES:
            s = rep.section_times[c][name]
            add("section_time", c, name, "mean", f"{s.mean:.6f}")
            add("section_time", c, name, "sd", f"{s.sd:.6f}")
            add("section_time", c, name, "n", s.n)
    for c in CONDITIONS:
        for m in POSTTEST_MEASURES:
            s = rep.posttest[c][m]
            add("posttest", c, m, "mean", f"{s.mean:.6f}")
            add("posttest", c, m, "sd", f"{s.sd:.6f}")
            add("posttest", c, m, "n", s.n)
    for metric, (h, p) in rep.omnibus.items():
        add("omnibus", "all", metric, "H", f"{h:.6f}")
        add("omnibus", "all", metric, "p", f"{p:.6f}")
    for pw in rep.pairwise:
        row = f"{pw.a}|{pw.b}"
        add("pairwise", row, pw.metric, "U", f"{pw.u:.1f}")
        add("pairwise", row, pw.metric, "p", f"{pw.p:.6f}")
        add("pairwise", row, pw.metric, "p_adj", f"{pw.p_adj:.6f}")
        add("pairwise", row, pw.metric, "stars", stars(pw.p_adj))
        add("pairwise", row, pw.metric, "A", f"{pw.effect:.6f}")
        add("pairwise", row, pw.metric, "A_ci", f"{pw.ci[0]:.6f},{pw.ci[1]:.6f}")
    for c in CONDITIONS:
        for k, s in rep.subgroups[c].items():
            add("subgroup", c, k, "mean", f"{s.mean:.6f}")
            add("subgroup", c, k, "n", s.n)
        g = rep.gaps[c]
        if g is not None:
            add("gap", c, "pre", "value", f"{g[0]:.6f}")
            add("gap", c, "post", "value", f"{g[1]:.6f}")
            add("gap", c, "reduction", "percent", f"{g[2]:.6f}")
    body = "\n".join(sep.join(r) for r in rows) + "\n"
    return (rep.header + "\n" if rep.header else "") + body
