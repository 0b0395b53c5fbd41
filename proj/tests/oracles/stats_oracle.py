"""Frozen reference values for the statistics, correlation and kappa tests.

Run from the repository root:  python3 tests/oracles/stats_oracle.py
Writes tests/data/stats_oracle.json. Inputs are stored alongside the expected
outputs so the C++ side never regenerates random data.
"""
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import scipy
import scipy.stats as st
import sklearn
import statsmodels
import statsmodels.formula.api as smf
from sklearn.metrics import cohen_kappa_score
from statsmodels.stats.anova import AnovaRM

OUT = Path(__file__).resolve().parents[1] / "data" / "stats_oracle.json"
rng = np.random.default_rng(20240611)


def rm_case():
    n = int(rng.integers(5, 16))
    k = int(rng.integers(3, 6))
    subj = rng.normal(0, 1.0, size=(n, 1))
    eff = rng.normal(0, 0.7, size=(1, k))
    data = np.round(4 + subj + eff + rng.normal(0, 1.0, size=(n, k)), 3)
    df = pd.DataFrame([(i, j, data[i, j]) for i in range(n) for j in range(k)], columns=["s", "c", "y"])
    r = AnovaRM(df, "y", "s", within=["c"]).fit().anova_table.iloc[0]
    return {"data": data.tolist(), "F": float(r["F Value"]), "df1": float(r["Num DF"]),
            "df2": float(r["Den DF"]), "p": float(r["Pr > F"])}


def mixed_case():
    g = int(rng.integers(2, 4))
    sizes = [int(rng.integers(3, 8)) for _ in range(g)]
    k = int(rng.integers(3, 6))
    rows, groups = [], []
    for gi, ng in enumerate(sizes):
        shift = rng.normal(0, 0.8)
        slope = rng.normal(0, 0.4, size=k)
        for _ in range(ng):
            rows.append(4 + shift + slope + rng.normal(0, 1.0) + rng.normal(0, 1.0, size=k))
            groups.append(gi * 3 + 1)  # arbitrary integer labels
    data = np.round(np.array(rows), 3)
    long = pd.DataFrame([(i, groups[i], j, data[i, j]) for i in range(len(rows)) for j in range(k)],
                        columns=["s", "g", "c", "y"])
    # Sequential SS as differences of residual SS between nested OLS fits.
    # anova_lm(typ=1) is not used: C(s) is collinear with C(g) and its QR
    # based sums of squares come out wrong for unbalanced groups.
    formulas = ["y ~ 1", "y ~ C(g)", "y ~ C(g) + C(s)", "y ~ C(g) + C(s) + C(c)",
                "y ~ C(g) + C(s) + C(c) + C(g):C(c)"]
    rss = [smf.ols(f, data=long).fit().ssr for f in formulas]
    ss_g, ss_s, ss_c, ss_gc = (rss[i] - rss[i + 1] for i in range(4))
    ss_e = rss[4]
    n_total = len(rows)
    df_g, df_s = g - 1, n_total - g
    df_c, df_gc, df_e = k - 1, (k - 1) * (g - 1), (k - 1) * (n_total - g)
    assert abs(smf.ols(formulas[4], data=long).fit().df_resid - df_e) < 1e-9
    f_c = (ss_c / df_c) / (ss_e / df_e)
    f_gc = (ss_gc / df_gc) / (ss_e / df_e)
    f_g = (ss_g / df_g) / (ss_s / df_s)
    return {"data": data.tolist(), "group": groups,
            "within": {"F": f_c, "df1": df_c, "df2": df_e, "p": float(st.f.sf(f_c, df_c, df_e))},
            "interaction": {"F": f_gc, "df1": df_gc, "df2": df_e, "p": float(st.f.sf(f_gc, df_gc, df_e))},
            "between": {"F": f_g, "df1": df_g, "df2": df_s, "p": float(st.f.sf(f_g, df_g, df_s))}}


def groups_case():
    g = int(rng.integers(3, 6))
    out = []
    for _ in range(g):
        n = int(rng.integers(4, 13))
        out.append(np.round(rng.normal(rng.normal(4, 0.8), 1.2, size=n), 3))
    return out


def oneway_case():
    gs = groups_case()
    r = st.f_oneway(*gs)
    n = sum(len(x) for x in gs)
    return {"groups": [x.tolist() for x in gs], "F": float(r.statistic), "p": float(r.pvalue),
            "df1": len(gs) - 1, "df2": n - len(gs)}


def tukey_case():
    gs = groups_case()
    res = st.tukey_hsd(*gs)
    n = sum(len(x) for x in gs)
    mse = sum(((x - x.mean()) ** 2).sum() for x in gs) / (n - len(gs))
    pairs = []
    for a in range(len(gs)):
        for b in range(a + 1, len(gs)):
            se = np.sqrt(mse / 2 * (1 / len(gs[a]) + 1 / len(gs[b])))
            diff = gs[b].mean() - gs[a].mean()
            pairs.append({"a": a, "b": b, "mean_diff": float(diff), "q": float(abs(diff) / se),
                          "p": float(res.pvalue[a, b])})
    return {"groups": [x.tolist() for x in gs], "pairs": pairs}


def ttest_case():
    a = np.round(rng.normal(4.5, 1.4, size=int(rng.integers(5, 31))), 3)
    b = np.round(rng.normal(4.0, 1.6, size=int(rng.integers(5, 31))), 3)
    r = st.ttest_ind(a, b, equal_var=True)
    sp = np.sqrt(((len(a) - 1) * a.var(ddof=1) + (len(b) - 1) * b.var(ddof=1)) / (len(a) + len(b) - 2))
    return {"a": a.tolist(), "b": b.tolist(), "t": float(r.statistic), "p": float(r.pvalue),
            "df": len(a) + len(b) - 2, "d": float((a.mean() - b.mean()) / sp)}


def pearson_case():
    n = int(rng.integers(5, 41))
    x = rng.normal(0, 1, size=n)
    y = rho = float(rng.uniform(-0.9, 0.9))
    y = rho * x + np.sqrt(1 - rho * rho) * rng.normal(0, 1, size=n)
    r = st.pearsonr(x, y)
    return {"x": x.tolist(), "y": y.tolist(), "r": float(r.statistic), "p": float(r.pvalue)}


def kappa_case():
    n = int(rng.integers(10, 80))
    codes = [f"{s}-({t})" for s in range(1, 6) for t in range(1, 4)]
    pool = list(rng.choice(codes, size=int(rng.integers(2, 8)), replace=False))
    a = list(rng.choice(pool, size=n))
    agree = float(rng.uniform(0.2, 0.95))
    b = [x if rng.uniform() < agree else str(rng.choice(pool)) for x in a]
    if len(set(a)) < 2:
        a[0], a[1] = pool[0], pool[1]
    return {"a": [str(x) for x in a], "b": b, "kappa": float(cohen_kappa_score(a, b))}


def ptukey_case(q, g, df):
    return {"q": q, "groups": g, "df": df, "cdf": float(st.studentized_range.cdf(q, g, df))}


# Fixed 8 subjects x 4 conditions, small integer scores.
RM_FIXED = [[45, 50, 55, 70], [42, 42, 45, 60], [36, 41, 43, 62], [39, 35, 40, 59],
            [51, 55, 59, 72], [44, 49, 56, 71], [40, 42, 50, 65], [42, 47, 52, 64]]


def rm_fixed():
    data = np.array(RM_FIXED, dtype=float)
    df = pd.DataFrame([(i, j, data[i, j]) for i in range(8) for j in range(4)], columns=["s", "c", "y"])
    r = AnovaRM(df, "y", "s", within=["c"]).fit().anova_table.iloc[0]
    return {"data": RM_FIXED, "F": float(r["F Value"]), "df1": float(r["Num DF"]), "df2": float(r["Den DF"]),
            "p": float(r["Pr > F"])}


def kappa_table():
    # 2x2 contingency AA:20, AB:5, BA:10, BB:15 expanded to label lists.
    a = ["1-(1)"] * 25 + ["1-(2)"] * 25
    b = ["1-(1)"] * 20 + ["1-(2)"] * 5 + ["1-(1)"] * 10 + ["1-(2)"] * 15
    return {"a": a, "b": b, "kappa": float(cohen_kappa_score(a, b))}


def main():
    doc = {
        "generator": {"python": sys.version.split()[0], "numpy": np.__version__, "scipy": scipy.__version__,
                      "statsmodels": statsmodels.__version__, "sklearn": sklearn.__version__},
        "rm_anova": [rm_case() for _ in range(20)],
        "mixed_anova": [mixed_case() for _ in range(20)],
        "oneway_anova": [oneway_case() for _ in range(20)],
        "tukey_hsd": [tukey_case() for _ in range(20)],
        "ttest_independent": [ttest_case() for _ in range(20)],
        "pearson": [pearson_case() for _ in range(50)],
        "kappa": [kappa_case() for _ in range(50)],
        "rm_fixed": rm_fixed(),
        "kappa_table": kappa_table(),
        "ptukey": [ptukey_case(q, g, df) for q in (0.5, 1.5, 3.0, 4.2, 6.0)
                   for g in (2, 3, 5, 10) for df in (5, 12, 40, 200)],
    }
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
