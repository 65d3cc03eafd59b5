#!/usr/bin/env python3
"""Generate the CVSS v3.1 base-score oracle fixture.

Port of the FIRST.org reference calculator (cvsscalc31.js) for the base
metric group.  Enumerates every legal vector in canonical order and writes
"vector,score" lines to cvss31_oracle.csv next to this script.

Run once; the fixture is checked in and the test suite compares against it
exactly.
"""

import math
import os

WEIGHT_AV = {"N": 0.85, "A": 0.62, "L": 0.55, "P": 0.2}
WEIGHT_AC = {"L": 0.77, "H": 0.44}
WEIGHT_PR = {
    "U": {"N": 0.85, "L": 0.62, "H": 0.27},
    "C": {"N": 0.85, "L": 0.68, "H": 0.5},
}
WEIGHT_UI = {"N": 0.85, "R": 0.62}
WEIGHT_CIA = {"N": 0.0, "L": 0.22, "H": 0.56}

EXPLOITABILITY_COEFFICIENT = 8.22
SCOPE_COEFFICIENT = 1.08


def roundup(value: float) -> float:
    # JS: Math.round(input * 100000); Math.round rounds half toward +inf,
    # which for non-negative input is floor(x + 0.5).
    int_input = math.floor(value * 100000 + 0.5)
    if int_input % 10000 == 0:
        return int_input / 100000.0
    return (math.floor(int_input / 10000) + 1) / 10.0


def base_score(av: str, ac: str, pr: str, ui: str, s: str, c: str, i: str, a: str) -> float:
    iss = 1.0 - ((1.0 - WEIGHT_CIA[c]) * (1.0 - WEIGHT_CIA[i]) * (1.0 - WEIGHT_CIA[a]))
    if s == "U":
        impact = 6.42 * iss
    else:
        impact = 7.52 * (iss - 0.029) - 3.25 * math.pow(iss - 0.02, 15)
    exploitability = (
        EXPLOITABILITY_COEFFICIENT * WEIGHT_AV[av] * WEIGHT_AC[ac] * WEIGHT_PR[s][pr] * WEIGHT_UI[ui]
    )
    if impact <= 0:
        return 0.0
    if s == "U":
        return roundup(min(impact + exploitability, 10.0))
    return roundup(min(SCOPE_COEFFICIENT * (impact + exploitability), 10.0))


def main() -> None:
    out_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "cvss31_oracle.csv")
    n = 0
    with open(out_path, "w") as out:
        for av in "NALP":
            for ac in "LH":
                for pr in "NLH":
                    for ui in "NR":
                        for s in "UC":
                            for c in "NLH":
                                for i in "NLH":
                                    for a in "NLH":
                                        vec = (
                                            f"CVSS:3.1/AV:{av}/AC:{ac}/PR:{pr}/UI:{ui}"
                                            f"/S:{s}/C:{c}/I:{i}/A:{a}"
                                        )
                                        out.write(f"{vec},{base_score(av, ac, pr, ui, s, c, i, a):.1f}\n")
                                        n += 1
    assert n == 2592, n
    print(f"wrote {n} rows to {out_path}")


if __name__ == "__main__":
    main()
