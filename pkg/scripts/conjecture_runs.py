#!/usr/bin/env python3
"""Run the quintic/sextic Hermite conjecture program and print the report.

Equivalent to `steinforge conjecture --hermite {5,6} ...` at the standard
desk-scale bounds, with the extrema-root comparison added for the sextic
(the monic cubic through the row's radical extrema values, constant -36000).
"""
from __future__ import annotations

import json

from steinforge.catalog import catalog
from steinforge.derivation import leading_coefficient_report, minimal_scan
from steinforge.gaussian import hermite


def run(n: int, max_order: int, max_degree: int) -> dict:
    P = hermite(n)
    conjectured = catalog(f"table1({n})").leading_coefficient
    scan = minimal_scan(P, max_order, max_degree)
    out = {
        "hermite": n,
        "bounds": {"max_order": max_order, "max_degree": max_degree},
        "minimal": list(scan.minimal) if scan.minimal else None,
        "grid_found": sorted([list(c) for c, s in scan.grid.items()
                              if s == "found"]),
        "conjectured_leading": conjectured.to_strings(),
    }
    if scan.result is not None:
        lead = scan.result.operator.coefficients[-1]
        out["leading_coefficient"] = lead.to_strings()
        out["comparison"] = leading_coefficient_report(
            scan.result, conjectured).to_dict()
        out["conjecture_divides_leading"] = conjectured.divides(lead)
    return out


def main() -> None:
    print(json.dumps(run(5, 10, 6), indent=2))
    print(json.dumps(run(6, 8, 6), indent=2))


if __name__ == "__main__":
    main()
