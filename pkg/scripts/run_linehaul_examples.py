#!/usr/bin/env python3
"""Optimize the three reference linehaul corridors and print the full
cost-versus-tenders tables (one row per tender group per locomotive)."""
from tenderopt.core_model import feasible_multiple_max
from tenderopt.general_model import optimal_n_general, total_cost_general
from tenderopt.linehaul_cases import ALL_CASES


def main() -> None:
    for case in ALL_CASES:
        params = case.model()
        optimum = optimal_n_general(params, multiple=case.locomotives)
        print(f"\n== {case.name}  (distance {case.distance_mi:g} mi, "
              f"{case.locomotives} locomotive(s))")
        print(f"   optimum: {optimum.per_group} tender(s) per locomotive, "
              f"range {optimum.evaluation.range_mi:g} mi, "
              f"{optimum.evaluation.stops_practical} stops, "
              f"trip {optimum.evaluation.trip_h:.1f} h")
        header = (f"{'m':>3} {'range':>7} {'stops':>5} {'trip_h':>7} "
                  f"{'locomotive':>12} {'tender':>12} {'charging':>12} "
                  f"{'delay':>12} {'total':>13}")
        print(header)
        m_max = min(feasible_multiple_max(params.base, case.locomotives), 10)
        for m in range(1, m_max + 1):
            ev = total_cost_general(params, float(m * case.locomotives))
            comp = ev.cost_components
            delay = comp["delay"] + comp["constant"]
            print(f"{m:>3} {ev.range_mi:>7.0f} {ev.stops_practical:>5} "
                  f"{ev.trip_h:>7.1f} {comp['locomotive']:>12,.0f} "
                  f"{comp['tender']:>12,.0f} {comp['charging']:>12,.0f} "
                  f"{delay:>12,.0f} {ev.total_cost:>13,.0f}")


if __name__ == "__main__":
    main()
