"""Loading grid cases and computing flow sensitivities.

Every bundled case is a small JSON file: buses, lines with susceptances
and MW limits, generators with dispatch ranges and costs, and a nominal
load profile.  The PTDF matrix maps nodal injections (withdrawn at the
slack bus) to DC line flows; it is the only physics the screening ever
needs.
"""

import numpy as np

from ucscreen import bundled_case_names, compute_ptdf, load_bundled_case

print("bundled cases:", ", ".join(bundled_case_names()))

case = load_bundled_case("five_bus")
print(f"\n{case.name}: {case.n_buses} buses, {case.n_lines} lines, "
      f"{case.n_gens} generators, slack bus {case.slack_bus}")
for g in case.generators:
    print(f"  gen @ bus {g.bus}: x in [{g.x_min}, {g.x_max}] MW "
          f"at ${g.cost}/MWh")
print("  nominal load:", case.nominal_load, "MW")

ptdf = compute_ptdf(case)
np.set_printoptions(precision=4, suppress=True)
print("\nPTDF (rows = lines, columns = buses):")
print(ptdf.entries)

# Sanity: the slack column is zero, and a balanced injection produces
# flows that conserve power at every bus.
s = case.bus_index(case.slack_bus)
assert np.all(ptdf.entries[:, s] == 0.0)

injection = np.array([2.0, 1.0, -1.5, -1.0, -0.5])  # sums to zero
flows = ptdf.entries @ injection
print("\nflows for a balanced 2 MW / 1 MW injection:", flows)
for n, bus in enumerate(case.buses):
    inflow = sum(f if case.bus_index(ln.to_bus) == n else -f
                 for ln, f in zip(case.lines, flows)
                 if n in (case.bus_index(ln.from_bus), case.bus_index(ln.to_bus)))
    print(f"  bus {bus}: injection {injection[n]:+.2f}, "
          f"net line inflow {inflow:+.2f}")
