#!/usr/bin/env python3
"""Generate the synthetic desk-scale dataset (3 zones, 336 h, 4 rollouts).

Run from the repo root: python3 scripts/make_desk_data.py [outdir]
Output is deterministic for a given seed.
"""
import math
import sys
from pathlib import Path

import numpy as np

HOURS = 336
SEED = 20300101
ZONES = ["DE", "DK", "PL"]

# building table: (group, floor area Mm2, kWh/m2, shares per rollout (air, ground))
BUILDINGS = [
    ("sfh_pre1979", 247, 276, {"reference": (0.008, 0.002), "slow": (0.008, 0.002), "government": (0.008, 0.002), "fast": (0.2768, 0.0692)}),
    ("sfh_pre1979", 431, 203, {"reference": (0.008, 0.002), "slow": (0.008, 0.002), "government": (0.008, 0.002), "fast": (0.2768, 0.0692)}),
    ("sfh_1979_2009", 446, 153, {"reference": (0.0136, 0.0034), "slow": (0.0136, 0.0034), "government": (0.0136, 0.0034), "fast": (0.72, 0.18)}),
    ("sfh_1979_2009", 528, 112, {"reference": (0.0488, 0.0122), "slow": (0.38288, 0.09572), "government": (0.60048, 0.15012), "fast": (0.72, 0.18)}),
    ("sfh_post2009", 306, 66, {"reference": (0.272, 0.068), "slow": (0.272, 0.068), "government": (0.72, 0.18), "fast": (0.72, 0.18)}),
    ("sfh_post2009", 375, 15, {"reference": (0.272, 0.068), "slow": (0.272, 0.068), "government": (0.72, 0.18), "fast": (0.72, 0.18)}),
    ("mfh", 170, 223, {r: (0.0104, 0.0026) for r in ("reference", "slow", "government", "fast")}),
    ("mfh", 322, 164, {r: (0.0104, 0.0026) for r in ("reference", "slow", "government", "fast")}),
    ("mfh", 230, 130, {r: (0.0, 0.0) for r in ("reference", "slow", "government", "fast")}),
    ("mfh", 239, 103, {r: (0.0112, 0.0028) for r in ("reference", "slow", "government", "fast")}),
    ("mfh", 181, 51, {r: (0.128, 0.032) for r in ("reference", "slow", "government", "fast")}),
    ("mfh", 232, 11, {r: (0.128, 0.032) for r in ("reference", "slow", "government", "fast")}),
]
# heating threshold temperature of each group's sigmoid profile
THRESHOLD = {"sfh_pre1979": 16.0, "sfh_1979_2009": 15.0, "sfh_post2009": 13.0, "mfh": 15.0}

ROLLOUTS = {
    "reference": dict(n=1.7, pel=8.7, cap=19.6, heat=18.6),
    "slow": dict(n=3.0, pel=14.5, cap=32.7, heat=43.3),
    "government": dict(n=6.0, pel=27.5, cap=61.9, heat=74.0),
    "fast": dict(n=10.0, pel=52.6, cap=118.5, heat=195.3),
}

TECHS = [
    # id, kind, overnight, fom, lifetime, avail, eff, carbon, fuel, flags
    ("lignite", "thermal", 1500, 30, 35, 0.95, 0.38, 0.40, 5.5, ["coal_fired"]),
    ("hard_coal", "thermal", 1300, 30, 35, 0.96, 0.43, 0.34, 8.3, ["coal_fired"]),
    ("ccgt", "thermal", 800, 20, 25, 0.96, 0.542, 0.20, 30.0, ["gas_fired"]),
    ("ocgt", "thermal", 400, 15, 25, 0.95, 0.40, 0.20, 30.0, ["gas_fired"]),
    ("bioenergy", "thermal", 1951, 100, 30, 1.00, 0.49, 0.0, 32.5, ["counts_as_res"]),
    ("wind_onshore", "renewable", 1182, 35, 25, 1.0, 1.0, 0.0, 0.0, ["wind", "counts_as_res"]),
    ("wind_offshore", "renewable", 2506, 100, 25, 1.0, 1.0, 0.0, 0.0, ["wind", "counts_as_res"]),
    ("solar_pv", "renewable", 400, 25, 25, 1.0, 1.0, 0.0, 0.0, ["counts_as_res"]),
]

INF = float("inf")
BOUNDS = {
    "DE": {"lignite": (0, 9.30), "hard_coal": (0, 9.80), "ccgt": (0, INF), "ocgt": (0, INF), "bioenergy": 6.00,
           "wind_onshore": (56.0, 115.0), "wind_offshore": (7.77, 30.0), "solar_pv": (59.0, INF),
           "battery": ((0, INF), (0, INF)), "pumped_hydro": (9.15, 862.82), "reservoir": (0.82, 240.0)},
    "DK": {"hard_coal": (0, 0.77), "bioenergy": 0.67, "wind_onshore": 5.48, "wind_offshore": 4.78, "solar_pv": 4.75,
           "battery": ((0, INF), (0, INF))},
    "PL": {"lignite": (0, 6.32), "hard_coal": (0, 9.88), "ccgt": (0, 5.00), "bioenergy": 1.41,
           "wind_onshore": 11.28, "wind_offshore": 0.90, "solar_pv": 12.19,
           "battery": ((0, INF), (0, INF)), "pumped_hydro": (1.55, 7.66), "reservoir": (0.42, 1.0)},
}
NTC = [("DE", "DK", 4.0), ("DE", "PL", 3.0)]
LOAD = {"DE": (62.0, 9.0), "DK": (3.6, 0.7), "PL": (19.0, 3.0)}  # GW mean, daily swing
RESERVOIR_CF = 0.3


def gw(x):
    return ".inf" if math.isinf(x) else repr(float(x))


def smooth_noise(rng, n, corr_hours, sd):
    a = math.exp(-1.0 / corr_hours)
    out = np.empty(n)
    v = rng.normal(0, sd)
    for i in range(n):
        v = a * v + math.sqrt(1 - a * a) * rng.normal(0, sd)
        out[i] = v
    return out


def write_csv(path, header, columns, exact=False):
    with open(path, "w") as f:
        f.write(",".join(["hour"] + header) + "\n")
        for h in range(HOURS):
            f.write(",".join([str(h + 1)] + [repr(float(c[h])) if exact else f"{c[h]:.6f}" for c in columns]) + "\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/desk-europe")
    (out / "series").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    hod = np.arange(HOURS) % 24
    day = np.arange(HOURS) // 24
    weekend = (day % 7) >= 5

    # focal temperature: cold second week, diurnal cycle
    synoptic = smooth_noise(rng, HOURS, 60, 3.0)
    temp = 2.0 - 2.5 * (np.arange(HOURS) / HOURS) + synoptic + 3.0 * np.sin(2 * math.pi * (hod - 9) / 24)
    write_csv(out / "series/temperature.csv", ["DE"], [temp])

    # load: daily shape, weekend dip, mild temperature response
    daily = 0.5 * (1 - np.cos(2 * math.pi * (hod - 3) / 24)) ** 1.2
    load_cols = []
    for z in ZONES:
        mean, swing = LOAD[z]
        col = mean + swing * (daily - daily.mean()) - 0.08 * mean * weekend + 0.004 * mean * (2.0 - temp)
        load_cols.append(col * 1000.0)
    write_csv(out / "series/load.csv", ZONES, load_cols)

    # capacity factors: shared synoptic wind regime with zonal noise, winter solar
    regime = smooth_noise(rng, HOURS, 40, 1.0)
    elevation = np.clip(np.sin(math.pi * (hod - 8) / 8), 0, None)
    cf_header, cf_cols = [], []
    for z in ZONES:
        local = smooth_noise(rng, HOURS, 12, 0.5)
        on = 1 / (1 + np.exp(-(regime + local - 0.4) * 1.6)) * 0.75
        off = 1 / (1 + np.exp(-(regime + local + 0.2) * 1.6)) * 0.9
        clouds = np.clip(1 - 0.6 * (0.5 + 0.5 * np.tanh(smooth_noise(rng, HOURS, 18, 1.0))), 0.1, 1)
        pv = 0.55 * elevation * clouds
        for tech, col in (("wind_onshore", on), ("wind_offshore", off), ("solar_pv", pv)):
            cf_header.append(f"{z}.{tech}")
            cf_cols.append(np.clip(col, 0, 1))
    write_csv(out / "series/capacity_factors.csv", cf_header, cf_cols)

    inflow_z = ["DE", "PL"]
    write_csv(out / "series/hydro_inflow.csv", inflow_z,
              [np.full(HOURS, RESERVOIR_CF * BOUNDS[z]["reservoir"][0] * 1000.0) for z in inflow_z])

    # EV: evening peak, normalized
    ev = 1.0 + 1.5 * np.exp(-((hod - 19) % 24) ** 2 / 8.0) + 0.8 * np.exp(-((hod - 2) % 24) ** 2 / 6.0)
    ev = ev / ev.sum()
    ev = [float(v) for v in ev]
    ev[-1] += 1.0 - sum(ev)
    write_csv(out / "series/ev_profile.csv", ["DE"], [ev], exact=True)

    # heat: temperature-driven sigmoid plus hot-water base and morning/evening peaks
    groups = []
    for b in BUILDINGS:
        if b[0] not in groups:
            groups.append(b[0])
    shape = 1 + 0.25 * np.exp(-((hod - 7) ** 2) / 4.0) + 0.15 * np.exp(-((hod - 19) ** 2) / 6.0) - 0.2 * (hod < 5)
    heat_cols = []
    for g in groups:
        space = 1 / (1 + np.exp((temp - THRESHOLD[g] + 10) / 4.0))
        heat_cols.append((0.15 + space) * shape)
    write_csv(out / "series/heat_demand.csv", groups, heat_cols)

    # aggregate archetypes: heat-weighted shares
    arche = []
    for g in groups:
        rows = [b for b in BUILDINGS if b[0] == g]
        demand = sum(r[1] * r[2] for r in rows) / 1000.0  # TWh
        shares = {}
        for r in ROLLOUTS:
            air = sum(x[1] * x[2] * x[3][r][0] for x in rows) / 1000.0 / demand
            ground = sum(x[1] * x[2] * x[3][r][1] for x in rows) / 1000.0 / demand
            shares[r] = (air, ground)
        arche.append((g, demand, shares))

    y = []
    y.append("# synthetic desk-scale dataset, generated by scripts/make_desk_data.py")
    y.append("name: desk-europe")
    y.append("hours_per_year: 8760")
    y.append(f"horizon_hours: {HOURS}")
    y.append("value_of_lost_load: 3000")
    y.append("zones:")
    for z in ZONES:
        y.append(f"  - {{id: {z}, investment: {'true' if z == 'DE' else 'false'}}}")
    y.append("technologies:")
    for t in TECHS:
        tid, kind, oc, fom, life, avail, eff, carbon, fuel, flags = t
        y.append(f"  - id: {tid}")
        y.append(f"    kind: {kind}")
        y.append(f"    overnight_cost: {oc}")
        y.append(f"    fixed_om: {fom}")
        y.append(f"    lifetime: {life}")
        y.append("    interest_rate: 0.04")
        y.append(f"    availability: {avail}")
        y.append(f"    efficiency: {eff}")
        y.append(f"    carbon_content: {carbon}")
        y.append(f"    fuel_cost: {fuel}")
        for f in flags:
            y.append(f"    {f}: true")
    y += [
        "  - id: battery",
        "    kind: storage",
        "    overnight_cost: 160",
        "    overnight_cost_energy: 142",
        "    lifetime: 20",
        "    interest_rate: 0.04",
        "    availability: 0.98",
        "    efficiency: 0.96",
        "    efficiency_charge: 0.96",
        "    marginal_cost_adder: 0.5",
        "    marginal_cost_charge: 0.5",
        "  - id: pumped_hydro",
        "    kind: storage",
        "    overnight_cost: 1100",
        "    overnight_cost_energy: 10",
        "    lifetime: 80",
        "    interest_rate: 0.04",
        "    availability: 0.89",
        "    efficiency: 0.91",
        "    efficiency_charge: 0.97",
        "    marginal_cost_adder: 0.5",
        "    marginal_cost_charge: 0.5",
        "  - id: reservoir",
        "    kind: reservoir",
        "    overnight_cost: 3000",
        "    fixed_om: 30",
        "    lifetime: 50",
        "    interest_rate: 0.04",
        "    efficiency: 0.9",
        "    counts_as_res: true",
        "  - id: electrolysis",
        "    kind: electrolysis",
        "    efficiency: 0.71",
    ]
    y.append("bounds:")
    for z in ZONES:
        for tech, v in BOUNDS[z].items():
            if tech == "battery":
                (pmin, pmax), (emin, emax) = v
                y.append(f"  - {{zone: {z}, tech: {tech}, min_gw: {gw(pmin)}, max_gw: {gw(pmax)}, "
                         f"energy_min_gwh: {gw(emin)}, energy_max_gwh: {gw(emax)}}}")
            elif tech in ("pumped_hydro", "reservoir"):
                p, e = v
                extra = f", energy_fixed_gwh: {gw(e)}" if tech == "pumped_hydro" else ""
                y.append(f"  - {{zone: {z}, tech: {tech}, fixed_gw: {gw(p)}{extra}}}")
            elif isinstance(v, tuple):
                y.append(f"  - {{zone: {z}, tech: {tech}, min_gw: {gw(v[0])}, max_gw: {gw(v[1])}}}")
            else:
                y.append(f"  - {{zone: {z}, tech: {tech}, fixed_gw: {gw(v)}}}")
    y.append("trade:")
    for a, b, n in NTC:
        y.append(f"  - {{from: {a}, to: {b}, ntc_gw: {n}}}")
    y.append("heat:")
    y.append("  sink_temperature: 50")
    y.append("  ground_source_temperature: 10")
    y.append("  eta_air: 0.35")
    y.append("  eta_ground: 0.45")
    y.append("  standing_loss: 0")
    y.append("  archetypes:")
    for g, demand, shares in arche:
        y.append(f"    - id: {g}")
        y.append(f"      annual_heat_demand_twh: {demand!r}")
        y.append("      shares:")
        for r, (a, gr) in shares.items():
            y.append(f"        {r}: {{air: {a!r}, ground: {gr!r}}}")
    y.append("rollouts:")
    for r, v in ROLLOUTS.items():
        y.append(f"  {r}:")
        y.append(f"    n_heat_pumps_million: {v['n']}")
        y.append(f"    power_rating_gw: {v['pel']}")
        y.append(f"    thermal_capacity_gw: {v['cap']}")
        y.append("    share_air: 0.8")
        y.append("    share_ground: 0.2")
        y.append(f"    yearly_heat_twh: {v['heat']}")
    y.append("rollout: government")
    y += [
        "policy:",
        "  res_share_target: 0.8",
        "  hp_additionality: true",
        "  gas_price: 50",
        "  carbon_price: 130",
        "  ep_ratio_hours: 2",
        "  electrolysis_capacity_gw: 10",
        "  h2_demand_twh: 28",
        "  h2_conversion: 0.71",
        "  ev_annual_energy_twh: 36",
        "  coal_phase_out: false",
        "  wind_cap_removed: false",
        "series:",
        "  load: series/load.csv",
        "  capacity_factors: series/capacity_factors.csv",
        "  hydro_inflow: series/hydro_inflow.csv",
        "  ev_profile: series/ev_profile.csv",
        "  heat_demand: series/heat_demand.csv",
        "  temperature: series/temperature.csv",
    ]
    (out / "desk.yaml").write_text("\n".join(y) + "\n")


if __name__ == "__main__":
    main()
