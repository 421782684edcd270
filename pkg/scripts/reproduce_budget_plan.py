"""Error budget for both correction schemes and the drive plan at the experiment settings."""

from prespa import budget, planner
from prespa.model import SystemParams


def main():
    p = SystemParams()
    passive = budget.passive_budget(p)
    active = budget.active_budget(p)
    print(budget.compare_text(budget.compare(passive, active)))
    flagged = [(s.scheme, k, e.rate, e.tabulated) for s in (passive, active) for k, e in s.entries.items() if e.flags]
    for scheme, name, rate, tab in flagged:
        print(f"flagged {scheme}/{name}: computed {rate:.3f}, tabulated {tab}")
    print()
    plan = planner.plan(p, 55.0, 160.0)
    print(plan.to_text())
    stark = planner.stark_shift([0.0033], p.alpha_q)
    print(f"beta 0.0033 -> stark {stark:.3f} kHz -> omega1 est {planner.rabi_from_stark(stark, p.chi_ge):.1f} kHz")
    print(f"stark 32 kHz -> omega2 est {planner.rabi_from_stark(32.0, p.chi_qr):.1f} kHz")
    print(f"collisions: {planner.collision_check(plan, p) or 'none'}")


if __name__ == "__main__":
    main()
