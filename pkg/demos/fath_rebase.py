"""Walkthrough: proportional supply rebases driven by fee totals.

When period fees rise by r, every wallet grows by r; when they fall, every
wallet shrinks by the same fraction. Integer balances make exactness a
real concern: the largest-remainder rule conserves the supply to the unit.
"""

import random
from fractions import Fraction

from bionode.fath import LedgerSnapshot, PeriodStats, rebalance, run_period

# --- the canonical three-period example ------------------------------------

ledger = LedgerSnapshot(balances={"you": 1_000, "everyone-else": 9_999_000})
fees = [1_000_000, 2_000_000, 1_500_000]

print("year  fees        kind     supply        your wallet")
print(f"  0   {fees[0]:>9,}   -        {ledger.total_supply:>10,}   {ledger.balances['you']:>6,}")
for year in (1, 2):
    ledger, outcome = run_period(
        ledger, PeriodStats(fees[year - 1]), PeriodStats(fees[year])
    )
    print(f"  {year}   {fees[year]:>9,}   {outcome.kind:<7}  "
          f"{ledger.total_supply:>10,}   {ledger.balances['you']:>6,}")

# --- conservation under awkward ratios -------------------------------------

rng = random.Random(5)
ledger = LedgerSnapshot(
    balances={f"w{i}": rng.randrange(1, 10**9) for i in range(1000)}
)
print(f"\n1000 wallets, supply {ledger.total_supply:,}")
for ratio in (Fraction(1, 3), Fraction(-1, 7), Fraction(355, 113)):
    new, outcome = rebalance(ledger, ratio)
    drift = sum(new.balances.values()) - new.total_supply
    worst = max(
        abs(Fraction(new.balances[a]) - ledger.balances[a] * (1 + ratio))
        for a in ledger.balances
    )
    print(f"  ratio {str(ratio):>8}: {outcome.kind:<7} new supply {new.total_supply:>15,} "
          f"drift {drift} units, worst per-wallet error {float(worst):.3f}")
    ledger = new

# --- a mint followed by the inverse burn lands back where it started --------

start = LedgerSnapshot(balances={"a": 101, "b": 4_999, "c": 77_777})
up, _ = rebalance(start, Fraction(13, 100))
down, _ = rebalance(up, Fraction(-13, 113))
print("\nmint 13% then burn 13/113:",
      {a: (start.balances[a], down.balances[a]) for a in start.balances})
