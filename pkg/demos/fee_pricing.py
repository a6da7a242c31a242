"""Walkthrough: cost-based fees and the perpetual storage price.

Fees track quoted hardware costs instead of an internal gas market: the
computation component is the quoted per-transaction cost times the number
of validators, and storage is priced once, forever, as a geometric series
of declining yearly costs.
"""

from decimal import Decimal

from bionode.fees import (
    DEFAULT_ANNUAL_DECLINE,
    HOURS_PER_YEAR,
    UNITS_PER_TOKEN,
    load_quote,
    quote_transaction,
)

quote = load_quote()
print(f"base compute cost: ${quote.compute_cost_per_tx_usd}/tx "
      f"(largest provider quote)")
print(f"base storage cost: ${quote.storage_cost_gb_hour_usd}/GB-hour")
print(f"exchange rate: {quote.hmnd_per_usd} tokens per USD\n")

# --- the series and its closed form ----------------------------------------

d = DEFAULT_ANNUAL_DECLINE
year0 = quote.storage_cost_gb_hour_usd * HOURS_PER_YEAR
print(f"storing 1 GB, year-0 cost ${year0:.6f}, declining {d:.2%}/year:")
total, factor = Decimal(0), Decimal(1)
for year in range(6):
    total += year0 * factor
    factor *= 1 - d
    print(f"  through year {year}: ${total:.6f}")
closed = year0 / d
print(f"  ... closed form (infinite series): ${closed:.6f} "
      f"= {closed / year0:.4f}x the first year")

# --- fee table ---------------------------------------------------------------

print(f"\n{'size GB':>10} {'validators':>10} {'compute':>12} {'storage':>14} {'total units':>14}")
for size in ("0", "0.000001", "0.001", "1"):
    for validators in (1, 10, 100):
        b = quote_transaction(quote, Decimal(size), validators)
        print(f"{size:>10} {validators:>10} {b.computational:>12,} "
              f"{b.storage_perpetual:>14,} {b.total:>14,}")
print(f"\n(1 token = {UNITS_PER_TOKEN:,} units; every component is rounded up "
      "so the protocol never undercharges)")
