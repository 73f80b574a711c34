"""Daily disclosure rates: smoothing, period averages, changepoint.

The moving average restarts at calendar gaps instead of papering over
them, period averages are plain means of daily rates, and the changepoint
scan picks the split that best separates the rate series into two levels.
"""

import datetime as dt
import random

from disclosure.series import (
    daily_rates,
    mean_shift_changepoint,
    period_average,
    sma,
)

# simulate 30 days of labels: rate steps up from ~15% to ~19% on day 20
rng = random.Random(7)
labels = []
start = dt.date(2020, 3, 1)
for d in range(30):
    day = start + dt.timedelta(days=d)
    rate = 0.15 if d < 20 else 0.19
    for _ in range(400):
        labels.append((day, rng.random() < rate))

series = daily_rates(labels)
print(f"{len(series.entries)} days, rates "
      f"{min(series.rates()):.3f}..{max(series.rates()):.3f}")

smoothed = sma(series, 7)
print("\nlast five 7-day moving averages:")
for day, value in smoothed.entries[-5:]:
    print(f"  {day}  {value:.4f}")

pre = period_average(series, start, start + dt.timedelta(days=19))
post = period_average(series, start + dt.timedelta(days=20), start + dt.timedelta(days=29))
print(f"\nfirst 20 days average rate: {pre:.4f}")
print(f"last 10 days average rate:  {post:.4f}")

date, m1, m2 = mean_shift_changepoint(series)
print(f"\nbest mean-shift split: after {date} ({m1:.4f} -> {m2:.4f})")
