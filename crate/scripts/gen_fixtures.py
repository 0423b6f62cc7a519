#!/usr/bin/env python3
"""Regenerate the synthetic daily candle fixtures under data/fixtures/candles.

Prices follow a seeded geometric random walk so the files are reproducible.
"""
import datetime as dt
import pathlib
import random

BARS = 250
END = dt.date(2021, 6, 30)

TICKERS = {
    "AAPL": (136.0, 0.016),
    "AMZN": (3440.0, 0.015),
    "FB": (347.0, 0.018),
    "MSFT": (270.0, 0.013),
    "GOOGL": (2440.0, 0.014),
    "AMD": (93.0, 0.025),
    "TSLA": (680.0, 0.032),
    "NFLX": (528.0, 0.02),
    "NVDA": (800.0, 0.024),
    "ACME": (42.0, 0.012),
}


def trading_days(end, count):
    days = []
    d = end
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d -= dt.timedelta(days=1)
    return list(reversed(days))


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures" / "candles"
    out.mkdir(parents=True, exist_ok=True)
    days = trading_days(END, BARS)
    for i, (ticker, (last, vol)) in enumerate(sorted(TICKERS.items())):
        rng = random.Random(1000 + i)
        # walk backwards from the anchor close so the newest bar lands near `last`
        closes = [last]
        for _ in range(BARS - 1):
            closes.append(closes[-1] / (1.0 + rng.gauss(0.0005, vol)))
        closes.reverse()
        rows = []
        prev = closes[0]
        for day, close in zip(days, closes):
            open_ = prev * (1.0 + rng.gauss(0.0, vol / 3))
            hi = max(open_, close) * (1.0 + abs(rng.gauss(0.0, vol / 2)))
            lo = min(open_, close) * (1.0 - abs(rng.gauss(0.0, vol / 2)))
            volume = int(rng.uniform(0.5, 1.5) * 10_000_000 / max(close, 1.0) * 100)
            rows.append((day.isoformat(), round(open_, 2), round(hi, 2), round(lo, 2), round(close, 2), volume))
            prev = close
        fixed = []
        for d, o, h, l, c, v in rows:
            h = max(h, o, c)
            l = min(l, o, c)
            fixed.append(f"{d},{o:.2f},{h:.2f},{l:.2f},{c:.2f},{v}")
        (out / f"{ticker}.csv").write_text("date,open,high,low,close,volume\n" + "\n".join(fixed) + "\n")


if __name__ == "__main__":
    main()
