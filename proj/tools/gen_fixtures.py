#!/usr/bin/env python3
"""Regenerate the CSV fixtures under tests/data.

The price series is an Euler path of the natural-measure diffusion drawn with
numpy; the quote sheet is priced on a full non-recombining binomial tree
written here independently of the C++ library.
"""
import argparse
import datetime as dt
import pathlib

import numpy as np

SERIES = dict(a=1.0, mu=0.05, v=5.0, sigma=0.1, a0=100.0)
QUOTES = dict(a=1.0, mu=0.05, v=5.0, sigma=0.1, rho=1.0, r=0.03, a0=100.0, p=0.5, n=12)
MATURITIES = (0.5, 1.0, 2.0, 3.0)
STRIKES = (90.0, 110.0)


def business_days(start, count):
    day = start
    out = []
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def series_path(n_steps, seed):
    rng = np.random.default_rng(seed)
    dt_year = 1.0 / 252.0
    z = rng.standard_normal(n_steps)
    x = np.empty(n_steps + 1)
    x[0] = SERIES["a0"]
    for k in range(n_steps):
        drift = SERIES["a"] + SERIES["mu"] * x[k]
        psi = max(SERIES["v"] + SERIES["sigma"] * x[k], 0.0)
        x[k + 1] = x[k] + drift * dt_year + psi * np.sqrt(dt_year) * z[k]
    return x


def tree_price(strike, t_mat, kind, prm):
    """Backward induction over all 2^n paths of the additive-move tree."""
    n = prm["n"]
    p = prm["p"]
    delta = t_mat / n
    cu = np.sqrt((1 - p) / p)
    cd = np.sqrt(p / (1 - p))
    beta = [prm["a0"]]
    for _ in range(n):
        beta.append(beta[-1] + (prm["rho"] + prm["r"] * beta[-1]) * delta)
    layers = [np.array([prm["a0"]])]
    for k in range(n):
        a = layers[-1]
        phi = prm["a"] + prm["mu"] * a
        psi = prm["v"] + prm["sigma"] * a
        up = a + phi * delta + cu * psi * np.sqrt(delta)
        down = a + phi * delta - cd * psi * np.sqrt(delta)
        nxt = np.empty(2 * a.size)
        nxt[0::2] = down
        nxt[1::2] = up
        layers.append(nxt)
    last = layers[-1]
    value = np.maximum(last - strike, 0.0) if kind == "call" else np.maximum(strike - last, 0.0)
    for k in range(n - 1, -1, -1):
        a = layers[k]
        chi = prm["rho"] + prm["r"] * beta[k]
        phi = prm["a"] + prm["mu"] * a
        psi = prm["v"] + prm["sigma"] * a
        up = phi * delta + cu * psi * np.sqrt(delta)
        down = phi * delta - cd * psi * np.sqrt(delta)
        q = (a / beta[k] * chi * delta - down) / (up - down)
        disc = beta[k] / beta[k + 1]
        value = disc * (q * value[1::2] + (1 - q) * value[0::2])
    return float(value[0])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"))
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=20240607)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    path = series_path(args.steps, args.seed)
    days = business_days(dt.date(2015, 1, 5), path.size)
    with open(out / "series_bbsm.csv", "w") as f:
        f.write("date,price\n")
        for day, price in zip(days, path):
            f.write(f"{day.isoformat()},{price:.10f}\n")

    with open(out / "quotes_bbsm.csv", "w") as f:
        f.write("maturity_years,strike,price,kind\n")
        for t_mat in MATURITIES:
            for strike in STRIKES:
                kind = "call" if strike >= QUOTES["a0"] else "put"
                f.write(f"{t_mat},{strike},{tree_price(strike, t_mat, kind, QUOTES):.15g},{kind}\n")

    with open(out / "quotes_model.cfg", "w") as f:
        f.write("# coefficients used to generate quotes_bbsm.csv\n")
        for key in ("a", "mu", "v", "sigma", "rho", "r", "a0"):
            f.write(f"{key} = {QUOTES[key]}\n")

    (out / "empty.csv").write_text("")


if __name__ == "__main__":
    main()
