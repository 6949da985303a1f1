"""Smoke tests for the python bindings: key flows end to end."""

import json
import os
import sys

import _padl


def test_transfer_and_balances():
    desk = _padl.Desk(
        participants=["alice", "bob", "mint"],
        assets=[("usd", "mint"), ("gem", "mint")],
        config={"extract_max": 1 << 14},
        seed="11",
    )
    desk.init({"usd": {"alice": 5000}, "gem": {"bob": 300}})
    assert desk.height() == 1
    assert desk.balance_of("alice", "usd") == 5000

    res = desk.transfer("alice", {"usd": {"alice": -1200, "bob": 1200}})
    assert res["accepted"], res
    assert desk.balance_of("alice", "usd") == 3800
    assert desk.balance_of("bob", "usd") == 1200

    # overspend is refused with a typed reason
    res = desk.transfer("bob", {"usd": {"alice": 1300, "bob": -1300}})
    assert not res["accepted"]
    assert res["reason"] == "insufficient-balance"

    # atomic swap needs the counterparty's consent
    desk.grant_consent("bob", "gem", -50)
    res = desk.transfer(
        "alice",
        {"usd": {"alice": -500, "bob": 500}, "gem": {"alice": 50, "bob": -50}},
    )
    assert res["accepted"], res
    assert desk.balance_of("alice", "gem") == 50


def test_audits():
    desk = _padl.Desk(
        participants=["x", "y", "mint"],
        assets=[("usd", "mint"), ("gem", "mint")],
        config={"extract_max": 1 << 14},
        seed="22",
    )
    desk.init({"usd": {"x": 900}, "gem": {"x": 100}})
    assert desk.transfer("x", {"usd": {"x": -300, "y": 300}})["accepted"]

    good = desk.prove_balance("x", "usd", 600)
    assert desk.verify_balance(good)
    bad = desk.prove_balance("x", "usd", 601)
    assert not desk.verify_balance(bad)

    liq = desk.prove_liquidity("x", "gem", 1, 2)  # 100 of 700 < 1/2
    assert desk.verify_liquidity(liq)

    rate = desk.prove_rate("y", "usd", [1], [1], 1, 1)
    assert desk.verify_rate(rate)


def test_scenario_runs():
    scenario = os.path.join(os.path.dirname(__file__), "..", "..", "scenarios",
                            "simple_exchange.json")
    report = json.loads(_padl.run_scenario_file(os.path.abspath(scenario)))
    assert report["ok"], report
    assert report["final_balances"]["usd"]["alice"] == 1000


def main():
    test_transfer_and_balances()
    test_audits()
    test_scenario_runs()
    print("python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
