"""Scenario matrix expansion and the in-process runner."""

import json

import pytest

from powerbench.scenarios import SCENARIO_DIR, expand_jobs, load_scenario


def test_builtin_scenarios_exist():
    for name in ("accuracy-fig1", "browsers-fig2", "locations-fig6"):
        scenario = load_scenario(name)
        assert scenario["name"] == name
        assert expand_jobs(scenario)


def test_expand_browsers_matrix():
    jobs = expand_jobs(load_scenario("browsers-fig2"))
    assert len(jobs) == 8  # 4 browsers x mirroring on/off
    labels = [label for label, _ in jobs]
    assert "brave-no-mirroring" in labels
    assert "firefox-mirroring" in labels
    for label, manifest in jobs:
        assert manifest["repetitions"] == 5
        app = label.split("-")[0]
        assert manifest["script"][1] == {"cmd": "launch_app", "app": app}


def test_expand_is_deterministic():
    scenario = load_scenario("locations-fig6")
    assert expand_jobs(scenario) == expand_jobs(scenario)


def test_seeds_follow_matrix_order():
    scenario = load_scenario("browsers-fig2")
    seeds = [m["seed"] for _, m in expand_jobs(scenario)]
    assert seeds == [2000 + 100 * i for i in range(8)]


def test_network_profile_lands_in_constraints():
    jobs = dict(expand_jobs(load_scenario("locations-fig6")))
    assert jobs["chrome-bunkyo"]["constraints"]["network_profile"] == "bunkyo"


def test_template_substitution_is_deep(tmp_path):
    scenario = {
        "name": "t", "matrix": {"app": ["brave"]}, "repetitions": 1,
        "template": {
            "constraints": {"connectivity": "WIFI"},
            "nested": {"list": [{"cmd": "clean_state", "app": "{app}"}]},
            "duration_s": 1, "voltage": 4.0,
        },
    }
    [(label, manifest)] = expand_jobs(scenario)
    assert label == "brave"
    assert manifest["nested"]["list"][0]["app"] == "brave"


def test_load_scenario_by_path(tmp_path):
    path = tmp_path / "mini.json"
    path.write_text(json.dumps({"name": "mini", "matrix": {},
                                "template": {"duration_s": 1, "voltage": 4.0}}))
    assert load_scenario(path)["name"] == "mini"
