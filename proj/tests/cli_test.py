# Copyright 2026 The qkdkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the qkdkit command line: report contents, exit codes
and byte-for-byte determinism."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

BINARY = None


def op(rows):
    n = len(rows)
    return {"dim": n, "entries": [[float(x), 0.0] for row in rows for x in row]}


def scalar(w):
    return {"dim": 1, "entries": [[w, 0.0]]}


class CliTest(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.dir.cleanup()

    def write(self, name, payload):
        path = os.path.join(self.dir.name, name)
        with open(path, "w") as f:
            if isinstance(payload, str):
                f.write(payload)
            else:
                json.dump(payload, f)
        return path

    def run_cli(self, *args, expect=0):
        proc = subprocess.run([BINARY, *args], capture_output=True, text=True)
        self.assertEqual(proc.returncode, expect, proc.stderr)
        return json.loads(proc.stdout) if expect == 0 and proc.stdout else None

    # metric

    def test_metric_identical_states(self):
        a = self.write("a.json", op([[0.7, 0.1], [0.1, 0.3]]))
        b = self.bounds(a, a)
        self.assertEqual(b["lower"], 0.0)
        self.assertEqual(b["upper"], 0.0)

    def test_metric_orthogonal_pure_states(self):
        a = self.write("a.json", op([[1, 0], [0, 0]]))
        b = self.write("b.json", op([[0, 0], [0, 1]]))
        r = self.bounds(a, b)
        self.assertAlmostEqual(r["lower"], 1.0, delta=1e-10)
        self.assertAlmostEqual(r["upper"], 1.0, delta=1e-10)

    def test_metric_diagonal_pair(self):
        a = self.write("a.json", op([[0.65, 0], [0, 0.35]]))
        b = self.write("b.json", op([[0.5, 0], [0, 0.5]]))
        r = self.bounds(a, b)
        self.assertAlmostEqual(r["lower"], 0.15, delta=1e-12)
        self.assertAlmostEqual(r["upper"], 3 / 13, delta=1e-8)

    def bounds(self, a, b):
        report = self.run_cli("metric", "--a", a, "--b", b)
        self.assertIn("tolerances", report["meta"])
        self.assertIn("seed", report["meta"])
        return report["bounds"]

    def test_metric_errors(self):
        a = self.write("a.json", op([[1, 0], [0, 0]]))
        c = self.write("c.json", op([[1, 0, 0], [0, 0, 0], [0, 0, 0]]))
        broken = self.write("broken.json", "{\"dim\": 2, ")
        skew = self.write("skew.json", op([[0.5, 0.3], [0.0, 0.5]]))
        self.run_cli("metric", "--a", a, "--b", c, expect=3)
        self.run_cli("metric", "--a", a, "--b", broken, expect=1)
        self.run_cli("metric", "--a", a, "--b", skew, expect=2)
        self.run_cli("metric", "--a", a, "--b", os.path.join(self.dir.name, "missing.json"), expect=1)
        self.run_cli("metric", "--a", a, expect=1)

    # keystate

    def keystate(self, state, expect=0):
        report = self.run_cli("keystate", "--state", self.write("state.json", state), expect=expect)
        return report["report"] if report else None

    def test_keystate_ideal(self):
        entries = [{"kA": k, "kB": k, "op": scalar(0.25)} for k in ("00", "01", "10", "11")]
        r = self.keystate({"dim_E": 1, "blocks": [{"lA": 2, "lB": 2, "entries": entries}]})
        for key in ("epsilon_security", "epsilon_correctness", "epsilon_secrecy_alice", "mismatch_probability"):
            self.assertAlmostEqual(r[key], 0.0, delta=1e-12)

    def test_keystate_deterministic_key(self):
        r = self.keystate({"dim_E": 1, "blocks": [{"lA": 1, "lB": 1, "entries": [
            {"kA": "0", "kB": "0", "op": scalar(1.0)}]}]})
        self.assertAlmostEqual(r["epsilon_security"], 1.0, delta=1e-12)

    def test_keystate_eve_copy(self):
        entries = [{"kA": k, "kB": k, "op": op([[1 - int(k), 0], [0, int(k)]])} for k in ("0", "1")]
        for e in entries:
            e["op"]["entries"] = [[0.5 * x, 0.0] for x, _ in e["op"]["entries"]]
        r = self.keystate({"dim_E": 2, "blocks": [{"lA": 1, "lB": 1, "entries": entries}]})
        self.assertAlmostEqual(r["epsilon_secrecy_alice"], 1.0, delta=1e-12)
        self.assertAlmostEqual(r["epsilon_correctness"], 0.0, delta=1e-12)

    def test_keystate_invalid_lengths(self):
        self.keystate({"dim_E": 1, "blocks": [{"lA": 1, "lB": 2, "entries": [
            {"kA": "0", "kB": "00", "op": scalar(1.0)}]}]}, expect=2)

    # protocol

    def protocol(self, config, attack, *extra, expect=0):
        path = self.write("run.json", {"config": config, "attack": attack})
        return self.run_cli("protocol", "--config", path, *extra, expect=expect)

    base = {"n_rounds": 3, "test_fraction": "1/3", "qber_abort_threshold": 0.1,
            "key_length_rule": {"kind": "sifted_minus", "leak_budget": 0}, "seed": 5}

    def test_protocol_noiseless(self):
        report = self.protocol(self.base, {"kind": "passive_depolarizing", "p": 0.0})
        self.assertEqual(report["report"]["acceptance_probability"], 1.0)
        self.assertEqual(report["report"]["mismatch_probability"], 0.0)
        self.assertEqual(report["meta"]["seed"], 5)
        self.assertIn("final_state", report["run"])

    def test_protocol_block_all(self):
        report = self.protocol(self.base, {"kind": "block_all"}, "--omit-state")
        self.assertEqual(report["report"]["acceptance_probability"], 0.0)
        self.assertEqual(report["report"]["epsilon_security"], 0.0)
        self.assertNotIn("final_state", report["run"])

    def test_protocol_errors(self):
        self.protocol(dict(self.base, rounds=2), {"kind": "block_all"}, expect=2)
        self.protocol(self.base, {"kind": "teleport"}, expect=2)
        self.protocol(dict(self.base, n_rounds=4, max_work=16), {"kind": "passive_depolarizing", "p": 0.1}, expect=3)

    # axioms

    def test_axioms_deterministic(self):
        outs = [os.path.join(self.dir.name, f"ax{i}.json") for i in range(2)]
        for out in outs:
            self.run_cli("--out", out, "axioms", "--samples", "40")
        with open(outs[0], "rb") as f0, open(outs[1], "rb") as f1:
            first = f0.read()
            self.assertEqual(first, f1.read())
        report = json.loads(first)
        self.assertTrue(report["report"]["all_passed"])
        self.assertEqual(report["meta"]["seed"], 20240611)

    def test_axioms_zero_functional(self):
        report = self.run_cli("axioms", "--samples", "40", "--functional", "zero")["report"]
        self.assertFalse(report["all_passed"])
        p1 = next(a for a in report["axioms"] if a["name"] == "P1")
        self.assertFalse(p1["passed"])
        self.assertIn("witness", p1)

    # compose

    def test_compose_sequential_and_parallel(self):
        cfg = dict(self.base, n_rounds=2, test_fraction=0, reconciliation="none")
        runs = [{"config": cfg, "attack": {"kind": "passive_depolarizing", "p": 0.2}},
                {"config": cfg, "eve_strategy": "copy_transcript"}]
        for mode in ("sequential", "parallel"):
            path = self.write("manifest.json", {"mode": mode, "runs": runs})
            r = self.run_cli("compose", "--manifest", path)["report"]
            self.assertEqual(r["mode"], mode)
            self.assertTrue(r["within_bound"])
            self.assertLessEqual(r["combined_epsilon_measured"], sum(r["component_epsilons"]) + 1e-9)
        bad = self.write("bad.json", {"mode": "diagonal", "runs": runs})
        self.run_cli("compose", "--manifest", bad, expect=2)


if __name__ == "__main__":
    BINARY = sys.argv.pop(1)
    unittest.main()
