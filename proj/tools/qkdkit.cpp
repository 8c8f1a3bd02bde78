// Copyright 2026 The qkdkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand reads JSON, writes one JSON report
// (stdout unless --out is given) and exits with 0 on success or with the
// error family code: 1 parse, 2 validation, 3 dimension, 4 numerical.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qkdkit/compose.hpp"
#include "qkdkit/distinctness.hpp"
#include "qkdkit/json_io.hpp"
#include "qkdkit/keystates.hpp"
#include "qkdkit/protocol.hpp"

namespace {

using namespace qkdkit;

struct Common {
  std::string out;
  double tol_herm = default_tolerances().hermitian;
  double tol_trace = default_tolerances().trace;
  double tol_psd = default_tolerances().psd;
  double tol_cptp = default_tolerances().cptp;

  Tolerances tolerances() const {
    Tolerances t = default_tolerances();
    t.hermitian = tol_herm;
    t.trace = tol_trace;
    t.psd = tol_psd;
    t.cptp = tol_cptp;
    return t;
  }
};

Json meta(const std::string& command, const Tolerances& tol, std::uint64_t seed) {
  return Json{{"tool", "qkdkit"}, {"command", command}, {"seed", seed}, {"tolerances", tolerances_to_json(tol)}};
}

void emit(const Common& c, const Json& report) {
  const std::string text = dump_json(report);
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw QkdError(ErrorKind::kParse, "cannot write " + c.out);
  f << text;
}

// ---------------------------------------------------------------------------

struct MetricArgs {
  std::string a, b;
  std::size_t refine = 64;
  std::uint64_t seed = RefineOptions{}.seed;
};

Json cmd_metric(const MetricArgs& args, const Tolerances& tol) {
  const DensityOperator rho = density_from_json(read_json_file(args.a), tol);
  const DensityOperator sigma = density_from_json(read_json_file(args.b), tol);
  require_same_dim(rho.dim(), sigma.dim(), "metric");
  RefineOptions opts;
  opts.budget = args.refine;
  opts.seed = args.seed;
  const DistinctnessBounds bounds = p_neq_max_bounds(rho, sigma, opts);
  return Json{{"meta", meta("metric", tol, args.seed)},
              {"trace_distance", trace_distance(rho, sigma)},
              {"delta_tilde_ab", delta_tilde(rho, sigma)},
              {"delta_tilde_ba", delta_tilde(sigma, rho)},
              {"delta_hat", delta_hat(rho, sigma)},
              {"refine_budget", args.refine},
              {"bounds", bounds_to_json(bounds)}};
}

Json cmd_keystate(const std::string& path, const Tolerances& tol) {
  const KeyedCQState state = keyed_state_from_json(read_json_file(path), tol);
  return Json{{"meta", meta("keystate", tol, 0)}, {"report", security_report_to_json(evaluate(state))}};
}

struct ProtocolArgs {
  std::string config;
  bool omit_state = false;
};

Json cmd_protocol(const ProtocolArgs& args, const Tolerances& tol) {
  const Json file = read_json_file(args.config);
  if (!file.is_object() || !file.contains("config") || !file.contains("attack")) {
    throw QkdError(ErrorKind::kParse, "protocol file needs 'config' and 'attack' objects");
  }
  const ProtocolConfig cfg = protocol_config_from_json(file.at("config"));
  const AttackModel attack = attack_from_json(file.at("attack"));
  const RunArtifacts run = run_protocol(cfg, attack);
  Json run_json = run_artifacts_to_json(run);
  if (args.omit_state) run_json.erase("final_state");
  Json report{{"meta", meta("protocol", tol, cfg.seed)},
              {"config", protocol_config_to_json(cfg)},
              {"attack", attack_to_json(attack)},
              {"report", security_report_to_json(evaluate(run.final_state))},
              {"run", std::move(run_json)}};
  if (file.contains("completeness")) {
    const Json& c = file.at("completeness");
    const auto trials = c.value("trials", std::uint64_t{10000});
    const auto seed = c.value("seed", cfg.seed);
    report["completeness"] = completeness_to_json(estimate_completeness(cfg, attack, trials, seed));
  }
  return report;
}

Json cmd_compose(const std::string& path, const Tolerances& tol) {
  const Json manifest = read_json_file(path);
  if (!manifest.is_object() || !manifest.contains("runs") || !manifest.at("runs").is_array()) {
    throw QkdError(ErrorKind::kParse, "manifest needs a 'runs' array");
  }
  const std::string mode = manifest.value("mode", std::string("sequential"));
  std::vector<RunStep> steps;
  Json runs_json = Json::array();
  for (const Json& r : manifest.at("runs")) {
    if (!r.is_object() || !r.contains("config")) throw QkdError(ErrorKind::kParse, "each run needs a 'config'");
    const ProtocolConfig cfg = protocol_config_from_json(r.at("config"));
    const std::string strategy = r.value("eve_strategy", std::string("independent"));
    Json entry{{"config", protocol_config_to_json(cfg)}, {"eve_strategy", strategy}};
    if (strategy == "independent") {
      if (!r.contains("attack")) throw QkdError(ErrorKind::kParse, "independent runs need an 'attack'");
      const AttackModel attack = attack_from_json(r.at("attack"));
      entry["attack"] = attack_to_json(attack);
      steps.push_back({[cfg, attack](const std::string&) { return run_protocol(cfg, attack).final_state; }, false});
    } else if (strategy == "copy_transcript") {
      steps.push_back({[cfg](const std::string& prior) {
                         return run_protocol(cfg, AttackModel::fixed_basis_guess(copied_bases(prior, cfg.n_rounds)))
                             .final_state;
                       },
                       true});
    } else {
      throw QkdError(ErrorKind::kBadConfig, "eve_strategy must be independent or copy_transcript");
    }
    runs_json.push_back(std::move(entry));
  }
  CompositionReport report;
  if (mode == "sequential") {
    report = sequential_compose(steps);
  } else if (mode == "parallel") {
    if (steps.size() != 2) throw QkdError(ErrorKind::kBadConfig, "parallel composition takes exactly two runs");
    report = parallel_compose(steps[0], steps[1]);
  } else {
    throw QkdError(ErrorKind::kBadConfig, "mode must be sequential or parallel");
  }
  return Json{{"meta", meta("compose", tol, 0)}, {"runs", std::move(runs_json)},
              {"report", composition_report_to_json(report)}};
}

struct AxiomArgs {
  std::size_t samples = 1000;
  std::uint64_t seed = ConformanceOptions{}.seed;
  std::string functional = "trace_distance";
};

Json cmd_axioms(const AxiomArgs& args, const Tolerances& tol) {
  MetricFunctional f;
  if (args.functional == "trace_distance") {
    f = [](const DensityOperator& a, const DensityOperator& b) { return trace_distance(a, b); };
  } else if (args.functional == "delta_hat") {
    f = [](const DensityOperator& a, const DensityOperator& b) { return delta_hat(a, b); };
  } else if (args.functional == "unhalved") {
    f = [](const DensityOperator& a, const DensityOperator& b) { return 2.0 * trace_distance(a, b); };
  } else if (args.functional == "zero") {
    f = [](const DensityOperator&, const DensityOperator&) { return 0.0; };
  } else {
    throw QkdError(ErrorKind::kBadConfig, "unknown functional '" + args.functional + "'");
  }
  ConformanceOptions opts;
  opts.pairs = args.samples;
  opts.triples = args.samples;
  opts.seed = args.seed;
  return Json{{"meta", meta("axioms", tol, args.seed)},
              {"functional", args.functional},
              {"report", conformance_report_to_json(conformance_check(f, opts))}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkdkit: distinctness bounds, key-state security evaluation and toy QKD simulation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "write the report here instead of stdout");
  app.add_option("--tol-herm", common.tol_herm, "Hermiticity tolerance");
  app.add_option("--tol-trace", common.tol_trace, "trace tolerance");
  app.add_option("--tol-psd", common.tol_psd, "relative PSD tolerance");
  app.add_option("--tol-cptp", common.tol_cptp, "channel completeness tolerance");

  MetricArgs metric;
  auto* m = app.add_subcommand("metric", "trace distance, pre-distances and distinctness bounds of two states");
  m->add_option("--a", metric.a, "first density operator JSON")->required();
  m->add_option("--b", metric.b, "second density operator JSON")->required();
  m->add_option("--refine", metric.refine, "delta_hat evaluations for path refinement");
  m->add_option("--seed", metric.seed, "refinement seed");

  std::string state_path;
  auto* k = app.add_subcommand("keystate", "security report of a key state");
  k->add_option("--state", state_path, "key state JSON")->required();

  ProtocolArgs protocol;
  auto* p = app.add_subcommand("protocol", "run the exact protocol simulation");
  p->add_option("--config", protocol.config, "JSON with 'config' and 'attack'")->required();
  p->add_flag("--omit-state", protocol.omit_state, "leave the final key state out of the report");

  std::string manifest;
  auto* c = app.add_subcommand("compose", "sequential or parallel composition of runs");
  c->add_option("--manifest", manifest, "composition manifest JSON")->required();

  AxiomArgs axioms;
  auto* a = app.add_subcommand("axioms", "axiom conformance of a distinctness functional");
  a->add_option("--samples", axioms.samples, "pairs and triples per axiom");
  a->add_option("--seed", axioms.seed, "sampling seed");
  a->add_option("--functional", axioms.functional, "trace_distance, delta_hat, unhalved or zero");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorFamily::kParse);
  }

  try {
    const Tolerances tol = common.tolerances();
    Json report;
    if (*m) report = cmd_metric(metric, tol);
    if (*k) report = cmd_keystate(state_path, tol);
    if (*p) report = cmd_protocol(protocol, tol);
    if (*c) report = cmd_compose(manifest, tol);
    if (*a) report = cmd_axioms(axioms, tol);
    emit(common, report);
  } catch (const QkdError& e) {
    std::cerr << "qkdkit: " << e.what() << "\n";
    return static_cast<int>(e.family());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "qkdkit: " << e.what() << "\n";
    return static_cast<int>(ErrorFamily::kParse);
  }
  return 0;
}
