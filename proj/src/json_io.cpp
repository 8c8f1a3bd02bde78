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

#include "qkdkit/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qkdkit {
namespace {

QkdError parse_error(const std::string& what) { return QkdError(ErrorKind::kParse, what); }

// Field access that turns type mismatches into parse errors.
template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw parse_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

void require_fields(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw parse_error(std::string(what) + " must be a JSON object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!names.count(key)) throw QkdError(ErrorKind::kBadConfig, std::string(what) + " has unknown field '" + key + "'");
  }
}

void dump_value(const Json& j, std::string& out, int indent) {
  const std::string pad(indent * 2, ' ');
  const std::string inner((indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        dump_value(value, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short arrays of scalars stay on one line.
      const bool flat = j.size() <= 4 && std::none_of(j.begin(), j.end(), [](const Json& v) { return v.is_structured(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += inner;
        dump_value(value, out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s(buf);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

std::string bob_basis_name(BobBasis b) { return b == BobBasis::kMatched ? "matched" : "random"; }
std::string reconciliation_name(Reconciliation r) { return r == Reconciliation::kParity ? "parity" : "none"; }

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json(ss.str());
  } catch (const QkdError& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(e.what());
  }
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += "\n";
  return out;
}

Matrix operator_from_json(const Json& j) {
  const auto dim = get<std::int64_t>(j, "dim");
  if (dim < 1) throw parse_error("operator dim must be positive");
  if (static_cast<std::size_t>(dim) > default_tolerances().max_dim) {
    throw QkdError(ErrorKind::kDimensionOverflow, "operator dimension " + std::to_string(dim) + " above the ceiling");
  }
  const Json& entries = j.at("entries");
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw parse_error("operator entries must be an array of dim^2 [re, im] pairs");
  }
  Matrix m(dim, dim);
  for (std::int64_t k = 0; k < dim * dim; ++k) {
    const Json& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw parse_error("operator entry " + std::to_string(k) + " is not [re, im]");
    }
    m(k / dim, k % dim) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

Json operator_to_json(const Matrix& m) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  }
  return Json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

DensityOperator density_from_json(const Json& j, const Tolerances& tol) {
  return DensityOperator::validate(operator_from_json(j), tol);
}

KeyedCQState keyed_state_from_json(const Json& j, const Tolerances& tol) {
  require_fields(j, {"dim_E", "blocks"}, "key state");
  const auto dim_E = get<std::int64_t>(j, "dim_E");
  KeyedCQStateBuilder b(dim_E);
  const Json& blocks = j.at("blocks");
  if (!blocks.is_array()) throw parse_error("blocks must be an array");
  for (const Json& block : blocks) {
    require_fields(block, {"lA", "lB", "entries"}, "block");
    const auto la = get<std::int64_t>(block, "lA"), lb = get<std::int64_t>(block, "lB");
    if (la < 0 || lb < 0 || la > kMaxKeyLength || lb > kMaxKeyLength) {
      throw QkdError(ErrorKind::kInvalidState, "key length outside [0, " + std::to_string(kMaxKeyLength) + "]");
    }
    const KeyLengthPair lengths{static_cast<std::uint32_t>(la), static_cast<std::uint32_t>(lb)};
    b.touch(lengths);
    for (const Json& e : block.at("entries")) {
      require_fields(e, {"kA", "kB", "op", "eve"}, "entry");
      const auto [kA, lenA] = parse_bitstring(get<std::string>(e, "kA"));
      const auto [kB, lenB] = parse_bitstring(get<std::string>(e, "kB"));
      if (lenA != lengths.lA || lenB != lengths.lB) {
        throw QkdError(ErrorKind::kInvalidState, "key value length differs from its block's length");
      }
      b.add(lengths, kA, kB, operator_from_json(e.at("op")), get_or<std::string>(e, "eve", ""));
    }
  }
  return b.build(tol);
}

Json keyed_state_to_json(const KeyedCQState& state) {
  Json blocks = Json::array();
  for (const auto& [lengths, block] : state.blocks()) {
    Json entries = Json::array();
    for (const auto& [idx, op] : block) {
      Json e{{"kA", to_bitstring(idx.kA, lengths.lA)}, {"kB", to_bitstring(idx.kB, lengths.lB)}};
      if (!idx.eve.empty()) e["eve"] = idx.eve;
      e["op"] = operator_to_json(op);
      entries.push_back(std::move(e));
    }
    blocks.push_back(Json{{"lA", lengths.lA}, {"lB", lengths.lB}, {"entries", std::move(entries)}});
  }
  return Json{{"dim_E", state.dim_E()}, {"blocks", std::move(blocks)}};
}

ProtocolConfig protocol_config_from_json(const Json& j) {
  require_fields(j,
                 {"n_rounds", "test_fraction", "qber_abort_threshold", "key_length_rule", "seed",
                  "z_basis_probability", "bob_basis", "reconciliation", "max_work"},
                 "protocol config");
  ProtocolConfig c;
  const auto n = get<std::int64_t>(j, "n_rounds");
  if (n < 1 || n > 8) throw QkdError(ErrorKind::kBadConfig, "n_rounds must be in [1, 8]");
  c.n_rounds = static_cast<std::uint32_t>(n);
  if (j.contains("test_fraction")) {
    const Json& f = j.at("test_fraction");
    std::string text;
    if (f.is_string()) {
      text = f.get<std::string>();
    } else if (f.is_number_integer()) {
      text = std::to_string(f.get<std::int64_t>());
    } else if (f.is_number()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.9f", f.get<double>());
      text = buf;
    } else {
      throw parse_error("test_fraction must be a string like \"1/3\" or a number");
    }
    std::tie(c.test_numerator, c.test_denominator) = parse_fraction(text);
  }
  c.qber_abort_threshold = get<double>(j, "qber_abort_threshold");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.z_basis_probability = get_or<double>(j, "z_basis_probability", c.z_basis_probability);
  c.max_work = get_or<std::uint64_t>(j, "max_work", c.max_work);
  const std::string bob = get_or<std::string>(j, "bob_basis", "matched");
  if (bob == "matched") {
    c.bob_basis = BobBasis::kMatched;
  } else if (bob == "random") {
    c.bob_basis = BobBasis::kRandom;
  } else {
    throw QkdError(ErrorKind::kBadConfig, "bob_basis must be matched or random");
  }
  const std::string rec = get_or<std::string>(j, "reconciliation", "parity");
  if (rec == "parity") {
    c.reconciliation = Reconciliation::kParity;
  } else if (rec == "none") {
    c.reconciliation = Reconciliation::kNone;
  } else {
    throw QkdError(ErrorKind::kBadConfig, "reconciliation must be parity or none");
  }
  if (j.contains("key_length_rule")) {
    const Json& r = j.at("key_length_rule");
    require_fields(r, {"kind", "leak_budget", "length"}, "key_length_rule");
    const std::string kind = get<std::string>(r, "kind");
    if (kind == "sifted_minus") {
      c.key_length_rule.kind = KeyLengthRule::Kind::kSiftedMinus;
      c.key_length_rule.leak_budget = get_or<std::uint32_t>(r, "leak_budget", 0);
    } else if (kind == "fixed") {
      c.key_length_rule.kind = KeyLengthRule::Kind::kFixed;
      c.key_length_rule.length = get<std::uint32_t>(r, "length");
    } else {
      throw QkdError(ErrorKind::kBadConfig, "key_length_rule kind must be sifted_minus or fixed");
    }
  }
  c.validate();
  return c;
}

Json protocol_config_to_json(const ProtocolConfig& c) {
  Json rule = c.key_length_rule.kind == KeyLengthRule::Kind::kSiftedMinus
                  ? Json{{"kind", "sifted_minus"}, {"leak_budget", c.key_length_rule.leak_budget}}
                  : Json{{"kind", "fixed"}, {"length", c.key_length_rule.length}};
  return Json{{"n_rounds", c.n_rounds},
              {"test_fraction", std::to_string(c.test_numerator) + "/" + std::to_string(c.test_denominator)},
              {"qber_abort_threshold", c.qber_abort_threshold},
              {"key_length_rule", std::move(rule)},
              {"seed", c.seed},
              {"z_basis_probability", c.z_basis_probability},
              {"bob_basis", bob_basis_name(c.bob_basis)},
              {"reconciliation", reconciliation_name(c.reconciliation)}};
}

AttackModel attack_from_json(const Json& j) {
  require_fields(j, {"kind", "p", "basis_rule", "bases", "theta"}, "attack");
  const std::string kind = get<std::string>(j, "kind");
  if (kind == "passive_depolarizing") return AttackModel::passive_depolarizing(get_or<double>(j, "p", 0.0));
  if (kind == "intercept_resend") {
    const std::string rule = get_or<std::string>(j, "basis_rule", "Z");
    if (rule == "Z" || rule == "X") return AttackModel::intercept_resend(rule[0]);
    if (rule == "random") return AttackModel::intercept_resend('R');
    throw QkdError(ErrorKind::kBadConfig, "basis_rule must be Z, X or random");
  }
  if (kind == "fixed_basis_guess") return AttackModel::fixed_basis_guess(get<std::string>(j, "bases"));
  if (kind == "block_all") return AttackModel::block_all();
  if (kind == "entangling_probe") return AttackModel::entangling_probe(get<double>(j, "theta"));
  throw QkdError(ErrorKind::kBadConfig, "unknown attack kind '" + kind + "'");
}

Json attack_to_json(const AttackModel& a) {
  Json j{{"kind", a.name()}};
  switch (a.kind) {
    case AttackModel::Kind::kPassiveDepolarizing: j["p"] = a.p; break;
    case AttackModel::Kind::kInterceptResend:
      j["basis_rule"] = a.basis_rule == 'R' ? std::string("random") : std::string(1, a.basis_rule);
      break;
    case AttackModel::Kind::kFixedBasisGuess: j["bases"] = a.bases; break;
    case AttackModel::Kind::kEntanglingProbe: j["theta"] = a.theta; break;
    case AttackModel::Kind::kBlockAll: break;
  }
  return j;
}

Json tolerances_to_json(const Tolerances& t) {
  return Json{{"hermitian", t.hermitian}, {"trace", t.trace}, {"psd", t.psd}, {"cptp", t.cptp}, {"max_dim", t.max_dim}};
}

Json bounds_to_json(const DistinctnessBounds& b) {
  Json path = Json::array();
  for (const auto& s : b.witness_path) path.push_back(operator_to_json(s.matrix()));
  return Json{{"lower", b.lower}, {"upper", b.upper}, {"witness_path", std::move(path)}, {"evaluations", b.evaluations}};
}

Json security_report_to_json(const SecurityReport& r) {
  Json terms = Json::object();
  for (const auto& [l, v] : r.per_length_terms) terms[std::to_string(l)] = v;
  return Json{{"epsilon_security", r.epsilon_security},
              {"epsilon_correctness", r.epsilon_correctness},
              {"epsilon_secrecy_alice", r.epsilon_secrecy_alice},
              {"mismatch_probability", r.mismatch_probability},
              {"combined_bound", r.combined_bound},
              {"per_length_terms", std::move(terms)},
              {"acceptance_probability", r.acceptance_probability}};
}

Json conformance_report_to_json(const ConformanceReport& r) {
  Json axioms = Json::array();
  for (const auto& a : r.results) {
    Json j{{"name", a.name},
           {"description", a.description},
           {"passed", a.passed},
           {"worst_violation", a.worst_violation},
           {"samples", a.samples}};
    if (!a.witness.empty()) {
      Json w = Json::array();
      for (const auto& s : a.witness) w.push_back(operator_to_json(s.matrix()));
      j["witness"] = std::move(w);
      j["witness_note"] = a.witness_note;
    }
    axioms.push_back(std::move(j));
  }
  return Json{{"all_passed", r.all_passed()}, {"tol", r.tol}, {"seed", r.seed}, {"axioms", std::move(axioms)}};
}

Json run_artifacts_to_json(const RunArtifacts& a) {
  const Transcript& t = a.transcript;
  return Json{{"acceptance_probability", a.acceptance_probability},
              {"branches", a.branches},
              {"transcript",
               Json{{"test_rounds", t.test_rounds},
                    {"hash_seed", t.hash_seed},
                    {"bob_basis", t.bob_basis},
                    {"reconciliation", t.reconciliation},
                    {"label_format", t.label_format}}},
              {"final_state", keyed_state_to_json(a.final_state)}};
}

Json composition_report_to_json(const CompositionReport& r) {
  Json j{{"mode", r.mode},
         {"component_epsilons", r.component_epsilons},
         {"component_acceptance", r.component_acceptance},
         {"combined_epsilon_measured", r.combined_epsilon_measured},
         {"combined_epsilon_bound", r.combined_epsilon_bound},
         {"slack", r.slack},
         {"within_bound", r.within_bound}};
  if (r.parallel) {
    const ParallelTerms& p = *r.parallel;
    j["parallel"] = Json{{"omega_probability", p.omega_probability},
                         {"measured_subnormalized", p.measured_subnormalized},
                         {"measured_conditional", p.measured_conditional},
                         {"chain_first", p.chain_first},
                         {"chain_first_conditional", p.chain_first_conditional},
                         {"chain_second", p.chain_second}};
  }
  return j;
}

Json completeness_to_json(const CompletenessEstimate& e) {
  return Json{{"trials", e.trials},
              {"accepted", e.accepted},
              {"rate", e.rate},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"confidence", 0.95},
              {"exact_acceptance", e.exact_acceptance}};
}

}  // namespace qkdkit
