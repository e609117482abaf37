// Copyright 2026 The rpesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rpesim/report_json.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "rpesim/error.hpp"

namespace rpesim {

namespace {

using json = nlohmann::ordered_json;

json direction_json(const SpinDirection& d) { return json{{"theta", d.theta()}, {"phi", d.phi()}}; }

json state_json(const PureState& s) {
  json terms = json::array();
  for (const auto& [ket, amp] : s.terms()) {
    terms.push_back(json{{"ket", s.space().describe(ket)}, {"re", amp.real()}, {"im", amp.imag()}});
  }
  return terms;
}

json density_json(const DensityMatrix& rho) {
  json names = json::array();
  for (const auto& l : rho.space().labels()) names.push_back(l.name);
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index j = 0; j < rho.matrix().cols(); ++j) {
      rr.push_back(rho.matrix()(i, j).real());
      ii.push_back(rho.matrix()(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return json{{"subsystems", names}, {"re", re}, {"im", im}};
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = std::string(to_string(cfg.scenario));
  j["bs_present"] = cfg.bs_present;
  j["phase"] = cfg.phase ? json(*cfg.phase) : json(nullptr);
  j["erasure"] = std::string(to_string(cfg.erasure));
  j["blocker_present"] = cfg.blocker_present;
  j["prep"] = cfg.prep ? json(std::string(to_string(*cfg.prep))) : json(nullptr);
  j["p"] = cfg.p;
  j["epsilon"] = cfg.epsilon;
  j["n_max"] = cfg.n_max;
  j["shots"] = cfg.sampling ? json(cfg.sampling->shots) : json(nullptr);
  j["seed"] = cfg.sampling ? json(cfg.sampling->seed) : json(nullptr);
  return j;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string num(double x, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace

std::optional<AtomPrep> parse_prep(std::string_view name) {
  if (name == "eq1" || name == "up_phase_i") return AtomPrep::up_phase_i;
  if (name == "eq8" || name == "down_phase_i") return AtomPrep::down_phase_i;
  return std::nullopt;
}

std::string report_to_json(const ExperimentReport& r, const JsonOptions& options) {
  json j;
  j["scenario"] = std::string(to_string(r.config.scenario));
  j["config"] = config_json(r.config);

  json probs = json::object();
  for (const auto& [name, p] : r.probabilities) probs[name] = p;
  j["probabilities"] = std::move(probs);
  j["exclusive_families"] = r.exclusive_families;
  j["discard_probability"] = r.discard_probability ? json(*r.discard_probability) : json(nullptr);

  json states = json::object();
  for (const auto& s : r.conditional_states) states[s.name] = state_json(s.state);
  j["conditional_states"] = std::move(states);
  j["atom_density"] = r.atom_density ? density_json(*r.atom_density) : json(nullptr);

  if (r.chsh) {
    const auto& c = *r.chsh;
    j["chsh"] = json{{"settings",
                      {{"a", direction_json(c.setting.a)},
                       {"a2", direction_json(c.setting.a2)},
                       {"b", direction_json(c.setting.b)},
                       {"b2", direction_json(c.setting.b2)}}},
                     {"value", c.value},
                     {"max_value", c.max_value},
                     {"frame", c.frame}};
  } else {
    j["chsh"] = nullptr;
  }
  j["concurrence"] = r.concurrence ? json(*r.concurrence) : json(nullptr);
  json conc = json::object();
  for (const auto& [name, c] : r.concurrence_by_event) conc[name] = c;
  j["concurrence_by_event"] = std::move(conc);

  if (r.samples) {
    json counts = json::object();
    for (const auto& [name, n] : r.samples->counts) counts[name] = n;
    json s{{"seed", r.samples->seed},
           {"algorithm", r.samples->algorithm},
           {"shots", r.samples->shots},
           {"counts", std::move(counts)}};
    if (r.sampled_chsh) {
      s["chsh"] = json{{"value", r.sampled_chsh->value},
                       {"sigma", r.sampled_chsh->sigma},
                       {"shots_per_pair", r.sampled_chsh->shots_per_pair},
                       {"correlations", r.sampled_chsh->correlations}};
    }
    j["samples"] = std::move(s);
  } else {
    j["samples"] = nullptr;
  }

  json prov = json::object();
  prov["phase_used"] = r.phase_used;
  prov["atom_prep"] = std::string(to_string(r.config.effective_prep()));
  for (const auto& [k, v] : r.provenance) prov[k] = v;
  if (!options.deterministic) prov["generated_at"] = timestamp_utc();
  j["provenance"] = std::move(prov);
  return j.dump(options.indent);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  auto want = [](const json& v, bool ok, const std::string& key, const char* type) {
    if (!ok) throw ConfigError("config key '" + key + "' must be " + type);
    (void)v;
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "scenario") {
      want(v, v.is_string(), key, "a string");
      auto s = parse_scenario(v.get<std::string>());
      if (!s) throw ConfigError("unknown scenario '" + v.get<std::string>() + "'");
      cfg.scenario = *s;
    } else if (key == "bs_present") {
      want(v, v.is_boolean(), key, "a boolean");
      cfg.bs_present = v.get<bool>();
    } else if (key == "phase") {
      if (!v.is_null()) {
        want(v, v.is_number(), key, "a number or null");
        cfg.phase = v.get<double>();
      }
    } else if (key == "erasure") {
      want(v, v.is_string(), key, "a string");
      auto e = parse_erasure(v.get<std::string>());
      if (!e) throw ConfigError("unknown erasure mode '" + v.get<std::string>() + "'");
      cfg.erasure = *e;
    } else if (key == "blocker_present") {
      want(v, v.is_boolean(), key, "a boolean");
      cfg.blocker_present = v.get<bool>();
    } else if (key == "prep") {
      if (!v.is_null()) {
        want(v, v.is_string(), key, "a string or null");
        auto p = parse_prep(v.get<std::string>());
        if (!p) throw ConfigError("unknown atom preparation '" + v.get<std::string>() + "'");
        cfg.prep = *p;
      }
    } else if (key == "p") {
      want(v, v.is_number(), key, "a number");
      cfg.p = v.get<double>();
    } else if (key == "epsilon") {
      want(v, v.is_number(), key, "a number");
      cfg.epsilon = v.get<double>();
    } else if (key == "n_max") {
      want(v, v.is_number_integer(), key, "an integer");
      cfg.n_max = v.get<int>();
    } else if (key == "shots") {
      if (!v.is_null()) {
        want(v, v.is_number_unsigned(), key, "a positive integer or null");
        shots = v.get<std::uint64_t>();
      }
    } else if (key == "seed") {
      if (!v.is_null()) {
        want(v, v.is_number_unsigned(), key, "an unsigned integer or null");
        seed = v.get<std::uint64_t>();
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (shots) cfg.sampling = SampleConfig{*shots, seed.value_or(0), 1};
  cfg.validate();
  return cfg;
}

std::string report_to_text(const ExperimentReport& r) {
  std::ostringstream os;
  os << "scenario: " << to_string(r.config.scenario) << '\n';
  auto detector_line = [&](const char* c, const char* d) {
    if (r.has_probability(c) && r.has_probability(d)) {
      os << "P(C)=" << num(r.probability(c)) << " P(D)=" << num(r.probability(d)) << '\n';
      return true;
    }
    return false;
  };
  if (!detector_line("p_detector_c", "p_detector_d")) detector_line("p_single_detector_c", "p_single_detector_d");

  os << "probabilities:\n";
  for (const auto& [name, p] : r.probabilities) os << "  " << name << " = " << num(p) << '\n';
  if (r.discard_probability) os << "discard probability: " << num(*r.discard_probability) << '\n';
  if (!r.conditional_states.empty()) {
    os << "conditional states:\n";
    for (const auto& s : r.conditional_states) {
      os << "  " << s.name << ":\n";
      for (const auto& [ket, amp] : s.state.terms()) {
        os << "    (" << num(amp.real(), 10) << (amp.imag() < 0 ? " - " : " + ") << num(std::abs(amp.imag()), 10)
           << "i) |" << s.state.space().describe(ket) << ">\n";
      }
    }
  }
  if (r.chsh) {
    os << "chsh: " << num(r.chsh->value) << " (max over settings " << num(r.chsh->max_value) << "; " << r.chsh->frame
       << ")\n";
  }
  if (r.concurrence) os << "concurrence: " << num(*r.concurrence) << '\n';
  for (const auto& [name, c] : r.concurrence_by_event) os << "  concurrence[" << name << "] = " << num(c) << '\n';
  if (r.samples) {
    os << "samples (seed " << r.samples->seed << ", " << r.samples->algorithm << ", " << r.samples->shots
       << " shots):\n";
    for (const auto& [name, n] : r.samples->counts) os << "  " << name << ": " << n << '\n';
    if (r.sampled_chsh) {
      os << "  chsh estimate: " << num(r.sampled_chsh->value, 6) << " +/- " << num(r.sampled_chsh->sigma, 3) << '\n';
    }
  }
  os << "provenance:\n";
  os << "  phase_used: " << num(r.phase_used) << '\n';
  for (const auto& [k, v] : r.provenance) os << "  " << k << ": " << v << '\n';
  return os.str();
}

}  // namespace rpesim
