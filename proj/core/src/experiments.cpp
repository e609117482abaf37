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

#include "rpesim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rpesim/error.hpp"

namespace rpesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w >= kTwoPi ? 0.0 : w;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

PureState clear_flag(const std::string& name) { return PureState::local(SubsystemLabel::flag(name), {1.0, 0.0}); }

PureState photon_vacuum(const std::vector<std::string>& modes, int n_max) {
  std::vector<SubsystemLabel> labels;
  for (const auto& m : modes) labels.push_back(SubsystemLabel::photon_mode(m, n_max));
  return PureState::vacuum(new_space(std::move(labels), n_max));
}

PureState weak_mode(const std::string& mode, double p, int n_max) {
  StateSpace space({SubsystemLabel::photon_mode(mode, n_max)}, n_max);
  return weak_source(space, mode, WeakSourceParams::from_p(p));
}

double weight(const PureState& s, const std::function<bool(const BasisKet&)>& pred) {
  double w = 0.0;
  for (const auto& [ket, amp] : s.terms()) {
    if (pred(ket)) w += std::norm(amp);
  }
  return w;
}

unsigned excitations(const StateSpace& space, const BasisKet& k) { return space.total_photons(k) + space.flags_set(k); }

class ReportBuilder {
 public:
  explicit ReportBuilder(const ExperimentConfig& cfg) { report_.config = cfg; }

  void prob(std::string name, double value) { report_.probabilities.emplace_back(std::move(name), value); }
  void family(std::vector<std::string> names) { report_.exclusive_families.push_back(std::move(names)); }
  void stage(std::string name, const PureState& s) { report_.stages.push_back({std::move(name), s}); }
  void conditional(std::string name, const PureState& s) {
    report_.conditional_states.push_back({std::move(name), s});
  }
  void note(std::string key, std::string value) { report_.provenance.emplace_back(std::move(key), std::move(value)); }

  ExperimentReport& report() { return report_; }

 private:
  ExperimentReport report_;
};

const char* kSplitterNote = "balanced, t = 1/sqrt(2), reflection phase i";

// Probabilities shared by every weak-source scenario, split by the number of
// emitted photons (photons present plus photons absorbed).
void add_emission_summary(ReportBuilder& b, const PureState& out, double truncated, int n_max) {
  const StateSpace& sp = out.space();
  const std::size_t ic = sp.index_of("c");
  const std::size_t id = sp.index_of("d");
  const bool has_flags = std::any_of(sp.labels().begin(), sp.labels().end(),
                                     [](const auto& l) { return l.kind == SubsystemKind::flag; });

  auto single = [&](const BasisKet& k) { return excitations(sp, k) == 1; };
  auto single_clear_at = [&](std::size_t det) {
    return [&, det](const BasisKet& k) { return single(k) && sp.flags_set(k) == 0 && k[det] == 1; };
  };
  const double vac = weight(out, [&](const BasisKet& k) { return excitations(sp, k) == 0; });
  const double absorbed = weight(out, [&](const BasisKet& k) { return single(k) && sp.flags_set(k) > 0; });
  const double at_c = weight(out, single_clear_at(ic));
  const double at_d = weight(out, single_clear_at(id));
  const double multi = weight(out, [&](const BasisKet& k) { return excitations(sp, k) >= 2; });
  const double sector = weight(out, single);

  std::vector<std::string> fam{"p_vacuum"};
  b.prob("p_vacuum", vac);
  if (has_flags) {
    b.prob("p_single_absorbed", absorbed);
    fam.emplace_back("p_single_absorbed");
  }
  b.prob("p_single_detector_c", at_c);
  b.prob("p_single_detector_d", at_d);
  fam.emplace_back("p_single_detector_c");
  fam.emplace_back("p_single_detector_d");
  if (n_max >= 2) {
    b.prob("p_multi_photon", multi);
    fam.emplace_back("p_multi_photon");
  } else {
    b.prob("p_truncated", truncated);
    fam.emplace_back("p_truncated");
  }
  b.family(std::move(fam));

  b.prob("p_single_emission", sector);
  if (sector > 0.0) {
    std::vector<std::string> cond;
    if (has_flags) {
      b.prob("p_absorbed_given_single", absorbed / sector);
      cond.emplace_back("p_absorbed_given_single");
    }
    b.prob("p_detector_c_given_single", at_c / sector);
    b.prob("p_detector_d_given_single", at_d / sector);
    cond.emplace_back("p_detector_c_given_single");
    cond.emplace_back("p_detector_d_given_single");
    b.family(std::move(cond));
  }
}

// Conditional state for exactly one emitted photon reaching `det` with every
// flag clear. Returns nullopt for a zero-probability event.
std::optional<Postselection> single_click(const PureState& out, std::string_view det) {
  const StateSpace& sp = out.space();
  const std::size_t i = sp.index_of(det);
  auto pred = [&](const BasisKet& k) { return excitations(sp, k) == 1 && sp.flags_set(k) == 0 && k[i] == 1; };
  if (!(weight(out, pred) > 0.0)) return std::nullopt;
  return postselect(out, pred);
}

void analyze_atom_pair(ReportBuilder& b, const PureState& cond, const ChshSetting& setting, std::string frame) {
  const std::vector<std::string> atoms{"z1", "z2"};
  DensityMatrix rho = partial_trace(cond, atoms);
  auto& r = b.report();
  r.chsh = ChshReport{setting, chsh(rho, setting), max_chsh(rho), std::move(frame)};
  r.concurrence = concurrence(rho);
  r.atom_density = std::move(rho);
}

void attach_samples(ExperimentReport& r) {
  if (!r.config.sampling) return;
  const SampleConfig& cfg = *r.config.sampling;
  if (!r.exclusive_families.empty()) {
    std::vector<Event> events;
    for (const auto& name : r.exclusive_families.front()) events.push_back({name, r.probability(name)});
    double total = 0.0;
    for (const auto& e : events) total += e.probability;
    for (auto& e : events) e.probability /= total;
    r.samples = sample_events(events, cfg);
  }
  if (r.chsh && r.atom_density) r.sampled_chsh = sample_chsh(*r.atom_density, r.chsh->setting, cfg);
  r.provenance.emplace_back("sampler", std::string(kSamplerAlgorithm));
}

ExperimentReport finish(ReportBuilder& b) {
  ExperimentReport& r = b.report();
  attach_samples(r);
  check_report(r);
  return std::move(r);
}

void require_scenario(const ExperimentConfig& cfg, Scenario s) {
  cfg.validate();
  if (cfg.scenario != s) {
    throw ConfigError("configuration is for scenario '" + std::string(to_string(cfg.scenario)) + "', not '" +
                      std::string(to_string(s)) + "'");
  }
}

// Two weak sources on u and v, relative phase on u, truncated to n_max.
struct Sources {
  PureState state;
  double truncated;
};
Sources two_weak_sources(double p, int n_max, double phase) {
  PureState s = tensor(weak_mode("u", p, n_max), weak_mode("v", p, n_max));
  s = phase_shift(s, "u", phase);
  auto t = truncate_photon_number(s);
  return {t.state, t.dropped_probability};
}

const SplitterPorts kFinalPorts{"u", "v", "c", "d"};

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::mzi_delayed_choice: return "mzi_delayed_choice";
    case Scenario::two_source_interference: return "two_source_interference";
    case Scenario::two_source_ifm: return "two_source_ifm";
    case Scenario::hardy: return "hardy";
    case Scenario::rpe_coherent: return "rpe_coherent";
    case Scenario::rpe_incoherent: return "rpe_incoherent";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "mzi") return Scenario::mzi_delayed_choice;
  for (Scenario s : kAllScenarios) {
    if (n == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string_view describe(Scenario s) {
  switch (s) {
    case Scenario::mzi_delayed_choice:
      return "(Fig. 1) single photon in a Mach-Zehnder interferometer; second splitter in or out";
    case Scenario::two_source_interference:
      return "(Fig. 2) one photon from two weak phase-locked sources; late choice of the splitter";
    case Scenario::two_source_ifm:
      return "(Fig. 3) interaction-free measurement: an absorber next to one of the two sources";
    case Scenario::hardy:
      return "(Fig. 4) single photon through an interferometer whose arms cross two split atoms";
    case Scenario::rpe_coherent:
      return "(Fig. 5) two weak sources entangle two split atoms on a single click at D";
    case Scenario::rpe_incoherent:
      return "(Fig. 5, incoherent variant) two three-level atoms entangled by one detected emission";
  }
  return "";
}

std::string_view to_string(ErasureMode m) {
  switch (m) {
    case ErasureMode::none: return "none";
    case ErasureMode::position_measurement: return "position_measurement";
    case ErasureMode::unite_and_spin: return "unite_and_spin";
  }
  return "?";
}

std::optional<ErasureMode> parse_erasure(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "none") return ErasureMode::none;
  if (n == "position" || n == "position_measurement") return ErasureMode::position_measurement;
  if (n == "unite" || n == "unite_and_spin") return ErasureMode::unite_and_spin;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (erasure != ErasureMode::none && scenario != Scenario::rpe_coherent) {
    if (scenario == Scenario::rpe_incoherent) {
      throw ConfigError("box erasure modes need split spin-1/2 atoms; rpe_incoherent uses the splitter choice instead");
    }
    throw ConfigError("erasure modes apply to the rpe scenarios only");
  }
  if (blocker_present && scenario != Scenario::two_source_ifm) {
    throw ConfigError("the blocker exists only in two_source_ifm");
  }
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("weak source amplitude p must lie in (0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("excitation amplitude epsilon must lie in [0, 1]");
  if (n_max != 1 && n_max != 2) throw ConfigError("n_max must be 1 or 2");
  if (phase && !std::isfinite(*phase)) throw ConfigError("phase must be finite");
  if (sampling) sampling->validate();
}

AtomPrep ExperimentConfig::effective_prep() const {
  if (prep) return *prep;
  return scenario == Scenario::rpe_coherent ? AtomPrep::down_phase_i : AtomPrep::up_phase_i;
}

double ExperimentReport::probability(std::string_view name) const {
  for (const auto& [n, v] : probabilities) {
    if (n == name) return v;
  }
  throw ConfigError("report has no probability named '" + std::string(name) + "'");
}

bool ExperimentReport::has_probability(std::string_view name) const {
  return std::any_of(probabilities.begin(), probabilities.end(), [&](const auto& kv) { return kv.first == name; });
}

const PureState& ExperimentReport::conditional_state(std::string_view name) const {
  for (const auto& s : conditional_states) {
    if (s.name == name) return s.state;
  }
  throw ConfigError("report has no conditional state named '" + std::string(name) + "'");
}

const PureState& ExperimentReport::stage(std::string_view name) const {
  for (const auto& s : stages) {
    if (s.name == name) return s.state;
  }
  throw ConfigError("report has no stage named '" + std::string(name) + "'");
}

void check_report(const ExperimentReport& report) {
  for (const auto& [name, p] : report.probabilities) {
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw PhysicsError("probability '" + name + "' = " + fmt(p) + " out of range");
  }
  for (const auto& fam : report.exclusive_families) {
    double sum = 0.0;
    for (const auto& name : fam) sum += report.probability(name);
    if (std::abs(sum - 1.0) > 1e-10) throw PhysicsError("exclusive family starting with '" + fam.front() + "' sums to " + fmt(sum));
  }
  for (const auto& s : report.conditional_states) {
    if (std::abs(s.state.norm_sq() - 1.0) > 1e-12) throw PhysicsError("conditional state '" + s.name + "' is not normalized");
  }
}

double tune_dark_phase(const std::function<double(double)>& dark_probability) {
  const double f0 = dark_probability(0.0);
  const double f1 = dark_probability(std::numbers::pi / 2.0);
  const double f2 = dark_probability(std::numbers::pi);
  const double b = 0.5 * (f0 - f2);
  const double c = f1 - 0.5 * (f0 + f2);
  if (std::hypot(b, c) < 1e-15) throw PhysicsError("dark-port probability does not depend on the phase");
  return wrap_phase(std::atan2(-c, -b));
}

double tuned_two_source_phase(double p, int n_max) {
  return tune_dark_phase([&](double phi) {
    auto src = two_weak_sources(p, n_max, phi);
    PureState out = tensor(src.state, photon_vacuum({"c", "d"}, n_max));
    out = beam_splitter(out, kFinalPorts);
    const StateSpace& sp = out.space();
    const std::size_t id = sp.index_of("d");
    const double sector = weight(out, [&](const BasisKet& k) { return sp.total_photons(k) == 1; });
    return weight(out, [&](const BasisKet& k) { return sp.total_photons(k) == 1 && k[id] == 1; }) / sector;
  });
}

// ---------------------------------------------------------------------------

ExperimentReport run_mzi_delayed_choice(const ExperimentConfig& cfg) {
  require_scenario(cfg, Scenario::mzi_delayed_choice);
  ReportBuilder b(cfg);
  const double phase = wrap_phase(cfg.phase.value_or(0.0));
  b.report().phase_used = phase;

  PureState modes = photon_vacuum({"src", "u", "v", "c", "d"}, cfg.n_max);
  PureState psi = single_photon(modes.space(), "src");
  b.stage("initial", psi);
  psi = beam_splitter(psi, SplitterPorts{"src", "", "v", "u"});
  psi = phase_shift(psi, "u", phase);
  b.stage("before_final_splitter", psi);
  psi = SplitterStage(kFinalPorts, cfg.bs_present).apply(psi);
  b.stage("after_final_splitter", psi);

  const auto at_c = detect(psi, "c");
  const auto at_d = detect(psi, "d");
  b.prob("p_detector_c", at_c[1].probability);
  b.prob("p_detector_d", at_d[1].probability);
  b.family({"p_detector_c", "p_detector_d"});
  if (at_c[1].probability > 0.0) b.conditional("detector_c", at_c[1].conditional());
  if (at_d[1].probability > 0.0) b.conditional("detector_d", at_d[1].conditional());

  b.note("splitter_convention", kSplitterNote);
  b.note("arm_phase", "phase on arm u = " + fmt(phase));
  b.note("final_splitter", cfg.bs_present ? "inserted" : "removed");
  return finish(b);
}

namespace {

ExperimentReport run_two_source(const ExperimentConfig& cfg, bool ifm) {
  ReportBuilder b(cfg);
  const bool tuned = !cfg.phase.has_value();
  const double phase = tuned ? tuned_two_source_phase(cfg.p, cfg.n_max) : wrap_phase(*cfg.phase);
  b.report().phase_used = phase;

  auto src = two_weak_sources(cfg.p, cfg.n_max, phase);
  PureState psi = tensor(src.state, photon_vacuum({"c", "d"}, cfg.n_max));
  if (ifm) {
    psi = tensor(psi, clear_flag("blocker"));
    if (cfg.blocker_present) psi = absorb_photon(psi, "v", "blocker", [](const BasisKet&) { return true; });
  }
  b.stage("before_final_splitter", psi);
  const SplitterStage splitter(kFinalPorts, cfg.bs_present);
  PureState out = splitter.apply(psi);
  b.stage("after_final_splitter", out);

  add_emission_summary(b, out, src.truncated, cfg.n_max);
  if (ifm && b.report().has_probability("p_absorbed_given_single")) {
    const double c = b.report().probability("p_detector_c_given_single");
    const double d = b.report().probability("p_detector_d_given_single");
    if (c + d > 0.0) {
      b.prob("p_detector_d_given_not_absorbed", d / (c + d));
      b.prob("p_detector_c_given_not_absorbed", c / (c + d));
      b.family({"p_detector_c_given_not_absorbed", "p_detector_d_given_not_absorbed"});
    }
  }

  if (!cfg.bs_present) {
    // Which source fed each detector, from single-emission histories of one source alone.
    const StateSpace& sp = psi.space();
    const std::size_t iu = sp.index_of("u");
    const std::size_t iv = sp.index_of("v");
    auto from_source = [&](std::size_t i, std::size_t other) {
      return project(psi, [&, i, other](const BasisKet& k) { return k[i] == 1 && k[other] == 0; });
    };
    const PureState only_u = splitter.apply(from_source(iu, iv));
    const PureState only_v = splitter.apply(from_source(iv, iu));
    const double nu = only_u.norm_sq();
    const double nv = only_v.norm_sq();
    if (nu > 0.0) b.prob("p_detector_c_given_source_u", detect(only_u, "c")[1].probability / nu);
    if (nv > 0.0) b.prob("p_detector_d_given_source_v", detect(only_v, "d")[1].probability / nv);
  }

  for (const char* det : {"c", "d"}) {
    if (auto sel = single_click(out, det)) b.conditional(std::string("detector_") + det, sel->state);
  }

  b.note("splitter_convention", kSplitterNote);
  b.note("relative_phase", (tuned ? "auto-tuned dark port D: " : "configured: ") + fmt(phase));
  b.note("final_splitter", cfg.bs_present ? "inserted" : "removed");
  b.note("truncation", "n_max = " + std::to_string(cfg.n_max));
  if (ifm) b.note("blocker", cfg.blocker_present ? "absorber on path v" : "absent");
  return finish(b);
}

}  // namespace

ExperimentReport run_two_source_interference(const ExperimentConfig& cfg) {
  require_scenario(cfg, Scenario::two_source_interference);
  return run_two_source(cfg, false);
}

ExperimentReport run_two_source_ifm(const ExperimentConfig& cfg) {
  require_scenario(cfg, Scenario::two_source_ifm);
  return run_two_source(cfg, true);
}

namespace {

const BoxGeometry kAtom1Box{"z1", Box::z_up, "v", "abs1"};
const char* sign(Box b) { return b == Box::z_up ? "+" : "-"; }
const BoxGeometry kAtom2Box{"z2", Box::z_down, "u", "abs2"};
const char* kGeometryNote = "z1: z+ box across path v; z2: z- box across path u";

PureState with_split_atoms(const PureState& photons, AtomPrep prep) {
  PureState s = tensor(photons, prepare_atom("z1", prep));
  s = tensor(s, prepare_atom("z2", prep));
  s = tensor(s, clear_flag("abs1"));
  return tensor(s, clear_flag("abs2"));
}

}  // namespace

ExperimentReport run_hardy(const ExperimentConfig& cfg) {
  require_scenario(cfg, Scenario::hardy);
  ReportBuilder b(cfg);
  const AtomPrep prep = cfg.effective_prep();
  const double phase = wrap_phase(cfg.phase.value_or(0.0));
  b.report().phase_used = phase;

  PureState modes = photon_vacuum({"src", "u", "v", "c", "d"}, cfg.n_max);
  PureState psi = with_split_atoms(single_photon(modes.space(), "src"), prep);
  b.stage("initial", psi);
  psi = beam_splitter(psi, SplitterPorts{"src", "", "v", "u"});
  psi = phase_shift(psi, "u", phase);
  b.stage("after_first_splitter", psi);
  psi = interact_absorb(psi, kAtom1Box);
  psi = interact_absorb(psi, kAtom2Box);
  b.stage("after_interaction", psi);

  const StateSpace& sp = psi.space();
  const std::size_t f1 = sp.index_of("abs1");
  const std::size_t f2 = sp.index_of("abs2");
  const double abs1 = weight(psi, [&](const BasisKet& k) { return k[f1] == 1; });
  const double abs2 = weight(psi, [&](const BasisKet& k) { return k[f2] == 1; });

  auto [clear, discard] = discard_absorption(psi);
  b.report().discard_probability = discard;
  b.stage("after_discard", clear);
  b.stage("before_final_splitter", clear);
  PureState out = SplitterStage(kFinalPorts, cfg.bs_present).apply(clear);
  b.stage("after_final_splitter", out);

  const auto at_c = detect(out, "c");
  const auto at_d = detect(out, "d");
  const double pc = at_c[1].probability;
  const double pd = at_d[1].probability;
  const double kept = pc + pd;
  b.prob("p_absorbed", discard);
  b.prob("p_absorbed_atom1", abs1);
  b.prob("p_absorbed_atom2", abs2);
  b.prob("p_detector_c", pc);
  b.prob("p_detector_d", pd);
  b.prob("p_detector_c_given_clear", pc / kept);
  b.prob("p_detector_d_given_clear", pd / kept);
  b.family({"p_absorbed", "p_detector_c", "p_detector_d"});
  b.family({"p_absorbed_atom1", "p_absorbed_atom2", "p_detector_c", "p_detector_d"});
  b.family({"p_detector_c_given_clear", "p_detector_d_given_clear"});

  b.stage("detector_d_branch", at_d[1].state);
  if (pc > 0.0) b.conditional("detector_c", at_c[1].conditional());
  if (pd > 0.0) {
    const PureState cond_d = at_d[1].conditional();
    b.conditional("detector_d", cond_d);
    analyze_atom_pair(b, cond_d, ChshSetting::standard(), "box basis, standard x-z quadruple");
  }

  b.note("splitter_convention", kSplitterNote);
  b.note("atom_prep", std::string(to_string(prep)));
  b.note("box_geometry", kGeometryNote);
  b.note("final_splitter", cfg.bs_present ? "inserted" : "removed");
  return finish(b);
}

ExperimentReport run_rpe_coherent(const ExperimentConfig& cfg) {
  require_scenario(cfg, Scenario::rpe_coherent);
  ReportBuilder b(cfg);
  const AtomPrep prep = cfg.effective_prep();
  const bool tuned = !cfg.phase.has_value();
  const double phase = tuned ? tuned_two_source_phase(cfg.p, cfg.n_max) : wrap_phase(*cfg.phase);
  b.report().phase_used = phase;

  auto src = two_weak_sources(cfg.p, cfg.n_max, phase);
  PureState psi = with_split_atoms(tensor(src.state, photon_vacuum({"c", "d"}, cfg.n_max)), prep);
  b.stage("initial", psi);
  psi = interact_absorb(psi, kAtom1Box);
  psi = interact_absorb(psi, kAtom2Box);
  b.stage("after_interaction", psi);
  b.stage("before_final_splitter", psi);
  PureState out = SplitterStage(kFinalPorts, cfg.bs_present).apply(psi);
  b.stage("after_final_splitter", out);

  add_emission_summary(b, out, src.truncated, cfg.n_max);
  auto& r = b.report();
  if (r.has_probability("p_absorbed_given_single")) r.discard_probability = r.probability("p_absorbed_given_single");

  // Single-emission sector with the absorption histories discarded, scaled to
  // a unit-weight sector so it can be compared with the one-photon pipeline.
  const StateSpace& sp = psi.space();
  PureState sector_clear =
      project(psi, [&](const BasisKet& k) { return excitations(sp, k) == 1 && sp.flags_set(k) == 0; });
  if (!sector_clear.empty()) {
    const double scale = 1.0 / std::sqrt(r.probability("p_single_emission"));
    b.stage("after_discard", map_kets(sector_clear, [&](const BasisKet& k) {
              return KetImage{{k, Complex{scale, 0.0}}};
            }));
  }

  for (const char* det : {"c", "d"}) {
    if (auto sel = single_click(out, det)) b.conditional(std::string("detector_") + det, sel->state);
  }
  if (!r.has_probability("p_single_detector_d") || !(r.probability("p_single_detector_d") > 0.0)) {
    throw PhysicsError("no single-photon click at D; nothing to post-select");
  }
  const PureState cond_d = r.conditional_state("detector_d");

  switch (cfg.erasure) {
    case ErasureMode::none:
      analyze_atom_pair(b, cond_d, ChshSetting::standard(), "box basis, standard x-z quadruple");
      b.note("erasure", "none");
      break;
    case ErasureMode::position_measurement: {
      const auto first = measure_box_position(cond_d, "z1");
      std::vector<std::string> fam;
      std::optional<DensityMatrix> mixed;
      double exactly_one = 0.0;
      double max_conc = 0.0;
      for (const auto& b1 : first) {
        for (const auto& b2 : measure_box_position(b1.state, "z2")) {
          const auto box1 = static_cast<Box>(b1.outcome);
          const auto box2 = static_cast<Box>(b2.outcome);
          const std::string tag = std::string("z1") + sign(box1) + "_z2" + sign(box2);
          const std::string name = "p_boxes_" + tag;
          b.prob(name, b2.probability);
          fam.push_back(name);
          const bool hit1 = box1 == kAtom1Box.intersecting_box;
          const bool hit2 = box2 == kAtom2Box.intersecting_box;
          if (hit1 != hit2) exactly_one += b2.probability;
          if (b2.probability > 0.0) {
            const PureState cond = b2.conditional();
            b.conditional("detector_d_boxes_" + tag, cond);
            const std::vector<std::string> atoms{"z1", "z2"};
            const double c = concurrence(partial_trace(cond, atoms));
            r.concurrence_by_event.emplace_back("detector_d_boxes_" + tag, c);
            max_conc = std::max(max_conc, c);
            const DensityMatrix part = partial_trace(b2.state, atoms);
            mixed = mixed ? DensityMatrix(part.space(), mixed->matrix() + part.matrix()) : part;
          }
        }
      }
      b.family(std::move(fam));
      b.prob("p_exactly_one_intersecting", exactly_one);
      r.concurrence = max_conc;
      const ChshSetting setting = ChshSetting::standard();
      r.chsh = ChshReport{setting, chsh(*mixed, setting), max_chsh(*mixed), "box basis after position measurement"};
      r.atom_density = std::move(mixed);
      b.note("erasure", "position measurement: which-box record kept, one history for the photon");
      break;
    }
    case ErasureMode::unite_and_spin: {
      PureState united = unite_boxes(cond_d, "z1", prep, "abs1");
      united = unite_boxes(united, "z2", prep, "abs2");
      b.conditional("detector_d_reunited", united);
      // Reuniting is a z rotation on each atom; measuring along the rotated
      // axes reads out the same correlations as the box basis.
      const Eigen::Matrix2cd u = splitting_isometry(prep).adjoint();
      const double beta = std::arg(u(1, 1)) - std::arg(u(0, 0));
      const ChshSetting base = ChshSetting::standard();
      const ChshSetting rotated{base.a.rotated_about_z(beta), base.a2.rotated_about_z(beta),
                                base.b.rotated_about_z(beta), base.b2.rotated_about_z(beta)};
      analyze_atom_pair(b, united, rotated, "reunited spin frame, standard quadruple rotated about z by " + fmt(beta));
      b.note("erasure", "erasure at the beginning: boxes reunited by the inverse field");
      break;
    }
  }
  if (r.concurrence) r.concurrence_by_event.insert(r.concurrence_by_event.begin(), {"detector_d", *r.concurrence});

  b.note("splitter_convention", kSplitterNote);
  b.note("atom_prep", std::string(to_string(prep)));
  b.note("box_geometry", std::string(kGeometryNote) + " (mirrors the Hardy layout)");
  b.note("relative_phase", (tuned ? "auto-tuned dark port D: " : "configured: ") + fmt(phase));
  b.note("final_splitter", cfg.bs_present ? "inserted" : "removed");
  b.note("truncation", "n_max = " + std::to_string(cfg.n_max));
  return finish(b);
}

ExperimentReport run_rpe_incoherent(const ExperimentConfig& cfg) {
  require_scenario(cfg, Scenario::rpe_incoherent);
  ReportBuilder b(cfg);
  const double phase = wrap_phase(cfg.phase.value_or(0.0));
  b.report().phase_used = phase;
  const int n_max = cfg.n_max;

  PureState psi = tensor(prepare_three_level("a1"), prepare_three_level("a2"));
  psi = tensor(psi, photon_vacuum({"e1", "e2", "c", "d"}, n_max));
  b.stage("initial", psi);
  psi = weak_excite(psi, "a1", cfg.epsilon);
  psi = weak_excite(psi, "a2", cfg.epsilon);
  // Emission conserves excitations; drop histories that would emit more
  // photons than the truncation holds.
  const StateSpace& sp = psi.space();
  const std::size_t ia1 = sp.index_of("a1");
  const std::size_t ia2 = sp.index_of("a2");
  auto fits = [&](const BasisKet& k) {
    return sp.total_photons(k) + (k[ia1] == 2) + (k[ia2] == 2) <= static_cast<unsigned>(n_max);
  };
  const double truncated = weight(psi, [&](const BasisKet& k) { return !fits(k); });
  psi = project(psi, fits);
  psi = decay_emit(psi, "a1", "e1");
  psi = decay_emit(psi, "a2", "e2");
  psi = phase_shift(psi, "e1", phase);
  b.stage("before_final_splitter", psi);
  PureState out = SplitterStage(SplitterPorts{"e1", "e2", "c", "d"}, cfg.bs_present).apply(psi);
  b.stage("after_final_splitter", out);

  const StateSpace& os = out.space();
  const std::size_t ic = os.index_of("c");
  const std::size_t id = os.index_of("d");
  auto photons = [&](const BasisKet& k) { return os.total_photons(k); };
  const double none = weight(out, [&](const BasisKet& k) { return photons(k) == 0; });
  const double at_c = weight(out, [&](const BasisKet& k) { return photons(k) == 1 && k[ic] == 1; });
  const double at_d = weight(out, [&](const BasisKet& k) { return photons(k) == 1 && k[id] == 1; });
  const double multi = weight(out, [&](const BasisKet& k) { return photons(k) >= 2; });
  b.prob("p_no_photon", none);
  b.prob("p_single_detector_c", at_c);
  b.prob("p_single_detector_d", at_d);
  b.prob("p_single_detection", at_c + at_d);
  if (n_max >= 2) {
    b.prob("p_multi_photon", multi);
    b.family({"p_no_photon", "p_single_detector_c", "p_single_detector_d", "p_multi_photon"});
  } else {
    b.prob("p_truncated", truncated);
    b.family({"p_no_photon", "p_single_detector_c", "p_single_detector_d", "p_truncated"});
  }

  auto& r = b.report();
  const std::vector<std::string> atoms{"a1", "a2"};
  for (const char* det : {"d", "c"}) {
    const std::size_t idx = os.index_of(det);
    auto pred = [&](const BasisKet& k) { return photons(k) == 1 && k[idx] == 1; };
    if (!(weight(out, pred) > 0.0)) continue;
    const Postselection sel = postselect(out, pred);
    const std::string name = std::string("detector_") + det;
    b.conditional(name, sel.state);
    const DensityMatrix rho = restrict_to_qubits(partial_trace(sel.state, atoms));
    const double c = concurrence(rho);
    r.concurrence_by_event.emplace_back(name, c);
    if (std::string_view(det) == "d") {
      const ChshSetting setting = optimal_chsh_setting(rho);
      r.chsh = ChshReport{setting, chsh(rho, setting), max_chsh(rho), "ground levels {0,1} as qubits, optimal setting"};
      r.concurrence = c;
      r.atom_density = rho;
    }
  }
  if (!r.concurrence) throw PhysicsError("no single photon reaches D; nothing to post-select");

  b.note("final_splitter", cfg.bs_present ? "inserted: erasure at the end (emitter identity erased)"
                                          : "removed: each detector faces one atom");
  b.note("emission_phase", "phase on e1 = " + fmt(phase));
  b.note("level_labels",
         "atoms start in |0>, are excited to |2>, and decay to |1> when emitting; the heralded state is "
         "(|1>|0> + e^{i phi}|0>|1>)/sqrt(2) up to detector sign");
  b.note("splitter_convention", kSplitterNote);
  b.note("truncation", "n_max = " + std::to_string(n_max));
  return finish(b);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::mzi_delayed_choice: return run_mzi_delayed_choice(cfg);
    case Scenario::two_source_interference: return run_two_source_interference(cfg);
    case Scenario::two_source_ifm: return run_two_source_ifm(cfg);
    case Scenario::hardy: return run_hardy(cfg);
    case Scenario::rpe_coherent: return run_rpe_coherent(cfg);
    case Scenario::rpe_incoherent: return run_rpe_incoherent(cfg);
  }
  throw ConfigError("unknown scenario");
}

}  // namespace rpesim
