// ecs: experiment runner for the entangled-coherent-state simulator.
//
//   ecs <entropy-scan|purify|decoherence|multimode|verify> [--config PATH]
//       [--out PATH] [--seed N] [--trials N] [--verify] [--json] [--dump PATH]
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ecs/experiments.hpp"
#include "ecs/purification.hpp"
#include "ecs/state_io.hpp"

#ifndef ECS_VERSION
#define ECS_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
namespace ex = ecs::experiments;
namespace pu = ecs::purification;

constexpr int kConfigError = 2;
constexpr int kVerifyFailure = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string out;
  std::string dump;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  bool verify = false;
  bool json = false;
};

const std::set<std::string> kKnownKeys = {
    "experiment", "alpha",       "phi",         "phi_points", "f0",            "iterations",
    "gamma_tau",  "trials",      "seed",        "scheme",     "target",        "probe_amplitude",
    "probe_sign", "bs_sign",     "random_states", "max_amplitude", "out",      "dump",
    "verify",     "json"};

json defaultsFor(const std::string& experiment) {
  json d = {{"experiment", experiment}, {"bs_sign", 1}, {"verify", false}, {"json", false}};
  if (experiment == "entropy-scan") {
    d["alpha"] = {0.8, 1.0, 1.2};
    d["phi_points"] = 64;
  } else if (experiment == "purify") {
    d["alpha"] = 2.0;
    d["f0"] = 0.75;
    d["iterations"] = 3;
    d["scheme"] = "full";
    d["trials"] = 0;
    d["probe_sign"] = 1;
  } else if (experiment == "decoherence") {
    d["alpha"] = {0.5, 1.0, 2.0, 3.0};
    d["gamma_tau"] = {{"start", 0.0}, {"stop", 2.0}, {"count", 41}};
  } else if (experiment == "multimode") {
    d["alpha"] = 2.0;
    d["f0"] = 0.7;
    d["iterations"] = 2;
    d["probe_sign"] = 1;
  } else if (experiment == "verify") {
    d["seed"] = 1;
    d["random_states"] = 24;
    d["max_amplitude"] = 3.0;
  }
  return d;
}

json effectiveConfig(const std::string& experiment, const Flags& flags) {
  json cfg = defaultsFor(experiment);
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("cannot open config file " + flags.config);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!file.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    if (file.contains("experiment") && file["experiment"] != experiment) {
      throw ConfigError("config is for experiment " + file["experiment"].dump() + ", not " + experiment);
    }
    cfg.merge_patch(file);
  }
  if (!flags.out.empty()) cfg["out"] = flags.out;
  if (!flags.dump.empty()) cfg["dump"] = flags.dump;
  if (flags.seed) cfg["seed"] = *flags.seed;
  if (flags.trials) cfg["trials"] = *flags.trials;
  if (flags.verify) cfg["verify"] = true;
  if (flags.json) cfg["json"] = true;
  return cfg;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---- typed config access ----

template <typename T>
T get(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || cfg[key].is_null()) throw ConfigError("missing config key '" + key + "'");
  try {
    return cfg[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

double number(const json& cfg, const std::string& key) {
  const json& v = cfg.contains(key) ? cfg[key] : json();
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> grid(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw ConfigError("missing config key '" + key + "'");
  const json& v = cfg[key];
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("grid '" + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else if (v.is_object()) {
    const double start = number(v, "start");
    const double stop = number(v, "stop");
    const int count = get<int>(v, "count");
    if (count < 1) throw ConfigError("grid '" + key + "' needs count >= 1");
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  } else {
    throw ConfigError("grid '" + key + "' must be a number, array or {start, stop, count}");
  }
  if (out.empty()) throw ConfigError("grid '" + key + "' is empty");
  return out;
}

std::vector<double> phiGrid(const json& cfg) {
  if (cfg.contains("phi")) return grid(cfg, "phi");
  const int n = get<int>(cfg, "phi_points");
  if (n < 1) throw ConfigError("phi_points must be >= 1");
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(2.0 * std::numbers::pi * k / n);
  return out;
}

ecs::optics::BeamSplitterConvention convention(const json& cfg) {
  const int s = get<int>(cfg, "bs_sign");
  if (s != 1 && s != -1) throw ConfigError("bs_sign must be 1 or -1");
  return {s};
}

pu::ProbeOptions probe(const json& cfg) {
  pu::ProbeOptions p;
  if (cfg.contains("probe_amplitude") && !cfg["probe_amplitude"].is_null()) p.amplitude = number(cfg, "probe_amplitude");
  p.sign = get<int>(cfg, "probe_sign");
  if (p.sign != 1 && p.sign != -1) throw ConfigError("probe_sign must be 1 or -1");
  return p;
}

ecs::QuasiBell target(const std::string& name) {
  if (name == "phi_plus") return ecs::QuasiBell::PhiPlus;
  if (name == "phi_minus") return ecs::QuasiBell::PhiMinus;
  if (name == "psi_plus") return ecs::QuasiBell::PsiPlus;
  if (name == "psi_minus") return ecs::QuasiBell::PsiMinus;
  throw ConfigError("unknown target '" + name + "'");
}

// ---- tables ----

using Cell = std::variant<double, std::int64_t, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string formatCell(const Cell& c) {
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", std::get<double>(c));
  return buf;
}

json cellJson(const Cell& c) {
  return std::visit([](auto v) -> json {
    if constexpr (std::is_same_v<decltype(v), double>) {
      if (!std::isfinite(v)) return nullptr;
    }
    return v;
  }, c);
}

struct Meta {
  std::string experiment;
  std::string hash;
  std::string seed;
};

Meta metaOf(const std::string& experiment, const json& cfg) {
  json hashed = cfg;
  for (const char* k : {"out", "dump", "json", "verify"}) hashed.erase(k);
  char h[20];
  std::snprintf(h, sizeof h, "%016" PRIx64, fnv1a(hashed.dump()));
  const std::string seed = cfg.contains("seed") && cfg["seed"].is_number_unsigned()
                               ? std::to_string(cfg["seed"].get<std::uint64_t>())
                               : "none";
  return {experiment, h, seed};
}

std::string render(const Table& t, const Meta& meta, bool asJson) {
  std::ostringstream os;
  if (asJson) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::object();
      for (std::size_t i = 0; i < r.size(); ++i) row[t.columns[i]] = cellJson(r[i]);
      rows.push_back(std::move(row));
    }
    json doc = {{"tool", "ecs"},          {"version", ECS_VERSION}, {"experiment", meta.experiment},
                {"config_hash", meta.hash}, {"seed", meta.seed},      {"columns", t.columns},
                {"rows", rows}};
    os << doc.dump(2) << '\n';
    return os.str();
  }
  os << "# ecs " << ECS_VERSION << " config=" << meta.hash << " seed=" << meta.seed << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << formatCell(r[i]);
    os << '\n';
  }
  return os.str();
}

void writeText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string renderChecks(const std::vector<ex::Check>& checks, const Meta& meta, bool asJson) {
  if (asJson) {
    json list = json::array();
    for (const auto& c : checks) {
      list.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"max_deviation", std::isfinite(c.deviation) ? json(c.deviation) : json(nullptr)},
                      {"tolerance", c.tolerance}});
    }
    json doc = {{"tool", "ecs"},           {"version", ECS_VERSION}, {"experiment", meta.experiment},
                {"config_hash", meta.hash}, {"seed", meta.seed},      {"passed", ex::allPassed(checks)},
                {"checks", list}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "# ecs " << ECS_VERSION << " config=" << meta.hash << " seed=" << meta.seed << '\n';
  os << "check,passed,max_deviation,tolerance\n";
  for (const auto& c : checks) {
    os << c.name << ',' << formatCell(c.passed) << ',' << formatCell(c.deviation) << ',' << formatCell(c.tolerance)
       << '\n';
  }
  return os.str();
}

/// Reports side checks on stderr; returns false on any failure.
bool reportChecks(const std::vector<ex::Check>& checks) {
  for (const auto& c : checks) {
    std::fprintf(stderr, "verify %s %s max_deviation=%.3e tolerance=%.1e\n", c.passed ? "PASS" : "FAIL",
                 c.name.c_str(), c.deviation, c.tolerance);
  }
  return ex::allPassed(checks);
}

// ---- experiments ----

struct Outcome {
  std::string text;
  std::optional<json> dump;
  bool verified = true;
};

Outcome runEntropyScan(const json& cfg, const Meta& meta) {
  const auto alphas = grid(cfg, "alpha");
  const auto phis = phiGrid(cfg);
  for (double p : phis) {
    if (p < 0.0 || p >= 2.0 * std::numbers::pi) throw ConfigError("phi grid must lie in [0, 2pi)");
  }
  Table t{{"alpha", "phi", "E", "E_closed_form"}, {}};
  for (const auto& r : ex::entropyScan(alphas, phis)) t.rows.push_back({r.alpha, r.phi, r.entropy, r.closedForm});
  Outcome o{render(t, meta, get<bool>(cfg, "json")), {}, true};
  if (cfg.contains("dump")) {
    json states = json::array();
    for (double a : alphas) {
      for (double p : phis) {
        states.push_back({{"alpha", a}, {"phi", p},
                          {"state", ecs::toJson(ecs::makeEntangledCoherent(a, p, ecs::EcsKind::Phi))}});
      }
    }
    o.dump = states;
  }
  if (get<bool>(cfg, "verify")) o.verified = reportChecks(ex::verifyEntropy(alphas, phis));
  return o;
}

Outcome runPurify(const json& cfg, const Meta& meta) {
  pu::ProtocolConfig pc;
  pc.alpha = number(cfg, "alpha");
  const std::string scheme = get<std::string>(cfg, "scheme");
  if (scheme == "full") {
    pc.scheme = pu::Scheme::Full;
  } else if (scheme == "simple_p1") {
    pc.scheme = pu::Scheme::SimpleP1;
  } else {
    throw ConfigError("scheme must be full or simple_p1");
  }
  pc.target = target(cfg.contains("target") ? get<std::string>(cfg, "target")
                                            : (pc.scheme == pu::Scheme::Full ? "phi_minus" : "phi_plus"));
  pc.iterations = get<int>(cfg, "iterations");
  pc.trials = get<std::uint64_t>(cfg, "trials");
  if (pc.trials > 0) {
    if (!cfg.contains("seed")) throw ConfigError("a seed is required when trials > 0");
    pc.mode = pu::RunMode::MonteCarlo;
    pc.rootSeed = get<std::uint64_t>(cfg, "seed");
  }
  pc.probe = probe(cfg);
  pc.convention = convention(cfg);
  const double f0 = number(cfg, "f0");
  if (!(f0 > 0.0 && f0 < 1.0)) throw ConfigError("f0 must lie in (0, 1)");
  try {
    pc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  ecs::MixedState last = pu::makeEnsemble(pc.alpha, f0, pc.target);
  const auto reports = pu::runProtocol(pc, f0, &last);
  Table t{{"round", "F_before", "F_exact", "F_recursion", "P_success_exact", "P_success_formula", "amplitude"}, {}};
  if (pc.trials > 0) {
    for (const char* c : {"MC_trials", "MC_kept", "MC_rate", "MC_rate_halfwidth", "MC_fidelity", "MC_fidelity_sigma"}) {
      t.columns.emplace_back(c);
    }
  }
  for (const auto& r : reports) {
    std::vector<Cell> row{static_cast<std::int64_t>(r.round), r.fidelityBefore, r.fidelityAfter, r.fidelityRecursion,
                          r.successProbability, r.successFormula, r.amplitudeAfter};
    if (r.monteCarlo) {
      const auto& m = *r.monteCarlo;
      row.insert(row.end(), {static_cast<std::int64_t>(m.trials), static_cast<std::int64_t>(m.kept), m.rate,
                             m.halfWidth, m.keptFidelity, m.keptFidelitySigma});
    }
    t.rows.push_back(std::move(row));
  }
  Outcome o{render(t, meta, get<bool>(cfg, "json")), {}, true};
  if (cfg.contains("dump")) o.dump = ecs::toJson(last);
  if (get<bool>(cfg, "verify")) o.verified = reportChecks(ex::verifyP1Parties(pc.alpha, pc.convention));
  return o;
}

Outcome runDecoherence(const json& cfg, const Meta& meta) {
  const auto alphas = grid(cfg, "alpha");
  const auto gts = grid(cfg, "gamma_tau");
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("alpha must be positive");
  }
  for (double g : gts) {
    if (!(g >= 0.0)) throw ConfigError("gamma_tau must be non-negative");
  }
  Table t{{"alpha", "gamma_tau", "F_tau", "F_state", "purifiable", "threshold"}, {}};
  for (const auto& r : ex::decoherenceTable(alphas, gts)) {
    t.rows.push_back({r.alpha, r.gammaTau, r.fidelity, r.stateFidelity, r.purifiable, r.threshold});
  }
  Outcome o{render(t, meta, get<bool>(cfg, "json")), {}, true};
  if (cfg.contains("dump")) {
    json states = json::array();
    for (double a : alphas) {
      const auto phi = ecs::makeQuasiBell(a, ecs::QuasiBell::PhiMinus);
      for (double g : gts) {
        states.push_back({{"alpha", a}, {"gamma_tau", g}, {"state", ecs::toJson(pu::decohere(phi, g))}});
      }
    }
    o.dump = states;
  }
  if (get<bool>(cfg, "verify")) o.verified = reportChecks(ex::verifyDecoherence(alphas, gts));
  return o;
}

Outcome runMultimode(const json& cfg, const Meta& meta) {
  const double alpha = number(cfg, "alpha");
  const double f0 = number(cfg, "f0");
  const int iterations = get<int>(cfg, "iterations");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(f0 > 0.5 && f0 <= 1.0)) throw ConfigError("f0 must exceed 1/2 and be at most 1");
  if (iterations < 0) throw ConfigError("iterations must be non-negative");
  const auto conv = convention(cfg);
  ecs::MixedState last = pu::makeMultimodeEnsemble(alpha, f0);
  Table t{{"round", "F_before", "F_exact", "F_recursion", "P_keep", "amplitude"}, {}};
  for (const auto& r : ex::multimodeTable(alpha, f0, iterations, probe(cfg), conv, &last)) {
    t.rows.push_back({static_cast<std::int64_t>(r.round), r.fidelityBefore, r.fidelityAfter, r.fidelityRecursion,
                      r.keepProbability, r.amplitude});
  }
  Outcome o{render(t, meta, get<bool>(cfg, "json")), {}, true};
  if (cfg.contains("dump")) o.dump = ecs::toJson(last);
  if (get<bool>(cfg, "verify")) o.verified = reportChecks(ex::verifyP1Parties(alpha, conv));
  return o;
}

Outcome runVerify(const json& cfg, const Meta& meta) {
  ex::VerifyOptions v;
  v.convention = convention(cfg);
  v.seed = get<std::uint64_t>(cfg, "seed");
  v.randomStates = get<int>(cfg, "random_states");
  v.maxAmplitude = number(cfg, "max_amplitude");
  if (v.randomStates < 0) throw ConfigError("random_states must be non-negative");
  if (!(v.maxAmplitude > 0.0 && v.maxAmplitude <= 4.0)) throw ConfigError("max_amplitude must lie in (0, 4]");
  const auto checks = ex::verifySuite(v);
  return {renderChecks(checks, meta, get<bool>(cfg, "json")), {}, ex::allPassed(checks)};
}

int run(const std::string& experiment, const Flags& flags) {
  try {
    const json cfg = effectiveConfig(experiment, flags);
    const Meta meta = metaOf(experiment, cfg);
    Outcome o;
    if (experiment == "entropy-scan") o = runEntropyScan(cfg, meta);
    else if (experiment == "purify") o = runPurify(cfg, meta);
    else if (experiment == "decoherence") o = runDecoherence(cfg, meta);
    else if (experiment == "multimode") o = runMultimode(cfg, meta);
    else o = runVerify(cfg, meta);
    writeText(cfg.value("out", std::string()), o.text);
    if (o.dump) writeText(get<std::string>(cfg, "dump"), o.dump->dump(2) + "\n");
    return o.verified ? 0 : kVerifyFailure;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "ecs: config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "ecs: config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ecs: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled coherent state purification simulator"};
  app.set_version_flag("--version", ECS_VERSION);
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"entropy-scan", "Entanglement entropy over an (alpha, phi) grid"},
      {"purify", "Iterated purification rounds"},
      {"decoherence", "Fidelity under vacuum decoherence and the purification threshold"},
      {"multimode", "Purification rounds on the four-mode ensemble"},
      {"verify", "Cross-check the coherent-state engine against the number basis"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON config file");
    sub->add_option("--out", flags.out, "Output path (default stdout)");
    sub->add_option("--seed", flags.seed, "Root seed");
    sub->add_option("--trials", flags.trials, "Monte Carlo trials per round");
    sub->add_flag("--verify", flags.verify, "Run the number-basis cross-checks for this experiment");
    sub->add_flag("--json", flags.json, "JSON instead of CSV");
    sub->add_option("--dump", flags.dump, "Write the resulting states as JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  for (const auto* sub : app.get_subcommands()) return run(sub->get_name(), flags);
  return kConfigError;
}
