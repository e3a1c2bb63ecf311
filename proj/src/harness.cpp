#include "tps/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <mutex>

#include "tps/parallel.hpp"
#include "tps/sampling.hpp"

namespace tps {

namespace {

using io::json;

constexpr const char* kConfigFormat = "tps-spectra/experiment.v1";
constexpr const char* kSummaryFormat = "tps-spectra/summary.v1";
constexpr const char* kTrialsFormat = "tps-spectra/trials.v1";
constexpr const char* kTimingFormat = "tps-spectra/timing.v1";

json params_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(io::complex_json(v(k)));
  return a;
}

struct TrialOutcome {
  std::string digest;
  bool passed = false;
  json report;
};

TrialOutcome certificate_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  const OperatorExpr h0 = sample_hamiltonian(cfg.h0_class.build(cfg.n), seed);
  CertificateOptions opts;
  opts.rank_rel_tol = cfg.rank_rel_tol;
  const CertificateReport rep = certify_finite_duals(h0, *cfg.s_class.build(cfg.n), opts);
  return {operator_digest(h0), rep.verdict == Verdict::pass, io::to_json(rep, seed)};
}

TrialOutcome statement3_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  const OperatorExpr h0 = sample_hamiltonian(cfg.h0_class.build(cfg.n), derive_seed(seed, 0));
  const SearchSpace space{cfg.s_class.build(cfg.n), cfg.complexified};
  const std::uint64_t search_seed = derive_seed(seed, 1);
  SearchOptions opts;
  opts.success_tol = cfg.success_tol;
  GroupOptions g = group_defaults(*space.cls, space.complexified);
  g.tol = cfg.equiv_tol;
  g.seed = derive_seed(search_seed, 0xE0u);
  opts.group = g;
  const SearchReport rep = search_duals(h0, space, cfg.starts, search_seed, opts);
  return {operator_digest(h0), rep.count(Classification::candidate_dual) == 0, io::to_json(rep)};
}

// One start of the rediscovery search. Converged minima are moved to a sparse
// representative of their isospectral family and compared with the Ising
// chain and with its Kramers-Wannier dual.
TrialOutcome ising_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  const ClassPtr cls = cfg.s_class.build(cfg.n);
  const OperatorExpr ising = build_ising(cfg.n, cfg.J, cfg.h);
  const OperatorExpr dual = OperatorExpr::from_pauli_sum(cls, build_ising_dual(cfg.n, cfg.J, cfg.h).to_pauli_sum());
  const Spectrum target = spectrum_of(ising.dense(), true);
  const SearchSpace space{cls, false};
  SearchOptions opts;
  opts.success_tol = cfg.success_tol;

  const CVector x0 = random_start(space, ising.frobenius_norm(), seed);
  const DescentResult d = descend(x0, target, space, opts);
  json rep{{"distance", d.value}, {"iters", d.iterations}, {"stop_reason", d.stop_reason}};
  const bool converged = d.value < opts.classify_tol * target.scale();
  rep["converged"] = converged;
  if (!converged) return {operator_digest(ising), true, rep};

  const CVector minimum = space.to_complex(d.x);
  const CVector sparse = sparsify(minimum, target, space, opts);
  const OperatorExpr found = space.to_expr(sparse);
  rep["params"] = params_json(minimum);
  rep["sparse_params"] = params_json(sparse);
  rep["sparse_distance"] = spectral_distance(spectrum_of(found.dense(), true), target);

  GroupOptions g = group_defaults(*cls);
  g.tol = cfg.equiv_tol;
  g.seed = derive_seed(seed, 0xE0u);
  const EquivalenceVerdict to_ising = decide_equivalent(found, ising, g);
  rep["equivalent_to_ising"] = to_ising.equivalent;
  rep["ising_residual"] = to_ising.residual;
  bool dual_match = false;
  if (!to_ising.equivalent) {
    const EquivalenceVerdict to_dual = decide_equivalent(found, dual, g);
    dual_match = to_dual.equivalent;
    rep["equivalent_to_dual"] = dual_match;
    rep["dual_residual"] = to_dual.residual;
    if (dual_match) {
      rep["dual_witness"] = io::to_json(*to_dual.witness);
      GroupOptions p = probe_defaults(false);
      p.per_site = g.per_site;
      p.tol = cfg.equiv_tol;
      p.seed = g.seed;
      rep["probe"] = io::to_json(isospectral_inequivalence_probe(found, ising, p));
    }
  }
  return {operator_digest(ising), true, rep};
}

TrialOutcome lemma_trial(int n, int k, double rel_tol) {
  const LemmaResult r = verify_locality_lemma(n, k, rel_tol);
  json rep{{"n", r.n}, {"k", r.k}, {"dim_found", r.dim_found}, {"dim_expected", r.dim_expected}, {"vacuous", r.vacuous}};
  return {"lemma:" + std::to_string(n) + "," + std::to_string(k), r.dim_found == r.dim_expected, rep};
}

std::vector<std::pair<int, int>> lemma_pairs(int max_n) {
  std::vector<std::pair<int, int>> out;
  for (int n = 2; n <= max_n; ++n)
    for (int k = 1; k <= n; ++k) out.emplace_back(n, k);
  return out;
}

json summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& trials, bool& passed) {
  int ok = 0, errors = 0;
  for (const auto& t : trials) {
    ok += t.passed;
    errors += t.error.has_value();
  }
  json s{{"format", kSummaryFormat}, {"experiment", to_string(cfg.experiment)}, {"config", to_json(cfg)},
         {"trials", trials.size()},  {"trials_passed", ok},                     {"trial_errors", errors}};
  passed = errors == 0 && ok == static_cast<int>(trials.size());

  switch (cfg.experiment) {
    case ExperimentKind::statement1:
    case ExperimentKind::statement2:
    case ExperimentKind::custom: {
      json dims = json::array();
      int fail = 0, ambiguous = 0;
      for (const auto& t : trials) {
        if (t.error) continue;
        dims.push_back(t.report["dim_ker_M"]);
        fail += t.report["verdict"] == "fail";
        ambiguous += t.report["verdict"] == "ambiguous";
      }
      s["certificates_passed"] = ok;
      s["certificates_failed"] = fail;
      s["certificates_ambiguous"] = ambiguous;
      s["dim_ker_M"] = dims;
      break;
    }
    case ExperimentKind::statement3: {
      int starts = 0, converged = 0, trivial = 0, candidate = 0, non_conv = 0;
      for (const auto& t : trials) {
        if (t.error) continue;
        const auto& a = t.report["aggregate"];
        starts += t.report["starts"].get<int>();
        converged += a["converged"].get<int>();
        trivial += a["trivial_equivalent"].get<int>();
        candidate += a["candidate_dual"].get<int>();
        non_conv += a["non_converged"].get<int>();
      }
      s["starts"] = starts;
      s["converged"] = converged;
      s["convergence_fraction"] = starts ? static_cast<double>(converged) / starts : 0.0;
      s["trivial_equivalent"] = trivial;
      s["candidate_dual"] = candidate;
      s["non_converged"] = non_conv;
      s["trivial_fraction_of_converged"] = converged ? static_cast<double>(trivial) / converged : 0.0;
      break;
    }
    case ExperimentKind::ising_dual: {
      int converged = 0, ising = 0, dual = 0, probable = 0, other = 0;
      json ising_starts = json::array(), dual_starts = json::array();
      for (const auto& t : trials) {
        if (t.error || !t.report.value("converged", false)) continue;
        ++converged;
        if (t.report.value("equivalent_to_ising", false)) {
          ++ising;
          ising_starts.push_back(t.index);
        } else if (t.report.value("equivalent_to_dual", false)) {
          ++dual;
          dual_starts.push_back(t.index);
          if (t.report.contains("probe") && t.report["probe"].value("probable_dual", false)) ++probable;
        } else {
          ++other;
        }
      }
      s["converged"] = converged;
      s["ising_matches"] = ising;
      s["dual_matches"] = dual;
      s["dual_matches_probable_dual"] = probable;
      s["other_isospectral"] = other;
      s["ising_starts"] = ising_starts;
      s["dual_starts"] = dual_starts;
      passed = errors == 0 && ising > 0 && probable > 0;
      break;
    }
    case ExperimentKind::lemma_check:
      break;
  }
  s["passed"] = passed;
  return s;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::statement1: return "statement1";
    case ExperimentKind::statement2: return "statement2";
    case ExperimentKind::statement3: return "statement3";
    case ExperimentKind::ising_dual: return "ising_dual";
    case ExperimentKind::lemma_check: return "lemma_check";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::statement1, ExperimentKind::statement2, ExperimentKind::statement3,
                 ExperimentKind::ising_dual, ExperimentKind::lemma_check, ExperimentKind::custom})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::invalid_argument, "unknown experiment '" + name + "'");
}

ClassPtr ClassSpec::build(int n) const { return build_class(name, n, k); }

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::statement1:
    case ExperimentKind::custom:
      break;
    case ExperimentKind::statement2:
      c.h0_class = {"nn_chain_open", std::nullopt};
      break;
    case ExperimentKind::statement3:
      c.n = 6;
      c.trials = 50;
      c.starts = 5;
      c.h0_class = {"ti_chain_periodic", std::nullopt};
      c.s_class = {"ti_chain_gauge_fixed", std::nullopt};
      break;
    case ExperimentKind::ising_dual:
      c.n = 6;
      c.trials = 1;
      c.starts = 200;
      c.h0_class = {"boundary_class", std::nullopt};
      c.s_class = {"boundary_class", std::nullopt};
      break;
    case ExperimentKind::lemma_check:
      c.n = 3;
      c.trials = 0;
      break;
  }
  return c;
}

io::json to_json(const ExperimentConfig& cfg) {
  auto cls = [](const ClassSpec& s) {
    json j{{"name", s.name}};
    if (s.k) j["k"] = *s.k;
    return j;
  };
  return json{{"format", kConfigFormat},
              {"experiment", to_string(cfg.experiment)},
              {"n", cfg.n},
              {"h0_class", cls(cfg.h0_class)},
              {"s_class", cls(cfg.s_class)},
              {"trials", cfg.trials},
              {"starts", cfg.starts},
              {"seed", cfg.seed},
              {"tolerances", {{"rank_rel_tol", cfg.rank_rel_tol}, {"success_tol", cfg.success_tol}, {"equiv_tol", cfg.equiv_tol}}},
              {"complexified", cfg.complexified},
              {"J", cfg.J},
              {"h", cfg.h}};
}

ExperimentConfig config_from_json(const std::string& text, const std::string& source) {
  const json j = io::parse(text, source);
  auto line = [&](const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 1 : 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  };
  auto bad = [&](const std::string& key, const std::string& msg) {
    throw Error(ErrorKind::invalid_argument, source + ":" + std::to_string(line(key)) + ": " + msg);
  };
  if (!j.is_object()) bad("", "config must be a JSON object");
  if (j.contains("format") && j["format"] != kConfigFormat) bad("format", std::string("expected format ") + kConfigFormat);
  if (!j.contains("experiment") || !j["experiment"].is_string()) bad("experiment", "missing experiment name");
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::defaults(parse_experiment_kind(j["experiment"].get<std::string>()));
  } catch (const Error& e) {
    bad("experiment", e.what());
  }
  auto get_int = [&](const char* key, int& out, int min) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<long long>() < min)
      bad(key, std::string(key) + " must be an integer >= " + std::to_string(min));
    out = j[key].get<int>();
  };
  auto get_double = [&](const json& obj, const char* key, double& out) {
    if (!obj.contains(key)) return;
    if (!obj[key].is_number()) bad(key, std::string(key) + " must be a number");
    out = obj[key].get<double>();
  };
  auto get_class = [&](const char* key, ClassSpec& out) {
    if (!j.contains(key)) return;
    const auto& c = j[key];
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) bad(key, std::string(key) + " needs a name");
    out.name = c["name"].get<std::string>();
    out.k.reset();
    if (c.contains("k")) {
      if (!c["k"].is_number_integer()) bad(key, "class k must be an integer");
      out.k = c["k"].get<int>();
    }
    try {
      parse_class_kind(out.name);
    } catch (const Error& e) {
      bad(key, e.what());
    }
  };
  get_int("n", cfg.n, 1);
  get_int("trials", cfg.trials, 0);
  get_int("starts", cfg.starts, 1);
  get_class("h0_class", cfg.h0_class);
  get_class("s_class", cfg.s_class);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      bad("seed", "seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) bad("tolerances", "tolerances must be an object");
    get_double(t, "rank_rel_tol", cfg.rank_rel_tol);
    get_double(t, "success_tol", cfg.success_tol);
    get_double(t, "equiv_tol", cfg.equiv_tol);
  }
  if (j.contains("complexified")) {
    if (!j["complexified"].is_boolean()) bad("complexified", "complexified must be a boolean");
    cfg.complexified = j["complexified"].get<bool>();
  }
  get_double(j, "J", cfg.J);
  get_double(j, "h", cfg.h);
  if (j.contains("out")) {
    if (!j["out"].is_string()) bad("out", "out must be a string");
    cfg.out_dir = j["out"].get<std::string>();
  }
  return cfg;
}

std::string operator_digest(const OperatorExpr& op) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  mix(op.cls().name() + ":" + std::to_string(op.n()));
  char buf[64];
  for (Eigen::Index k = 0; k < op.coeffs().size(); ++k) {
    std::snprintf(buf, sizeof buf, ";%.17g,%.17g", op.coeffs()(k).real(), op.coeffs()(k).imag());
    mix(buf);
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
  ExperimentResult result;
  result.config = cfg;

  std::size_t count = 0;
  std::vector<std::pair<int, int>> lemma;
  switch (cfg.experiment) {
    case ExperimentKind::ising_dual:
      count = static_cast<std::size_t>(cfg.starts);
      break;
    case ExperimentKind::lemma_check:
      lemma = lemma_pairs(cfg.n);
      count = lemma.size();
      break;
    default:
      count = static_cast<std::size_t>(cfg.trials);
  }
  result.trials.resize(count);

  std::mutex write_mutex;
  parallel_for(count, jobs, [&](std::size_t t) {
    TrialRecord& rec = result.trials[t];
    rec.index = static_cast<int>(t);
    rec.seed = derive_seed(cfg.seed, t);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      TrialOutcome out;
      switch (cfg.experiment) {
        case ExperimentKind::statement1:
        case ExperimentKind::statement2:
        case ExperimentKind::custom: out = certificate_trial(cfg, rec.seed); break;
        case ExperimentKind::statement3: out = statement3_trial(cfg, rec.seed); break;
        case ExperimentKind::ising_dual: out = ising_trial(cfg, rec.seed); break;
        case ExperimentKind::lemma_check: out = lemma_trial(lemma[t].first, lemma[t].second, cfg.rank_rel_tol); break;
      }
      rec.input_digest = out.digest;
      rec.passed = out.passed;
      rec.report = std::move(out.report);
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.passed = false;
      rec.report = json::object();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.out_dir.empty()) {
      json one{{"index", rec.index}, {"seed", rec.seed}, {"input_digest", rec.input_digest},
               {"passed", rec.passed}, {"report", rec.report}};
      if (rec.error) one["error"] = *rec.error;
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.json", t);
      std::lock_guard<std::mutex> lock(write_mutex);
      io::write_file((std::filesystem::path(cfg.out_dir) / "trials" / name).string(), io::dump(one));
    }
  });

  result.summary = summarize(cfg, result.trials, result.passed);
  return result;
}

io::json trials_json(const ExperimentResult& result) {
  json list = json::array();
  for (const auto& r : result.trials) {
    json one{{"index", r.index}, {"seed", r.seed}, {"input_digest", r.input_digest}, {"passed", r.passed}};
    if (r.error) one["error"] = *r.error;
    one["report"] = r.report;
    list.push_back(one);
  }
  return json{{"format", kTrialsFormat}, {"experiment", to_string(result.config.experiment)}, {"trials", list}};
}

void write_experiment(const ExperimentResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  io::write_file((dir / "summary.json").string(), io::dump(result.summary));
  io::write_file((dir / "trials.json").string(), io::dump(trials_json(result)));
  json timing = json::array();
  double total = 0.0;
  for (const auto& r : result.trials) {
    timing.push_back({{"index", r.index}, {"wall_ms", r.wall_ms}});
    total += r.wall_ms;
  }
  io::write_file((dir / "timing.json").string(),
                 io::dump(json{{"format", kTimingFormat}, {"total_trial_ms", total}, {"trials", timing}}));
}

}  // namespace tps
