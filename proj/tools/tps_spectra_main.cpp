// Command-line front end. Exit codes: 0 pass, 1 fail verdict, 2 ambiguous,
// 3 usage or malformed input, 4 numerical failure.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tps/harness.hpp"
#include "tps/sampling.hpp"

namespace {

using tps::io::json;

enum Exit { ok = 0, fail = 1, ambiguous = 2, usage = 3, numerical = 4 };

struct Global {
  std::uint64_t seed = 0;
  double tol_rank = 1e-8;
  double tol_success = 1e-8;
  std::string out;
  int jobs = 1;
  std::string format = "json";
};

void emit(const Global& g, const json& doc, const json& rows) {
  const std::string text = g.format == "csv" ? tps::io::to_csv(rows) : tps::io::dump(doc);
  if (g.out.empty()) {
    std::cout << text;
  } else {
    tps::io::write_file(g.out, text);
  }
}

int exit_for(tps::ErrorKind k) {
  switch (k) {
    case tps::ErrorKind::invalid_argument:
    case tps::ErrorKind::not_in_class:
    case tps::ErrorKind::dimension: return usage;
    default: return numerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, kernel certificates and dual searches for local qubit Hamiltonians"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--tol-rank", g.tol_rank, "Relative singular-value cut for numerical rank");
  app.add_option("--tol-success", g.tol_success, "Spectral distance counted as a match, relative to scale");
  app.add_option("--out", g.out, "Output file (directory for experiment)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string cls_name = "k_local";
  std::optional<int> k;
  int n = 4;
  auto* gen = app.add_subcommand("gen", "Sample a random operator in a class");
  gen->add_option("--class", cls_name, "Class name")->required();
  gen->add_option("--n", n, "Site count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--k", k, "Locality for k_local");

  std::string file_a, file_b;
  auto* spec = app.add_subcommand("spectrum", "Diagonalize an operator file");
  spec->add_option("file", file_a)->required();

  std::string s_name;
  std::optional<int> s_k;
  auto* cert = app.add_subcommand("cert", "Kernel certificate for finitely many duals");
  cert->add_option("file", file_a)->required();
  cert->add_option("--s-class", s_name, "Subspace S (defaults to the operator's class)");
  cert->add_option("--s-k", s_k, "Locality of S when it is k_local");

  std::string space_name = "ti_chain_gauge_fixed";
  bool complexified = false;
  int starts = 5;
  auto* search = app.add_subcommand("search", "Multistart spectrum-matching dual search");
  search->add_option("file", file_a)->required();
  search->add_option("--space", space_name, "Search class");
  search->add_flag("--complexified", complexified, "Search complex coefficients");
  search->add_option("--starts", starts, "Random starts")->check(CLI::PositiveNumber);

  bool per_site = false, uniform = false;
  int equiv_starts = 20;
  double equiv_tol = 1e-6;
  auto* equiv = app.add_subcommand("equiv", "Decide equivalence of two operator files");
  equiv->add_option("a", file_a)->required();
  equiv->add_option("b", file_b)->required();
  equiv->add_flag("--complexified", complexified, "Use invertible instead of unitary conjugation");
  equiv->add_flag("--per-site", per_site, "Independent conjugation on every site");
  equiv->add_flag("--uniform", uniform, "One conjugation for all sites");
  equiv->add_option("--starts", equiv_starts, "Random group starts per element");
  equiv->add_option("--tol", equiv_tol, "Acceptance residual relative to ||B||");

  std::string config_file;
  auto* exp = app.add_subcommand("experiment", "Run a named experiment from a config file");
  exp->add_option("config", config_file)->required();

  int lemma_n = 3, lemma_k = 2;
  auto* lemma = app.add_subcommand("lemma", "Check that derivations preserving k-locality are 1-local");
  lemma->add_option("--n", lemma_n)->check(CLI::Range(1, 4));
  lemma->add_option("--k", lemma_k)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : usage;
  }

  try {
    if (*gen) {
      const auto cls = tps::build_class(cls_name, n, k);
      const auto op = tps::sample_hamiltonian(cls, g.seed);
      const json doc = tps::io::to_json(op, g.seed);
      emit(g, doc, doc["terms"]);
      return ok;
    }
    if (*spec) {
      const auto op = tps::io::load_operator(file_a);
      const bool herm = op.is_hermitian(1e-12);
      const json doc = tps::io::to_json(tps::spectrum_of(op.dense(), herm));
      emit(g, doc, doc["values"]);
      return ok;
    }
    if (*cert) {
      const auto op = tps::io::load_operator(file_a);
      const auto s = s_name.empty() ? op.class_ptr() : tps::build_class(s_name, op.n(), s_k);
      tps::CertificateOptions opts;
      opts.rank_rel_tol = g.tol_rank;
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = tps::certify_finite_duals(op, *s, opts);
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
      json doc = tps::io::to_json(rep, g.seed, ms);
      json row = doc;
      row.erase("singular_values");
      emit(g, doc, row);
      if (!g.out.empty()) std::cerr << "dim_ker_M=" << rep.dim_ker_M << " verdict=" << tps::to_string(rep.verdict) << "\n";
      return rep.verdict == tps::Verdict::pass ? ok : rep.verdict == tps::Verdict::fail ? fail : ambiguous;
    }
    if (*search) {
      const auto op = tps::io::load_operator(file_a);
      const tps::SearchSpace space{tps::build_class(space_name, op.n()), complexified};
      tps::SearchOptions opts;
      opts.success_tol = g.tol_success;
      const auto rep = tps::search_duals(op, space, starts, g.seed, opts);
      const json doc = tps::io::to_json(rep);
      json rows = json::array();
      for (auto m : doc["minima"]) {
        m.erase("params");
        m.erase("equivalence");
        rows.push_back(m);
      }
      emit(g, doc, rows);
      if (rep.count(tps::Classification::candidate_dual) > 0) return fail;
      return rep.count(tps::Classification::non_converged) > 0 ? ambiguous : ok;
    }
    if (*equiv) {
      const auto a = tps::io::load_operator(file_a);
      const auto b = tps::io::load_operator(file_b);
      auto opts = tps::group_defaults(a.cls(), complexified);
      if (per_site) opts.per_site = true;
      if (uniform) opts.per_site = false;
      opts.starts = equiv_starts;
      opts.tol = equiv_tol;
      opts.seed = g.seed;
      const auto v = tps::decide_equivalent(a, b, opts);
      const json doc = tps::io::to_json(v);
      emit(g, doc, doc["attempts"]);
      return v.equivalent ? ok : fail;
    }
    if (*exp) {
      auto cfg = tps::config_from_json(tps::io::read_file(config_file), config_file);
      if (!g.out.empty()) cfg.out_dir = g.out;
      if (app.get_option("--seed")->count()) cfg.seed = g.seed;
      if (app.get_option("--tol-rank")->count()) cfg.rank_rel_tol = g.tol_rank;
      if (app.get_option("--tol-success")->count()) cfg.success_tol = g.tol_success;
      const auto result = tps::run_experiment(cfg, g.jobs);
      if (!cfg.out_dir.empty()) tps::write_experiment(result, cfg.out_dir);
      if (g.format == "csv") {
        json rows = json::array();
        for (const auto& t : tps::trials_json(result)["trials"]) rows.push_back(t);
        std::cout << tps::io::to_csv(rows);
      } else {
        std::cout << tps::io::dump(result.summary);
      }
      return result.passed ? ok : fail;
    }
    if (*lemma) {
      if (lemma_k > lemma_n) throw tps::Error(tps::ErrorKind::invalid_argument, "lemma needs k <= n");
      const auto r = tps::verify_locality_lemma(lemma_n, lemma_k, g.tol_rank);
      const json doc{{"n", r.n}, {"k", r.k}, {"dim_found", r.dim_found}, {"dim_expected", r.dim_expected}, {"vacuous", r.vacuous}};
      emit(g, doc, doc);
      return r.dim_found == r.dim_expected ? ok : fail;
    }
  } catch (const tps::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical;
  }
  return usage;
}
