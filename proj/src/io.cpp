#include "tps/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tps::io {

namespace {

// 1-based line of byte offset `pos` in text.
int line_at(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Line of the nth (0-based) occurrence of `needle`, or 1 when absent.
int line_of(const std::string& text, const std::string& needle, std::size_t nth = 0) {
  std::size_t pos = 0;
  for (std::size_t k = 0;; ++k) {
    pos = text.find(needle, pos);
    if (pos == std::string::npos) return 1;
    if (k == nth) return line_at(text, pos);
    pos += needle.size();
  }
}

[[noreturn]] void fail(ErrorKind kind, const std::string& source, int line, const std::string& msg) {
  throw Error(kind, source + ":" + std::to_string(line) + ": " + msg);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

PauliString letters_of(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw Error(ErrorKind::invalid_argument, "letters must be an array of " + std::to_string(n) + " integers");
  std::vector<std::uint8_t> l;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 3)
      throw Error(ErrorKind::invalid_argument, "letters must be integers in 0..3");
    l.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return PauliString(std::move(l));
}

json letters_json(const PauliString& p) {
  json a = json::array();
  for (auto c : p.letters()) a.push_back(static_cast<int>(c));
  return a;
}

json matrix2_json(const Matrix2c& g) {
  json rows = json::array();
  for (int r = 0; r < 2; ++r) rows.push_back(json::array({complex_json(g(r, 0)), complex_json(g(r, 1))}));
  return rows;
}

}  // namespace

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json class_json(const LocalityClass& cls) {
  json j{{"name", cls.name()}};
  if (cls.kind() == ClassKind::k_local) j["k"] = cls.k();
  if (cls.kind() == ClassKind::custom) {
    json basis = json::array();
    for (const auto& b : cls.basis()) basis.push_back(letters_json(b.terms().begin()->first));
    j["basis"] = basis;
  }
  return j;
}

ClassPtr class_from_json(const json& j, int n) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw Error(ErrorKind::invalid_argument, "class must be an object with a string name");
  const ClassKind kind = parse_class_kind(j["name"].get<std::string>());
  if (kind == ClassKind::custom) {
    if (!j.contains("basis") || !j["basis"].is_array())
      throw Error(ErrorKind::invalid_argument, "custom class needs a basis array");
    std::vector<PauliString> strings;
    for (const auto& b : j["basis"]) strings.push_back(letters_of(b, n));
    return LocalityClass::custom(n, std::move(strings));
  }
  std::optional<int> k;
  if (j.contains("k")) {
    if (!j["k"].is_number_integer()) throw Error(ErrorKind::invalid_argument, "class k must be an integer");
    k = j["k"].get<int>();
  }
  return build_class(kind, n, k);
}

json to_json(const OperatorExpr& op, std::optional<std::uint64_t> seed) {
  PauliSum sum = op.to_pauli_sum();
  std::vector<std::pair<PauliString, Complex>> terms(sum.terms().begin(), sum.terms().end());
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  json jt = json::array();
  for (const auto& [p, c] : terms) jt.push_back({{"letters", letters_json(p)}, {"re", c.real()}, {"im", c.imag()}});
  json meta = json::object();
  if (seed) meta["seed"] = *seed;
  return json{{"format", kOperatorFormat}, {"n", op.n()}, {"d", 2}, {"class", class_json(op.cls())},
              {"terms", jt}, {"meta", meta}};
}

json to_json(const Spectrum& s) {
  json vals = json::array();
  for (const auto& v : s.values()) vals.push_back(complex_json(v));
  return json{{"format", kSpectrumFormat}, {"n_dim", s.size()}, {"hermitian", s.hermitian()}, {"values", vals}};
}

json to_json(const CertificateReport& r, std::uint64_t seed, long long elapsed_ms) {
  json j{{"format", kCertFormat},
         {"class", r.class_name},
         {"n", r.n},
         {"s", r.s},
         {"N", r.N},
         {"dim_ker_M", r.dim_ker_M},
         {"dim_g", r.dim_g},
         {"expected", r.expected},
         {"gap_ratio", number_or_null(r.gap_ratio)},
         {"spectrum_nondegenerate", r.spectrum_nondegenerate},
         {"min_level_gap", r.min_level_gap},
         {"commutant_1local_dim", r.commutant_1local_dim},
         {"verdict", to_string(r.verdict)},
         {"diagnostic", r.diagnostic},
         {"singular_values", r.singular_values},
         {"seed", seed}};
  if (elapsed_ms >= 0) j["elapsed_ms"] = elapsed_ms;
  return j;
}

json to_json(const SymmetryElement& e) {
  json conj = json::array();
  for (const auto& g : e.conjugation) conj.push_back(matrix2_json(g));
  return json{{"shift", e.shift}, {"reflect", e.reflect}, {"transpose", e.transpose}, {"conjugation", conj}};
}

json to_json(const EquivalenceVerdict& v) {
  json attempts = json::array();
  for (const auto& a : v.attempts) attempts.push_back({{"element", a.element}, {"best_residual", number_or_null(a.best_residual)}});
  json j{{"format", kEquivFormat}, {"verdict", to_string(v)}, {"residual", number_or_null(v.residual)}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  j["attempts"] = attempts;
  return j;
}

json to_json(const ProbeReport& p) {
  json j = to_json(p.verdict);
  j["spectral_distance"] = p.spectral_distance;
  j["probable_dual"] = p.probable_dual;
  return j;
}

json to_json(const SearchReport& r) {
  json minima = json::array();
  for (const auto& m : r.minima) {
    json params = json::array();
    for (Eigen::Index k = 0; k < m.params.size(); ++k) params.push_back(complex_json(m.params(k)));
    json jm{{"start", m.start},
            {"params", params},
            {"distance", number_or_null(m.distance)},
            {"classification", to_string(m.classification)},
            {"iters", m.iterations},
            {"stop_reason", m.stop_reason}};
    if (m.equivalence) jm["equivalence"] = to_json(*m.equivalence);
    minima.push_back(jm);
  }
  json agg{{"converged", r.converged(1e-6)},
           {"trivial_equivalent", r.count(Classification::trivial_equivalent)},
           {"candidate_dual", r.count(Classification::candidate_dual)},
           {"non_converged", r.count(Classification::non_converged)}};
  return json{{"format", kSearchFormat}, {"space", r.space},     {"target_digest", r.target_digest},
              {"seed", r.seed},          {"starts", r.starts},   {"scale", r.scale},
              {"minima", minima},        {"aggregate", agg}};
}

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_at(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(ErrorKind::invalid_argument, source, line, std::string("malformed JSON: ") + e.what());
  }
}

OperatorExpr operator_from_json(const std::string& text, const std::string& source) {
  const json j = parse(text, source);
  if (!j.is_object()) fail(ErrorKind::invalid_argument, source, 1, "operator file must hold a JSON object");
  auto field_line = [&](const char* key) { return line_of(text, std::string("\"") + key + "\""); };
  if (!j.contains("format") || j["format"] != kOperatorFormat)
    fail(ErrorKind::invalid_argument, source, field_line("format"), std::string("expected format ") + kOperatorFormat);
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1)
    fail(ErrorKind::invalid_argument, source, field_line("n"), "n must be a positive integer");
  const int n = j["n"].get<int>();
  if (j.contains("d") && j["d"] != 2) fail(ErrorKind::invalid_argument, source, field_line("d"), "only d = 2 is supported");
  if (!j.contains("class")) fail(ErrorKind::invalid_argument, source, 1, "missing class");
  ClassPtr cls;
  try {
    cls = class_from_json(j["class"], n);
  } catch (const Error& e) {
    fail(ErrorKind::invalid_argument, source, field_line("class"), e.what());
  }
  if (!j.contains("terms") || !j["terms"].is_array())
    fail(ErrorKind::invalid_argument, source, field_line("terms"), "terms must be an array");

  PauliSum sum(n);
  const auto& terms = j["terms"];
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const int line = line_of(text, "\"letters\"", t);
    const auto& term = terms[t];
    if (!term.is_object() || !term.contains("letters"))
      fail(ErrorKind::invalid_argument, source, line, "term " + std::to_string(t) + " needs letters");
    PauliString p;
    try {
      p = letters_of(term["letters"], n);
    } catch (const Error& e) {
      fail(ErrorKind::invalid_argument, source, line, "term " + std::to_string(t) + ": " + e.what());
    }
    const auto num = [&](const char* key) {
      if (!term.contains(key)) return 0.0;
      if (!term[key].is_number())
        fail(ErrorKind::invalid_argument, source, line, "term " + std::to_string(t) + ": " + key + " must be a number");
      return term[key].get<double>();
    };
    if (cls->string_based() && !cls->index_of(p))
      fail(ErrorKind::not_in_class, source, line, "term " + p.to_string() + " is not in class " + cls->name());
    sum.add(p, Complex(num("re"), num("im")));
  }
  try {
    return OperatorExpr::from_pauli_sum(cls, sum);
  } catch (const Error& e) {
    fail(e.kind(), source, field_line("terms"), e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_argument, path + ":0: cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OperatorExpr load_operator(const std::string& path) { return operator_from_json(read_file(path), path); }

void write_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorKind::invalid_argument, "write failed for " + path);
  }
  fs::rename(tmp, target);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const json& v = it.value();
    if (v.is_object()) {
      flatten(v, key, out);
    } else if (v.is_string()) {
      out.emplace_back(key, v.get<std::string>());
    } else if (v.is_primitive()) {
      out.emplace_back(key, v.is_null() ? "" : v.dump());
    }
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string to_csv(const json& records) {
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  std::vector<std::string> header;
  const json list = records.is_array() ? records : json::array({records});
  for (const auto& r : list) {
    rows.emplace_back();
    if (r.is_object()) flatten(r, "", rows.back());
    for (const auto& [k, v] : rows.back())
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + csv_field(header[c]);
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::string cell;
      for (const auto& [k, v] : row)
        if (k == header[c]) cell = v;
      out += (c ? "," : "") + csv_field(cell);
    }
    out += "\n";
  }
  return out;
}

}  // namespace tps::io
