// Model file formats: the sft text format, JSON forms for subshifts,
// horseshoes, center systems, cocycles, hyperbolic sequences, pseudo-orbits
// and graphs, and the run-length encoded grid-set files.
#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "smale/blender.hpp"
#include "smale/center_ifs.hpp"
#include "smale/cocycle.hpp"
#include "smale/horseshoe.hpp"
#include "smale/shadowing.hpp"
#include "smale/subshift.hpp"

namespace smale {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("ParseError", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("ParseError", "cannot write " + path);
  out << content;
}

// --- subshifts -------------------------------------------------------------

// Text format: first line "sft <alphabet_size>", then one 0/1 row per line
// (with or without spaces between entries).
inline SubshiftOfFiniteType parse_sft_text(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "sft" || n <= 0)
    throw Error("ParseError", "expected header 'sft <alphabet_size>'");
  std::vector<std::uint8_t> t;
  t.reserve(n * n);
  std::string line;
  std::getline(in, line);
  for (int row = 0; row < n; ++row) {
    if (!std::getline(in, line)) throw Error("ParseError", "missing transition row");
    int got = 0;
    for (char c : line) {
      if (c == '0' || c == '1') {
        t.push_back(c - '0');
        ++got;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        throw Error("ParseError", std::string("unexpected character '") + c + "'");
      }
    }
    if (got != n) throw Error("ParseError", "row has wrong length");
  }
  return SubshiftOfFiniteType(n, std::move(t));
}

inline std::string sft_to_text(const SubshiftOfFiniteType& sft) {
  std::ostringstream out;
  out << "sft " << sft.alphabet_size() << "\n";
  for (int i = 0; i < sft.alphabet_size(); ++i) {
    for (int j = 0; j < sft.alphabet_size(); ++j) out << (sft.allowed(i, j) ? '1' : '0');
    out << "\n";
  }
  return out.str();
}

inline Json sft_to_json(const SubshiftOfFiniteType& sft) {
  Json rows = Json::array();
  for (int i = 0; i < sft.alphabet_size(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < sft.alphabet_size(); ++j) row.push_back(sft.allowed(i, j) ? 1 : 0);
    rows.push_back(row);
  }
  return Json{{"alphabet_size", sft.alphabet_size()}, {"transitions", rows}};
}

inline SubshiftOfFiniteType sft_from_json(const Json& j) {
  int n = j.at("alphabet_size").get<int>();
  std::vector<std::uint8_t> t;
  for (const auto& row : j.at("transitions"))
    for (const auto& v : row) t.push_back(v.get<int>() ? 1 : 0);
  return SubshiftOfFiniteType(n, std::move(t));
}

// Dispatch on content: leading '{' means JSON, otherwise the text format.
inline SubshiftOfFiniteType load_sft(const std::string& path) {
  std::string text = read_file(path);
  size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') return sft_from_json(Json::parse(text));
  return parse_sft_text(text);
}

// --- horseshoes ------------------------------------------------------------

inline Json horseshoe_to_json(const StandardAffineHorseshoe& h) {
  Json branches = Json::array();
  for (int j = 0; j < h.branch_count(); ++j) {
    Json v = Json::array();
    for (int i = 0; i < h.d(); ++i) v.push_back(h.translation(j)[i]);
    branches.push_back(Json{{"v", v}});
  }
  Json diag = Json::array();
  for (int i = 0; i < h.d(); ++i) diag.push_back(h.diag_entry(i));
  return Json{{"d_uu", h.d_uu()}, {"d_c", h.d_c()},       {"d_s", h.d_s()},
              {"diag", diag},     {"branches", branches}};
}

inline StandardAffineHorseshoe horseshoe_from_json(const Json& j) {
  int d_uu = j.at("d_uu").get<int>();
  int d_c = j.at("d_c").get<int>();
  int d_s = j.at("d_s").get<int>();
  auto diag_list = j.at("diag");
  Vec diag(diag_list.size());
  for (size_t i = 0; i < diag_list.size(); ++i) diag[i] = diag_list[i].get<double>();
  std::vector<Vec> branches;
  for (const auto& b : j.at("branches")) {
    auto vl = b.at("v");
    Vec v(vl.size());
    for (size_t i = 0; i < vl.size(); ++i) v[i] = vl[i].get<double>();
    branches.push_back(v);
  }
  bool simple = j.value("simple_spectrum", false);
  return StandardAffineHorseshoe(d_uu, d_c, d_s, diag, branches, simple);
}

inline StandardAffineHorseshoe load_horseshoe(const std::string& path) {
  return horseshoe_from_json(Json::parse(read_file(path)));
}

// --- center systems ----------------------------------------------------------

inline Json center_ifs_to_json(const CenterIfs& ifs) {
  Json rates = Json::array();
  for (int i = 0; i < ifs.dim(); ++i) rates.push_back(ifs.rates[i]);
  Json tr = Json::array();
  for (const auto& t : ifs.translations) {
    Json v = Json::array();
    for (int i = 0; i < ifs.dim(); ++i) v.push_back(t[i]);
    tr.push_back(v);
  }
  return Json{{"rates", rates}, {"translations", tr}};
}

inline CenterIfs center_ifs_from_json(const Json& j) {
  CenterIfs ifs;
  auto rates = j.at("rates");
  ifs.rates = Vec(rates.size());
  for (size_t i = 0; i < rates.size(); ++i) ifs.rates[i] = rates[i].get<double>();
  for (const auto& t : j.at("translations")) {
    Vec v(t.size());
    for (size_t i = 0; i < t.size(); ++i) v[i] = t[i].get<double>();
    ifs.translations.push_back(v);
  }
  return ifs;
}

inline CenterIfs load_center_ifs(const std::string& path) {
  Json j = Json::parse(read_file(path));
  if (j.contains("rates")) return center_ifs_from_json(j);
  return extract_center_ifs(horseshoe_from_json(j));
}

// --- grid sets ---------------------------------------------------------------

// Text format: "gridset <dim> <cells_per_axis>", one "domain lo hi" line per
// axis, then run-length encoded occupied runs "start:length" per line.
inline std::string gridset_to_text(const GridSet& g) {
  std::ostringstream out;
  out << "gridset " << g.dim() << " " << g.cells_per_axis() << "\n";
  out.precision(17);
  for (int i = 0; i < g.dim(); ++i)
    out << "domain " << g.domain().axes[i].lo << " " << g.domain().axes[i].hi << "\n";
  long start = -1;
  for (long idx = 0; idx <= g.total_cells(); ++idx) {
    bool on = idx < g.total_cells() && g.occupied(idx);
    if (on && start < 0) start = idx;
    if (!on && start >= 0) {
      out << start << ":" << (idx - start) << "\n";
      start = -1;
    }
  }
  return out.str();
}

inline GridSet gridset_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int dim = 0;
  long cells = 0;
  if (!(in >> tag >> dim >> cells) || tag != "gridset")
    throw Error("ParseError", "expected header 'gridset <dim> <cells>'");
  Box domain(dim);
  for (int i = 0; i < dim; ++i) {
    double lo, hi;
    if (!(in >> tag >> lo >> hi) || tag != "domain")
      throw Error("ParseError", "expected 'domain lo hi'");
    domain.axes[i] = {lo, hi};
  }
  GridSet g(dim, cells, domain);
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    long start = std::stol(line.substr(0, colon));
    long len = std::stol(line.substr(colon + 1));
    for (long k = 0; k < len; ++k) g.set(start + k, true);
  }
  return g;
}

// --- cocycles ----------------------------------------------------------------

inline LocallyConstantCocycle cocycle_from_json(const Json& j) {
  SubshiftOfFiniteType base = j.at("base").is_string()
                                  ? load_sft(j.at("base").get<std::string>())
                                  : sft_from_json(j.at("base"));
  int l = j.at("window")[0].get<int>();
  int r = j.at("window")[1].get<int>();
  int dim = j.at("dim").get<int>();
  LocallyConstantCocycle coc(base, l, r, dim);
  for (const auto& entry : j.at("values")) {
    Word w;
    for (const auto& s : entry.at("word")) w.push_back(s.get<int>());
    Mat m(dim, dim);
    auto flat = entry.at("matrix");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) m(a, b) = flat[a * dim + b].get<double>();
    coc.set_value(w, m);
  }
  return coc;
}

inline LocallyConstantCocycle load_cocycle(const std::string& path) {
  return cocycle_from_json(Json::parse(read_file(path)));
}

// --- hyperbolic sequences and pseudo-orbits ----------------------------------

inline HyperbolicSequence sequence_from_json(const Json& j) {
  int n0 = j.at("n0").get<int>();
  int n1 = j.at("n1").get<int>();
  int du = j.at("d_u").get<int>();
  int ds = j.at("d_s").get<int>();
  HyperbolicSequence seq(n0, n1, du, ds);
  int n = n0;
  for (const auto& step : j.at("steps")) {
    Mat lu(du, du), ls(ds, ds);
    auto lu_flat = step.at("lu");
    for (int a = 0; a < du; ++a)
      for (int b = 0; b < du; ++b) lu(a, b) = lu_flat[a * du + b].get<double>();
    auto ls_flat = step.at("ls");
    for (int a = 0; a < ds; ++a)
      for (int b = 0; b < ds; ++b) ls(a, b) = ls_flat[a * ds + b].get<double>();
    Vec b(du + ds);
    auto bl = step.at("b");
    for (int i = 0; i < du + ds; ++i) b[i] = bl[i].get<double>();
    seq.set_step(n, lu, ls, b);
    ++n;
  }
  if (n != n1) throw Error("ParseError", "step count does not match the window");
  if (j.contains("remainder")) {
    const auto& rem = j.at("remainder");
    if (rem.at("type").get<std::string>() != "quadratic")
      throw Error("ParseError", "only quadratic remainders are supported in files");
    double coeff = rem.at("coeff").get<double>();
    double size = rem.at("c1_size").get<double>();
    seq.set_remainder(
        [coeff](int, const Vec& x) {
          Vec r = Vec::Zero(x.size());
          for (int i = 0; i < x.size(); ++i) r[i] = coeff * x[i] * x[i];
          return r;
        },
        size);
  }
  return seq;
}

inline PseudoOrbit pseudo_orbit_from_json(const Json& j) {
  PseudoOrbit po;
  po.n0 = j.at("n0").get<int>();
  for (const auto& p : j.at("points")) {
    Vec x(p.size());
    for (size_t i = 0; i < p.size(); ++i) x[i] = p[i].get<double>();
    po.points.push_back(x);
  }
  return po;
}

// --- graphs ------------------------------------------------------------------

inline Json graph_to_json(const LipschitzGraph& g) {
  Json values = Json::array();
  for (const auto& v : g.raw_values()) {
    Json row = Json::array();
    for (int i = 0; i < g.d_val(); ++i) row.push_back(v[i]);
    values.push_back(row);
  }
  return Json{{"d_dom", g.d_dom()},
              {"d_val", g.d_val()},
              {"nodes_per_axis", g.nodes_per_axis()},
              {"values", values}};
}

inline LipschitzGraph graph_from_json(const Json& j) {
  LipschitzGraph g(j.at("d_dom").get<int>(), j.at("d_val").get<int>(),
                   j.at("nodes_per_axis").get<long>());
  auto& vals = g.raw_values();
  auto list = j.at("values");
  if (list.size() != vals.size()) throw Error("ParseError", "graph node count mismatch");
  for (size_t k = 0; k < vals.size(); ++k) {
    Vec v(g.d_val());
    for (int i = 0; i < g.d_val(); ++i) v[i] = list[k][i].get<double>();
    vals[k] = v;
  }
  return g;
}

}  // namespace smale
