// Desk-scale return-set machinery on symbolic systems: the dynamical
// metric, separated-set entropy estimates, the return-set selection
// pipeline with independently re-verifiable certificates, horseshoe
// assembly by word concatenation or shadowed orbit segments, and the
// marker-synchronized refinement of a coded system.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smale/common.hpp"
#include "smale/shadowing.hpp"
#include "smale/subshift.hpp"

namespace smale {

// Birkhoff test functions: indicators of central cylinders.
struct CylinderIndicator {
  Word word;  // matched at coordinates t .. t + |word| - 1

  double evaluate(const SymbolicPoint& x, long t) const {
    for (size_t i = 0; i < word.size(); ++i)
      if (x.at(t + static_cast<long>(i)) != word[i]) return 0.0;
    return 1.0;
  }
  double integral(const ParryMeasure& mu) const { return mu.cylinder_measure(word); }
};

struct FiniteMetricSystem {
  SubshiftOfFiniteType sft;
  ParryMeasure mu;
  std::vector<CylinderIndicator> psis;

  static FiniteMetricSystem make(SubshiftOfFiniteType s, std::vector<CylinderIndicator> fs) {
    auto measure = s.parry_measure();
    return FiniteMetricSystem{std::move(s), std::move(measure), std::move(fs)};
  }
};

// d_{f,n}(x, y) = max_{0 <= k < n} d(sigma^k x, sigma^k y). A mismatch at
// coordinate j costs 2^{-dist(j, [0, n-1])}.
inline double dyn_distance(const SymbolicPoint& x, const SymbolicPoint& y, long n) {
  if (n < 1) throw Error("InvalidArgument", "n must be at least 1");
  long a = std::min(x.core_start, y.core_start);
  long b = std::max(x.core_end(), y.core_end());
  long lw = static_cast<long>(x.left_period.size() + y.left_period.size());
  long rw = static_cast<long>(x.right_period.size() + y.right_period.size());
  long lo = std::min(a - lw - 1, -1L);
  long hi = std::max(b + rw + 1, n + 1);
  long best = std::numeric_limits<long>::max();
  for (long j = lo; j <= hi; ++j) {
    if (x.at(j) == y.at(j)) continue;
    long cost = 0;
    if (j < 0) cost = -j;
    if (j > n - 1) cost = j - (n - 1);
    best = std::min(best, cost);
    if (best == 0) break;
  }
  if (best == std::numeric_limits<long>::max()) {
    if (x.same_sequence(y)) return 0.0;
    best = std::min(lw + 1, rw + 1);
  }
  return std::pow(2.0, -static_cast<double>(best));
}

// -------------------------------------------------------------------------
// Entropy estimates from separated sets and covers at dyadic scales.

struct EntropyEstimate {
  long lower_count = 0;  // maximal (n, 2^-j)-separated set in the carrier
  long upper_count = 0;  // greedy cover by radius 2^-(j+1) balls
  double lower_rate = 0.0, upper_rate = 0.0;
};

namespace detail_katok {

// Closable admissible words (the periodic extension is admissible).
inline std::vector<Word> closable_words(const SubshiftOfFiniteType& sft, int len, double cap) {
  auto words = sft.admissible_words(len, std::nullopt, std::nullopt, cap);
  std::vector<Word> out;
  for (auto& w : words)
    if (sft.allowed(w.back(), w.front())) out.push_back(std::move(w));
  return out;
}

}  // namespace detail_katok

// Symbolic counts: distinct admissible words on the coordinate window
// [-j, n+j-1] are pairwise (n, 2^-j)-separated, and balls of radius
// 2^-(j+1) are exactly the cylinders on that window.
inline EntropyEstimate entropy_estimate(const FiniteMetricSystem& sys, int n, int j, double beta,
                                        double cap = 2e6) {
  if (n < 1 || j < 1) throw Error("InvalidArgument", "need n >= 1 and j >= 1");
  EntropyEstimate est;
  int len = n + 2 * j;
  auto words = sys.sft.admissible_words(len, std::nullopt, std::nullopt, cap);
  // order by cylinder measure, descending (ties stay lexicographic)
  std::vector<std::pair<double, size_t>> order;
  for (size_t i = 0; i < words.size(); ++i)
    order.push_back({-sys.mu.cylinder_measure(words[i]), i});
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& p, const auto& q) { return p.first < q.first; });
  double acc = 0.0;
  long count = 0;
  for (const auto& [negm, i] : order) {
    acc += -negm;
    ++count;
    if (acc >= beta - 1e-15) break;
  }
  est.lower_count = count;   // carrier cylinders, pairwise separated
  est.upper_count = count;   // the same cylinders are the radius-2^-(j+1) balls
  est.lower_rate = std::log(static_cast<double>(est.lower_count)) / n;
  est.upper_rate = std::log(static_cast<double>(est.upper_count)) / n;
  return est;
}

// -------------------------------------------------------------------------
// Return-set selection. Candidates are periodic words of length m; their
// distinctness already provides the (m, 2^-j)-separation, returns at time m
// come from periodicity, and the Birkhoff condition is checked exactly on
// each periodic orbit with an explicit tail bound.

struct ReturnSetParams {
  double delta = 0.2;
  double gamma = 0.3;
  double xi = 0.04;
  int rho_j = 1;        // separation scale 2^-rho_j
  int N0 = 1;
  int ball_half_width = 0;  // ball = central cylinder on [-a, a], eps/2 = 2^-a
  double candidate_cap = 2e6;
  int m_scan = 8;  // how many m values to scan for the mass condition
};

struct ReturnSet {
  int N = 0;
  Word ball_word;  // the central cylinder of the chosen ball
  int rho_j = 1;
  std::vector<Word> points;  // period-N words
  std::map<std::string, double> attrition;
  double xm_mass_proxy = 0.0;
  int m_used = 0;

  SymbolicPoint point(size_t i) const { return SymbolicPoint::periodic(points[i]); }
};

namespace detail_katok {

// sup_{n >= m} |S_n / n - integral| < gamma/2 for the periodic orbit of w,
// checked exactly: beyond n* = ceil(4 m / gamma) the partial averages stay
// within 2m/n of the orbit mean.
inline bool birkhoff_ok(const FiniteMetricSystem& sys, const Word& w, int m, double gamma) {
  auto x = SymbolicPoint::periodic(w);
  long p = static_cast<long>(w.size());
  for (const auto& psi : sys.psis) {
    double integral = psi.integral(sys.mu);
    std::vector<double> vals(p);
    for (long t = 0; t < p; ++t) vals[t] = psi.evaluate(x, 1 + t);
    double cycle = 0.0;
    for (double v : vals) cycle += v;
    double orbit_mean = cycle / p;
    if (std::abs(orbit_mean - integral) >= gamma / 2) return false;
    long n_star = static_cast<long>(std::ceil(4.0 * p / gamma)) + m;
    double sum = 0.0;
    for (long n = 1; n <= n_star; ++n) {
      sum += vals[(n - 1) % p];
      if (n >= m && std::abs(sum / n - integral) >= gamma / 2) return false;
    }
  }
  return true;
}

}  // namespace detail_katok

inline ReturnSet select_return_set(const FiniteMetricSystem& sys, const ReturnSetParams& prm) {
  double h = sys.mu.entropy_rate();
  if (!(prm.xi < prm.delta / (h + 4)))
    throw Error("PreconditionFailed", "xi must be below delta / (h + 4)");

  int a = prm.ball_half_width;
  double t_balls = sys.sft.count_words(2 * a + 1);
  int m_min = std::max(prm.N0,
                       static_cast<int>(std::ceil(std::log(t_balls) / prm.xi)) + 1);

  // Scan m for the empirical mass condition mu(X_m) > 1/2 (reported, not
  // asserted: the quantity is only available through the periodic proxy).
  int m_used = m_min;
  double best_proxy = -1.0;
  std::vector<Word> candidates;
  std::vector<std::uint8_t> in_xm;
  for (int m = m_min; m < m_min + prm.m_scan; ++m) {
    auto words = detail_katok::closable_words(sys.sft, m, prm.candidate_cap);
    std::vector<std::uint8_t> ok(words.size(), 0);
    double proxy = 0.0;
    for (size_t i = 0; i < words.size(); ++i) {
      ok[i] = detail_katok::birkhoff_ok(sys, words[i], m, prm.gamma) ? 1 : 0;
      if (ok[i]) proxy += sys.mu.cylinder_measure(words[i]);
    }
    if (proxy > best_proxy) {
      best_proxy = proxy;
      m_used = m;
      candidates = std::move(words);
      in_xm = std::move(ok);
    }
    if (best_proxy > 0.5) break;
  }

  ReturnSet ret;
  ret.m_used = m_used;
  ret.xm_mass_proxy = best_proxy;
  ret.rho_j = prm.rho_j;
  ret.attrition["candidates"] = static_cast<double>(candidates.size());

  std::vector<size_t> em;  // E_m: the X_m members (distinct words separate)
  for (size_t i = 0; i < candidates.size(); ++i)
    if (in_xm[i]) em.push_back(i);
  ret.attrition["X_m and E_m"] = static_cast<double>(em.size());

  // Return times n in [m, (1+xi) m); periodicity returns at n = m, other n
  // are checked by comparing central blocks.
  int n_hi = static_cast<int>(std::ceil((1.0 + prm.xi) * m_used));
  std::vector<int> n_values;
  for (int n = m_used; n < n_hi; ++n) n_values.push_back(n);
  if (n_values.empty()) n_values.push_back(m_used);

  auto ball_word_of = [&](const Word& w) {
    Word b(2 * a + 1);
    auto x = SymbolicPoint::periodic(w);
    for (int i = -a; i <= a; ++i) b[i + a] = x.at(i);
    return b;
  };
  auto returns_at = [&](const Word& w, int n) {
    auto x = SymbolicPoint::periodic(w);
    for (int i = -a; i <= a; ++i)
      if (x.at(i) != x.at(n + i)) return false;
    return true;
  };

  int best_n = n_values.front();
  long best_vn = -1;
  for (int n : n_values) {
    long v = 0;
    for (size_t i : em)
      if (returns_at(candidates[i], n)) ++v;
    if (v > best_vn) {
      best_vn = v;
      best_n = n;
    }
  }
  ret.N = best_n;
  ret.attrition["V_N"] = static_cast<double>(best_vn);

  std::map<Word, std::vector<size_t>> by_ball;
  for (size_t i : em)
    if (returns_at(candidates[i], best_n)) by_ball[ball_word_of(candidates[i])].push_back(i);
  size_t best_count = 0;
  for (const auto& [bw, members] : by_ball)
    if (members.size() > best_count) {
      best_count = members.size();
      ret.ball_word = bw;
    }
  for (size_t i : by_ball[ret.ball_word]) ret.points.push_back(candidates[i]);
  ret.attrition["Y"] = static_cast<double>(ret.points.size());

  double required = std::exp(best_n * (h - prm.delta));
  if (!(static_cast<double>(ret.points.size()) > required)) {
    std::string msg = "return set of size " + std::to_string(ret.points.size()) +
                      " below exp(N (h - delta)) = " + std::to_string(required);
    for (const auto& [k, v] : ret.attrition) msg += "; " + k + "=" + std::to_string(v);
    throw Error("CardinalityShortfall", msg);
  }
  return ret;
}

// Independent re-verification of the three return-set certificates.
struct ReturnSetVerification {
  bool separation = true;
  bool returns = true;
  bool birkhoff = true;
  long pairs_checked = 0;
};

inline ReturnSetVerification verify_return_set(const FiniteMetricSystem& sys, const ReturnSet& ret,
                                               double gamma, long pair_cap = 200000,
                                               std::uint64_t seed = 0) {
  ReturnSetVerification v;
  double rho = std::pow(2.0, -ret.rho_j);
  long n = static_cast<long>(ret.points.size());
  auto check_pair = [&](size_t i, size_t j) {
    auto xi = ret.point(i);
    auto xj = ret.point(j);
    if (dyn_distance(xi, xj, ret.N) < rho) v.separation = false;
    ++v.pairs_checked;
  };
  if (n * (n - 1) / 2 <= pair_cap) {
    for (size_t i = 0; i < ret.points.size(); ++i)
      for (size_t j = i + 1; j < ret.points.size(); ++j) check_pair(i, j);
  } else {
    auto rng = make_rng(seed, "return-set-pairs");
    for (long k = 0; k < pair_cap; ++k) {
      size_t i = rng() % n, j = rng() % n;
      if (i != j) check_pair(std::min(i, j), std::max(i, j));
    }
  }
  int a = static_cast<int>(ret.ball_word.size() - 1) / 2;
  for (size_t i = 0; i < ret.points.size(); ++i) {
    auto x = ret.point(i);
    for (int k = -a; k <= a; ++k) {
      if (x.at(k) != ret.ball_word[k + a]) v.returns = false;
      if (x.at(ret.N + k) != ret.ball_word[k + a]) v.returns = false;
    }
    for (const auto& psi : sys.psis) {
      double sum = 0.0;
      for (long t = 1; t <= ret.N; ++t) sum += psi.evaluate(x, t);
      if (std::abs(sum / ret.N - psi.integral(sys.mu)) >= gamma / 2) v.birkhoff = false;
    }
  }
  return v;
}

// -------------------------------------------------------------------------
// Horseshoe assembly.

struct AssembledHorseshoe {
  int N = 0;
  long alphabet_size = 0;
  double entropy = 0.0;
  bool degenerate = false;
  bool injectivity_checked = true;
};

// Symbolic case: the full shift over the return words. Concatenations are
// admissible because every word closes into the shared ball cylinder.
inline AssembledHorseshoe assemble_horseshoe(const FiniteMetricSystem& sys, const ReturnSet& ret,
                                             int sample_pairs = 64, std::uint64_t seed = 0) {
  AssembledHorseshoe out;
  out.N = ret.N;
  out.alphabet_size = static_cast<long>(ret.points.size());
  out.entropy = std::log(static_cast<double>(out.alphabet_size)) / ret.N;
  out.degenerate = out.alphabet_size <= 1;
  std::vector<std::uint8_t> lasts(sys.sft.alphabet_size(), 0), firsts(sys.sft.alphabet_size(), 0);
  for (const auto& w : ret.points) {
    if (!sys.sft.admissible(w)) throw Error("InadmissibleWord", "return word not admissible");
    lasts[w.back()] = 1;
    firsts[w.front()] = 1;
  }
  for (Symbol a = 0; a < sys.sft.alphabet_size(); ++a)
    for (Symbol b = 0; b < sys.sft.alphabet_size(); ++b)
      if (lasts[a] && firsts[b] && !sys.sft.allowed(a, b))
        throw Error("InadmissibleWord", "return words do not concatenate");
  // Injectivity: two codes differing in one letter produce sequences whose
  // distance at the corresponding block is at least the separation scale.
  auto rng = make_rng(seed, "assembly-pairs");
  double rho = std::pow(2.0, -ret.rho_j);
  for (int s = 0; s < sample_pairs && out.alphabet_size >= 2; ++s) {
    size_t i = rng() % out.alphabet_size, j = rng() % out.alphabet_size;
    if (i == j) continue;
    auto xi = ret.point(i);
    auto xj = ret.point(j);
    if (dyn_distance(xi, xj, ret.N) < rho) out.injectivity_checked = false;
  }
  return out;
}

// Affine case: concatenated orbit segments under the shadowing gate
// C0 eps < rho / 2.
struct AffineAssembly {
  double C0 = 0.0;
  double eps = 0.0;
  ConcatenationResult sample;
  double min_code_separation = 0.0;
};

inline AffineAssembly assemble_affine_horseshoe(const StandardAffineHorseshoe& h,
                                                const std::vector<Word>& words, double rho,
                                                int code_len, int sample_codes,
                                                std::uint64_t seed) {
  if (words.empty()) throw Error("InvalidArgument", "empty alphabet");
  // Probe the segment gaps with a round-robin code to fix eps.
  std::vector<int> probe;
  for (int i = 0; i < code_len; ++i) probe.push_back(i % static_cast<int>(words.size()));
  auto first = concatenate_segments(h, words, probe);
  AffineAssembly out;
  out.eps = std::max(first.max_segment_gap, 1e-12);
  // theta of the per-step sequence plays the shadowing constant
  std::vector<int> branches;
  for (int c : probe)
    for (Symbol s : words[c]) branches.push_back(s);
  out.C0 = 1.0 / (1.0 - std::exp(-sequence_from_branches(h, branches, 0).kappa()));
  if (!(out.C0 * out.eps < rho / 2))
    throw Error("PreconditionFailed", "C0 eps must be below rho / 2");
  out.sample = first;

  auto rng = make_rng(seed, "affine-codes");
  out.min_code_separation = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_codes; ++s) {
    std::vector<int> code_a, code_b;
    for (int i = 0; i < code_len; ++i) {
      code_a.push_back(static_cast<int>(rng() % words.size()));
      code_b.push_back(static_cast<int>(rng() % words.size()));
    }
    if (code_a == code_b) continue;
    auto ra = concatenate_segments(h, words, code_a);
    auto rb = concatenate_segments(h, words, code_b);
    // Word separation transfers to the orbits somewhere inside the first
    // differing block.
    int block = 0;
    while (code_a[block] == code_b[block]) ++block;
    double dist = 0.0;
    for (size_t k = 0; k < words[0].size(); ++k) {
      long t = static_cast<long>(block * words[0].size() + k);
      dist = std::max(dist, sup_norm(ra.orbit.at(t) - rb.orbit.at(t)));
    }
    out.min_code_separation = std::min(out.min_code_separation, dist);
    if (dist <= 2 * out.C0 * out.eps)
      throw Error("SeparationFailure", "codes differing at block " + std::to_string(block) +
                                           " collapsed to distance " + std::to_string(dist));
  }
  return out;
}

// -------------------------------------------------------------------------
// Marker refinement: the synchronized full-shift subsystem of a coded set,
// with the forced double-marker prefix and the interval filter.

struct MarkerRefinement {
  int N = 0;
  int ell = 0;
  Symbol star = 0;
  Word L0;                 // length N-1, (star, L0) has minimal period N
  std::vector<Word> pool;  // filtered words usable at slots >= 2
  double entropy = 0.0;
  bool disjointness_certified = false;
  bool degenerate = false;
  std::map<std::string, double> attrition;
};

inline MarkerRefinement marker_refine(const SubshiftOfFiniteType& sft, int N, double delta,
                                      Symbol star = 0, int ell_cap = 64, double cap = 2e6) {
  if (N < 2) throw Error("InvalidArgument", "N must be at least 2");
  double h = sft.top_entropy();
  MarkerRefinement out;
  out.N = N;
  out.star = star;
  if (h <= 1e-12) {
    out.degenerate = true;
    return out;
  }

  // L(N-1, star): words L with (star, L, star) admissible.
  std::vector<Word> lang;
  {
    auto words = sft.admissible_words(N - 1, std::nullopt, std::nullopt, cap);
    for (auto& w : words)
      if (sft.allowed(star, w.front()) && sft.allowed(w.back(), star))
        lang.push_back(std::move(w));
  }
  out.attrition["L"] = static_cast<double>(lang.size());
  if (lang.empty()) throw Error("SearchExhausted", "no return words through the star symbol");

  // L0: least word whose closed orbit has minimal period exactly N.
  auto minimal_period = [&](const Word& L) {
    Word P{star};
    P.insert(P.end(), L.begin(), L.end());
    for (int q = 1; q < N; ++q) {
      if (N % q != 0) continue;
      bool periodic = true;
      for (int i = 0; i < N && periodic; ++i) periodic = P[i] == P[i % q];
      if (periodic) return false;
    }
    return true;
  };
  std::optional<Word> L0;
  for (const auto& L : lang)
    if (minimal_period(L)) {
      L0 = L;
      break;
    }
  if (!L0) throw Error("SearchExhausted", "no word with full minimal period");
  out.L0 = *L0;

  //

  // Filter words matching any window of (L0, star, L0).
  Word D{};
  D.insert(D.end(), L0->begin(), L0->end());
  D.push_back(star);
  D.insert(D.end(), L0->begin(), L0->end());
  for (const auto& L : lang) {
    bool window = false;
    for (int o = 0; o + (N - 1) <= static_cast<int>(D.size()) && !window; ++o) {
      bool eq = true;
      for (int i = 0; i < N - 1 && eq; ++i) eq = D[o + i] == L[i];
      window = eq;
    }
    if (!window) out.pool.push_back(L);
  }
  out.attrition["L'"] = static_cast<double>(out.pool.size());
  if (out.pool.size() < 2)
    throw Error("SearchExhausted", "interval filter emptied the pool; attrition L=" +
                                       std::to_string(lang.size()) +
                                       " L'=" + std::to_string(out.pool.size()));

  for (int ell = 3; ell <= ell_cap; ++ell) {
    double entropy = (ell - 2) * std::log(static_cast<double>(out.pool.size())) /
                     (static_cast<double>(ell) * N);
    if (entropy > h - delta) {
      out.ell = ell;
      out.entropy = entropy;
      break;
    }
  }
  if (out.ell == 0)
    throw Error("SearchExhausted", "entropy floor unreachable; pool=" +
                                       std::to_string(out.pool.size()));

  // Disjointness: the double block (star, L0, star, L0) may occur in a valid
  // concatenation only at multiples of N ell. Unaligned occurrences would
  // force a full middle block equal to an interior window of the double
  // block, and those never start with star followed by a pool word or L0.
  Word M{star};
  M.insert(M.end(), L0->begin(), L0->end());
  M.push_back(star);
  M.insert(M.end(), L0->begin(), L0->end());
  bool ok = true;
  for (int o = 1; o < N && ok; ++o) {
    if (static_cast<int>(M.size()) - o < N) break;
    Word w(M.begin() + o, M.begin() + o + N);
    if (w[0] != star) continue;
    Word tail(w.begin() + 1, w.end());
    if (tail == *L0) ok = false;
    for (const auto& p : out.pool)
      if (tail == p) ok = false;
  }
  // L0 itself must have been filtered from the pool.
  for (const auto& p : out.pool)
    if (p == *L0) ok = false;
  out.disjointness_certified = ok;
  return out;
}

}  // namespace smale
