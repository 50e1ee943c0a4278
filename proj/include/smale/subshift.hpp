// Subshifts of finite type over a finite alphabet: topological entropy,
// the measure of maximal entropy, word combinatorics, marker words and the
// entropy-preserving embedded full shift built from them.
#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "smale/common.hpp"

namespace smale {

using Symbol = int;
using Word = std::vector<Symbol>;

inline std::string word_to_string(const Word& w) {
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += i > 0 && w[i] >= 10 ? "." : "";
    s += std::to_string(w[i]);
  }
  return s;
}

struct ParryMeasure {
  Vec stationary;        // invariant probability vector
  Mat transition_probs;  // row-stochastic, supported on allowed transitions
  double lambda = 0.0;   // Perron eigenvalue of the transition matrix

  // Shannon entropy rate of the stationary chain, in nats.
  double entropy_rate() const {
    double h = 0.0;
    for (int i = 0; i < stationary.size(); ++i)
      for (int j = 0; j < stationary.size(); ++j) {
        double p = transition_probs(i, j);
        if (p > 0.0) h -= stationary[i] * p * std::log(p);
      }
    return h;
  }

  // Measure of the cylinder fixed by an admissible word (position-free).
  double cylinder_measure(const Word& w) const {
    if (w.empty()) return 1.0;
    double m = stationary[w[0]];
    for (size_t t = 0; t + 1 < w.size(); ++t) m *= transition_probs(w[t], w[t + 1]);
    return m;
  }
};

class SubshiftOfFiniteType {
 public:
  SubshiftOfFiniteType() = default;
  SubshiftOfFiniteType(int alphabet_size, std::vector<std::uint8_t> transitions)
      : n_(alphabet_size), t_(std::move(transitions)) {
    if (n_ <= 0) throw Error("InvalidSft", "alphabet_size must be positive");
    if (static_cast<int>(t_.size()) != n_ * n_)
      throw Error("InvalidSft", "transition matrix must be alphabet_size^2 entries");
    for (auto v : t_)
      if (v != 0 && v != 1) throw Error("InvalidSft", "transitions must be 0/1");
  }

  static SubshiftOfFiniteType full_shift(int n) {
    return SubshiftOfFiniteType(n, std::vector<std::uint8_t>(n * n, 1));
  }
  static SubshiftOfFiniteType golden_mean() {
    return SubshiftOfFiniteType(2, {1, 1, 1, 0});
  }

  int alphabet_size() const { return n_; }
  bool allowed(Symbol a, Symbol b) const { return t_[a * n_ + b] != 0; }
  const std::vector<std::uint8_t>& transitions() const { return t_; }

  bool admissible(const Word& w) const {
    for (size_t i = 0; i + 1 < w.size(); ++i)
      if (!allowed(w[i], w[i + 1])) return false;
    return true;
  }

  // Iteratively drops symbols with no successor or no predecessor. Returns
  // the surviving sub-sft together with the kept symbol indices.
  std::pair<SubshiftOfFiniteType, std::vector<int>> pruned() const {
    std::vector<bool> alive(n_, true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < n_; ++i) {
        if (!alive[i]) continue;
        bool out = false, in = false;
        for (int j = 0; j < n_; ++j) {
          if (alive[j] && allowed(i, j)) out = true;
          if (alive[j] && allowed(j, i)) in = true;
        }
        if (!out || !in) {
          alive[i] = false;
          changed = true;
        }
      }
    }
    std::vector<int> kept;
    for (int i = 0; i < n_; ++i)
      if (alive[i]) kept.push_back(i);
    if (kept.empty()) throw Error("EmptySubshift", "pruning removed all symbols");
    int m = static_cast<int>(kept.size());
    std::vector<std::uint8_t> sub(m * m, 0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) sub[a * m + b] = allowed(kept[a], kept[b]) ? 1 : 0;
    return {SubshiftOfFiniteType(m, std::move(sub)), kept};
  }

  // Strong connectivity of the transition graph (validated, never assumed).
  bool is_transitive() const {
    auto reach = [&](bool forward) {
      std::vector<bool> seen(n_, false);
      std::vector<int> stack{0};
      seen[0] = true;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < n_; ++w) {
          bool edge = forward ? allowed(v, w) : allowed(w, v);
          if (edge && !seen[w]) {
            seen[w] = true;
            stack.push_back(w);
          }
        }
      }
      return seen;
    };
    auto fwd = reach(true), bwd = reach(false);
    for (int i = 0; i < n_; ++i)
      if (!fwd[i] || !bwd[i]) return false;
    // Reject the degenerate single symbol without a self-loop.
    for (int i = 0; i < n_; ++i) {
      bool any = false;
      for (int j = 0; j < n_; ++j) any = any || allowed(i, j);
      if (!any) return false;
    }
    return true;
  }

  // log of the Perron eigenvalue, in nats. Dense solve for small alphabets,
  // shifted power iteration beyond (the +I shift guards against periodicity).
  double top_entropy() const {
    auto [core, kept] = pruned();
    (void)kept;
    double lambda = core.perron_value();
    return std::log(lambda);
  }

  double perron_value() const {
    if (n_ <= 64) {
      Mat A(n_, n_);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) A(i, j) = allowed(i, j) ? 1.0 : 0.0;
      Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
      double rho = 0.0;
      for (int i = 0; i < n_; ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
      return polish_perron(rho);
    }
    return power_iterate_value();
  }

  ParryMeasure parry_measure() const {
    if (!is_transitive()) throw Error("NotTransitive", "Parry measure needs a transitive sft");
    Vec r = perron_vector(false);
    Vec l = perron_vector(true);
    double lambda = perron_value();
    Vec p = l.cwiseProduct(r);
    p /= p.sum();
    Mat P = Mat::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (allowed(i, j)) P(i, j) = r[j] / (lambda * r[i]);
    // Renormalize rows exactly; the analytic rows already sum to 1 up to
    // rounding and this pins the invariant used downstream.
    for (int i = 0; i < n_; ++i) P.row(i) /= P.row(i).sum();
    return ParryMeasure{p, P, lambda};
  }

  // Number of admissible words of length n with optional endpoint symbols.
  // Exact in double below 2^53; saturates at infinity beyond.
  double count_words(int n, std::optional<Symbol> first = std::nullopt,
                     std::optional<Symbol> last = std::nullopt) const {
    if (n < 1) throw Error("InvalidArgument", "word length must be >= 1");
    Vec c(n_);
    for (int j = 0; j < n_; ++j) c[j] = (!first || *first == j) ? 1.0 : 0.0;
    for (int t = 1; t < n; ++t) {
      Vec nx = Vec::Zero(n_);
      for (int a = 0; a < n_; ++a) {
        if (c[a] == 0.0) continue;
        for (int b = 0; b < n_; ++b)
          if (allowed(a, b)) nx[b] += c[a];
      }
      c = nx;
    }
    double total = 0.0;
    for (int j = 0; j < n_; ++j)
      if (!last || *last == j) total += c[j];
    return total;
  }

  // Exactly the admissible words of length n meeting the constraints, in
  // lexicographic order. Throws LengthOverflow past the cap.
  std::vector<Word> admissible_words(int n, std::optional<Symbol> first = std::nullopt,
                                     std::optional<Symbol> last = std::nullopt,
                                     double cap = 1e7) const {
    double cnt = count_words(n, first, last);
    if (cnt > cap)
      throw Error("LengthOverflow", "word count " + std::to_string(cnt) +
                                        " exceeds cap " + std::to_string(cap));
    std::vector<Word> out;
    out.reserve(static_cast<size_t>(cnt));
    Word w;
    w.reserve(n);
    enumerate(n, first, last, w, out);
    return out;
  }

  // Least word w in L(n, star) := {w : w[0] = star, (w, star) admissible}
  // occurring exactly twice as a subword of ww (no interior occurrence).
  struct MarkerSearch {
    std::optional<Word> marker;
    long candidates_examined = 0;
  };
  MarkerSearch find_marker_word(int n, Symbol star) const {
    MarkerSearch res;
    if (n < 2) return res;  // adjacent occurrences always overlap at n = 1
    Word w;
    w.reserve(n);
    w.push_back(star);
    find_marker_rec(n, star, w, res);
    return res;
  }

  SubshiftOfFiniteType subsystem(const std::vector<std::uint8_t>& mask) const {
    std::vector<std::uint8_t> t(t_);
    for (int i = 0; i < n_ * n_; ++i) t[i] = t[i] & mask[i];
    return SubshiftOfFiniteType(n_, std::move(t));
  }

 private:
  void enumerate(int n, std::optional<Symbol> first, std::optional<Symbol> last, Word& w,
                 std::vector<Word>& out) const {
    if (static_cast<int>(w.size()) == n) {
      if (!last || w.back() == *last) out.push_back(w);
      return;
    }
    if (w.empty()) {
      for (int s = 0; s < n_; ++s) {
        if (first && *first != s) continue;
        w.push_back(s);
        enumerate(n, first, last, w, out);
        w.pop_back();
      }
      return;
    }
    for (int s = 0; s < n_; ++s) {
      if (!allowed(w.back(), s)) continue;
      w.push_back(s);
      enumerate(n, first, last, w, out);
      w.pop_back();
    }
  }

  static bool occurs_only_at_ends(const Word& w) {
    // Scans ww for interior occurrences of w.
    int n = static_cast<int>(w.size());
    for (int s = 1; s < n; ++s) {
      bool match = true;
      for (int i = 0; i < n && match; ++i) {
        Symbol c = (s + i < n) ? w[s + i] : w[s + i - n];
        if (c != w[i]) match = false;
      }
      if (match) return false;
    }
    return true;
  }

  bool find_marker_rec(int n, Symbol star, Word& w, MarkerSearch& res) const {
    if (static_cast<int>(w.size()) == n) {
      if (!allowed(w.back(), star)) return false;
      ++res.candidates_examined;
      if (occurs_only_at_ends(w)) {
        res.marker = w;
        return true;
      }
      return false;
    }
    for (int s = 0; s < n_; ++s) {
      if (!allowed(w.back(), s)) continue;
      w.push_back(s);
      if (find_marker_rec(n, star, w, res)) return true;
      w.pop_back();
    }
    return false;
  }

  double polish_perron(double rho) const {
    // A few shifted power steps sharpen the dense estimate.
    Vec v = Vec::Ones(n_);
    double lambda = rho;
    for (int it = 0; it < 200; ++it) {
      Vec nv = Vec::Zero(n_);
      for (int i = 0; i < n_; ++i) {
        double acc = v[i];  // +I shift
        for (int j = 0; j < n_; ++j)
          if (allowed(i, j)) acc += v[j];
        nv[i] = acc;
      }
      double norm = nv.maxCoeff();
      nv /= norm;
      double est = norm - 1.0;
      v = nv;
      if (std::abs(est - lambda) <= 1e-14 * std::max(1.0, std::abs(lambda))) {
        lambda = est;
        break;
      }
      lambda = est;
    }
    return lambda;
  }

  double power_iterate_value() const {
    Vec v = Vec::Ones(n_);
    double lambda = 1.0;
    for (int it = 0; it < 100000; ++it) {
      Vec nv = Vec::Zero(n_);
      for (int i = 0; i < n_; ++i) {
        double acc = v[i];
        for (int j = 0; j < n_; ++j)
          if (allowed(i, j)) acc += v[j];
        nv[i] = acc;
      }
      double norm = nv.maxCoeff();
      nv /= norm;
      double est = norm - 1.0;
      bool done = std::abs(est - lambda) <= 1e-13 * std::max(1.0, std::abs(lambda));
      lambda = est;
      v = nv;
      if (done && it > 3) break;
    }
    return lambda;
  }

  Vec perron_vector(bool left) const {
    Vec v = Vec::Ones(n_);
    for (int it = 0; it < 200000; ++it) {
      Vec nv = Vec::Zero(n_);
      for (int i = 0; i < n_; ++i) {
        double acc = v[i];
        for (int j = 0; j < n_; ++j) {
          bool edge = left ? allowed(j, i) : allowed(i, j);
          if (edge) acc += v[j];
        }
        nv[i] = acc;
      }
      nv /= nv.maxCoeff();
      double delta = (nv - v).lpNorm<Eigen::Infinity>();
      v = nv;
      if (delta < 1e-15 && it > 3) break;
    }
    return v;
  }

  int n_ = 0;
  std::vector<std::uint8_t> t_;
};

// -------------------------------------------------------------------------
// Entropy-preserving full-shift extraction. The embedded alphabet is the
// product set {marker marker} x pool^(blocks-2); it is stored compactly
// because its cardinality is exponential in the block count by design.

struct FullShiftExtraction {
  int k = 0;            // period of the embedded full shift
  int n = 0;            // building-block length (k = blocks * n)
  int blocks = 0;       // words per alphabet element, first two = marker
  Word marker;          // the synchronizing word w0 in L(n, star)
  Symbol star = 0;
  std::vector<Word> pool;  // admissible n-words usable at slots >= 2
  bool degenerate = false;

  double log_word_count() const {
    if (degenerate) return 0.0;
    return (blocks - 2) * std::log(static_cast<double>(pool.size()));
  }
  double embedded_entropy() const { return k > 0 ? log_word_count() / k : 0.0; }

  // The i-th alphabet word (mixed-radix index over the pool slots).
  Word word_at(std::uint64_t index) const {
    Word w;
    w.reserve(k);
    std::vector<int> digits(blocks - 2, 0);
    for (int s = blocks - 3; s >= 0; --s) {
      digits[s] = static_cast<int>(index % pool.size());
      index /= pool.size();
    }
    w.insert(w.end(), marker.begin(), marker.end());
    w.insert(w.end(), marker.begin(), marker.end());
    for (int s = 0; s < blocks - 2; ++s)
      w.insert(w.end(), pool[digits[s]].begin(), pool[digits[s]].end());
    return w;
  }

  std::vector<Word> words(std::uint64_t cap = 1u << 20) const {
    double total = std::exp(log_word_count());
    if (total > static_cast<double>(cap))
      throw Error("LengthOverflow", "embedded alphabet too large to materialize");
    std::vector<Word> out;
    auto m = static_cast<std::uint64_t>(total + 0.5);
    out.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) out.push_back(word_at(i));
    return out;
  }

  // Certifies sigma^i(X) cap X = empty for 0 < i < k. Any occurrence of the
  // double marker w0w0 in a concatenation either aligns with the n-block
  // grid (then both blocks equal w0, which only happens at slots 0,1 of a
  // k-block) or straddles three consecutive n-blocks, forcing the middle
  // block to equal an interior window of w0w0 -- excluded from the pool and,
  // by the non-overlap property, distinct from w0 itself.
  bool verify_disjointness() const {
    if (degenerate) return false;
    Word ww(marker);
    ww.insert(ww.end(), marker.begin(), marker.end());
    for (int tau = 1; tau < n; ++tau) {
      Word window(ww.begin() + tau, ww.begin() + tau + n);
      if (window == marker) return false;
      for (const auto& p : pool)
        if (window == p) return false;
    }
    for (const auto& p : pool)
      if (p == marker) return false;
    return true;
  }

  bool verify_concatenations(const SubshiftOfFiniteType& sft) const {
    if (degenerate) return true;
    auto ok_pair = [&](const Word& a, const Word& b) {
      return sft.allowed(a.back(), b.front());
    };
    std::vector<const Word*> all{&marker};
    for (const auto& p : pool) all.push_back(&p);
    for (const Word* a : all) {
      if (!sft.admissible(*a)) return false;
      for (const Word* b : all)
        if (!ok_pair(*a, *b)) return false;
    }
    return true;
  }
};

// Runs the marker construction: scans word lengths (and star symbols) until a
// marker plus a large enough pool exist, then picks the smallest block count
// whose embedded entropy clears top_entropy - epsilon.
inline FullShiftExtraction extract_full_shift(const SubshiftOfFiniteType& sft, double epsilon,
                                              int n_cap = 24, int blocks_cap = 64,
                                              double pool_cap = 1e7) {
  if (!sft.is_transitive())
    throw Error("NotTransitive", "extraction needs a transitive subshift");
  double h = sft.top_entropy();
  if (h <= 1e-12) {
    // A single periodic orbit: nothing to preserve. Flagged degenerate.
    FullShiftExtraction ext;
    ext.degenerate = true;
    ext.star = 0;
    int p = 1;
    {  // minimal cycle length through symbol 0
      std::vector<Word> cyc;
      for (p = 1; p <= sft.alphabet_size(); ++p) {
        cyc = sft.admissible_words(p + 1, 0, 0);
        if (!cyc.empty()) break;
      }
      Word w = cyc.front();
      w.pop_back();
      ext.marker = w;
      ext.pool = {w};
      ext.n = p;
      ext.blocks = 1;
      ext.k = p;
    }
    return ext;
  }
  if (h <= epsilon)
    throw Error("SearchExhausted", "top entropy does not exceed the requested slack");

  int n_min = static_cast<int>(std::ceil(std::log2(std::max(2, sft.alphabet_size())))) + 2;
  std::string tried;
  for (int n = n_min; n <= n_cap; ++n) {
    for (Symbol star = 0; star < sft.alphabet_size(); ++star) {
      auto search = sft.find_marker_word(n, star);
      if (!search.marker) continue;
      const Word& w0 = *search.marker;
      double pool_count = sft.count_words(n, star);
      if (pool_count > pool_cap) continue;
      std::vector<Word> lang = sft.admissible_words(n, star, std::nullopt, pool_cap);
      // Keep only words that can be followed by star and avoid w0w0 windows.
      Word ww(w0);
      ww.insert(ww.end(), w0.begin(), w0.end());
      std::vector<Word> pool;
      for (auto& w : lang) {
        if (!sft.allowed(w.back(), star)) continue;
        bool is_window = false;
        for (int tau = 0; tau <= n && !is_window; ++tau) {
          bool eq = true;
          for (int i = 0; i < n && eq; ++i) eq = (ww[tau + i] == w[i]);
          is_window = eq;
        }
        if (!is_window) pool.push_back(w);
      }
      if (pool.size() < 2) continue;
      double rate = std::log(static_cast<double>(pool.size())) / n;
      if (rate <= h - epsilon) continue;
      for (int blocks = 3; blocks <= blocks_cap; ++blocks) {
        double embedded = (blocks - 2) * std::log(static_cast<double>(pool.size())) /
                          (static_cast<double>(blocks) * n);
        if (embedded > h - epsilon) {
          FullShiftExtraction ext;
          ext.k = blocks * n;
          ext.n = n;
          ext.blocks = blocks;
          ext.marker = w0;
          ext.star = star;
          ext.pool = std::move(pool);
          return ext;
        }
      }
    }
    tried += (tried.empty() ? "" : ",") + std::to_string(n);
  }
  throw Error("SearchExhausted", "no marker extraction found for n in {" + tried + "}");
}

// -------------------------------------------------------------------------
// Eventually periodic bi-infinite sequences: left period, core, right period.

struct SymbolicPoint {
  Word left_period;   // fills coordinates i < core_start
  Word core;          // occupies [core_start, core_start + core.size())
  Word right_period;  // fills coordinates i >= core_start + core.size()
  long core_start = 0;

  static SymbolicPoint periodic(Word period) {
    SymbolicPoint p;
    p.left_period = period;
    p.right_period = period;
    p.core_start = 0;
    return p;
  }

  long core_end() const { return core_start + static_cast<long>(core.size()); }

  Symbol at(long i) const {
    if (i >= core_start && i < core_end()) return core[i - core_start];
    if (i < core_start) {
      long p = static_cast<long>(left_period.size());
      long off = ((i - core_start) % p + p) % p;
      return left_period[off];
    }
    long p = static_cast<long>(right_period.size());
    return right_period[(i - core_end()) % p];
  }

  // The shifted point y with y_i = x_{i+k}.
  SymbolicPoint shifted(long k) const {
    SymbolicPoint y(*this);
    y.core_start -= k;
    return y;
  }

  bool admissible(const SubshiftOfFiniteType& sft) const {
    long lp = static_cast<long>(left_period.size());
    long rp = static_cast<long>(right_period.size());
    long lo = core_start - 2 * lp - 1;
    long hi = core_end() + 2 * rp + 1;
    for (long i = lo; i + 1 < hi; ++i)
      if (!sft.allowed(at(i), at(i + 1))) return false;
    return true;
  }

  // Structural equality of the bi-infinite sequences (Fine-Wilf window).
  bool same_sequence(const SymbolicPoint& o) const {
    long a = std::min(core_start, o.core_start);
    long b = std::max(core_end(), o.core_end());
    long lw = static_cast<long>(left_period.size()) + static_cast<long>(o.left_period.size());
    long rw = static_cast<long>(right_period.size()) + static_cast<long>(o.right_period.size());
    for (long i = a - lw - 1; i <= b + rw + 1; ++i)
      if (at(i) != o.at(i)) return false;
    return true;
  }

  // min { |i| : x_i != y_i } or nullopt when the sequences coincide.
  std::optional<long> min_mismatch_abs(const SymbolicPoint& o) const {
    long a = std::min(core_start, o.core_start);
    long b = std::max(core_end(), o.core_end());
    long lw = static_cast<long>(left_period.size()) + static_cast<long>(o.left_period.size());
    long rw = static_cast<long>(right_period.size()) + static_cast<long>(o.right_period.size());
    long horizon = std::max(std::abs(a - lw), std::abs(b + rw)) + 1;
    for (long r = 0; r <= horizon; ++r) {
      if (at(r) != o.at(r)) return r;
      if (r > 0 && at(-r) != o.at(-r)) return r;
    }
    if (same_sequence(o)) return std::nullopt;
    return horizon;  // unreachable for well-formed points
  }
};

// The standard symbolic metric d(x, y) = 2^{-min{|i| : x_i != y_i}}.
inline double symbolic_distance(const SymbolicPoint& x, const SymbolicPoint& y) {
  auto m = x.min_mismatch_abs(y);
  if (!m) return 0.0;
  return std::pow(2.0, -static_cast<double>(*m));
}

}  // namespace smale
