// The finitely generated contraction system induced on the center factor,
// grid-based certification of the recurrent compact condition, the maximal
// fixed-point search for a witness set, the randomized composite
// perturbation with its covering condition, and the exhaustive measure
// counting bound behind it.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smale/common.hpp"
#include "smale/horseshoe.hpp"

namespace smale {

// Affine contractions z -> L z + v_j of the centered cube B = [-1/2,1/2]^d,
// L diagonal with rates in (0,1). Map 0 plays the base role in composites.
struct CenterIfs {
  Vec rates;
  std::vector<Vec> translations;

  int dim() const { return static_cast<int>(rates.size()); }
  int map_count() const { return static_cast<int>(translations.size()); }
  int branch_count_nonbase() const { return map_count() - 1; }

  double det() const {
    double j = 1.0;
    for (int i = 0; i < dim(); ++i) j *= rates[i];
    return j;
  }

  Vec apply(int j, const Vec& z) const { return rates.cwiseProduct(z) + translations[j]; }
  Vec apply_inverse(int j, const Vec& z) const {
    return (z - translations[j]).cwiseQuotient(rates);
  }
  Box image_box(int j, const Box& b) const {
    Box out(dim());
    for (int i = 0; i < dim(); ++i)
      out.axes[i] = b.axes[i].affine_out(rates[i], translations[j][i]);
    return out;
  }
  Box preimage_box(int j, const Box& b) const {
    Box out(dim());
    for (int i = 0; i < dim(); ++i)
      out.axes[i] = {round_down((b.axes[i].lo - translations[j][i]) / rates[i]),
                     round_up((b.axes[i].hi - translations[j][i]) / rates[i])};
    return out;
  }

  // min over maps of the distance of L_j(B) to the boundary of B.
  double containment_slack() const {
    double slack = std::numeric_limits<double>::infinity();
    for (int j = 0; j < map_count(); ++j)
      for (int i = 0; i < dim(); ++i) {
        slack = std::min(slack, 0.5 - (rates[i] * 0.5 + translations[j][i]));
        slack = std::min(slack, (translations[j][i] - rates[i] * 0.5) + 0.5);
      }
    return slack;
  }

  void require_contractive() const {
    if (map_count() == 0) throw Error("InvalidModel", "no contractions");
    for (int i = 0; i < dim(); ++i)
      if (!(rates[i] > 0.0 && rates[i] < 1.0))
        throw Error("InvalidModel", "contraction rates must lie in (0,1)");
  }
  void require_well_formed() const {
    require_contractive();
    if (containment_slack() < -1e-12)
      throw Error("InvalidModel", "a map sends the cube outside itself");
  }
};

// The center system of a partially hyperbolic standard affine horseshoe,
// rewritten on the centered cube. The original-frame contraction is
// z -> z / a_c + v_j^c on [0,1]^{d_c}; centering shifts the translate by
// (rate - 1) / 2 per axis.
inline CenterIfs extract_center_ifs(const StandardAffineHorseshoe& h) {
  if (h.d_c() < 1) throw Error("UnsupportedDimension", "model has no center factor");
  // Hyperbolicity suffices here; full sub-rectangle validation is a
  // separate concern and would reject the slightly perturbed models used
  // by the robustness probe.
  h.require_hyperbolic();
  CenterIfs ifs;
  ifs.rates = Vec(h.d_c());
  for (int i = 0; i < h.d_c(); ++i) ifs.rates[i] = 1.0 / h.diag_entry(h.d_uu() + i);
  for (int j = 0; j < h.branch_count(); ++j) {
    Vec t(h.d_c());
    for (int i = 0; i < h.d_c(); ++i)
      t[i] = h.translation(j)[h.d_uu() + i] + (ifs.rates[i] - 1.0) / 2.0;
    ifs.translations.push_back(t);
  }
  return ifs;
}

// -------------------------------------------------------------------------
// Conservative grid sets: a uniform grid over a domain box with an occupancy
// mask. Interior = one-cell erosion over the full neighbor stencil.

class GridSet {
 public:
  GridSet() = default;
  GridSet(int dim, long cells_per_axis, Box domain)
      : dim_(dim), cells_(cells_per_axis), domain_(std::move(domain)) {
    long total = 1;
    for (int i = 0; i < dim_; ++i) {
      total *= cells_;
      if (total > (1L << 26)) throw Error("ResolutionExceeded", "grid too large");
    }
    mask_.assign(total, 0);
  }
  static GridSet full(int dim, long cells_per_axis, Box domain) {
    GridSet g(dim, cells_per_axis, std::move(domain));
    std::fill(g.mask_.begin(), g.mask_.end(), 1);
    return g;
  }

  int dim() const { return dim_; }
  long cells_per_axis() const { return cells_; }
  const Box& domain() const { return domain_; }
  long total_cells() const { return static_cast<long>(mask_.size()); }
  double cell_width(int axis) const { return domain_.axes[axis].width() / cells_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  bool occupied(long idx) const { return mask_[idx] != 0; }
  void set(long idx, bool on) { mask_[idx] = on ? 1 : 0; }
  long count() const {
    long c = 0;
    for (auto m : mask_) c += m;
    return c;
  }
  bool empty() const { return count() == 0; }
  bool operator==(const GridSet& o) const {
    return dim_ == o.dim_ && cells_ == o.cells_ && mask_ == o.mask_;
  }

  std::vector<long> unflatten(long idx) const {
    std::vector<long> mi(dim_);
    for (int i = dim_ - 1; i >= 0; --i) {
      mi[i] = idx % cells_;
      idx /= cells_;
    }
    return mi;
  }
  long flatten(const std::vector<long>& mi) const {
    long idx = 0;
    for (int i = 0; i < dim_; ++i) idx = idx * cells_ + mi[i];
    return idx;
  }

  Box cell_box(long idx) const {
    auto mi = unflatten(idx);
    Box b(dim_);
    for (int i = 0; i < dim_; ++i) {
      double w = cell_width(i);
      double lo = domain_.axes[i].lo + mi[i] * w;
      b.axes[i] = {round_down(lo), round_up(lo + w)};
    }
    return b;
  }

  // Cell-index range of all cells whose closed box meets `b`; false when the
  // box leaves the domain. Boundary-aligned edges stay in the inner cell.
  bool cell_range(const Box& b, std::vector<long>& lo, std::vector<long>& hi) const {
    lo.assign(dim_, 0);
    hi.assign(dim_, 0);
    for (int i = 0; i < dim_; ++i) {
      double w = cell_width(i);
      double rel_lo = (b.axes[i].lo - domain_.axes[i].lo) / w;
      double rel_hi = (b.axes[i].hi - domain_.axes[i].lo) / w;
      lo[i] = static_cast<long>(std::floor(rel_lo));
      hi[i] = static_cast<long>(std::ceil(rel_hi)) - 1;
      if (rel_hi == std::floor(rel_hi)) hi[i] = static_cast<long>(rel_hi) - 1;
      if (hi[i] < lo[i]) hi[i] = lo[i];
      if (lo[i] < 0 || hi[i] >= cells_) return false;
    }
    return true;
  }

  // One-cell erosion over the full neighbor stencil; domain-boundary cells
  // are never interior.
  GridSet interior() const {
    GridSet out(dim_, cells_, domain_);
    std::vector<long> mi(dim_), nb(dim_);
    for (long idx = 0; idx < total_cells(); ++idx) {
      if (!occupied(idx)) continue;
      mi = unflatten(idx);
      bool inner = true;
      for (int i = 0; i < dim_ && inner; ++i) inner = mi[i] > 0 && mi[i] + 1 < cells_;
      if (!inner) continue;
      std::vector<int> offs(dim_, -1);
      bool all = true;
      while (true) {
        bool self = true;
        for (int i = 0; i < dim_; ++i) self = self && offs[i] == 0;
        if (!self) {
          for (int i = 0; i < dim_; ++i) nb[i] = mi[i] + offs[i];
          if (!occupied(flatten(nb))) {
            all = false;
            break;
          }
        }
        int axis = dim_ - 1;
        while (axis >= 0) {
          if (++offs[axis] <= 1) break;
          offs[axis] = -1;
          --axis;
        }
        if (axis < 0) break;
      }
      if (all) out.set(idx, true);
    }
    return out;
  }

 private:
  int dim_ = 0;
  long cells_ = 0;
  Box domain_;
  std::vector<std::uint8_t> mask_;
};

// d-dimensional integral image over a grid mask: O(1)-ish full-range tests.
class GridPrefix {
 public:
  explicit GridPrefix(const GridSet& g) : dim_(g.dim()), cells_(g.cells_per_axis()) {
    long total = g.total_cells();
    ps_.assign(total, 0);
    for (long idx = 0; idx < total; ++idx) ps_[idx] = g.occupied(idx) ? 1 : 0;
    // prefix along each axis in turn
    std::vector<long> mi(dim_);
    for (int axis = 0; axis < dim_; ++axis) {
      for (long idx = 0; idx < total; ++idx) {
        long stride = 1;
        for (int i = dim_ - 1; i > axis; --i) stride *= cells_;
        long coord = (idx / stride) % cells_;
        if (coord > 0) ps_[idx] += ps_[idx - stride];
      }
    }
  }

  // number of occupied cells in the closed index range [lo, hi]
  long count(const std::vector<long>& lo, const std::vector<long>& hi) const {
    long total = 0;
    int corners = 1 << dim_;
    std::vector<long> mi(dim_);
    for (int c = 0; c < corners; ++c) {
      int sign = 1;
      bool valid = true;
      for (int i = 0; i < dim_; ++i) {
        if (c & (1 << i)) {
          mi[i] = lo[i] - 1;
          sign = -sign;
          if (mi[i] < 0) {
            valid = false;
            break;
          }
        } else {
          mi[i] = hi[i];
        }
      }
      if (!valid) continue;
      long idx = 0;
      for (int i = 0; i < dim_; ++i) idx = idx * cells_ + mi[i];
      total += sign * ps_[idx];
    }
    return total;
  }

  bool all_occupied(const std::vector<long>& lo, const std::vector<long>& hi) const {
    long vol = 1;
    for (size_t i = 0; i < lo.size(); ++i) vol *= hi[i] - lo[i] + 1;
    return count(lo, hi) == vol;
  }

 private:
  int dim_;
  long cells_;
  std::vector<long> ps_;
};

// -------------------------------------------------------------------------
// Certification of the recurrent compact condition at grid resolution:
// every occupied cell must pull back, under some map, strictly inside the
// eroded occupancy. Certified is a proof for the union of occupied cells;
// Rejected is not a disproof.

struct RecurrentCompactResult {
  bool certified = false;
  std::vector<int> witness;  // branch index per cell, -1 where unused
  long rejected_cell = -1;
  std::string reason;
};

inline RecurrentCompactResult recurrent_compact_check(const CenterIfs& ifs, const GridSet& K) {
  ifs.require_contractive();
  RecurrentCompactResult res;
  res.witness.assign(K.total_cells(), -1);
  if (K.empty()) {
    res.reason = "empty set";
    return res;
  }
  GridSet inner = K.interior();
  GridPrefix prefix(inner);
  std::vector<long> lo, hi;
  for (long idx = 0; idx < K.total_cells(); ++idx) {
    if (!K.occupied(idx)) continue;
    Box cell = K.cell_box(idx);
    int found = -1;
    for (int j = 0; j < ifs.map_count() && found < 0; ++j) {
      Box pre = ifs.preimage_box(j, cell);
      if (!K.cell_range(pre, lo, hi)) continue;
      if (prefix.all_occupied(lo, hi)) found = j;
    }
    if (found < 0) {
      res.rejected_cell = idx;
      res.reason = "no branch pulls the cell into the interior";
      return res;
    }
    res.witness[idx] = found;
  }
  res.certified = true;
  return res;
}

// Maximal fixed point of the one-step refinement, started from the full
// domain grid. The mask shrinks monotonically, so this terminates.
inline std::optional<GridSet> search_recurrent_compact(const CenterIfs& ifs, long cells_per_axis,
                                                       std::optional<Box> domain_opt = {}) {
  ifs.require_contractive();
  Box domain = domain_opt ? *domain_opt : Box::centered_unit(ifs.dim());
  GridSet K = GridSet::full(ifs.dim(), cells_per_axis, domain);
  std::vector<long> lo, hi;
  while (true) {
    GridSet inner = K.interior();
    GridPrefix prefix(inner);
    GridSet next(K.dim(), K.cells_per_axis(), K.domain());
    bool changed = false;
    for (long idx = 0; idx < K.total_cells(); ++idx) {
      if (!K.occupied(idx)) continue;
      Box cell = K.cell_box(idx);
      bool keep = false;
      for (int j = 0; j < ifs.map_count() && !keep; ++j) {
        Box pre = ifs.preimage_box(j, cell);
        if (!K.cell_range(pre, lo, hi)) continue;
        keep = prefix.all_occupied(lo, hi);
      }
      next.set(idx, keep);
      changed = changed || (keep != K.occupied(idx));
    }
    K = next;
    if (!changed || K.empty()) break;
  }
  if (K.empty()) return std::nullopt;
  auto check = recurrent_compact_check(ifs, K);
  if (!check.certified) return std::nullopt;
  return K;
}

// -------------------------------------------------------------------------
// Composite systems: words over the non-base maps {1..H} applied after the
// base map, optionally shifted per suffix class.

struct PerturbationFamily {
  int n = 0;
  double c = 0.0;
  int m = 0;  // suffix length, floor(c n) + 1
  double beta = 1.0;
  std::map<Word, Vec> shifts_by_suffix;  // length-m suffix -> vector in B
  std::uint64_t seed = 0;
};

namespace detail_ifs {

inline void enumerate_words(int H, int n, Word& cur, std::vector<Word>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int j = 1; j <= H; ++j) {
    cur.push_back(j);
    enumerate_words(H, n, cur, out);
    cur.pop_back();
  }
}

// Affine data of L_{j_n} o ... o L_{j_1} o L_0 (base applied first).
inline Vec composite_translation(const CenterIfs& ifs, const Word& word) {
  Vec t = ifs.translations[0];
  for (Symbol j : word) t = ifs.rates.cwiseProduct(t) + ifs.translations[j];
  return t;
}

}  // namespace detail_ifs

// The composite family as a CenterIfs (all maps share the scale L^{n+1}).
inline CenterIfs composite_ifs(const CenterIfs& ifs, int n,
                               const PerturbationFamily* family = nullptr) {
  ifs.require_contractive();
  int H = ifs.branch_count_nonbase();
  if (H < 1) throw Error("InvalidModel", "need at least one non-base map");
  if (std::pow(static_cast<double>(H), n) > 1e6)
    throw Error("EnumerationCap", "H^n exceeds the enumeration cap");
  std::vector<Word> words;
  Word cur;
  detail_ifs::enumerate_words(H, n, cur, words);
  CenterIfs out;
  Vec scale = Vec::Ones(ifs.dim());
  for (int t = 0; t < n + 1; ++t) scale = scale.cwiseProduct(ifs.rates);
  out.rates = scale;
  for (const auto& w : words) {
    Vec t = detail_ifs::composite_translation(ifs, w);
    if (family) {
      Word suffix(w.end() - family->m, w.end());
      t += 10.0 * scale.cwiseProduct(family->shifts_by_suffix.at(suffix));
    }
    out.translations.push_back(t);
  }
  return out;
}

// -------------------------------------------------------------------------
// Exhaustive measure counting: the set A of points covered by at least
// ceil(J^{n+1} H^n / 2) composite images has measure at least
// alpha_n = J^{n+1} (H / beta)^n / 2.

struct ClaimReport {
  double measure_lower = 0.0, measure_upper = 0.0;
  double alpha_n = 0.0;
  long threshold_count = 0;
  bool ok = false;
  std::vector<Interval> a_intervals;  // d = 1 only
};

inline ClaimReport coverage_claim_bruteforce(const CenterIfs& ifs, int n, double beta) {
  ifs.require_contractive();
  int H = ifs.branch_count_nonbase();
  CenterIfs comp = composite_ifs(ifs, n);
  double jn1 = std::pow(ifs.det(), n + 1);
  double total = jn1 * std::pow(static_cast<double>(H), n);
  ClaimReport rep;
  rep.alpha_n = 0.5 * jn1 * std::pow(static_cast<double>(H) / beta, n);
  rep.threshold_count = static_cast<long>(std::ceil(total / 2.0 - 1e-12));
  if (rep.threshold_count < 1) rep.threshold_count = 1;

  Box B = Box::centered_unit(ifs.dim());
  if (ifs.dim() == 1) {
    // endpoint sweep, exact up to rounding
    std::vector<std::pair<double, int>> events;
    for (int j = 0; j < comp.map_count(); ++j) {
      Box img = comp.image_box(j, B);
      events.push_back({img.axes[0].lo, +1});
      events.push_back({img.axes[0].hi, -1});
    }
    std::sort(events.begin(), events.end());
    long depth = 0;
    double measure = 0.0, open_at = 0.0;
    std::vector<Interval> parts;
    for (const auto& [x, delta] : events) {
      bool was = depth >= rep.threshold_count;
      depth += delta;
      bool now = depth >= rep.threshold_count;
      if (!was && now) open_at = x;
      if (was && !now) {
        measure += x - open_at;
        if (!parts.empty() && parts.back().hi == open_at)
          parts.back().hi = x;
        else
          parts.push_back({open_at, x});
      }
    }
    rep.measure_lower = rep.measure_upper = measure;
    rep.a_intervals = parts;
  } else {
    long cells = ifs.dim() == 2 ? 512 : 64;
    GridSet grid(ifs.dim(), cells, B);
    std::vector<long> lo, hi;
    std::vector<long> counts_full(grid.total_cells(), 0), counts_touch(grid.total_cells(), 0);
    for (int j = 0; j < comp.map_count(); ++j) {
      Box img = comp.image_box(j, B);
      Box clipped(ifs.dim());
      for (int i = 0; i < ifs.dim(); ++i) clipped.axes[i] = img.axes[i].intersect(B.axes[i]);
      if (clipped.empty()) continue;
      if (!grid.cell_range(clipped, lo, hi)) continue;
      std::vector<long> mi(lo);
      while (true) {
        long c = grid.flatten(mi);
        Box cell = grid.cell_box(c);
        if (img.contains(cell)) counts_full[c]++;
        if (img.intersects(cell)) counts_touch[c]++;
        int axis = ifs.dim() - 1;
        while (axis >= 0) {
          if (++mi[axis] <= hi[axis]) break;
          mi[axis] = lo[axis];
          --axis;
        }
        if (axis < 0) break;
      }
    }
    double cell_measure = 1.0;
    for (int i = 0; i < ifs.dim(); ++i) cell_measure *= grid.cell_width(i);
    for (long c = 0; c < grid.total_cells(); ++c) {
      if (counts_full[c] >= rep.threshold_count) rep.measure_lower += cell_measure;
      if (counts_touch[c] >= rep.threshold_count) rep.measure_upper += cell_measure;
    }
  }
  rep.ok = rep.measure_lower >= rep.alpha_n - 1e-12;
  return rep;
}

// -------------------------------------------------------------------------
// The randomized perturbation pipeline: sample shifts per suffix class,
// verify the lattice covering condition, then require a certified recurrent
// compact set for the shifted composite system.

struct PerturbTrialRecord {
  bool covering_ok = false;
  bool certified = false;
};

struct PerturbReport {
  int trials = 0;
  int covering_successes = 0;
  int certified_successes = 0;
  bool hit_bound_ok = true;  // spot check of the card <= beta^n hypothesis
  long hit_bound_worst = 0;
  long lattice_points = 0;
  std::vector<PerturbTrialRecord> records;
  std::optional<PerturbationFamily> first_witness;
  std::optional<GridSet> first_witness_set;
};

inline PerturbReport perturb_and_verify(const CenterIfs& ifs, int n, double c, double beta,
                                        int trials, std::uint64_t seed,
                                        long cells_per_axis = 400) {
  ifs.require_contractive();
  if (ifs.dim() != 1)
    throw Error("UnsupportedDimension", "perturbation pipeline is one-dimensional in v1");
  int H = ifs.branch_count_nonbase();
  if (H < 1) throw Error("InvalidModel", "need at least one non-base map");
  double J = ifs.det();
  if (!(std::pow(beta, 2.0 - c) < std::pow(J * H, 2.0)))
    throw Error("HypothesisViolated", "beta^(2-c) must be below (J H)^2");
  if (std::pow(static_cast<double>(H), n) > 1e6)
    throw Error("EnumerationCap", "H^n exceeds the enumeration cap");

  PerturbReport rep;
  rep.trials = trials;

  // Spot check of the depth-n hit bound over the non-base maps.
  {
    auto rng = make_rng(seed, "hit-spot");
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    std::function<long(double, int)> count_hits = [&](double x, int depth) -> long {
      if (x < -0.5 - 1e-12 || x > 0.5 + 1e-12) return 0;
      if (depth == 0) return 1;
      long t = 0;
      for (int j = 1; j <= H; ++j)
        t += count_hits((x - ifs.translations[j][0]) / ifs.rates[0], depth - 1);
      return t;
    };
    for (int s = 0; s < 64; ++s)
      rep.hit_bound_worst = std::max(rep.hit_bound_worst, count_hits(unif(rng), n));
    rep.hit_bound_ok = rep.hit_bound_worst <= static_cast<long>(std::ceil(std::pow(beta, n)));
  }

  // The claim set A, the tiles meeting it, their cores and the lattice probe.
  auto claim = coverage_claim_bruteforce(ifs, n, beta);
  double scale = std::pow(ifs.rates[0], n + 1);
  std::set<long> tile_ids;
  {
    long u_span = static_cast<long>(std::ceil(1.0 / scale)) + 2;
    for (long u = -u_span; u <= u_span; ++u) {
      Interval tile{scale * (u - 0.5), scale * (u + 0.5)};
      for (const auto& part : claim.a_intervals)
        if (tile.intersects(part)) {
          tile_ids.insert(u);
          break;
        }
    }
  }
  std::vector<double> lattice;  // A' = K cap scale * (1/100) Z
  for (long u : tile_ids) {
    long q_lo = static_cast<long>(std::ceil((u - 0.5) * 100.0));
    long q_hi = static_cast<long>(std::floor((u + 0.5) * 100.0));
    for (long q = q_lo; q <= q_hi; ++q) lattice.push_back(scale * (q / 100.0));
  }
  std::sort(lattice.begin(), lattice.end());
  lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
  rep.lattice_points = static_cast<long>(lattice.size());

  auto core_contains = [&](double xi) {
    double rel = xi / scale;
    long u = std::lround(rel);
    return std::abs(rel - u) <= 0.25 && tile_ids.count(u) > 0;
  };

  std::vector<Word> words;
  Word cur;
  detail_ifs::enumerate_words(H, n, cur, words);
  int m = static_cast<int>(std::floor(c * n)) + 1;
  if (m > n) m = n;

  for (int trial = 0; trial < trials; ++trial) {
    PerturbationFamily family;
    family.n = n;
    family.c = c;
    family.m = m;
    family.beta = beta;
    family.seed = seed;
    for (const auto& w : words) {
      Word suffix(w.end() - m, w.end());
      if (family.shifts_by_suffix.count(suffix)) continue;
      auto rng = make_rng(seed, "perturb:" + word_to_string(suffix), trial);
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      Vec v(1);
      v[0] = unif(rng);
      family.shifts_by_suffix[suffix] = v;
    }

    std::vector<double> offsets(words.size());
    for (size_t wi = 0; wi < words.size(); ++wi) {
      Word suffix(words[wi].end() - m, words[wi].end());
      offsets[wi] = detail_ifs::composite_translation(ifs, words[wi])[0] +
                    10.0 * scale * family.shifts_by_suffix.at(suffix)[0];
    }

    bool cond = !lattice.empty();
    for (double z : lattice) {
      bool covered = false;
      for (double off : offsets)
        if (core_contains((z - off) / scale)) {
          covered = true;
          break;
        }
      if (!covered) {
        cond = false;
        break;
      }
    }

    PerturbTrialRecord record;
    record.covering_ok = cond;
    if (cond) {
      rep.covering_successes++;
      auto shifted = composite_ifs(ifs, n, &family);
      Box domain = Box::centered_unit(1);
      for (int j = 0; j < shifted.map_count(); ++j) {
        Box img = shifted.image_box(j, Box::centered_unit(1));
        domain.axes[0] = domain.axes[0].hull(img.axes[0]);
      }
      auto found = search_recurrent_compact(shifted, cells_per_axis, domain);
      record.certified = found.has_value();
      if (record.certified) {
        rep.certified_successes++;
        if (!rep.first_witness) {
          rep.first_witness = family;
          rep.first_witness_set = *found;
        }
      }
    }
    rep.records.push_back(record);
  }
  return rep;
}

}  // namespace smale
