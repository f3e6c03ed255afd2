#include "fent/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "fent/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fent {

namespace {

template <class T>
T convert(const Rational& q);
template <>
double convert<double>(const Rational& q) {
  return q.get_d();
}
template <>
Rational convert<Rational>(const Rational& q) {
  return q;
}

bool positive(const Rational& p) { return sgn(p) > 0; }

std::uint64_t saturating_power(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

std::vector<std::vector<int>> children_of(const TreeModel& m) {
  std::vector<std::vector<int>> children(m.vertices.size());
  for (std::size_t v = 1; v < m.vertices.size(); ++v) children[m.vertices[v].parent].push_back(static_cast<int>(v));
  return children;
}

std::vector<std::uint64_t> place_weights(const TreeModel& m) {
  std::vector<std::uint64_t> w(static_cast<std::size_t>(m.observed_sites));
  std::uint64_t x = 1;
  for (int i = m.observed_sites - 1; i >= 0; --i) {
    w[i] = x;
    x *= static_cast<std::uint64_t>(m.observed_size);
  }
  return w;
}

// Tables for the subtrees hanging off the root, and the root's own factors.
template <class T>
class Prepared {
 public:
  Prepared(const TreeModel& m, std::uint64_t table_cap) : k_(m.inner_size) {
    if (m.pattern_count() == std::numeric_limits<std::uint64_t>::max()) throw CapExceeded("pattern count overflows");
    children_ = children_of(m);
    weights_ = place_weights(m);
    const auto& root = m.vertices[0];
    radix_.push_back(root.place >= 0 ? static_cast<std::uint64_t>(m.observed_size) : 1);
    std::vector<T> prior(k_);
    for (int x = 0; x < k_; ++x) prior[x] = convert<T>(m.prior[x]);
    base_.resize(radix_[0]);
    root_keys_.resize(radix_[0]);
    for (std::uint64_t y = 0; y < radix_[0]; ++y) {
      base_[y].assign(k_, T(0));
      for (int x = 0; x < k_; ++x) {
        if (root.place < 0 || m.emit[x] == static_cast<int>(y)) base_[y][x] = prior[x];
      }
      root_keys_[y] = root.place >= 0 ? y * weights_[root.place] : 0;
    }
    for (int c : children_[0]) {
      Table t = build(m, c, table_cap);
      radix_.push_back(t.count);
      tables_.push_back(std::move(t));
    }
    total_ = 1;
    for (auto r : radix_) total_ *= r;
  }

  std::uint64_t total() const { return total_; }

  // visit(key, p) for every flat index in [first, last).
  template <class Visit>
  void run(std::uint64_t first, std::uint64_t last, Visit&& visit) const {
    if (first >= last) return;
    const std::size_t levels = radix_.size();
    std::vector<std::uint64_t> digit(levels);
    std::uint64_t rest = first;
    for (std::size_t l = levels; l-- > 0;) {
      digit[l] = rest % radix_[l];
      rest /= radix_[l];
    }
    std::vector<std::vector<T>> pre(levels, std::vector<T>(k_));
    std::vector<std::uint64_t> key(levels);
    auto recompute = [&](std::size_t from) {
      for (std::size_t l = from; l < levels; ++l) {
        if (l == 0) {
          pre[0] = base_[digit[0]];
          key[0] = root_keys_[digit[0]];
          continue;
        }
        const Table& t = tables_[l - 1];
        const T* row = &t.values[digit[l] * static_cast<std::uint64_t>(k_)];
        for (int x = 0; x < k_; ++x) pre[l][x] = pre[l - 1][x] * row[x];
        key[l] = key[l - 1] + t.keys[digit[l]];
      }
    };
    recompute(0);
    T p;
    for (std::uint64_t index = first;;) {
      p = pre[levels - 1][0];
      for (int x = 1; x < k_; ++x) p += pre[levels - 1][x];
      visit(key[levels - 1], p);
      if (++index == last) break;
      std::size_t l = levels - 1;
      while (++digit[l] == radix_[l]) {
        digit[l] = 0;
        --l;
      }
      recompute(l);
    }
  }

 private:
  struct Table {
    std::uint64_t count = 1;
    std::vector<T> values;  // count x k: message to the parent label
    std::vector<std::uint64_t> keys;
  };

  Table build(const TreeModel& m, int v, std::uint64_t table_cap) const {
    const auto& vertex = m.vertices[v];
    std::vector<Table> sub;
    for (int c : children_[v]) sub.push_back(build(m, c, table_cap));
    Table out;
    const std::uint64_t own = vertex.place >= 0 ? static_cast<std::uint64_t>(m.observed_size) : 1;
    out.count = own;
    for (const auto& s : sub) out.count *= s.count;
    if (out.count > table_cap / static_cast<std::uint64_t>(k_)) {
      throw CapExceeded("subtree table of " + std::to_string(out.count) + " patterns exceeds the table cap");
    }
    const Matrix& P = m.transitions[vertex.transition];
    std::vector<std::vector<T>> p(k_, std::vector<T>(k_));
    for (int a = 0; a < k_; ++a) {
      for (int b = 0; b < k_; ++b) p[a][b] = convert<T>(P[a][b]);
    }
    out.values.assign(out.count * k_, T(0));
    out.keys.assign(out.count, 0);
    std::vector<T> local(k_);
    std::vector<std::uint64_t> digits(sub.size());
    for (std::uint64_t j = 0; j < out.count; ++j) {
      std::uint64_t rest = j;
      for (std::size_t i = sub.size(); i-- > 0;) {
        digits[i] = rest % sub[i].count;
        rest /= sub[i].count;
      }
      const std::uint64_t y = rest;
      std::uint64_t key = vertex.place >= 0 ? y * weights_[vertex.place] : 0;
      for (int x = 0; x < k_; ++x) local[x] = (vertex.place < 0 || m.emit[x] == static_cast<int>(y)) ? T(1) : T(0);
      for (std::size_t i = 0; i < sub.size(); ++i) {
        const T* row = &sub[i].values[digits[i] * static_cast<std::uint64_t>(k_)];
        for (int x = 0; x < k_; ++x) local[x] *= row[x];
        key += sub[i].keys[digits[i]];
      }
      out.keys[j] = key;
      T* target = &out.values[j * static_cast<std::uint64_t>(k_)];
      for (int a = 0; a < k_; ++a) {
        T acc(0);
        for (int b = 0; b < k_; ++b) acc += p[a][b] * local[b];
        target[a] = acc;
      }
    }
    return out;
  }

  int k_;
  std::vector<std::vector<int>> children_;
  std::vector<std::uint64_t> weights_;
  std::vector<std::uint64_t> radix_;
  std::vector<std::vector<T>> base_;
  std::vector<std::uint64_t> root_keys_;
  std::vector<Table> tables_;
  std::uint64_t total_ = 1;
};

std::uint64_t block_count(std::uint64_t total) { return (total + kBlockSize - 1) / kBlockSize; }

int thread_count(Execution execution) {
#ifdef _OPENMP
  return execution == Execution::parallel ? omp_get_max_threads() : 1;
#else
  (void)execution;
  return 1;
#endif
}

template <class T>
Materialized<T> sort_by_key(std::vector<std::pair<std::uint64_t, T>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Materialized<T> out;
  out.keys.reserve(entries.size());
  out.probs.reserve(entries.size());
  for (auto& [key, p] : entries) {
    out.keys.push_back(key);
    out.probs.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::uint64_t TreeModel::pattern_count() const {
  return saturating_power(static_cast<std::uint64_t>(observed_size), observed_sites);
}

TreeModel tree_model(const MarkovSpec& inner, const std::vector<int>& emit, int observed_size, const WordSet& support) {
  if (support.empty()) throw InvalidArgument("empty support set");
  const WordSet sorted = normalize_set(support);
  const Word shift = inverse(sorted.front());
  WordSet moved;
  moved.reserve(sorted.size());
  for (const auto& g : sorted) moved.push_back(multiply(shift, g));
  const WordSet hull = prefix_hull(moved);

  std::unordered_map<Word, int, WordHash> id;
  for (std::size_t i = 0; i < hull.size(); ++i) id.emplace(hull[i], static_cast<int>(i));
  const std::size_t n = hull.size();
  std::vector<int> place(n, -1);
  for (std::size_t i = 0; i < moved.size(); ++i) place[id.at(moved[i])] = static_cast<int>(i);

  // Undirected tree: hull[v] and its right parent differ by the last letter.
  struct Edge {
    int to;
    int letter;
  };
  std::vector<std::vector<Edge>> adjacent(n);
  std::vector<int> up(n, -1);
  for (std::size_t v = 1; v < n; ++v) {
    const Letter s = hull[v].last();
    const int u = id.at(hull[v].drop_last());
    up[v] = u;
    adjacent[u].push_back({static_cast<int>(v), s.index});
    adjacent[v].push_back({u, inverse(s).index});
  }

  // Centroid by observed-site counts (hull is sorted by length, so parents come first).
  std::vector<int> below(n, 0);
  for (std::size_t v = n; v-- > 0;) {
    below[v] += place[v] >= 0 ? 1 : 0;
    if (up[v] >= 0) below[up[v]] += below[v];
  }
  const int total = below[0];
  int root = 0;
  int best = std::numeric_limits<int>::max();
  for (std::size_t v = 0; v < n; ++v) {
    int worst = total - below[v];
    for (const auto& e : adjacent[v]) {
      if (e.to != up[v]) worst = std::max(worst, below[e.to]);
    }
    if (worst < best) {
      best = worst;
      root = static_cast<int>(v);
    }
  }

  TreeModel m;
  m.inner_size = static_cast<int>(inner.alphabet.size());
  m.observed_size = observed_size;
  m.emit = emit;
  m.prior = inner.stationary;
  m.transitions = inner.transitions;
  m.observed_sites = static_cast<int>(moved.size());
  std::vector<int> order_id(n, -1);
  std::vector<int> queue{root};
  order_id[root] = 0;
  m.vertices.push_back({-1, -1, place[root]});
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (const auto& e : adjacent[u]) {
      if (order_id[e.to] >= 0) continue;
      order_id[e.to] = static_cast<int>(m.vertices.size());
      m.vertices.push_back({order_id[u], e.letter, place[e.to]});
      queue.push_back(e.to);
    }
  }
  return m;
}

StreamResult stream_entropy(const TreeModel& model, Execution execution, std::uint64_t table_cap) {
  const Prepared<double> prep(model, table_cap);
  const std::uint64_t blocks = block_count(prep.total());
  std::vector<CompensatedSum> h(blocks);
  std::vector<CompensatedSum> mass(blocks);
  const auto nblocks = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(execution))
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * kBlockSize;
    const std::uint64_t last = std::min(prep.total(), first + kBlockSize);
    CompensatedSum hb;
    CompensatedSum mb;
    prep.run(first, last, [&](std::uint64_t, double p) {
      if (p > 0.0) {
        hb.add(-p * std::log(p));
        mb.add(p);
      }
    });
    h[b] = hb;
    mass[b] = mb;
  }
  CompensatedSum ht;
  CompensatedSum mt;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    ht.add(h[b]);
    mt.add(mass[b]);
  }
  return {ht.value(), mt.value()};
}

Materialized<double> materialize_float(const TreeModel& model, Execution execution, std::uint64_t table_cap) {
  const Prepared<double> prep(model, table_cap);
  const std::uint64_t blocks = block_count(prep.total());
  std::vector<std::vector<std::pair<std::uint64_t, double>>> parts(blocks);
  const auto nblocks = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(execution))
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * kBlockSize;
    const std::uint64_t last = std::min(prep.total(), first + kBlockSize);
    prep.run(first, last, [&](std::uint64_t key, double p) {
      if (p > 0.0) parts[b].emplace_back(key, p);
    });
  }
  std::vector<std::pair<std::uint64_t, double>> all;
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return sort_by_key(std::move(all));
}

Materialized<Rational> materialize_exact(const TreeModel& model, std::uint64_t table_cap) {
  const Prepared<Rational> prep(model, table_cap);
  std::vector<std::pair<std::uint64_t, Rational>> all;
  prep.run(0, prep.total(), [&](std::uint64_t key, const Rational& p) {
    if (positive(p)) all.emplace_back(key, p);
  });
  return sort_by_key(std::move(all));
}

namespace {

class Reference {
 public:
  explicit Reference(const TreeModel& m) : m_(m), children_(children_of(m)), labels_(m.vertices.size()) {}

  void assign(std::uint64_t key) {
    std::vector<int> y(static_cast<std::size_t>(m_.observed_sites));
    for (int i = m_.observed_sites - 1; i >= 0; --i) {
      y[i] = static_cast<int>(key % static_cast<std::uint64_t>(m_.observed_size));
      key /= static_cast<std::uint64_t>(m_.observed_size);
    }
    for (std::size_t v = 0; v < labels_.size(); ++v) labels_[v] = m_.vertices[v].place >= 0 ? y[m_.vertices[v].place] : -1;
  }

  double probability() const {
    double p = 0.0;
    for (int x = 0; x < m_.inner_size; ++x) {
      if (!emits(0, x)) continue;
      double term = m_.prior[x].get_d();
      for (int c : children_[0]) term *= message(c, x);
      p += term;
    }
    return p;
  }

 private:
  bool emits(int v, int x) const { return labels_[v] < 0 || m_.emit[x] == labels_[v]; }

  double message(int v, int parent_label) const {
    const Matrix& P = m_.transitions[m_.vertices[v].transition];
    double sum = 0.0;
    for (int x = 0; x < m_.inner_size; ++x) {
      if (!emits(v, x)) continue;
      double term = P[parent_label][x].get_d();
      if (term == 0.0) continue;
      for (int c : children_[v]) term *= message(c, x);
      sum += term;
    }
    return sum;
  }

  const TreeModel& m_;
  std::vector<std::vector<int>> children_;
  std::vector<int> labels_;
};

}  // namespace

StreamResult reference_entropy(const TreeModel& model) {
  const std::uint64_t total = model.pattern_count();
  if (total == std::numeric_limits<std::uint64_t>::max()) throw CapExceeded("pattern count overflows");
  Reference ref(model);
  CompensatedSum h;
  CompensatedSum mass;
  for (std::uint64_t key = 0; key < total; ++key) {
    ref.assign(key);
    const double p = ref.probability();
    if (p > 0.0) {
      h.add(-p * std::log(p));
      mass.add(p);
    }
  }
  return {h.value(), mass.value()};
}

Materialized<double> reference_materialize(const TreeModel& model) {
  const std::uint64_t total = model.pattern_count();
  if (total == std::numeric_limits<std::uint64_t>::max()) throw CapExceeded("pattern count overflows");
  Reference ref(model);
  Materialized<double> out;
  for (std::uint64_t key = 0; key < total; ++key) {
    ref.assign(key);
    const double p = ref.probability();
    if (p > 0.0) {
      out.keys.push_back(key);
      out.probs.push_back(p);
    }
  }
  return out;
}

}  // namespace fent
