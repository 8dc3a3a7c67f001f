#pragma once
// Brute-force reference computations used to freeze derived values in tests.
// Nothing here calls the structural algorithms under test.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pantswork/endspace.hpp"

namespace oracle {

using pw::ordinal::EndNode;
using pw::ordinal::Forest;
using pw::ordinal::Generator;
using pw::ordinal::Ordinal;

// Finite truncation of an encoding: every generator materializes its prefix
// and two full copies of its cycle; a limit point counts as surviving a
// derivation when the second copy (the "tail window") still meets the set.
struct Truncation {
  struct Point {
    std::string id;   // template id plus instance path
    bool limit = false;
    std::vector<int> window;  // points inside the tail window
  };
  std::vector<Point> points;

  explicit Truncation(const Forest& roots) {
    for (const auto& n : roots) add(n, "");
  }

 private:
  std::vector<int> add_forest(const Forest& f, const std::string& path) {
    std::vector<int> all;
    for (const auto& n : f) {
      auto sub = add(n, path);
      all.insert(all.end(), sub.begin(), sub.end());
    }
    return all;
  }

  // Returns every point materialized under n, n first.
  std::vector<int> add(const EndNode& n, const std::string& path) {
    int self = static_cast<int>(points.size());
    points.push_back({n.id + path, false, {}});
    std::vector<int> all{self};
    auto absorb = [&](const std::vector<int>& v) { all.insert(all.end(), v.begin(), v.end()); };
    absorb(add_forest(n.children, path));
    if (!n.gen) return all;
    const Generator& g = *n.gen;
    if (g.kind == Generator::Kind::Periodic) {
      for (std::size_t i = 0; i < g.prefix.size(); ++i)
        absorb(add_forest(g.prefix[i], path + "#p" + std::to_string(i)));
      std::vector<int> window;
      for (int copy = 0; copy < 2; ++copy) {
        for (std::size_t i = 0; i < g.cycle.size(); ++i) {
          auto sub = add_forest(g.cycle[i], path + "#c" + std::to_string(copy) + "." + std::to_string(i));
          if (copy == 1) window.insert(window.end(), sub.begin(), sub.end());
          absorb(sub);
        }
      }
      points[static_cast<std::size_t>(self)].window = window;
      points[static_cast<std::size_t>(self)].limit = !window.empty();
    } else if (g.kind == Generator::Kind::Rank) {
      std::uint64_t eta = g.eta.finite_value();  // oracle handles finite ranks only
      if (eta == 0) return all;
      std::vector<int> window;
      for (int copy = 0; copy < 2; ++copy) {
        EndNode child = EndNode::leaf("r", g.genus);
        if (eta > 1) child.gen = Generator::rank(Ordinal::finite(eta - 1), g.genus);
        auto sub = add(child, path + "#" + n.id + "r" + std::to_string(copy));
        if (copy == 1) window = sub;
        absorb(sub);
      }
      points[static_cast<std::size_t>(self)].window = window;
      points[static_cast<std::size_t>(self)].limit = true;
    }
    return all;
  }
};

struct BruteRank {
  std::uint64_t nu = 0;
  std::uint64_t n = 0;
  std::vector<std::size_t> sizes;  // |D^k| for k = 0, 1, ...
};

inline std::vector<char> derive_once(const Truncation& t, const std::vector<char>& alive) {
  std::vector<char> next(alive.size(), 0);
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (!alive[i] || !t.points[i].limit) continue;
    for (int w : t.points[i].window)
      if (alive[static_cast<std::size_t>(w)]) {
        next[i] = 1;
        break;
      }
  }
  return next;
}

// Iterates derivation on the truncation until empty.
inline BruteRank brute_rank(const Forest& roots) {
  Truncation t(roots);
  std::vector<char> alive(t.points.size(), 1);
  BruteRank r;
  for (;;) {
    std::size_t size = 0;
    for (char a : alive) size += static_cast<std::size_t>(a);
    if (size == 0) break;
    r.sizes.push_back(size);
    alive = derive_once(t, alive);
  }
  if (!r.sizes.empty()) {
    r.nu = r.sizes.size() - 1;
    r.n = r.sizes.back();
  }
  return r;
}

// Template ids of the points surviving k derivations in the truncation.
inline std::set<std::string> brute_survivor_templates(const Forest& roots, int k) {
  Truncation t(roots);
  std::vector<char> alive(t.points.size(), 1);
  for (int i = 0; i < k; ++i) alive = derive_once(t, alive);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < alive.size(); ++i)
    if (alive[i]) ids.insert(t.points[i].id.substr(0, t.points[i].id.find('#')));
  return ids;
}

// Random encodings with point ranks at most max_rank.
class RandomEncoding {
 public:
  RandomEncoding(std::uint64_t seed, std::size_t node_budget) : rng_(seed), budget_(node_budget) {}

  Forest make(int max_rank) {
    Forest f;
    int roots = 1 + static_cast<int>(rng_() % 3);
    for (int i = 0; i < roots && used_ < budget_; ++i) f.push_back(node(max_rank, 4));
    return f;
  }

  std::size_t used() const { return used_; }

 private:
  Forest forest(int max_rank, int depth, int max_len) {
    Forest f;
    int len = static_cast<int>(rng_() % static_cast<unsigned>(max_len + 1));
    for (int i = 0; i < len && used_ < budget_; ++i) f.push_back(node(max_rank, depth));
    return f;
  }

  EndNode node(int max_rank, int depth) {
    EndNode n = EndNode::leaf("n" + std::to_string(next_id_++), rng_() % 5 == 0);
    ++used_;
    if (depth == 0 || used_ >= budget_) return n;
    switch (rng_() % 4) {
      case 0:
        return n;
      case 1:
        n.children = forest(max_rank, depth - 1, 3);
        return n;
      case 2: {
        if (max_rank == 0) return n;
        std::vector<Forest> prefix, cycle;
        int p = static_cast<int>(rng_() % 3), c = 1 + static_cast<int>(rng_() % 3);
        for (int i = 0; i < p; ++i) prefix.push_back(forest(max_rank, depth - 1, 2));
        for (int i = 0; i < c; ++i) cycle.push_back(forest(max_rank - 1, depth - 1, 2));
        n.gen = Generator::periodic(std::move(prefix), std::move(cycle));
        n.genus = n.genus || pw::ordinal::has_genus(n.gen->cycle.empty() ? Forest{} : flatten(n.gen->cycle));
        return n;
      }
      default: {
        if (max_rank == 0) return n;
        std::uint64_t eta = 1 + rng_() % static_cast<unsigned>(max_rank);
        bool g = rng_() % 4 == 0;
        n.gen = Generator::rank(Ordinal::finite(eta), g);
        n.genus = n.genus || g;
        return n;
      }
    }
  }

  static Forest flatten(const std::vector<Forest>& parts) {
    Forest out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  std::mt19937_64 rng_;
  std::size_t budget_;
  std::size_t used_ = 0;
  int next_id_ = 0;
};

}  // namespace oracle
