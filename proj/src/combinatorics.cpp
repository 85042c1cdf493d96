#include "desgraph/combinatorics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "desgraph/error.hpp"

namespace desgraph {

Square cyclic_latin_square(std::size_t t) {
  Square s(t, std::vector<std::size_t>(t));
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) s[i][j] = (i + j) % t;
  }
  return s;
}

bool is_latin_square(const Square& s) {
  const std::size_t t = s.size();
  for (const auto& row : s) {
    if (row.size() != t) return false;
  }
  for (std::size_t i = 0; i < t; ++i) {
    std::vector<bool> in_row(t, false), in_col(t, false);
    for (std::size_t j = 0; j < t; ++j) {
      if (s[i][j] >= t || in_row[s[i][j]] || s[j][i] >= t || in_col[s[j][i]]) return false;
      in_row[s[i][j]] = true;
      in_col[s[j][i]] = true;
    }
  }
  return true;
}

bool are_orthogonal(const Square& a, const Square& b) {
  const std::size_t t = a.size();
  if (b.size() != t) return false;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      if (!pairs.emplace(a[i][j], b[i][j]).second) return false;
    }
  }
  return pairs.size() == t * t;
}

bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

std::optional<std::pair<std::size_t, std::size_t>> prime_power(std::size_t q) {
  if (q < 2) return std::nullopt;
  std::size_t p = 2;
  while (q % p != 0) ++p;
  std::size_t m = 0;
  while (q % p == 0) {
    q /= p;
    ++m;
  }
  if (q != 1) return std::nullopt;
  return std::make_pair(p, m);
}

namespace {

using Poly = std::vector<std::size_t>;  // coefficients, lowest degree first

Poly poly_mod(Poly a, const Poly& m, std::size_t p) {
  while (a.size() >= m.size()) {
    const std::size_t lead = a.back();
    const std::size_t shift = a.size() - m.size();
    // m is monic, so subtract lead * x^shift * m.
    for (std::size_t i = 0; i < m.size(); ++i) {
      a[shift + i] = (a[shift + i] + p * p - (lead * m[i]) % p) % p;
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  return a;
}

Poly to_poly(std::size_t value, std::size_t p, std::size_t digits) {
  Poly out(digits, 0);
  for (std::size_t i = 0; i < digits; ++i) {
    out[i] = value % p;
    value /= p;
  }
  return out;
}

bool irreducible(const Poly& f, std::size_t p) {
  const std::size_t deg = f.size() - 1;
  for (std::size_t d = 1; d <= deg / 2; ++d) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::size_t code = 0; code < count; ++code) {
      Poly g = to_poly(code, p, d);
      g.push_back(1);
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace

GaloisField::GaloisField(std::size_t q) : q_(q), add_(q * q), mul_(q * q) {
  const auto pm = prime_power(q);
  if (!pm) throw DesignError(ErrorKind::InvalidParams, std::to_string(q) + " is not a prime power");
  const auto [p, m] = *pm;

  Poly modulus;
  for (std::size_t code = 0; code < q; ++code) {
    Poly f = to_poly(code, p, m);
    f.push_back(1);
    if (irreducible(f, p)) {
      modulus = f;
      break;
    }
  }
  auto from_poly = [&](const Poly& a) {
    std::size_t v = 0;
    for (std::size_t i = a.size(); i-- > 0;) v = v * p + a[i];
    return v;
  };
  for (std::size_t a = 0; a < q; ++a) {
    const Poly pa = to_poly(a, p, m);
    for (std::size_t b = 0; b < q; ++b) {
      const Poly pb = to_poly(b, p, m);
      Poly sum(m);
      for (std::size_t i = 0; i < m; ++i) sum[i] = (pa[i] + pb[i]) % p;
      add_[a * q + b] = from_poly(sum);
      Poly prod(2 * m, 0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + pa[i] * pb[j]) % p;
      }
      while (!prod.empty() && prod.back() == 0) prod.pop_back();
      mul_[a * q + b] = from_poly(poly_mod(prod, modulus, p));
    }
  }
}

std::vector<Square> mols(std::size_t t, std::size_t count) {
  if (t < 2 || count == 0) throw DesignError(ErrorKind::InvalidParams, "need t >= 2 and at least one square");
  std::vector<Square> out;
  if (prime_power(t) && count <= t - 1) {
    const GaloisField gf(t);
    for (std::size_t a = 1; a <= count; ++a) {
      Square s(t, std::vector<std::size_t>(t));
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) s[i][j] = gf.add(gf.mul(a, i), j);
      }
      out.push_back(std::move(s));
    }
    return out;
  }
  std::size_t n = t, smallest = t;
  for (std::size_t p = 2; p <= n; ++p) {
    if (n % p == 0) {
      smallest = std::min(smallest, p);
      while (n % p == 0) n /= p;
    }
  }
  if (smallest <= count) {
    throw DesignError(ErrorKind::InvalidParams, "no construction for " + std::to_string(count) +
                                                    " orthogonal Latin squares of order " + std::to_string(t));
  }
  for (std::size_t a = 1; a <= count; ++a) {
    Square s(t, std::vector<std::size_t>(t));
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = 0; j < t; ++j) s[i][j] = (a * i + j) % t;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<BibdParams> bibd_params(std::size_t t, std::size_t k, std::size_t r) {
  if (k < 2 || k >= t || r == 0) return std::nullopt;
  if ((r * (k - 1)) % (t - 1) != 0 || (r * t) % k != 0) return std::nullopt;
  BibdParams p{t, k, r, r * t / k, r * (k - 1) / (t - 1)};
  if (p.b < t || p.lambda == 0) return std::nullopt;
  return p;
}

namespace {

class PairState {
 public:
  PairState(std::size_t t, long lambda) : t_(t), lambda_(lambda), counts_(t * t, 0) {}

  void change(std::size_t a, std::size_t b, long delta) {
    if (a > b) std::swap(a, b);
    long& c = counts_[a * t_ + b];
    const long before = (c - lambda_) * (c - lambda_);
    c += delta;
    cost_ += (c - lambda_) * (c - lambda_) - before;
  }

  void block(const std::vector<std::size_t>& blk, long delta) {
    for (std::size_t i = 0; i < blk.size(); ++i) {
      for (std::size_t j = i + 1; j < blk.size(); ++j) change(blk[i], blk[j], delta);
    }
  }

  void reset_cost() {
    cost_ = 0;
    for (std::size_t a = 0; a < t_; ++a) {
      for (std::size_t b = a + 1; b < t_; ++b) {
        const long c = counts_[a * t_ + b] - lambda_;
        cost_ += c * c;
      }
    }
  }

  long cost() const { return cost_; }

 private:
  std::size_t t_;
  long lambda_;
  std::vector<long> counts_;
  long cost_ = 0;
};

std::optional<Blocks> greedy_blocks(const BibdParams& p, Rng& rng) {
  std::vector<std::size_t> remaining(p.t, p.r);
  Blocks blocks;
  for (std::size_t b = 0; b < p.b; ++b) {
    std::vector<std::size_t> order(p.t);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return remaining[x] > remaining[y]; });
    std::vector<std::size_t> blk(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(p.k));
    for (std::size_t x : blk) {
      if (remaining[x] == 0) return std::nullopt;
      --remaining[x];
    }
    std::sort(blk.begin(), blk.end());
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

}  // namespace

std::optional<Blocks> search_bibd(const BibdParams& p, Rng& rng, std::size_t restarts,
                                  std::size_t iterations) {
  for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
    auto init = greedy_blocks(p, rng);
    if (!init) continue;
    Blocks blocks = std::move(*init);
    PairState state(p.t, static_cast<long>(p.lambda));
    state.reset_cost();
    for (const auto& blk : blocks) state.block(blk, 1);
    for (std::size_t it = 0; it < iterations && state.cost() > 0; ++it) {
      const std::size_t a = rng.below(p.b), b = rng.below(p.b);
      if (a == b) continue;
      const std::size_t xi = rng.below(p.k), yi = rng.below(p.k);
      const std::size_t x = blocks[a][xi], y = blocks[b][yi];
      if (x == y) continue;
      if (std::find(blocks[b].begin(), blocks[b].end(), x) != blocks[b].end()) continue;
      if (std::find(blocks[a].begin(), blocks[a].end(), y) != blocks[a].end()) continue;
      const long before = state.cost();
      auto apply = [&](std::size_t from, std::size_t to) {
        for (std::size_t i = 0; i < p.k; ++i) {
          if (i != xi) {
            state.change(from, blocks[a][i], -1);
            state.change(to, blocks[a][i], 1);
          }
          if (i != yi) {
            state.change(to, blocks[b][i], -1);
            state.change(from, blocks[b][i], 1);
          }
        }
      };
      apply(x, y);
      if (state.cost() <= before) {
        blocks[a][xi] = y;
        blocks[b][yi] = x;
      } else {
        apply(y, x);
      }
    }
    if (state.cost() == 0) {
      for (auto& blk : blocks) std::sort(blk.begin(), blk.end());
      return blocks;
    }
  }
  return std::nullopt;
}

bool is_bibd(const Blocks& blocks, std::size_t t, std::size_t lambda) {
  std::vector<std::size_t> pairs(t * t, 0), reps(t, 0);
  for (const auto& blk : blocks) {
    std::set<std::size_t> unique(blk.begin(), blk.end());
    if (unique.size() != blk.size() || blk.size() != blocks.front().size()) return false;
    for (std::size_t x : blk) {
      if (x >= t) return false;
      ++reps[x];
    }
    for (std::size_t i = 0; i < blk.size(); ++i) {
      for (std::size_t j = 0; j < blk.size(); ++j) {
        if (i != j) ++pairs[blk[i] * t + blk[j]];
      }
    }
  }
  for (std::size_t a = 0; a < t; ++a) {
    if (reps[a] != reps[0]) return false;
    for (std::size_t b = 0; b < t; ++b) {
      if (a != b && pairs[a * t + b] != lambda) return false;
    }
  }
  return true;
}

namespace {

bool extend(std::vector<std::size_t>& chosen, std::size_t next, std::size_t t, std::size_t k,
            std::size_t lambda, std::vector<std::size_t>& diffs) {
  if (chosen.size() == k) {
    return std::all_of(diffs.begin() + 1, diffs.end(), [&](std::size_t c) { return c == lambda; });
  }
  for (std::size_t x = next; x < t; ++x) {
    bool ok = true;
    for (std::size_t y : chosen) {
      const std::size_t d1 = (x + t - y) % t, d2 = (y + t - x) % t;
      ++diffs[d1];
      ++diffs[d2];
      if (diffs[d1] > lambda || diffs[d2] > lambda) ok = false;
    }
    if (ok) {
      chosen.push_back(x);
      if (extend(chosen, x + 1, t, k, lambda, diffs)) return true;
      chosen.pop_back();
    }
    for (std::size_t y : chosen) {
      --diffs[(x + t - y) % t];
      --diffs[(y + t - x) % t];
    }
  }
  return false;
}

}  // namespace

std::optional<std::vector<std::size_t>> difference_set(std::size_t t, std::size_t k) {
  if (k < 2 || k >= t || (k * (k - 1)) % (t - 1) != 0) return std::nullopt;
  const std::size_t lambda = k * (k - 1) / (t - 1);
  std::vector<std::size_t> chosen{0};
  std::vector<std::size_t> diffs(t, 0);
  if (extend(chosen, 1, t, k, lambda, diffs)) return chosen;
  return std::nullopt;
}

Square youden_square(std::size_t t, std::size_t nc) {
  if (nc < 2 || nc >= t) {
    throw DesignError(ErrorKind::InvalidParams, "a Youden square needs 2 <= nc < t");
  }
  const auto ds = difference_set(t, nc);
  if (!ds) {
    throw DesignError(ErrorKind::InvalidParams, "no cyclic Youden square with t = " + std::to_string(t) +
                                                    " and nc = " + std::to_string(nc));
  }
  Square s(t, std::vector<std::size_t>(nc));
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t c = 0; c < nc; ++c) s[i][c] = (i + (*ds)[c]) % t;
  }
  return s;
}

}  // namespace desgraph
