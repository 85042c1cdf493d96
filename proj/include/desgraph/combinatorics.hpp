#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "desgraph/rng.hpp"

namespace desgraph {

/// square[row][col] with symbols 0..t-1.
using Square = std::vector<std::vector<std::size_t>>;

Square cyclic_latin_square(std::size_t t);
bool is_latin_square(const Square& s);
/// Every ordered symbol pair appears exactly once when superimposed.
bool are_orthogonal(const Square& a, const Square& b);

bool is_prime(std::size_t n);
/// (p, m) with q = p^m, or nullopt.
std::optional<std::pair<std::size_t, std::size_t>> prime_power(std::size_t q);

/// Arithmetic in GF(p^m); elements are 0..q-1 read as base-p digit vectors.
class GaloisField {
 public:
  explicit GaloisField(std::size_t q);  // throws InvalidParams if not a prime power

  std::size_t order() const { return q_; }
  std::size_t add(std::size_t a, std::size_t b) const { return add_[a * q_ + b]; }
  std::size_t mul(std::size_t a, std::size_t b) const { return mul_[a * q_ + b]; }

 private:
  std::size_t q_;
  std::vector<std::size_t> add_;
  std::vector<std::size_t> mul_;
};

/// `count` mutually orthogonal Latin squares of order t. Prime powers use
/// the finite-field squares a*i + j; other orders use the cyclic squares
/// a*i + j mod t for a = 1..count, valid when every prime factor of t
/// exceeds count. Throws InvalidParams when neither applies.
std::vector<Square> mols(std::size_t t, std::size_t count);

struct BibdParams {
  std::size_t t = 0;  // treatments
  std::size_t k = 0;  // block size
  std::size_t r = 0;  // replicates
  std::size_t b = 0;  // blocks
  std::size_t lambda = 0;
};

/// Necessary conditions: 2 <= k < t, r(k-1) divisible by t-1, rt divisible
/// by k, and b >= t.
std::optional<BibdParams> bibd_params(std::size_t t, std::size_t k, std::size_t r);

using Blocks = std::vector<std::vector<std::size_t>>;

/// Randomised hill climbing over block incidence. Returns nullopt if no
/// balanced design was reached within the iteration budget.
std::optional<Blocks> search_bibd(const BibdParams& params, Rng& rng,
                                  std::size_t restarts = 200, std::size_t iterations = 20000);
bool is_bibd(const Blocks& blocks, std::size_t t, std::size_t lambda);

/// A (t, k, lambda) cyclic difference set, found by exhaustive search.
std::optional<std::vector<std::size_t>> difference_set(std::size_t t, std::size_t k);

/// t rows by nc columns: the columns of the cyclic Latin square selected by a
/// difference set. Throws InvalidParams when none exists.
Square youden_square(std::size_t t, std::size_t nc);

}  // namespace desgraph
